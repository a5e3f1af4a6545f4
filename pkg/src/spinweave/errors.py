"""Exception types mapped to CLI exit codes (2: config, 3: numerics, 4: I/O)."""


class SpinweaveError(Exception):
    pass


class ValidationError(SpinweaveError, ValueError):
    """Invalid argument or configuration value; the message names the field."""


class NumericError(SpinweaveError, RuntimeError):
    """A numerical routine failed to produce a usable result."""


class ResourceLimitError(SpinweaveError, RuntimeError):
    """Requested problem exceeds the dense-matrix size guard."""
