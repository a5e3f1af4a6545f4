"""Run configuration: a flat, strictly validated key=value text format.

Lines look like ``system.b_field = 7.0``.  Blank lines and ``#`` comments
(full-line or trailing) are ignored.  Every key must belong to the schema
below; unknown or duplicate keys are rejected with the offending name and
line number, so a config that loads cleanly is fully specified once the
defaults are materialized.

Sections:
  system.*    physical system (see SystemSpec)
  pulse.*     pump/detection settings (see PulseSpec)
  ensemble.*  disorder averaging; inactive unless a key is present or
              ensemble.enabled = true
  grid.*      time grid (t_max_ps, dt_ps)
  analysis.*  mode-fit settings (max_order = auto|int, sv_threshold)
  entangle.*  state source for entanglement reports (demo states or pump)
  output_dir  where the artifact files go
"""

from dataclasses import dataclass

from .dynamics import EnsembleSpec, PulseSpec
from .errors import ValidationError
from .system import SystemSpec


class ConfigError(ValidationError):
    """Invalid configuration; `key` names the offending field when known."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


def _parse_bool(raw: str):
    low = raw.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _parse_float(raw: str):
    return float(raw)


def _parse_int(raw: str):
    return int(raw)


def _parse_str(raw: str):
    return raw


def _auto_or_float(raw: str):
    return None if raw.lower() == "auto" else float(raw)


def _auto_or_int(raw: str):
    return None if raw.lower() == "auto" else int(raw)


def _none_or_float(raw: str):
    return None if raw.lower() in ("none", "off") else float(raw)


# key -> (value parser, default)
SCHEMA: dict = {
    "system.n_donors": (_parse_int, 3),
    "system.n_mn": (_parse_int, 2),
    "system.include_exciton_electron": (_parse_bool, True),
    "system.geometry": (_parse_str, "voigt"),
    "system.b_field": (_parse_float, 7.0),
    "system.temperature": (_parse_float, 1.6),
    "system.g_mn": (_parse_float, 2.0),
    "system.g_electron": (_auto_or_float, None),
    "system.b_e_per_ion": (_parse_float, 5.02),
    "system.b_e_donor": (_parse_float, 2.0),
    "system.delta_eh": (_parse_float, 0.27),
    "system.e_e": (_parse_float, 1677.0),
    "system.pump_photon_energy": (_parse_float, 1687.0),
    "system.resonance_linewidth": (_parse_float, 6.0),
    "pulse.epsilon": (_parse_float, 0.1),
    "pulse.detection_parity": (_parse_str, "all"),
    "pulse.parity_leak": (_parse_float, 0.1),
    "pulse.window": (_parse_str, "resonant"),
    "ensemble.enabled": (_parse_bool, False),
    "ensemble.n_realizations": (_parse_int, 16),
    "ensemble.be_mean": (_parse_float, 5.02),
    "ensemble.be_sigma": (_parse_float, 0.0),
    "ensemble.mn_count_mean": (_none_or_float, None),
    "ensemble.mn_max": (_parse_int, 4),
    "ensemble.seed": (_parse_int, 0),
    "grid.t_max_ps": (_parse_float, 20.0),
    "grid.dt_ps": (_parse_float, 0.02),
    "analysis.max_order": (_auto_or_int, None),
    "analysis.sv_threshold": (_parse_float, 1e-3),
    "entangle.state": (_parse_str, "pump"),
    "entangle.n_spins": (_parse_int, 2),
    "entangle.spin_s": (_parse_float, 0.5),
    "entangle.k": (_parse_int, 1),
    "entangle.sector": (_parse_str, "excited"),
    "output_dir": (_parse_str, "."),
}

_CHOICES = {
    "entangle.state": ("pump", "bell", "ghz", "w", "dicke"),
    "entangle.sector": ("excited", "ground"),
}


@dataclass
class RunConfig:
    system: SystemSpec
    pulse: PulseSpec
    ensemble: EnsembleSpec | None
    t_max_ps: float
    dt_ps: float
    max_order: int | None
    sv_threshold: float
    entangle: dict
    output_dir: str
    resolved: dict  # every schema key with defaults materialized

    def validate(self):
        self.system.validate()
        self.pulse.validate()
        if self.ensemble is not None:
            self.ensemble.validate()
        if self.dt_ps <= 0:
            raise ConfigError(
                f"grid.dt_ps must be > 0, got {self.dt_ps}", key="grid.dt_ps"
            )
        if self.t_max_ps <= self.dt_ps:
            raise ConfigError(
                f"grid.t_max_ps ({self.t_max_ps}) must exceed grid.dt_ps ({self.dt_ps})",
                key="grid.t_max_ps",
            )
        if self.max_order is not None and self.max_order < 1:
            raise ConfigError(
                f"analysis.max_order must be >= 1 or auto, got {self.max_order}",
                key="analysis.max_order",
            )
        if not 0 < self.sv_threshold < 1:
            raise ConfigError(
                f"analysis.sv_threshold must be in (0, 1), got {self.sv_threshold}",
                key="analysis.sv_threshold",
            )
        for key, choices in _CHOICES.items():
            section, name = key.split(".")
            if section == "entangle" and self.entangle[name] not in choices:
                raise ConfigError(
                    f"{key} must be one of {choices}, got {self.entangle[name]!r}",
                    key=key,
                )
        if self.entangle["n_spins"] < 2:
            raise ConfigError(
                "entangle.n_spins must be >= 2", key="entangle.n_spins"
            )


def parse_pairs(text: str) -> dict:
    """Raw dotted-key -> string pairs from config text; strict about format."""
    pairs: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: missing key before '='")
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}", key=key)
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}", key=key)
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}", key=key)
        pairs[key] = value
    return pairs


def _collect(values: dict, section: str) -> dict:
    prefix = section + "."
    return {k[len(prefix):]: v for k, v in values.items() if k.startswith(prefix)}


def build_config(pairs: dict) -> RunConfig:
    """Typed, validated RunConfig from raw string pairs; defaults materialized."""
    values = {}
    for key, (parse, default) in SCHEMA.items():
        if key in pairs:
            try:
                values[key] = parse(pairs[key])
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {exc}", key=key) from None
        else:
            values[key] = default

    ensemble_given = any(
        k.startswith("ensemble.") and k != "ensemble.enabled" for k in pairs
    )
    enabled = values["ensemble.enabled"] or (
        ensemble_given and "ensemble.enabled" not in pairs
    )
    values["ensemble.enabled"] = enabled

    try:
        system = SystemSpec(**_collect(values, "system"))
        pulse = PulseSpec(**_collect(values, "pulse"))
        ensemble = None
        if enabled:
            kwargs = _collect(values, "ensemble")
            kwargs.pop("enabled")
            ensemble = EnsembleSpec(**kwargs)
        config = RunConfig(
            system=system,
            pulse=pulse,
            ensemble=ensemble,
            t_max_ps=values["grid.t_max_ps"],
            dt_ps=values["grid.dt_ps"],
            max_order=values["analysis.max_order"],
            sv_threshold=values["analysis.sv_threshold"],
            entangle=_collect(values, "entangle"),
            output_dir=values["output_dir"],
            resolved=values,
        )
        config.validate()
    except ConfigError:
        raise
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None
    return config


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return build_config(parse_pairs(text))


def default_config() -> RunConfig:
    return build_config({})
