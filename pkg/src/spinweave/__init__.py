"""spinweave: exact-diagonalization simulator for optically pumped spin beats.

Small spin registers (donor electrons, magnetic impurities, an optional
exciton electron) are diagonalized exactly; an impulsive pump projects the
thermal state through the exciton sector and the probe signal is the sum of
the resulting quantum beats.  Companion modules estimate beat frequencies vs
magnetic field (Brillouin magnetization), fit damped sinusoids to traces
(matrix pencil), build Franck-Condon overtone ladders, and quantify the
entanglement the pump leaves behind.
"""

__version__ = "0.1.0"

from .dynamics import EnsembleSpec, PulseSpec, Trace, ensemble_simulate, pump, simulate
from .entangle import (
    Bipartition,
    SymmetricSuperposition,
    dicke_state,
    entanglement_report,
    negativity,
    partial_trace,
    superposition_state,
    vn_entropy,
)
from .errors import NumericError, ResourceLimitError, SpinweaveError, ValidationError
from .magnetics import (
    MagneticParams,
    brillouin,
    effective_g,
    estimate_exchange_chain,
    fit_field_dependence,
    predict_lines,
)
from .spectral import Mode, ModeSet, fft_spectrum, fit_damped_sinusoids, reconstruct
from .spinalg import embed, evolve, hermitian_eigen, spin_operators
from .system import SystemSpec, build_hamiltonians, thermal_state
from .vibronic import (
    VibronicSpec,
    franck_condon_matrix,
    huang_rhys_factor,
    impulsive_overtone_amplitudes,
    raman_overtone_ladder,
)

__all__ = [
    "__version__",
    "Bipartition",
    "EnsembleSpec",
    "MagneticParams",
    "Mode",
    "ModeSet",
    "NumericError",
    "PulseSpec",
    "ResourceLimitError",
    "SpinweaveError",
    "SymmetricSuperposition",
    "SystemSpec",
    "Trace",
    "ValidationError",
    "VibronicSpec",
    "brillouin",
    "build_hamiltonians",
    "dicke_state",
    "effective_g",
    "embed",
    "ensemble_simulate",
    "entanglement_report",
    "estimate_exchange_chain",
    "evolve",
    "fft_spectrum",
    "fit_damped_sinusoids",
    "fit_field_dependence",
    "franck_condon_matrix",
    "hermitian_eigen",
    "huang_rhys_factor",
    "impulsive_overtone_amplitudes",
    "negativity",
    "partial_trace",
    "predict_lines",
    "pump",
    "raman_overtone_ladder",
    "reconstruct",
    "simulate",
    "spin_operators",
    "superposition_state",
    "thermal_state",
    "vn_entropy",
]
