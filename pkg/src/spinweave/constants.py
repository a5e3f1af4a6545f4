"""Unit conventions shared by every module.

Energies are meV, times ps, magnetic fields tesla, temperatures kelvin.
Wavenumbers (cm^-1) appear only at module boundaries: nu[cm^-1] =
f[1/ps] / C_CM_PER_PS, and E[meV] * MEV_TO_CM1 gives the same number
because MEV_TO_CM1 = 1 / (2*pi*HBAR*C_CM_PER_PS).
"""

MU_B = 0.05788382        # Bohr magneton, meV/T
K_B = 0.08617333         # Boltzmann constant, meV/K
HBAR = 0.6582119         # reduced Planck constant, meV*ps
MEV_TO_CM1 = 8.065544    # 1 meV expressed in cm^-1
C_CM_PER_PS = 0.0299792458  # speed of light, cm/ps


def mev_to_cm1(energy_mev: float) -> float:
    return energy_mev * MEV_TO_CM1


def cm1_to_mev(nu_cm1: float) -> float:
    return nu_cm1 / MEV_TO_CM1


def omega_to_cm1(omega_rad_per_ps: float) -> float:
    """Angular frequency (rad/ps) to wavenumber (cm^-1)."""
    import math

    return omega_rad_per_ps / (2.0 * math.pi) / C_CM_PER_PS


def cm1_to_omega(nu_cm1: float) -> float:
    import math

    return nu_cm1 * C_CM_PER_PS * 2.0 * math.pi
