"""Displaced-oscillator overlap tables and the impulsive harmonic-mode protocol.

The collective Mn spin coupled to the exciton behaves like a harmonic mode
whose excited-state surface is displaced by the exchange field.  The
coupling strength is the Huang-Rhys factor

    S_HR = S_tot / (2 (1 + B^2 / B_e^2))

and the overlap of ground oscillator level m with displaced level n is the
Franck-Condon matrix element <m|D(lambda)|n>, lambda = sqrt(S_HR).
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_CM_PER_PS, HBAR, MEV_TO_CM1
from .errors import ValidationError


@dataclass
class VibronicSpec:
    huang_rhys: float
    n_levels: int = 40
    thermal_occupation: float = 0.0

    def validate(self) -> None:
        if self.huang_rhys < 0:
            raise ValidationError(f"huang_rhys must be >= 0, got {self.huang_rhys}")
        if self.n_levels < 2:
            raise ValidationError(f"n_levels must be >= 2, got {self.n_levels}")
        if self.thermal_occupation < 0:
            raise ValidationError("thermal_occupation must be >= 0")


def huang_rhys_factor(s_total: float, b_field: float, b_e: float) -> float:
    """S_HR = S_tot / (2 (1 + B^2/B_e^2)); zero exchange field gives zero."""
    if s_total < 0:
        raise ValidationError(f"s_total must be >= 0, got {s_total}")
    if b_field < 0 or b_e < 0:
        raise ValidationError("fields must be >= 0")
    if b_e == 0:
        if b_field == 0:
            return s_total / 2.0
        return 0.0
    return s_total / (2.0 * (1.0 + (b_field / b_e) ** 2))


def _displacement_matrix(lam: float, n: int) -> np.ndarray:
    """Matrix <m|D(lam)|n> for m, n < n via the stable two-term recurrence.

    Seeds M[0,0] = exp(-lam^2/2); then
        sqrt(n+1) M[m, n+1] = sqrt(m) M[m-1, n] - lam M[m, n]
        sqrt(m+1) M[m+1, n] = sqrt(n) M[m, n-1] + lam M[m, n]
    The first column is the Poisson amplitude lam^m exp(-lam^2/2)/sqrt(m!).
    """
    m = np.zeros((n, n))
    m[0, 0] = math.exp(-0.5 * lam * lam)
    for col in range(1, n):
        m[0, col] = -lam * m[0, col - 1] / math.sqrt(col)
    for row in range(1, n):
        m[row, 0] = lam * m[row - 1, 0] / math.sqrt(row)
        for col in range(1, n):
            m[row, col] = (
                math.sqrt(col) * m[row - 1, col - 1] + lam * m[row - 1, col]
            ) / math.sqrt(row)
    return m


def franck_condon_matrix(spec: VibronicSpec) -> np.ndarray:
    """Franck-Condon overlap table for the displaced oscillator pair.

    Raises when the truncation is inadequate: every row below n_levels/2
    must carry squared norm >= 1 - 1e-6.
    """
    spec.validate()
    lam = math.sqrt(spec.huang_rhys)
    m = _displacement_matrix(lam, spec.n_levels)
    half = max(1, spec.n_levels // 2)
    norms = np.sum(m[:half] ** 2, axis=1)
    if np.any(norms < 1.0 - 1e-6):
        bad = int(np.argmin(norms))
        raise ValidationError(
            f"franck_condon_matrix truncated too hard: row {bad} norm "
            f"{norms[bad]:.8f} < 1 - 1e-6; increase n_levels"
        )
    return m


def raman_overtone_ladder(spec: VibronicSpec, k_max: int = 10) -> dict[str, np.ndarray]:
    """Overtone intensities I_k = |<k|D|0>|^2 and their ratio to the fundamental.

    I_k follows the Poisson law exp(-S) S^k / k!, so the ladder peaks near
    k = S_HR and decays monotonically beyond it.
    """
    spec.validate()
    if not 1 <= k_max < spec.n_levels:
        raise ValidationError(
            f"k_max must be in [1, n_levels), got {k_max} with n_levels {spec.n_levels}"
        )
    fc = franck_condon_matrix(spec)
    intensity = fc[: k_max + 1, 0] ** 2
    fundamental = intensity[1]
    if fundamental > 0:
        ratio = intensity / fundamental
    else:
        ratio = np.zeros_like(intensity)
    return {
        "k": np.arange(k_max + 1),
        "intensity": intensity,
        "ratio_to_fundamental": ratio,
    }


def impulsive_overtone_amplitudes(
    spec: VibronicSpec,
    epsilon: float = 0.1,
    quantum_mev: float = 1.0,
    k_max: int = 4,
    t_max_ps: float = 40.0,
    dt_ps: float = 0.05,
) -> dict[str, np.ndarray]:
    """Sudden pump-probe run on the displaced oscillator pair.

    Both surfaces share one quantum, so every eigenvalue gap is a multiple
    of it.  The pump copies the thermal ground state through the overlap
    matrix; the probe reads each sector through its transition-energy
    fluctuation operator (V H_g V^dag - H_e and V^dag H_e V - H_g), the
    discrete analog of following the first moment of a vibronic band.  For
    a harmonic mode that operator is linear in the displacement, so the
    trace oscillates at the fundamental only, whatever S_HR is.

    Returns least-squares beat amplitudes at k = 1..k_max for each sector.
    """
    spec.validate()
    if not 0 <= epsilon <= 0.5:
        raise ValidationError(f"epsilon must be in [0, 0.5], got {epsilon}")
    if quantum_mev <= 0:
        raise ValidationError("quantum_mev must be > 0")
    from .dynamics import sector_beat_components
    from ._kernels import beat_signal
    from .spectral import tone_amplitudes

    n = spec.n_levels
    lam = math.sqrt(spec.huang_rhys)
    fc = franck_condon_matrix(spec)
    # Ground eigenstate k written in the displaced eigenbasis:
    # <m~|k> = <m|D(-lam)|k>, obtained from the +lam table by parity.
    signs = (-1.0) ** (np.add.outer(np.arange(n), np.arange(n)) % 2)
    overlap = fc * signs
    e_levels = quantum_mev * (np.arange(n) + 0.5)

    if spec.thermal_occupation == 0:
        pops = np.zeros(n)
        pops[0] = 1.0
    else:
        q = spec.thermal_occupation / (1.0 + spec.thermal_occupation)
        pops = (1.0 - q) * q ** np.arange(n)
        pops /= pops.sum()
    rho0 = np.diag(pops).astype(complex)

    eps2 = epsilon * epsilon
    rho_ee = eps2 * overlap @ rho0 @ overlap.T
    q_op = overlap.T @ overlap
    rho_gg = rho0 - 0.5 * eps2 * (q_op @ rho0 + rho0 @ q_op)
    total = float(np.trace(rho_gg).real + np.trace(rho_ee).real)
    if total > 0:
        rho_gg = rho_gg / total
        rho_ee = rho_ee / total

    h_diag = np.diag(e_levels)
    obs_e = overlap @ h_diag @ overlap.T - h_diag
    obs_g = overlap.T @ h_diag @ overlap - h_diag

    n_t = int(round(t_max_ps / dt_ps)) + 1
    t = np.arange(n_t) * dt_ps
    # Express the probe comb through the same cm^-1 <-> rad/ps conversion the
    # tone fit applies, so the probe tones sit exactly on the beat
    # frequencies instead of a rounded-constant approximation of them.
    fundamental_cm1 = quantum_mev / HBAR / (2.0 * math.pi * C_CM_PER_PS)
    freqs = fundamental_cm1 * np.arange(1, k_max + 1)

    out = {}
    for name, rho, obs in (("ground", rho_gg, obs_g), ("excited", rho_ee, obs_e)):
        dc, c_cos, c_sin, omega = sector_beat_components(rho, obs, e_levels)
        y = beat_signal(dc, c_cos, c_sin, omega, t)
        out[name] = tone_amplitudes(t, y, freqs)
    out["freqs_cm1"] = freqs
    return out
