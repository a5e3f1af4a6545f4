"""Harmonic retrieval from beat traces: FFT survey and matrix-pencil fitting.

The pencil fit models the mean-subtracted trace as a sum of damped
sinusoids a_i exp(-t/tau_i) cos(2 pi c nu_i t + phi_i).  It builds a
Hankel matrix with pencil parameter L = floor(N/3), truncates its singular
spectrum at sv_threshold * sigma_max (capped by max_order), solves the
shifted generalized eigenproblem for the poles z_i, and recovers complex
amplitudes by linear least squares on the Vandermonde system.  Conjugate
pole pairs merge into one real mode.  Unlike the periodogram, the pencil
is not Rayleigh-limited: doublets closer than 1/(c T) are still resolved
at reasonable signal-to-noise ratios.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import C_CM_PER_PS
from .errors import NumericError, ValidationError

# damping times at or beyond the unit circle are reported as this cap (ps)
DAMPING_CAP_PS = 1e12
# a pole counts as genuinely growing (and is discarded) only if it would
# grow by more than this factor over the whole record; slighter excursions
# outside the unit circle are numerical and get clamped to undamped
_RECORD_GROWTH_CAP = 1.05


@dataclass
class Mode:
    freq_cm1: float
    damping_ps: float
    amplitude: float
    phase_rad: float

    def to_dict(self) -> dict:
        return {
            "freq_cm1": self.freq_cm1,
            "damping_ps": self.damping_ps,
            "amplitude": self.amplitude,
            "phase_rad": self.phase_rad,
        }


@dataclass
class ModeSet:
    modes: list[Mode] = field(default_factory=list)
    residual_rms: float = 0.0
    model_order: int = 0

    def to_dict(self) -> dict:
        return {
            "modes": [m.to_dict() for m in self.modes],
            "residual_rms": self.residual_rms,
            "model_order": self.model_order,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModeSet":
        return cls(
            modes=[Mode(**m) for m in d["modes"]],
            residual_rms=d["residual_rms"],
            model_order=d["model_order"],
        )


def fft_spectrum(t: np.ndarray, y: np.ndarray, window: str = "none"):
    """Mean-subtracted power spectrum; frequencies in cm^-1.

    window: 'none' (rectangular) or 'hann'.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.ndim != 1 or t.size < 2 or y.shape != t.shape:
        raise ValidationError("fft_spectrum needs matching 1-D arrays, >= 2 samples")
    if window not in ("none", "hann"):
        raise ValidationError(f"window must be 'none' or 'hann', got {window!r}")
    dt = float(t[1] - t[0])
    yc = y - y.mean()
    if window == "hann":
        yc = yc * np.hanning(yc.size)
    spec = np.fft.rfft(yc)
    freq_per_ps = np.fft.rfftfreq(yc.size, d=dt)
    power = np.abs(spec) ** 2
    return freq_per_ps / C_CM_PER_PS, power


def _pencil_poles(y: np.ndarray, max_order: int, sv_threshold: float):
    """Signal poles of the Hankel pencil, plus the retained model order."""
    n = y.size
    pencil = n // 3
    rows = n - pencil
    idx = np.arange(rows)[:, None] + np.arange(pencil + 1)[None, :]
    hank = y[idx]
    try:
        _, s, wt = np.linalg.svd(hank, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD of the Hankel pencil failed: {exc}") from exc
    if s.size == 0 or s[0] == 0:
        return np.empty(0, dtype=complex), 0
    order = int(np.sum(s >= sv_threshold * s[0]))
    order = min(order, max_order, pencil)
    if order == 0:
        return np.empty(0, dtype=complex), 0
    w0 = wt[:order, :pencil]
    w1 = wt[:order, 1:]
    try:
        z = np.linalg.eigvals(np.linalg.pinv(w0.T) @ w1.T)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"pencil eigenvalue solve failed: {exc}") from exc
    unit_tol = math.log(_RECORD_GROWTH_CAP) / n
    keep = []
    for zi in z:
        mag = abs(zi)
        if mag < 1e-12:
            continue
        if math.log(mag) > unit_tol:
            warnings.warn(
                f"discarding growing pole |z| = {mag:.6f}", stacklevel=3
            )
            continue
        if mag > 1.0:
            zi = zi / mag
        keep.append(zi)
    return np.asarray(keep, dtype=complex), order


def _pole_to_damping(z: complex, dt: float) -> float:
    mag = abs(z)
    if mag >= 1.0:
        return DAMPING_CAP_PS
    return min(-dt / math.log(mag), DAMPING_CAP_PS)


def fit_damped_sinusoids(
    t: np.ndarray,
    y: np.ndarray,
    max_order: int | None = None,
    sv_threshold: float = 1e-3,
) -> ModeSet:
    """Matrix-pencil fit of the mean-subtracted signal.

    Returns modes sorted by frequency; residual_rms is measured against the
    mean-subtracted input.  A zero signal yields an empty ModeSet.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.ndim != 1 or t.size < 16 or y.shape != t.shape:
        raise ValidationError("fit needs matching 1-D arrays with >= 16 samples")
    dt = float(t[1] - t[0])
    if dt <= 0 or np.max(np.abs(np.diff(t) - dt)) > 1e-9 * dt:
        raise ValidationError("time grid must be uniform and increasing")
    n = y.size
    if max_order is None:
        max_order = min(n // 3, 40)
    if not 0 < max_order < n / 3 + 1:
        raise ValidationError(
            f"max_order must be in (0, len/3], got {max_order} for {n} samples"
        )
    if not 0 < sv_threshold < 1:
        raise ValidationError(f"sv_threshold must be in (0, 1), got {sv_threshold}")

    yc = y - y.mean()
    scale = float(np.max(np.abs(yc)))
    if scale == 0.0:
        return ModeSet(modes=[], residual_rms=0.0, model_order=0)

    z, order = _pencil_poles(yc, max_order, sv_threshold)
    if z.size == 0:
        return ModeSet(modes=[], residual_rms=float(np.sqrt(np.mean(yc**2))), model_order=0)

    vand = z[None, :] ** np.arange(n)[:, None]
    coef, *_ = np.linalg.lstsq(vand, yc.astype(complex), rcond=None)

    # amplitudes/phases come out referenced to the first sample; modes are
    # stored referenced to absolute t = 0 so reconstruct() can take any grid
    t0 = float(t[0])

    def _absolute(freq_cm1, damping, amp, phase):
        if t0 != 0.0:
            expo = t0 / damping
            if expo > 700.0:  # mode is unrepresentably transient at t = 0
                return None
            amp = amp * math.exp(expo)
            phase = phase - freq_cm1 * C_CM_PER_PS * 2.0 * math.pi * t0
            phase = math.remainder(phase, 2.0 * math.pi)
        if phase <= -math.pi:  # keep phases in (-pi, pi]
            phase += 2.0 * math.pi
        return Mode(freq_cm1, damping, amp, phase)

    modes: list[Mode] = []
    used = np.zeros(z.size, dtype=bool)
    order_idx = np.argsort(-np.abs(coef))
    for i in order_idx:
        if used[i]:
            continue
        used[i] = True
        zi, ci = z[i], coef[i]
        if abs(zi.imag) <= 1e-10 * (1.0 + abs(zi.real)):
            # real pole: zero-frequency (or Nyquist) relaxation
            freq = 0.0 if zi.real > 0 else 1.0 / (2.0 * dt) / C_CM_PER_PS
            amp = abs(ci.real)
            phase = 0.0 if ci.real >= 0 else math.pi
        else:
            # find the conjugate partner
            best_j, best_d = -1, np.inf
            for j in range(z.size):
                if used[j]:
                    continue
                d = abs(z[j] - zi.conjugate())
                if d < best_d:
                    best_j, best_d = j, d
            if best_j >= 0 and best_d <= 1e-6 * (1.0 + abs(zi)):
                used[best_j] = True
                if zi.imag < 0:
                    zi, ci = z[best_j], coef[best_j]
                amp, phase = 2.0 * abs(ci), math.atan2(ci.imag, ci.real)
            else:
                # unpaired complex pole (noise edge); fold it in as best we can
                if zi.imag < 0:
                    zi, ci = zi.conjugate(), ci.conjugate()
                amp, phase = abs(ci), math.atan2(ci.imag, ci.real)
            freq = abs(math.atan2(zi.imag, zi.real)) / dt / (2.0 * math.pi) / C_CM_PER_PS
        mode = _absolute(freq, _pole_to_damping(zi, dt), amp, phase)
        if mode is not None:
            modes.append(mode)

    modes = [m for m in modes if m.amplitude > 1e-12 * scale]
    modes.sort(key=lambda m: m.freq_cm1)
    # coalesce duplicates so no two modes sit within 1e-9 cm^-1
    merged: list[Mode] = []
    for m in modes:
        if merged and abs(m.freq_cm1 - merged[-1].freq_cm1) < 1e-9:
            a = merged[-1]
            re = a.amplitude * math.cos(a.phase_rad) + m.amplitude * math.cos(m.phase_rad)
            im = a.amplitude * math.sin(a.phase_rad) + m.amplitude * math.sin(m.phase_rad)
            wa, wm = a.amplitude, m.amplitude
            damping = (a.damping_ps * wa + m.damping_ps * wm) / max(wa + wm, 1e-300)
            merged[-1] = Mode(
                a.freq_cm1, damping, math.hypot(re, im), math.atan2(im, re)
            )
        else:
            merged.append(m)

    recon = _synth(merged, t)
    residual = float(np.sqrt(np.mean((yc - recon) ** 2)))
    return ModeSet(modes=merged, residual_rms=residual, model_order=order)


def _synth(modes: list[Mode], t: np.ndarray) -> np.ndarray:
    y = np.zeros_like(t, dtype=float)
    for m in modes:
        omega = m.freq_cm1 * C_CM_PER_PS * 2.0 * math.pi
        decay = np.exp(-t / m.damping_ps) if m.damping_ps < DAMPING_CAP_PS else 1.0
        y += m.amplitude * decay * np.cos(omega * t + m.phase_rad)
    return y


def reconstruct(modes: ModeSet | list[Mode], t: np.ndarray) -> np.ndarray:
    """Synthesize the damped-sinusoid model on a time grid (zero-mean signal)."""
    t = np.asarray(t, dtype=float)
    mode_list = modes.modes if isinstance(modes, ModeSet) else modes
    return _synth(mode_list, t)


def tone_amplitudes(t: np.ndarray, y: np.ndarray, freqs_cm1) -> np.ndarray:
    """Least-squares cosine/sine amplitude at each requested frequency.

    All tones plus a constant are fitted jointly, so well-separated lines
    do not bias one another.  Returns one amplitude per frequency.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    freqs = np.atleast_1d(np.asarray(freqs_cm1, dtype=float))
    if t.ndim != 1 or y.shape != t.shape:
        raise ValidationError("tone_amplitudes needs matching 1-D arrays")
    if np.any(freqs < 0):
        raise ValidationError("frequencies must be >= 0")
    cols = [np.ones_like(t)]
    for f in freqs:
        omega = f * C_CM_PER_PS * 2.0 * math.pi
        cols.append(np.cos(omega * t))
        cols.append(np.sin(omega * t))
    design = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    amps = np.hypot(coef[1::2], coef[2::2])
    return amps
