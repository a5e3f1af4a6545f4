"""Impulsive pump-probe protocol and differential-reflectivity traces.

A sudden circularly polarized pump copies a fraction eps_eff^2 of the
ground thermal state into the excited sector through the optical overlap.
Each transition |g_k> -> |e_n> carries the Lorentzian resonance amplitude
of its own energy, so the working coupling is the elementwise product

    V_w[n, k] = window[n, k] * overlap_v[n, k],

which reduces to the bare isometry for a flat window.  Second order in the
field then gives

    rho_ee = eps_eff^2 V_w rho0 V_w^dag
    rho_gg = rho0 - (eps_eff^2 / 2)(V_w^dag V_w rho0 + rho0 V_w^dag V_w)

and the probe, sharing the pump spectrum, reads

    y(t) = Re Tr[rho_ee(t) V_w V_w^dag] - Re Tr[rho_gg(t) V_w^dag V_w].

Every beat therefore sits at an eigenvalue gap of its own sector.  With a
flat window the ground block stays thermal and the probe sees a constant:
the spectral variation of the resonance is what converts basis mismatch
between the sectors into observable quantum beats.

Detection parity mimics the polarization-selection geometry: coherence
terms whose axis-magnetization jump has the blocked parity (even jumps for
odd_only, odd for even_only) are multiplied by the leak factor eta.
"""

import os
from dataclasses import dataclass, field, replace

import numpy as np

from ._kernels import beat_signal
from .constants import HBAR
from .errors import ResourceLimitError, ValidationError
from .system import (
    DENSE_DIM_LIMIT,
    HamiltonianPair,
    SystemSpec,
    build_hamiltonians,
    resonance_factor,
    thermal_state,
)

_AMPLITUDE_FLOOR = 1e-14


@dataclass
class PulseSpec:
    """Pump strength and detection geometry for one protocol run."""

    epsilon: float = 0.1
    detection_parity: str = "all"  # all | odd_only | even_only
    parity_leak: float = 0.1
    window: str = "resonant"  # resonant | flat

    def validate(self) -> None:
        if not 0 < self.epsilon <= 0.5:
            raise ValidationError(
                f"epsilon must be in (0, 0.5] for the perturbative pump, got {self.epsilon}"
            )
        if self.detection_parity not in ("all", "odd_only", "even_only"):
            raise ValidationError(
                f"detection_parity must be all, odd_only, or even_only, "
                f"got {self.detection_parity!r}"
            )
        if not 0 <= self.parity_leak <= 1:
            raise ValidationError(
                f"parity_leak must be in [0, 1], got {self.parity_leak}"
            )
        if self.window not in ("resonant", "flat"):
            raise ValidationError(
                f"window must be 'resonant' or 'flat', got {self.window!r}"
            )


@dataclass
class EnsembleSpec:
    """Disorder model averaged over independently drawn exciton neighborhoods.

    B_e is Gaussian (clipped at zero); the Mn count per exciton is Poisson
    with mean mn_count_mean clipped to [0, mn_max], or fixed at the system
    value when mn_count_mean is None.
    """

    n_realizations: int = 16
    be_mean: float = 5.02
    be_sigma: float = 0.0
    mn_count_mean: float | None = None
    mn_max: int = 4
    seed: int = 0

    def validate(self) -> None:
        if self.n_realizations < 1:
            raise ValidationError("n_realizations must be >= 1")
        if self.be_mean < 0 or self.be_sigma < 0:
            raise ValidationError("be_mean and be_sigma must be >= 0")
        if self.mn_count_mean is not None and self.mn_count_mean < 0:
            raise ValidationError("mn_count_mean must be >= 0 or None")
        if self.mn_max < 0:
            raise ValidationError("mn_max must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must fit in 64 bits")


@dataclass
class DensityState:
    """Post-pump density blocks, each stored in its sector eigenbasis."""

    rho_gg: np.ndarray
    rho_ee: np.ndarray
    pair: HamiltonianPair

    def rho_gg_site(self) -> np.ndarray:
        v = self.pair.eig_ground.vectors
        return v @ self.rho_gg @ v.conj().T

    def rho_ee_site(self) -> np.ndarray:
        v = self.pair.eig_excited.vectors
        return v @ self.rho_ee @ v.conj().T


@dataclass
class Trace:
    """Real signal on a uniform time grid (ps)."""

    t: np.ndarray
    y: np.ndarray
    metadata: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.t.ndim != 1 or self.t.size < 16:
            raise ValidationError(f"trace needs >= 16 samples, got {self.t.size}")
        if self.y.shape != self.t.shape:
            raise ValidationError("trace t and y lengths differ")
        dt = np.diff(self.t)
        if dt.size and (dt[0] <= 0 or np.max(np.abs(dt - dt[0])) > 1e-9 * dt[0]):
            raise ValidationError("trace time grid must be uniform and increasing")

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])


def _weighted_overlap(pair: HamiltonianPair, pulse: PulseSpec) -> np.ndarray:
    if pulse.window == "flat":
        return pair.overlap_v
    return pair.transition_window * pair.overlap_v


def pump(
    rho0: np.ndarray,
    pair: HamiltonianPair,
    pulse: PulseSpec,
    resonance: float | None = None,
) -> DensityState:
    """Apply the sudden pump to a ground-sector state given in the site basis."""
    pulse.validate()
    rho0 = np.asarray(rho0, dtype=complex)
    dim_g = pair.dim_ground
    if rho0.shape != (dim_g, dim_g):
        raise ValidationError(
            f"rho0 shape {rho0.shape} does not match ground dimension {dim_g}"
        )
    tr = float(np.trace(rho0).real)
    if abs(tr - 1.0) > 1e-8:
        raise ValidationError(f"rho0 trace {tr} is not 1")
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho0 + rho0.conj().T)).min())
    if min_eig < -1e-10:
        raise ValidationError(f"rho0 is not positive semidefinite (min eig {min_eig:.2e})")
    if resonance is None:
        resonance = resonance_factor(pair.spec)
    eps_eff = pulse.epsilon * np.sqrt(resonance)
    if eps_eff > 0.5:
        raise ValidationError(f"effective pump amplitude {eps_eff} exceeds 0.5")

    vg = pair.eig_ground.vectors
    rho_g = vg.conj().T @ rho0 @ vg
    vw = _weighted_overlap(pair, pulse)
    eps2 = eps_eff * eps_eff
    rho_ee = eps2 * (vw @ rho_g @ vw.conj().T)
    q = vw.conj().T @ vw
    rho_gg = rho_g - 0.5 * eps2 * (q @ rho_g + rho_g @ q)
    total = float(np.trace(rho_gg).real + np.trace(rho_ee).real)
    rho_gg = rho_gg / total
    rho_ee = rho_ee / total
    return DensityState(rho_gg=rho_gg, rho_ee=rho_ee, pair=pair)


def _parity_mask(mags: np.ndarray, pulse: PulseSpec) -> np.ndarray | None:
    if pulse.detection_parity == "all":
        return None
    jump = np.rint(np.abs(np.subtract.outer(mags, mags))).astype(np.int64)
    even = jump % 2 == 0
    mask = np.ones(jump.shape)
    if pulse.detection_parity == "odd_only":
        mask[even] = pulse.parity_leak
    else:
        mask[~even] = pulse.parity_leak
    np.fill_diagonal(mask, 1.0)  # diagonal terms are static, never masked
    return mask


def sector_beat_components(
    rho: np.ndarray, observable: np.ndarray, energies: np.ndarray, mask: np.ndarray | None = None
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Reduce Re Tr[rho(t) O] to dc and cosine/sine coefficients per pair.

    rho and O are in the eigenbasis of `energies`; the coherence (j, l),
    j < l, contributes 2 Re[rho_jl O_lj e^{i w t}] with w = (E_l - E_j)/hbar.
    Pairs below the relative amplitude floor are dropped.
    """
    terms = rho * observable.T
    if mask is not None:
        terms = terms * mask
    dc = float(np.sum(np.diagonal(terms)).real)
    n = energies.size
    ju, lu = np.triu_indices(n, k=1)
    amp = terms[ju, lu]
    keep = np.abs(amp) > _AMPLITUDE_FLOOR * max(1.0, float(np.max(np.abs(terms))))
    amp = amp[keep]
    omega = (energies[lu[keep]] - energies[ju[keep]]) / HBAR
    c_cos = 2.0 * amp.real
    c_sin = -2.0 * amp.imag
    return dc, c_cos, c_sin, omega


def signal_trace(
    state: DensityState,
    pulse: PulseSpec,
    t_grid: np.ndarray,
    metadata: dict | None = None,
) -> Trace:
    """Differential trace y(t) = Re Tr[rho_ee(t) O_e] - Re Tr[rho_gg(t) O_g].

    O_e = V_w V_w^dag and O_g = V_w^dag V_w share the pump window; each
    sector evolves under its own eigensystem, so the beat frequencies are
    exactly the sector eigenvalue gaps.
    """
    pulse.validate()
    pair = state.pair
    t_grid = np.asarray(t_grid, dtype=float)
    vw = _weighted_overlap(pair, pulse)
    obs_e = vw @ vw.conj().T
    obs_g = vw.conj().T @ vw
    mask_e = _parity_mask(pair.excited_axis_magnetization, pulse)
    mask_g = _parity_mask(pair.ground_axis_magnetization, pulse)
    dc_e, cc_e, cs_e, om_e = sector_beat_components(
        state.rho_ee, obs_e, pair.eig_excited.energies, mask_e
    )
    dc_g, cc_g, cs_g, om_g = sector_beat_components(
        state.rho_gg, obs_g, pair.eig_ground.energies, mask_g
    )
    dc = dc_e - dc_g
    c_cos = np.concatenate([cc_e, -cc_g])
    c_sin = np.concatenate([cs_e, -cs_g])
    omega = np.concatenate([om_e, om_g])
    y = beat_signal(dc, c_cos, c_sin, omega, t_grid)
    trace = Trace(t=t_grid, y=y, metadata=metadata or {})
    trace.validate()
    return trace


def _time_grid(t_max: float, dt: float) -> np.ndarray:
    if dt <= 0 or t_max <= 0:
        raise ValidationError("t_max and dt must be > 0")
    n = int(round(t_max / dt)) + 1
    if n < 16:
        raise ValidationError(f"time grid has {n} points; need >= 16")
    return np.arange(n) * dt


def simulate(
    spec: SystemSpec,
    pulse: PulseSpec,
    t_max: float = 20.0,
    dt: float = 0.02,
) -> Trace:
    """Thermal state -> pump -> beat trace for a single exciton neighborhood."""
    spec.validate()
    pulse.validate()
    pair = build_hamiltonians(spec)
    rho0 = thermal_state(pair)
    state = pump(rho0, pair, pulse, resonance_factor(spec))
    t = _time_grid(t_max, dt)
    meta = {
        "system": _spec_dict(spec),
        "pulse": _pulse_dict(pulse),
        "grid": {"t_max_ps": t_max, "dt_ps": dt},
    }
    return signal_trace(state, pulse, t, meta)


def _spec_dict(spec: SystemSpec) -> dict:
    return {
        "n_donors": spec.n_donors,
        "n_mn": spec.n_mn,
        "include_exciton_electron": spec.include_exciton_electron,
        "geometry": spec.geometry,
        "B_T": spec.b_field,
        "T_K": spec.temperature,
        "g_mn": spec.g_mn,
        "g_electron": spec.resolved_g_electron(),
        "B_e_per_ion_T": spec.b_e_per_ion,
        "B_e_donor_T": spec.b_e_donor,
        "delta_eh_meV": spec.delta_eh,
        "E_e_meV": spec.e_e,
        "pump_photon_energy_meV": spec.pump_photon_energy,
        "resonance_linewidth_meV": spec.resonance_linewidth,
    }


def _pulse_dict(pulse: PulseSpec) -> dict:
    return {
        "epsilon": pulse.epsilon,
        "detection_parity": pulse.detection_parity,
        "parity_leak": pulse.parity_leak,
        "window": pulse.window,
    }


def _max_threads() -> int:
    raw = os.environ.get("SPINWEAVE_THREADS", "1").strip()
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def _one_realization(spec, pulse, ens, t, index):
    rng = np.random.Generator(
        np.random.Philox(key=np.array([ens.seed, index], dtype=np.uint64))
    )
    b_e = ens.be_mean
    if ens.be_sigma > 0:
        b_e = max(0.0, float(rng.normal(ens.be_mean, ens.be_sigma)))
    n_mn = spec.n_mn
    if ens.mn_count_mean is not None:
        n_mn = int(min(rng.poisson(ens.mn_count_mean), ens.mn_max))
    spec_i = replace(spec, b_e_per_ion=b_e, n_mn=n_mn)
    if spec_i.n_donors + spec_i.n_mn == 0:
        # an exciton with no impurities contributes a flat trace
        return np.zeros_like(t)
    pair = build_hamiltonians(spec_i)
    rho0 = thermal_state(pair)
    state = pump(rho0, pair, pulse, resonance_factor(spec_i))
    return signal_trace(state, pulse, t).y


def ensemble_simulate(
    spec: SystemSpec,
    pulse: PulseSpec,
    ensemble: EnsembleSpec,
    t_max: float = 20.0,
    dt: float = 0.02,
) -> Trace:
    """Mean trace over seeded disorder realizations.

    Realization i draws from a counter-based Philox substream keyed by
    (seed, i), so results are independent of execution order; the mean is
    accumulated in index order for bit reproducibility.  SPINWEAVE_THREADS
    caps worker threads (default 1).
    """
    spec.validate()
    pulse.validate()
    ensemble.validate()
    dims = [2] * spec.n_donors + [6] * ensemble.mn_max
    worst = int(np.prod(dims)) * (2 if spec.include_exciton_electron else 1)
    if ensemble.mn_count_mean is not None and worst > DENSE_DIM_LIMIT:
        raise ResourceLimitError(
            f"mn_max {ensemble.mn_max} implies dimension {worst} beyond the dense limit"
        )
    t = _time_grid(t_max, dt)
    n = ensemble.n_realizations
    workers = min(_max_threads(), n)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            ys = list(
                pool.map(
                    lambda i: _one_realization(spec, pulse, ensemble, t, i), range(n)
                )
            )
    else:
        ys = [_one_realization(spec, pulse, ensemble, t, i) for i in range(n)]
    acc = np.zeros_like(t)
    for y in ys:
        acc += y
    meta = {
        "system": _spec_dict(spec),
        "pulse": _pulse_dict(pulse),
        "grid": {"t_max_ps": t_max, "dt_ps": dt},
        "ensemble": {
            "n_realizations": ensemble.n_realizations,
            "be_mean_T": ensemble.be_mean,
            "be_sigma_T": ensemble.be_sigma,
            "mn_count_mean": ensemble.mn_count_mean,
            "mn_max": ensemble.mn_max,
            "seed": ensemble.seed,
        },
    }
    return Trace(t=t, y=acc / n, metadata=meta)
