"""Top-level acceptance gate: one test per release criterion.

Each test measures the quantity end to end (library calls or the installed
CLI), records a PASS/FAIL line through the `acceptance` fixture, and
enforces the stated tolerance and runtime budget.
"""

import json
import math
import subprocess
import sys
import time
import warnings

import numpy as np
import pytest

from spinweave.constants import C_CM_PER_PS, HBAR, MEV_TO_CM1, MU_B
from spinweave.dynamics import EnsembleSpec, PulseSpec, ensemble_simulate, pump, simulate
from spinweave.entangle import (
    SymmetricSuperposition,
    density_from_state,
    dicke_state,
    entanglement_report,
    haar_random_coefficients,
    negativity,
    partial_trace,
    superposition_state,
    vn_entropy,
)
from spinweave.magnetics import MagneticParams, estimate_exchange_chain, predict_lines
from spinweave.spectral import fit_damped_sinusoids, tone_amplitudes
from spinweave.system import SystemSpec, build_hamiltonians, resonance_factor, thermal_state
from spinweave.vibronic import VibronicSpec, huang_rhys_factor, impulsive_overtone_amplitudes

WELL_PARAMS = MagneticParams(x_eff=0.0017, t_eff=2.0)

LADDER3 = SystemSpec(
    n_donors=3,
    n_mn=0,
    include_exciton_electron=False,
    b_field=7.0,
    g_electron=3.9779,
    b_e_donor=4.0,
    resonance_linewidth=2.0,
    pump_photon_energy=1687.0,
)

MN_EXCITON = SystemSpec(n_donors=0, n_mn=1, b_e_per_ion=5.02)


def to_cm1(gap_mev: float) -> float:
    return gap_mev / HBAR / (2.0 * math.pi * C_CM_PER_PS)


def distinct_levels(energies, tol=1e-9):
    levels = [float(energies[0])]
    for e in energies[1:]:
        if e - levels[-1] > tol:
            levels.append(float(e))
    return levels


@pytest.fixture(scope="module")
def ladder3_runs():
    """Shared 3-donor simulations: unmasked, parity-masked, and half-pump."""
    start = time.perf_counter()
    pair = build_hamiltonians(LADDER3)
    lv_g = distinct_levels(pair.eig_ground.energies)
    lv_e = distinct_levels(pair.eig_excited.energies)
    gaps_g = [to_cm1(lv - lv_g[0]) for lv in lv_g[1:4]]
    gaps_e = [to_cm1(lv - lv_e[0]) for lv in lv_e[1:4]]
    tones = np.array(gaps_g + gaps_e)

    full = simulate(LADDER3, PulseSpec(epsilon=0.1), t_max=40.0, dt=0.01)
    fit = fit_damped_sinusoids(full.t, full.y, sv_threshold=1e-6)
    amps_full = tone_amplitudes(full.t, full.y, tones)

    masked_pulse = PulseSpec(epsilon=0.1, detection_parity="odd_only", parity_leak=0.1)
    masked = simulate(LADDER3, masked_pulse, t_max=40.0, dt=0.01)
    amps_masked = tone_amplitudes(masked.t, masked.y, tones)

    half = simulate(LADDER3, PulseSpec(epsilon=0.05), t_max=40.0, dt=0.01)
    amps_half = tone_amplitudes(half.t, half.y, tones)

    return {
        "gaps_g": gaps_g,
        "gaps_e": gaps_e,
        "tones": tones,
        "fit": fit,
        "amps_full": amps_full,
        "amps_masked": amps_masked,
        "amps_half": amps_half,
        "elapsed": time.perf_counter() - start,
    }


def test_criterion_01_consistency_chain(acceptance):
    start = time.perf_counter()
    hr = huang_rhys_factor(6.25, 7.0, 5.02)
    nu0 = 2.0 * MU_B * 5.02 * MEV_TO_CM1  # zero-field precession for B_e = 5.02 T
    chain = estimate_exchange_chain(nu0, 7.0)  # nominal doping, not the fitted x_eff
    elapsed = time.perf_counter() - start
    ok = (
        abs(hr - 1.06) <= 0.01
        and abs(chain["length_A"] / 40.0 - 1.0) <= 0.20
        and abs(chain["n_ions"] / 2.5 - 1.0) <= 0.15
        and elapsed < 1.0
    )
    acceptance(
        1,
        "consistency chain: S_HR, localization length, ions per hole",
        ok,
        f"S_HR={hr:.4f}, length={chain['length_A']:.1f} A, "
        f"n_ions={chain['n_ions']:.2f}, {elapsed * 1e3:.0f} ms",
    )


def test_criterion_02_line_positions(acceptance):
    b_e = 5.02
    fields = np.array([0.0, 7.0, 50.0 * b_e])
    table = predict_lines(fields, b_e=b_e, params=WELL_PARAMS)
    pr_7 = table["nu_PR"][1]
    pre_0 = table["nu_PRe"][0]
    pre_hi = table["nu_PRe"][2]
    sf_7 = table["nu_SF"][1]
    pre_0_expect = WELL_PARAMS.g_mn * MU_B * b_e * MEV_TO_CM1
    pre_hi_expect = WELL_PARAMS.g_mn * MU_B * fields[2] * MEV_TO_CM1
    ok = (
        abs(pr_7 - 6.536) <= 0.001
        and abs(pre_0 / pre_0_expect - 1.0) <= 1e-9
        and abs(pre_hi / pre_hi_expect - 1.0) <= 0.005
        and abs(sf_7 - 12.9) <= 0.1
    )
    acceptance(
        2,
        "line engine: PR at 7 T, PRe limits, SF curve",
        ok,
        f"PR={pr_7:.4f}, PRe(0)={pre_0:.4f}, PRe(50 B_e)/limit={pre_hi / pre_hi_expect:.5f}, "
        f"SF={sf_7:.3f}",
    )


def test_criterion_03_overtone_lines_and_mask(acceptance, ladder3_runs):
    r = ladder3_runs
    rels = []
    for target in r["gaps_g"]:
        best = min(r["fit"].modes, key=lambda m: abs(m.freq_cm1 - target))
        rels.append(abs(best.freq_cm1 / target - 1.0))
    suppression = r["amps_full"][1] / max(r["amps_masked"][1], 1e-300)
    ok = max(rels) <= 5e-3 and suppression >= 5.0 and r["elapsed"] < 30.0
    acceptance(
        3,
        "3-donor overtones on eigen-gap oracle; parity mask suppresses 2SF",
        ok,
        f"max line dev {max(rels):.1e}, 2SF suppression {suppression:.1f}x, "
        f"{r['elapsed']:.1f} s",
    )


def test_criterion_04_faraday_null(acceptance):
    voigt = simulate(MN_EXCITON, PulseSpec(), t_max=20.0, dt=0.01)
    with warnings.catch_warnings():
        # very weakly damped lines sit numerically on the unit circle
        warnings.simplefilter("ignore", UserWarning)
        fit = fit_damped_sinusoids(voigt.t, voigt.y, sv_threshold=1e-5)
    band = [m for m in fit.modes if 7.5 <= m.freq_cm1 <= 8.5]
    pre = max(band, key=lambda m: m.amplitude)

    import dataclasses

    far_spec = dataclasses.replace(MN_EXCITON, geometry="faraday", delta_eh=0.0)
    far = simulate(far_spec, PulseSpec(), t_max=20.0, dt=0.01)
    leak = float(np.max(tone_amplitudes(far.t, far.y, [pre.freq_cm1, 6.536])))
    ok = bool(band) and leak < 1e-10 * pre.amplitude
    acceptance(
        4,
        "Faraday geometry with zero e-h exchange shows no spin coherence",
        ok,
        f"PR(e) amp {pre.amplitude:.2e}, faraday leak {leak:.2e}",
    )


def test_criterion_05_harmonic_vs_anharmonic(acceptance, ladder3_runs):
    out = impulsive_overtone_amplitudes(
        VibronicSpec(huang_rhys=1.06, n_levels=80), epsilon=0.1, k_max=4
    )
    exc = out["excited"]
    harmonic_null = float(np.max(exc[1:]) / exc[0])

    amps = ladder3_runs["amps_full"]
    r2 = amps[1] / amps[0]
    r3 = amps[2] / amps[0]
    ok = harmonic_null < 1e-10 and r2 > 1e-4 and r3 > 1e-4
    acceptance(
        5,
        "harmonic mode gives no overtones; spin ladder does",
        ok,
        f"harmonic k>=2/k=1 {harmonic_null:.1e}; ladder 2SF/SF {r2:.1e}, 3SF/SF {r3:.1e}",
    )


def test_criterion_06_doublet_monte_carlo(acceptance):
    t = np.arange(0.0, 15.0, 0.01)
    clean = 1.0 * np.exp(-t / 2.0) * np.cos(2 * math.pi * C_CM_PER_PS * 12.0 * t) + (
        0.8 * np.exp(-t / 3.0) * np.cos(2 * math.pi * C_CM_PER_PS * 13.0 * t + math.pi)
    )
    rms = math.sqrt(float(np.mean(clean**2)))
    sigma = rms / 10.0 ** (30.0 / 20.0)

    fit0 = fit_damped_sinusoids(t, clean, sv_threshold=1e-8)
    rms_c = math.sqrt(float(np.mean((clean - clean.mean()) ** 2)))
    round_trip = fit0.residual_rms / rms_c

    start = time.perf_counter()
    hits = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        for trial in range(100):
            rng = np.random.default_rng(1000 + trial)
            y = clean + rng.normal(0.0, sigma, t.size)
            fit = fit_damped_sinusoids(t, y, max_order=8, sv_threshold=1e-3)
            good = True
            for target in (12.0, 13.0):
                cands = [m for m in fit.modes if m.amplitude > 0.2]
                if not cands:
                    good = False
                    break
                best = min(cands, key=lambda m: abs(m.freq_cm1 - target))
                if abs(best.freq_cm1 / target - 1.0) > 5e-3:
                    good = False
            hits += good
    elapsed = time.perf_counter() - start
    ok = hits >= 95 and round_trip <= 1e-6 and elapsed < 60.0
    acceptance(
        6,
        "doublet resolved at 30 dB SNR; noiseless round trip",
        ok,
        f"{hits}/100 trials, round trip {round_trip:.1e}, {elapsed:.1f} s",
    )


def test_criterion_07_inhomogeneous_broadening(acceptance):
    spec = SystemSpec(
        n_donors=0,
        n_mn=1,
        include_exciton_electron=False,
        b_e_per_ion=5.02,
        resonance_linewidth=2.0,
    )
    ens = EnsembleSpec(n_realizations=64, be_mean=5.02, be_sigma=1.0, seed=0)
    tr = ensemble_simulate(spec, PulseSpec(), ens, t_max=80.0, dt=0.02)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        fit = fit_damped_sinusoids(tr.t, tr.y, sv_threshold=1e-5)
    mx = max(m.amplitude for m in fit.modes)
    cands = [m for m in fit.modes if m.amplitude > 3e-3 * mx]
    pr_oracle = 2.0 * MU_B * 7.0 * MEV_TO_CM1
    pr = min(cands, key=lambda m: abs(m.freq_cm1 - pr_oracle))
    pre = max((m for m in cands if 7.2 <= m.freq_cm1 <= 10.0), key=lambda m: m.amplitude)
    shift = abs(pr.freq_cm1 / pr_oracle - 1.0)
    ratio = pr.damping_ps / pre.damping_ps
    ok = ratio >= 3.0 and shift < 1e-3
    acceptance(
        7,
        "exchange-field spread damps PR(e) but leaves ground PR sharp",
        ok,
        f"damping ratio {ratio:.0f}x, PR shift {shift:.1e}",
    )


def test_criterion_08_entanglement_suite(acceptance):
    bell = superposition_state(
        SymmetricSuperposition(2, 0.5, np.array([1.0, 0.0, 1.0]) / math.sqrt(2.0))
    )
    bell_neg = negativity(density_from_state(bell), [2, 2], {0})

    w_rho = density_from_state(dicke_state(3, 0.5, 1))
    w_entropy = vn_entropy(partial_trace(w_rho, [2, 2, 2], {0}))

    pair = build_hamiltonians(SystemSpec(n_donors=0, n_mn=2, b_e_per_ion=5.02))
    state = pump(thermal_state(pair), pair, PulseSpec(), resonance_factor(pair.spec))
    rho = state.rho_ee_site()
    rho = rho / float(np.real(np.trace(rho)))
    rho_mn = partial_trace(rho, list(pair.site_dims_excited), keep=(0, 1))
    pump_neg = negativity(rho_mn, [6, 6], {0})

    rng = np.random.default_rng(20260814)
    hits = 0
    for _ in range(1000):
        coefs = haar_random_coefficients(4, rng)
        psi = superposition_state(
            SymmetricSuperposition(3, 0.5, coefs), t=rng.uniform(0, 10), omega0=1.3
        )
        rep = entanglement_report(psi, [2, 2, 2])
        negs = [b["negativity"] for b in rep["bipartitions"]]
        if rep["min_single_site_purity"] < 1 - 1e-6 and max(negs) > 0:
            hits += 1

    ok = (
        abs(bell_neg - 0.5) <= 1e-8
        and abs(w_entropy - 0.9182958340544896) <= 1e-6
        and pump_neg > 1e-8
        and hits >= 999
    )
    acceptance(
        8,
        "Bell negativity, W entropy, pumped Mn pair, Haar genericity",
        ok,
        f"bell {bell_neg:.9f}, W {w_entropy:.7f} bits, pump neg {pump_neg:.1e}, "
        f"haar {hits}/1000",
    )


def test_criterion_09_pump_linearity(acceptance, ladder3_runs):
    full = ladder3_runs["amps_full"]
    half = ladder3_runs["amps_half"]
    floor = 1e-10 * float(np.max(full))
    ratios = [f / h for f, h in zip(full, half) if f > floor]
    devs = [abs(r / 4.0 - 1.0) for r in ratios]
    ok = len(ratios) == len(full) and max(devs) <= 0.01
    acceptance(
        9,
        "halving the pump amplitude quarters every beat amplitude",
        ok,
        f"{len(ratios)} lines, worst dev from 4x: {max(devs):.1e}",
    )


def test_criterion_10_seeded_byte_reproducibility(acceptance, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "system.n_donors = 0\nsystem.n_mn = 1\nsystem.b_e_per_ion = 5.02\n"
        "system.resonance_linewidth = 2.0\ngrid.t_max_ps = 6\n"
        "ensemble.n_realizations = 3\nensemble.be_sigma = 0.5\n",
        encoding="utf-8",
    )
    outputs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        proc = subprocess.run(
            [
                sys.executable, "-m", "spinweave", "simulate",
                "--config", str(cfg), "--output-dir", str(out), "--seed", "7",
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append(out)
    a, b = outputs
    same = all(
        (a / name).read_bytes() == (b / name).read_bytes()
        for name in ("trace.csv", "spectrum.csv", "modes.json")
    )
    ra = json.loads((a / "report.json").read_text())
    rb = json.loads((b / "report.json").read_text())
    ra["config"].pop("output_dir")
    rb["config"].pop("output_dir")
    ok = same and ra == rb
    acceptance(
        10,
        "seeded CLI runs are byte-reproducible",
        ok,
        "trace/spectrum/modes identical; report identical up to output path",
    )
