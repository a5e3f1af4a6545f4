import numpy as np
import pytest

from spinweave.constants import K_B, MEV_TO_CM1, MU_B
from spinweave.errors import ValidationError
from spinweave.system import (
    SystemSpec,
    build_hamiltonians,
    resonance_factor,
    thermal_state,
)


def test_dimensions_and_isometry():
    spec = SystemSpec(n_donors=2, n_mn=1, b_e_per_ion=5.02, b_e_donor=2.0)
    pair = build_hamiltonians(spec)
    assert pair.dim_ground == 2 * 2 * 6
    assert pair.dim_excited == 2 * 2 * 6 * 2
    v = pair.overlap_v
    assert v.shape == (pair.dim_excited, pair.dim_ground)
    assert np.max(np.abs(v.conj().T @ v - np.eye(pair.dim_ground))) < 1e-12
    # window weights are relative to the nominal transition energy, so a
    # line closer to the pump than E_e exceeds 1; the hard cap is the
    # on-resonance weight 1/sqrt(L(E_e))
    w = pair.transition_window
    cap = 1.0 / np.sqrt(resonance_factor(spec))
    assert np.all(w > 0) and np.all(w <= cap + 1e-12)


def test_ground_ladder_uniform_g():
    # three identical spin-1/2 donors: Zeeman ladder m * g mu_B B with
    # binomial degeneracies 1, 3, 3, 1
    g = 3.9779
    spec = SystemSpec(
        n_donors=3, n_mn=0, include_exciton_electron=False,
        b_field=7.0, g_electron=g, b_e_donor=4.0,
    )
    pair = build_hamiltonians(spec)
    e = pair.eig_ground.energies
    step = g * MU_B * 7.0
    expected = np.sort([m * step for m in (-1.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 1.5)])
    assert np.max(np.abs(e - expected)) < 1e-10
    # eigenstates carry sharp total projection along the field axis
    mags = np.sort(pair.ground_axis_magnetization)
    assert np.max(np.abs(mags - expected / (g * MU_B * 7.0))) < 1e-9


def test_ground_ladder_frequency_oracle():
    # adjacent-gap spacing in cm^-1 pinned by the chosen g factor
    spec = SystemSpec(
        n_donors=3, n_mn=0, include_exciton_electron=False,
        b_field=7.0, g_electron=3.9779, b_e_donor=4.0,
    )
    pair = build_hamiltonians(spec)
    gaps = np.diff(np.unique(np.round(pair.eig_ground.energies, 12)))
    assert gaps[0] * MEV_TO_CM1 == pytest.approx(12.999981981045165, rel=1e-10)


def test_faraday_delta0_detection_commutes_with_ground_hamiltonian():
    spec = SystemSpec(
        n_donors=0, n_mn=2, geometry="faraday", delta_eh=0.0,
        b_e_per_ion=5.02, b_field=7.0,
    )
    pair = build_hamiltonians(spec)
    v = pair.transition_window * pair.overlap_v
    q = v.conj().T @ v
    # both are stored in the ground eigenbasis, so H is diagonal there
    h = np.diag(pair.eig_ground.energies)
    comm = q @ h - h @ q
    assert np.max(np.abs(comm)) < 1e-10


def test_excited_spectrum_high_field_limit():
    # once B >> B_e the exchange tilt is negligible: excited energies
    # approach ground energies + E_e (no exciton electron in the register)
    spec = SystemSpec(
        n_donors=0, n_mn=1, include_exciton_electron=False,
        b_field=500.0, b_e_per_ion=5.0, e_e=1677.0,
    )
    pair = build_hamiltonians(spec)
    shifted = np.sort(pair.eig_excited.energies) - 1677.0
    ground = np.sort(pair.eig_ground.energies)
    scale = np.max(np.abs(ground))
    assert np.max(np.abs(shifted - ground)) < 1e-3 * scale


def test_swap_symmetry_identical_sites():
    spec = SystemSpec(n_donors=2, n_mn=1, b_e_per_ion=5.02, b_e_donor=2.0)
    pair = build_hamiltonians(spec)
    dims = [2, 2, 6]
    dim = int(np.prod(dims))
    # permutation operator swapping the two identical donors
    perm = np.zeros((dim, dim))
    idx = np.arange(dim).reshape(dims)
    perm[idx.swapaxes(0, 1).ravel(), idx.ravel()] = 1.0
    h = pair.h_ground
    assert np.max(np.abs(perm @ h @ perm.T - h)) < 1e-12
    # same swap embedded in the excited register (electron site last)
    dims_e = [2, 2, 6, 2]
    dim_e = int(np.prod(dims_e))
    perm_e = np.zeros((dim_e, dim_e))
    idx_e = np.arange(dim_e).reshape(dims_e)
    perm_e[idx_e.swapaxes(0, 1).ravel(), idx_e.ravel()] = 1.0
    he = pair.h_excited
    assert np.max(np.abs(perm_e @ he @ perm_e.T - he)) < 1e-12


def test_resolved_g_electron_auto():
    spec = SystemSpec(n_mn=1, b_field=7.0)
    assert spec.resolved_g_electron() == pytest.approx(-5.6972754542230835, rel=1e-9)
    pinned = SystemSpec(n_mn=1, g_electron=2.5)
    assert pinned.resolved_g_electron() == 2.5


def test_resonance_factor_lorentzian():
    spec = SystemSpec(n_mn=1, pump_photon_energy=1687.0, e_e=1677.0,
                      resonance_linewidth=6.0)
    assert resonance_factor(spec) == pytest.approx(36.0 / 136.0, rel=1e-12)
    on_res = SystemSpec(n_mn=1, pump_photon_energy=1677.0, e_e=1677.0)
    assert resonance_factor(on_res) == pytest.approx(1.0, rel=1e-12)


def test_thermal_state_boltzmann_ratio():
    spec = SystemSpec(n_donors=0, n_mn=1, b_field=7.0, temperature=1.6)
    pair = build_hamiltonians(spec)
    rho = thermal_state(pair)
    assert abs(np.trace(rho).real - 1.0) < 1e-12
    # adjacent Zeeman population ratio e^{gap / kT}
    gap = 2.0 * MU_B * 7.0
    expected = np.exp(gap / (K_B * 1.6))
    assert expected == pytest.approx(356.0, abs=1.0)
    # weights read in the energy eigenbasis follow Boltzmann, with each
    # ratio accurate down to the matmul noise floor of the smaller weight
    v = pair.eig_ground.vectors
    w = np.sort(np.real(np.diag(v.conj().T @ rho @ v)))[::-1]
    for k in range(5):
        tol = max(1e-12, 100 * np.finfo(float).eps / w[k + 1])
        assert w[k] / w[k + 1] == pytest.approx(expected, rel=tol)


def test_spec_validation():
    with pytest.raises(ValidationError):
        SystemSpec(n_donors=0, n_mn=0).validate()
    with pytest.raises(ValidationError):
        SystemSpec(n_mn=1, geometry="sideways").validate()
    with pytest.raises(ValidationError):
        SystemSpec(n_mn=1, b_field=-1.0).validate()
    with pytest.raises(ValidationError):
        SystemSpec(n_mn=1, temperature=0.0).validate()
    with pytest.raises(ValidationError):
        SystemSpec(n_mn=1, resonance_linewidth=0.0).validate()
