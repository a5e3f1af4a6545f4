"""Ground- and excited-sector Hamiltonians for donors and Mn ions in a well.

Site order is fixed: donor electrons (spin 1/2) first, then Mn ions
(spin 5/2), then, in the excited sector only, the photocreated exciton
electron (spin 1/2) as the last site.  The heavy hole is frozen at
J_z = +3/2 and enters only through the exchange fields it generates:
B_e_per_ion on each Mn spin and B_e_donor on each donor, both along z,
plus the electron-hole exchange delta_eh acting on the exciton electron.

The static field B sets the ground quantization axis: x in Voigt geometry
(B perpendicular to the growth axis z), z in Faraday geometry.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import MU_B, K_B
from .errors import ResourceLimitError, ValidationError
from .magnetics import MagneticParams, effective_g
from .spinalg import Eigensystem, embed, hermitian_eigen, spin_operators

DENSE_DIM_LIMIT = 5000


@dataclass
class SystemSpec:
    """Physical parameters of one simulated exciton neighborhood."""

    n_donors: int = 0
    n_mn: int = 1
    include_exciton_electron: bool = True
    geometry: str = "voigt"
    b_field: float = 7.0
    temperature: float = 1.6
    g_mn: float = 2.0
    g_electron: float | None = None  # None: derive from magnetics.effective_g
    b_e_per_ion: float = 0.0
    b_e_donor: float = 0.0
    delta_eh: float = 0.27
    e_e: float = 1677.0
    pump_photon_energy: float = 1687.0
    resonance_linewidth: float = 6.0

    def validate(self) -> None:
        if self.n_donors < 0 or self.n_mn < 0:
            raise ValidationError("n_donors and n_mn must be >= 0")
        if self.n_donors + self.n_mn == 0:
            raise ValidationError("system needs at least one donor or Mn ion")
        if self.geometry not in ("voigt", "faraday"):
            raise ValidationError(
                f"geometry must be 'voigt' or 'faraday', got {self.geometry!r}"
            )
        if self.b_field < 0:
            raise ValidationError(f"b_field must be >= 0, got {self.b_field}")
        if self.temperature <= 0:
            raise ValidationError(f"temperature must be > 0, got {self.temperature}")
        if self.b_e_per_ion < 0 or self.b_e_donor < 0:
            raise ValidationError("exchange fields must be >= 0")
        if self.resonance_linewidth <= 0:
            raise ValidationError("resonance_linewidth must be > 0")

    def resolved_g_electron(self) -> float:
        if self.g_electron is not None:
            return self.g_electron
        return effective_g(self.b_field, MagneticParams())

    @property
    def site_dims_ground(self) -> list[int]:
        return [2] * self.n_donors + [6] * self.n_mn

    @property
    def site_dims_excited(self) -> list[int]:
        dims = self.site_dims_ground
        return dims + [2] if self.include_exciton_electron else dims


@dataclass
class HamiltonianPair:
    """Both sector Hamiltonians, their eigensystems, and the optical overlap.

    overlap_v holds the ground eigenvectors, tensored with the fixed
    pump-created exciton-electron spinor (S_z = -1/2), expressed in the
    excited eigenbasis; it is an exact isometry.  transition_window holds
    the amplitude weight sqrt(L(E_n - E_k)/L(E_e)) of each optical
    transition under the pump Lorentzian, used by the dynamics module.
    """

    spec: SystemSpec
    h_ground: np.ndarray
    h_excited: np.ndarray
    eig_ground: Eigensystem
    eig_excited: Eigensystem
    overlap_v: np.ndarray
    ground_axis_magnetization: np.ndarray
    excited_axis_magnetization: np.ndarray
    transition_window: np.ndarray
    site_dims_ground: list[int] = field(default_factory=list)
    site_dims_excited: list[int] = field(default_factory=list)

    @property
    def dim_ground(self) -> int:
        return self.h_ground.shape[0]

    @property
    def dim_excited(self) -> int:
        return self.h_excited.shape[0]


def resonance_factor(spec: SystemSpec) -> float:
    """Lorentzian pump-resonance weight at the nominal transition energy."""
    spec.validate()
    gamma = spec.resonance_linewidth
    det = spec.pump_photon_energy - spec.e_e
    return gamma * gamma / (det * det + gamma * gamma)


def _axis_op(ops, axis: str) -> np.ndarray:
    return ops.sx if axis == "x" else ops.sz


def _simultaneous_eigen(h: np.ndarray, m_op: np.ndarray) -> tuple[Eigensystem, np.ndarray]:
    """Diagonalize H, then rotate inside each degenerate-energy cluster so the
    eigenvectors also diagonalize the commuting projection operator."""
    eig = hermitian_eigen(h)
    energies, vectors = eig.energies, eig.vectors.copy()
    scale = max(1.0, float(np.max(np.abs(energies))))
    tol = 1e-9 * scale
    mags = np.empty_like(energies)
    i = 0
    n = energies.size
    while i < n:
        j = i + 1
        while j < n and energies[j] - energies[j - 1] <= tol:
            j += 1
        block = vectors[:, i:j]
        if j - i == 1:
            mags[i] = float((block.conj().T @ m_op @ block).real[0, 0])
        else:
            msub = block.conj().T @ m_op @ block
            msub = 0.5 * (msub + msub.conj().T)
            mvals, mvecs = np.linalg.eigh(msub)
            vectors[:, i:j] = block @ mvecs
            mags[i:j] = mvals
        i = j
    return Eigensystem(energies=energies, vectors=vectors), mags


def build_hamiltonians(spec: SystemSpec) -> HamiltonianPair:
    """Construct both sector Hamiltonians, eigensystems, overlap, and window.

    H_ground = mu_B B (g_e sum_d s_a + g_Mn sum_i S_a) along the geometry
    axis a.  H_excited adds the hole exchange fields along z, the
    electron-hole exchange (delta_eh/2)(2 s_z) on the exciton electron, the
    exciton creation energy E_e, and the exciton electron's own Zeeman term.
    """
    spec.validate()
    dims_g = spec.site_dims_ground
    dims_e = spec.site_dims_excited
    dim_g = int(np.prod(dims_g))
    dim_e = int(np.prod(dims_e))
    if dim_e > DENSE_DIM_LIMIT:
        raise ResourceLimitError(
            f"excited-sector dimension {dim_e} exceeds dense limit {DENSE_DIM_LIMIT}"
        )
    axis = "x" if spec.geometry == "voigt" else "z"
    g_e = spec.resolved_g_electron()
    half = spin_operators(0.5)
    five_half = spin_operators(2.5)

    h_g = np.zeros((dim_g, dim_g), dtype=complex)
    m_g = np.zeros_like(h_g)
    for i in range(spec.n_donors):
        op = embed(_axis_op(half, axis), i, dims_g)
        h_g += MU_B * spec.b_field * g_e * op
        m_g += op
    for i in range(spec.n_mn):
        op = embed(_axis_op(five_half, axis), spec.n_donors + i, dims_g)
        h_g += MU_B * spec.b_field * spec.g_mn * op
        m_g += op

    h_e = np.zeros((dim_e, dim_e), dtype=complex)
    m_e = np.zeros_like(h_e)
    for i in range(spec.n_donors):
        op_a = embed(_axis_op(half, axis), i, dims_e)
        h_e += MU_B * spec.b_field * g_e * op_a
        h_e += MU_B * g_e * spec.b_e_donor * embed(half.sz, i, dims_e)
        m_e += op_a
    for i in range(spec.n_mn):
        idx = spec.n_donors + i
        op_a = embed(_axis_op(five_half, axis), idx, dims_e)
        h_e += MU_B * spec.b_field * spec.g_mn * op_a
        h_e += MU_B * spec.g_mn * spec.b_e_per_ion * embed(five_half.sz, idx, dims_e)
        m_e += op_a
    if spec.include_exciton_electron:
        idx = len(dims_e) - 1
        op_a = embed(_axis_op(half, axis), idx, dims_e)
        h_e += MU_B * spec.b_field * g_e * op_a
        # (delta_eh/2) * (2 s_z): splitting delta_eh along z on the exciton electron
        h_e += 0.5 * spec.delta_eh * embed(2.0 * half.sz, idx, dims_e)
        m_e += op_a
    h_e += spec.e_e * np.eye(dim_e)

    eig_g, mag_raw = _simultaneous_eigen(h_g, m_g)
    mag = np.round(mag_raw * 2.0) / 2.0
    if np.max(np.abs(mag - mag_raw)) > 1e-6:
        raise ValidationError(
            "ground magnetization did not quantize to half-integers; "
            f"max deviation {np.max(np.abs(mag - mag_raw)):.2e}"
        )
    eig_e = hermitian_eigen(h_e)
    mag_e = np.real(np.einsum("ij,jk,ki->i", eig_e.vectors.conj().T, m_e, eig_e.vectors))

    if spec.include_exciton_electron:
        # spinor S_z = -1/2 is index 1 of the fastest (last) site
        proj = np.zeros((dim_e, dim_g))
        proj[2 * np.arange(dim_g) + 1, np.arange(dim_g)] = 1.0
    else:
        proj = np.eye(dim_e)
    overlap_v = eig_e.vectors.conj().T @ proj @ eig_g.vectors

    gamma = spec.resonance_linewidth
    l0 = resonance_factor(spec)
    trans = np.subtract.outer(eig_e.energies, eig_g.energies)
    det = spec.pump_photon_energy - trans
    lorentz = gamma * gamma / (det * det + gamma * gamma)
    window = np.sqrt(lorentz / l0)

    return HamiltonianPair(
        spec=spec,
        h_ground=h_g,
        h_excited=h_e,
        eig_ground=eig_g,
        eig_excited=eig_e,
        overlap_v=overlap_v,
        ground_axis_magnetization=mag,
        excited_axis_magnetization=mag_e,
        transition_window=window,
        site_dims_ground=dims_g,
        site_dims_excited=dims_e,
    )


def thermal_state(pair: HamiltonianPair, temperature: float | None = None) -> np.ndarray:
    """Boltzmann state exp(-H_ground/kT)/Z in the ground-sector site basis."""
    t = pair.spec.temperature if temperature is None else temperature
    if t <= 0:
        raise ValidationError(f"temperature must be > 0, got {t}")
    e = pair.eig_ground.energies
    w = np.exp(-(e - e.min()) / (K_B * t))
    w /= w.sum()
    v = pair.eig_ground.vectors
    return (v * w) @ v.conj().T
