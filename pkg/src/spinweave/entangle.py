"""Entanglement measures for small multi-site spin states.

Works on the same tensor-product site basis as the simulator (site 0 is
the slowest index, per-site levels ordered by descending magnetization).
Negativity is the partial-transpose measure N = (||rho^T_A||_1 - 1)/2,
an entanglement witness for any bipartition of a mixed state; von
Neumann entropies are in bits.  Also builds symmetric (Dicke) states
|S-k> of the maximal-spin sector and phase-wound superpositions
sum_k C_k e^{i k omega0 t} |S-k> for genericity tests.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .spinalg import embed, spin_operators


@dataclass
class Bipartition:
    """A cut of a multi-site system: the `keep` sites versus the rest."""

    site_dims: list[int]
    keep: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        self.site_dims = [int(d) for d in self.site_dims]
        self.keep = frozenset(int(k) for k in self.keep)
        n = len(self.site_dims)
        if n < 1 or any(d < 1 for d in self.site_dims):
            raise ValidationError("site_dims must be positive integers")
        if not self.keep:
            raise ValidationError("bipartition must keep at least one site")
        if any(k < 0 or k >= n for k in self.keep):
            raise ValidationError(f"keep indices {sorted(self.keep)} out of range")
        if len(self.keep) >= n:
            raise ValidationError("bipartition must be a proper subset of the sites")

    @property
    def dim(self) -> int:
        return int(np.prod(self.site_dims))


def _as_partition(part, keep) -> Bipartition:
    if isinstance(part, Bipartition):
        return part
    return Bipartition(site_dims=list(part), keep=frozenset(keep))


def _check_dim(rho: np.ndarray, part: Bipartition) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.shape != (part.dim, part.dim):
        raise ValidationError(
            f"matrix shape {rho.shape} does not match site dims {part.site_dims}"
        )
    return rho


def partial_trace(rho: np.ndarray, part, keep=None) -> np.ndarray:
    """Reduced density matrix on the kept sites; the trace is preserved.

    Accepts either a Bipartition or (site_dims, keep).
    """
    part = _as_partition(part, keep)
    rho = _check_dim(rho, part)
    dims = part.site_dims
    n = len(dims)
    t = rho.reshape(dims + dims)
    m = n
    for site in range(n - 1, -1, -1):
        if site in part.keep:
            continue
        t = np.trace(t, axis1=site, axis2=site + m)
        m -= 1
    d = int(np.prod([dims[k] for k in sorted(part.keep)]))
    return t.reshape(d, d)


def purity(rho: np.ndarray) -> float:
    # Tr(rho rho^dag): equals Tr(rho^2) for Hermitian input, and stays a sum
    # of |rho_ij|^2 (not rho_ij^2) when the matrix is complex
    rho = np.asarray(rho)
    return float(np.real(np.sum(rho * rho.conj())))


def vn_entropy(rho: np.ndarray, base: float = 2.0) -> float:
    """Von Neumann entropy -Tr rho log rho in base-`base` units (bits by default)."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError("entropy needs a square density matrix")
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1.0) > 1e-8:
        raise ValidationError(f"entropy needs unit trace, got {tr!r}")
    evals = np.linalg.eigvalsh(rho)
    if evals[0] < -1e-8:
        raise ValidationError(f"density matrix not positive (min eigenvalue {evals[0]:.3e})")
    evals = evals[evals > 1e-14]
    return float(-np.sum(evals * np.log(evals)) / math.log(base))


def negativity(rho: np.ndarray, part, keep=None) -> float:
    """(||rho^T_keep||_1 - 1)/2: sum of negative partial-transpose eigenvalues."""
    part = _as_partition(part, keep)
    rho = _check_dim(rho, part)
    dims = part.site_dims
    n = len(dims)
    t = rho.reshape(dims + dims)
    for site in sorted(part.keep):
        t = np.swapaxes(t, site, site + n)
    evals = np.linalg.eigvalsh(t.reshape(part.dim, part.dim))
    return float(-np.sum(evals[evals < 0.0]))


def dicke_state(n_spins: int, spin_s: float, k: int) -> np.ndarray:
    """Symmetric total-spin state |S-k> with S = n_spins * spin_s.

    Built by applying the collective lowering operator k times to the
    stretched (all-up) product state and normalizing.  For spin-1/2 this
    is the equal-weight superposition of all weight-k flip patterns
    (k = 1 is the W state).
    """
    two_s = round(2 * spin_s)
    if n_spins < 1 or two_s < 1 or abs(2 * spin_s - two_s) > 1e-12:
        raise ValidationError("spin_s must be a positive half-integer")
    s_big = n_spins * spin_s
    if not 0 <= k <= round(2 * s_big):
        raise ValidationError(f"k must lie in [0, {round(2 * s_big)}], got {k}")
    ops = spin_operators(spin_s)
    dims = [ops.dim] * n_spins
    dim = ops.dim**n_spins
    psi = np.zeros(dim, dtype=complex)
    psi[0] = 1.0  # index 0 on every site is m = +s
    if k == 0:
        return psi
    lower = np.zeros((dim, dim), dtype=complex)
    for site in range(n_spins):
        lower = lower + embed(ops.sminus, site, dims)
    for _ in range(k):
        psi = lower @ psi
        norm = np.linalg.norm(psi)
        if norm == 0:  # pragma: no cover - guarded by the k range check
            raise ValidationError("lowering annihilated the state")
        psi = psi / norm
    return psi


@dataclass
class SymmetricSuperposition:
    """Coefficients C_k over the Dicke ladder |S-k>, k = 0 .. 2S."""

    n_spins: int
    spin_s: float
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        s_big = self.n_spins * self.spin_s
        n_coef = round(2 * s_big) + 1
        if self.n_spins < 2:
            raise ValidationError("need at least two spins")
        if self.coefficients.shape != (n_coef,):
            raise ValidationError(
                f"need {n_coef} coefficients for S = {s_big}, got {self.coefficients.shape}"
            )
        norm = np.linalg.norm(self.coefficients)
        if abs(norm - 1.0) > 1e-12:
            raise ValidationError(f"coefficients must be unit norm, |C| = {norm!r}")


def superposition_state(
    sup: SymmetricSuperposition, t: float = 0.0, omega0: float = 0.0
) -> np.ndarray:
    """State vector sum_k C_k e^{i k omega0 t} |S-k>, normalized."""
    dim = round(2 * sup.spin_s + 1) ** sup.n_spins
    psi = np.zeros(dim, dtype=complex)
    for k, c in enumerate(sup.coefficients):
        if c == 0:
            continue
        phase = np.exp(1j * k * omega0 * t)
        psi += c * phase * dicke_state(sup.n_spins, sup.spin_s, k)
    norm = np.linalg.norm(psi)
    if norm < 1e-12:  # pragma: no cover - unit-norm C forbids this
        raise ValidationError("superposition cancelled to zero")
    return psi / norm


def haar_random_coefficients(n_coef: int, rng: np.random.Generator) -> np.ndarray:
    """Unit vector uniform on the complex sphere (normalized complex Gaussian)."""
    if n_coef < 1:
        raise ValidationError("need at least one coefficient")
    z = rng.standard_normal(n_coef) + 1j * rng.standard_normal(n_coef)
    return z / np.linalg.norm(z)


def density_from_state(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValidationError("cannot normalize the zero vector")
    psi = psi / norm
    return np.outer(psi, psi.conj())


_PURITY_TOL = 1e-6


def entanglement_report(state, site_dims) -> dict:
    """Single-site bipartition summary for a pure state vector or density matrix.

    Each entry reports the cut "i|rest" with its negativity, the site
    purity, and (for pure inputs only) the entanglement entropy in bits.
    Sites with purity below 1 - 1e-6 count as entangled participants.
    """
    dims = [int(d) for d in site_dims]
    total = int(np.prod(dims))
    state = np.asarray(state)
    if state.ndim == 1:
        if state.shape != (total,):
            raise ValidationError(
                f"state length {state.shape} does not match site dims {dims}"
            )
        rho = density_from_state(state)
        pure = True
    else:
        rho = state
        if rho.shape != (total, total):
            raise ValidationError(
                f"matrix shape {rho.shape} does not match site dims {dims}"
            )
        tr = float(np.real(np.trace(rho)))
        if abs(tr - 1.0) > 1e-8:
            raise ValidationError(f"density matrix must have unit trace, got {tr!r}")
        pure = purity(rho) > 1.0 - _PURITY_TOL
    if len(dims) < 2:
        raise ValidationError("a report needs at least two sites")

    entries = []
    n_entangled = 0
    purities = []
    for i in range(len(dims)):
        part = Bipartition(site_dims=dims, keep=frozenset([i]))
        rho_i = partial_trace(rho, part)
        p_i = purity(rho_i)
        purities.append(p_i)
        if p_i < 1.0 - _PURITY_TOL:
            n_entangled += 1
        entries.append(
            {
                "bipartition": f"{i}|rest",
                "negativity": negativity(rho, part),
                "entropy_bits": vn_entropy(rho_i) if pure else None,
                "purity": p_i,
            }
        )
    return {
        "site_dims": dims,
        "pure_input": pure,
        "bipartitions": entries,
        "min_single_site_purity": min(purities),
        "entangled_participant_count": n_entangled,
    }
