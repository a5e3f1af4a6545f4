"""Finite-spin operator algebra on dense complex matrices.

Basis convention used everywhere: the Sz eigenbasis of each site ordered
by decreasing projection, m = s, s-1, ..., -s.  Multi-site operators are
Kronecker products in the listed site order, so site 0 is the slowest
index and the last site the fastest.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass
class SpinOperatorSet:
    """Matrices Sx, Sy, Sz, S+, S- for one spin-s site."""

    spin: float
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    splus: np.ndarray
    sminus: np.ndarray

    @property
    def dim(self) -> int:
        return int(round(2 * self.spin + 1))


@dataclass
class Eigensystem:
    """Ascending eigenvalues and the matching orthonormal eigenvector columns."""

    energies: np.ndarray
    vectors: np.ndarray


def spin_operators(s: float) -> SpinOperatorSet:
    """Build the standard spin matrices for spin quantum number s.

    s must be a non-negative integer or half-integer.  Ladder elements are
    <m+1|S+|m> = sqrt(s(s+1) - m(m+1)); Sx = (S+ + S-)/2 and
    Sy = (S+ - S-)/(2i).
    """
    if s < 0 or abs(2 * s - round(2 * s)) > 1e-12:
        raise ValidationError(f"spin s must be a half-integer >= 0, got {s}")
    s = round(2 * s) / 2.0
    d = int(round(2 * s + 1))
    m = s - np.arange(d)  # projections, descending
    sz = np.diag(m).astype(complex)
    # S+ raises m by one: nonzero on the superdiagonal in this ordering.
    up = np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1))
    splus = np.diag(up, k=1).astype(complex)
    sminus = splus.conj().T
    sx = 0.5 * (splus + sminus)
    sy = (splus - sminus) / 2j
    return SpinOperatorSet(spin=s, sx=sx, sy=sy, sz=sz, splus=splus, sminus=sminus)


def embed(op: np.ndarray, site_index: int, site_dims: list[int]) -> np.ndarray:
    """Lift a single-site operator into the tensor product of all sites."""
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValidationError(f"embed expects a square matrix, got shape {op.shape}")
    if not site_dims or any(d < 1 for d in site_dims):
        raise ValidationError(f"site_dims must be positive, got {site_dims}")
    if not 0 <= site_index < len(site_dims):
        raise ValidationError(
            f"site_index {site_index} out of range for {len(site_dims)} sites"
        )
    if op.shape[0] != site_dims[site_index]:
        raise ValidationError(
            f"operator dim {op.shape[0]} != site dim {site_dims[site_index]}"
        )
    left = int(np.prod(site_dims[:site_index], dtype=np.int64))
    right = int(np.prod(site_dims[site_index + 1:], dtype=np.int64))
    out = np.kron(np.kron(np.eye(left), op), np.eye(right))
    return out.astype(complex)


def hermitian_eigen(h: np.ndarray, herm_tol: float | None = None) -> Eigensystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Rejects non-Hermitian input, reporting the largest deviation |H - H^dag|.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValidationError(f"hermitian_eigen expects a square matrix, got {h.shape}")
    dev = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if herm_tol is None:
        herm_tol = 1e-9 * max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
    if dev > herm_tol:
        raise ValidationError(
            f"matrix is not Hermitian: max |H - H^dag| = {dev:.3e} exceeds {herm_tol:.1e}"
        )
    energies, vectors = np.linalg.eigh(h)
    return Eigensystem(energies=energies, vectors=vectors)


def evolve(rho: np.ndarray, eig: Eigensystem, t: float) -> np.ndarray:
    """Propagate a density matrix: U rho U^dag with U = V exp(-i E t / hbar) V^dag."""
    from .constants import HBAR

    if t < 0:
        raise ValidationError(f"evolution time must be >= 0, got {t}")
    rho = np.asarray(rho, dtype=complex)
    v = eig.vectors
    if rho.shape != (v.shape[0], v.shape[0]):
        raise ValidationError(
            f"state dim {rho.shape} does not match eigensystem dim {v.shape[0]}"
        )
    phases = np.exp(-1j * eig.energies * (t / HBAR))
    u = (v * phases) @ v.conj().T
    return u @ rho @ u.conj().T
