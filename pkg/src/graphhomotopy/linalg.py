"""Dense symmetric linear algebra with explicit tolerances.

Everything here is a pure function of its inputs. Matrices are carried as
:class:`SymMatrix`, a read-only wrapper around a float64 array that is exactly
symmetric after construction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .errors import ConvergenceFailure, DimensionMismatch, NotPositiveDefinite, NotSymmetric

DEFAULT_TOL = 1e-8
_TIE_GAP = 1e-10
_SIGN_EPS = 1e-12
_NOISE_FLOOR = 1e-12


class SymMatrix:
    """Dense symmetric matrix.

    The input is symmetrized by averaging with its transpose; inputs whose
    largest asymmetry exceeds ``rtol * max|a|`` are rejected. The largest
    asymmetry seen is kept in :attr:`asymmetry`.
    """

    __slots__ = ("_values", "asymmetry")

    def __init__(self, values, *, rtol: float = 1e-8):
        a = np.array(values, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix has non-finite entries")
        asym = float(np.max(np.abs(a - a.T)))
        if asym > rtol * float(np.max(np.abs(a))):
            raise NotSymmetric(f"max |a_ij - a_ji| = {asym:.3g}")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        self._values = a
        self.asymmetry = asym

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dim(self) -> int:
        return self._values.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._values
        return self._values.astype(dtype)

    def __getitem__(self, idx):
        return self._values[idx]

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return np.array_equal(self._values, other._values)

    __hash__ = None

    def __repr__(self):
        return f"SymMatrix({np.array2string(self._values, precision=6)})"

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls(np.eye(n))


def as_sym(m) -> SymMatrix:
    return m if isinstance(m, SymMatrix) else SymMatrix(m)


@dataclass(frozen=True, eq=False)
class ZeroPattern:
    """Boolean mask of structurally nonzero entries; the diagonal is always set."""

    mask: np.ndarray

    def __post_init__(self):
        m = np.array(self.mask, dtype=bool)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch("mask must be square")
        if not np.array_equal(m, m.T):
            raise NotSymmetric("zero pattern must be symmetric")
        np.fill_diagonal(m, True)
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    @property
    def dim(self) -> int:
        return self.mask.shape[0]

    def offdiagonal_pairs(self) -> list[tuple[int, int]]:
        """Nonzero off-diagonal positions as 1-based ``(i, j)`` with ``i < j``."""
        i, j = np.nonzero(np.triu(self.mask, k=1))
        return [(int(a) + 1, int(b) + 1) for a, b in zip(i, j)]

    def __eq__(self, other):
        if not isinstance(other, ZeroPattern):
            return NotImplemented
        return np.array_equal(self.mask, other.mask)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class EigenDecomp:
    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def cholesky(m) -> np.ndarray:
    """Lower Cholesky factor ``L`` with ``L @ L.T == m``.

    Raises :class:`NotPositiveDefinite` as soon as a pivot is at or below
    ``1e-12 * max(diag(m))``.
    """
    a = as_sym(m).values
    n = a.shape[0]
    dmax = float(np.max(np.diag(a)))
    if dmax <= 0.0:
        raise NotPositiveDefinite("matrix has no positive diagonal entry")
    floor = 1e-12 * dmax
    L = np.zeros_like(a)
    for j in range(n):
        row = L[j, :j]
        pivot = a[j, j] - row @ row
        if pivot <= floor:
            raise NotPositiveDefinite(f"pivot {j + 1} is {pivot:.3g} (floor {floor:.3g})")
        L[j, j] = np.sqrt(pivot)
        L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ row) / L[j, j]
    return L


def is_positive_definite(m) -> bool:
    try:
        cholesky(m)
    except NotPositiveDefinite:
        return False
    return True


def invert_pd(m) -> SymMatrix:
    """Inverse of a positive definite matrix via its Cholesky factor."""
    m = as_sym(m)
    L = cholesky(m)
    inv = cho_solve((L, True), np.eye(m.dim))
    return SymMatrix(0.5 * (inv + inv.T))


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint index pairs covering every pair once (circle method)."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            p, q = players[k], players[m - 1 - k]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _jacobi(a: np.ndarray, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n)
    target = 1e-12 * np.linalg.norm(a)
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        off = _off_norm(a)
        if off <= target:
            return np.diag(a).copy(), v
        for p, q in rounds:
            if p.size == 0:
                continue
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            big = np.abs(theta) > 1e150
            theta = np.where(big, 1.0, theta)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(1.0 + theta * theta))
            t = np.where(big, apq / (a[q, q] - a[p, p] + (a[q, q] == a[p, p])), t)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
    off = _off_norm(a)
    if off <= target:
        return np.diag(a).copy(), v
    raise ConvergenceFailure(f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {off:.3g})")


def eigen_groups(values: np.ndarray) -> list[range]:
    """Runs of numerically repeated eigenvalues in a descending spectrum."""
    vals = np.asarray(values)
    n = vals.size
    scale = float(np.max(np.abs(vals))) if n else 0.0
    groups, start = [], 0
    while start < n:
        stop = start + 1
        while stop < n and vals[stop - 1] - vals[stop] < _TIE_GAP * scale:
            stop += 1
        groups.append(range(start, stop))
        start = stop
    return groups


def _lead_index(col: np.ndarray) -> int:
    mag = np.abs(col)
    return int(np.argmax(mag >= mag.max() - _SIGN_EPS))


def _canonical_basis(q: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(q).

    Candidates (the normalized all-ones vector, then e_1, e_2, ...) are
    projected onto the subspace and Gram-Schmidt orthonormalized.
    """
    n, g = q.shape
    cands = [np.ones(n) / np.sqrt(n)] + [np.eye(n)[i] for i in range(n)]
    basis: list[np.ndarray] = []
    for c in cands:
        x = q @ (q.T @ c)
        for b in basis:
            x -= (b @ x) * b
        for b in basis:
            x -= (b @ x) * b
        nrm = np.linalg.norm(x)
        if nrm > 1e-8:
            basis.append(x / nrm)
        if len(basis) == g:
            break
    return np.column_stack(basis)


def sym_eigen(m, *, max_sweeps: int = 100) -> EigenDecomp:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Eigenvalues are sorted descending. Inside a group of (numerically)
    repeated eigenvalues the eigenvectors are replaced by a canonical basis of
    the group's eigenspace and ordered by the index of their
    largest-magnitude component. Each column's first component with magnitude
    above 1e-12 is made positive.
    """
    a = as_sym(m).values
    n = a.shape[0]
    vals, vecs = _jacobi(a, max_sweeps)
    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]

    for grp in eigen_groups(vals):
        start, stop = grp.start, grp.stop
        if stop - start > 1:
            block = _canonical_basis(vecs[:, start:stop])
            lead = [_lead_index(block[:, k]) for k in range(block.shape[1])]
            block = block[:, np.argsort(lead, kind="stable")]
            vecs[:, start:stop] = block
            vals[start:stop] = np.mean(vals[start:stop])

    for k in range(n):
        nz = np.flatnonzero(np.abs(vecs[:, k]) > _SIGN_EPS)
        if nz.size and vecs[nz[0], k] < 0:
            vecs[:, k] = -vecs[:, k]
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return EigenDecomp(vals, vecs)


def woodbury_precision(loadings, sigma_y, psi) -> SymMatrix:
    """``(A Σ_Y A^T + Ψ)^{-1}`` through the Woodbury identity.

    Computed as ``Ψ^{-1} - Ψ^{-1} A (Σ_Y^{-1} + A^T Ψ^{-1} A)^{-1} A^T Ψ^{-1}``,
    so only ``Ψ`` and two K-by-K matrices are ever inverted.
    """
    A = np.asarray(loadings, dtype=np.float64)
    sigma_y, psi = as_sym(sigma_y), as_sym(psi)
    if A.ndim != 2 or A.shape != (psi.dim, sigma_y.dim):
        raise DimensionMismatch(
            f"loadings shape {A.shape} incompatible with psi {psi.dim} and sigma_y {sigma_y.dim}")
    psi_inv = invert_pd(psi).values
    pa = psi_inv @ A
    inner = invert_pd(sigma_y).values + A.T @ pa
    core = invert_pd(inner).values
    out = psi_inv - pa @ core @ pa.T
    return SymMatrix(0.5 * (out + out.T))


def zero_pattern(m, tol: float = DEFAULT_TOL) -> ZeroPattern:
    """Off-diagonal entries larger than ``tol`` times the largest off-diagonal magnitude.

    Entries at or below ``1e-12 * max|m|`` count as zero whatever ``tol`` is.
    Without this floor a matrix that is diagonal up to rounding would have its
    rounding noise promoted to edges by the relative rule.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    a = np.abs(np.asarray(m, dtype=np.float64))
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    biggest = float(off.max()) if off.size else 0.0
    if biggest <= _NOISE_FLOOR * float(a.max()):
        mask = np.zeros_like(off, dtype=bool)
    else:
        mask = off > max(tol * biggest, _NOISE_FLOOR * float(a.max()))
    mask = mask | mask.T
    return ZeroPattern(mask)
