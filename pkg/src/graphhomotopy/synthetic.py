"""Seeded random instances of the model families used in the property suites.

Every generator takes an :class:`~graphhomotopy.rng.Stream` (or a seed) and
consumes it in a fixed order, so a seed always yields the same instance.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import block_diag

from .graphs import GgmModel, Partition, model_from_covariance, model_from_precision
from .homotopy import (FactorModel, LatentRotationSpec, MarginalLinear, SpectralChordSpec,
                       StructuredPrecision)
from .linalg import SymMatrix, sym_eigen
from .rng import GENERATOR, Stream, stream_id


def stream(seed: int, index: int = 0) -> Stream:
    return Stream(seed, stream_id(GENERATOR, index))


def _as_stream(s) -> Stream:
    return s if isinstance(s, Stream) else stream(int(s))


def random_orthogonal(s: Stream, n: int) -> np.ndarray:
    """QR of a Gaussian matrix with the sign of ``diag(R)`` absorbed (Haar)."""
    q, r = np.linalg.qr(s.normal((n, n)))
    return q * np.where(np.diag(r) < 0, -1.0, 1.0)


def random_pd(s: Stream, d: int, low: float = 0.2, high: float = 5.0) -> np.ndarray:
    """``Q diag(λ) Q^T`` with Haar ``Q`` and log-uniform eigenvalues in ``[low, high]``."""
    q = random_orthogonal(s, d)
    lam = np.exp(s.uniform(np.log(low), np.log(high), d))
    m = (q * lam) @ q.T
    return 0.5 * (m + m.T)


def sparse_precision(s: Stream, K: int, density: float = 0.4, nonpositive: bool = False,
                     margin: tuple[float, float] = (0.5, 1.5)) -> np.ndarray:
    """Diagonally dominant matrix with a random off-diagonal support.

    At least one off-diagonal pair is left at zero when ``K >= 3`` so that
    the support is never complete.
    """
    m = np.zeros((K, K))
    pairs = [(j, k) for j in range(K) for k in range(j + 1, K)]
    for j, k in pairs:
        keep = s.uniform() < density
        val = s.uniform(0.2, 1.0)
        sign = -1.0 if nonpositive or s.uniform() < 0.5 else 1.0
        if keep:
            m[j, k] = m[k, j] = sign * val
    if K >= 3 and np.all(m[np.triu_indices(K, 1)] != 0):
        j, k = pairs[s.integers(0, len(pairs))]
        m[j, k] = m[k, j] = 0.0
    np.fill_diagonal(m, np.abs(m).sum(axis=1) + s.uniform(*margin, K))
    return m


def random_sizes(s: Stream, K: int, low: int = 1, high: int = 4) -> list[int]:
    return [s.integers(low, high + 1) for _ in range(K)]


def random_partition(s: Stream, sizes, shuffle: bool = True) -> Partition:
    """Clusters with the given sizes, over a random relabeling of ``1..d``."""
    d = int(sum(sizes))
    labels = s.permutation(d) + 1 if shuffle else np.arange(1, d + 1)
    out, start = [], 0
    for size in sizes:
        out.append(sorted(int(i) for i in labels[start:start + size]))
        start += size
    return Partition(out)


# ------------------------------------------------------------- factor models

def _below_inverse(s: Stream, K: int, floor: np.ndarray, density: float = 0.4) -> np.ndarray:
    """A covariance ``Q^{-1} - diag(floor)`` whose shifted inverse ``Q`` is sparse."""
    q = sparse_precision(s, K, density)
    q *= 1.0 / (2.0 * floor.max() * sym_eigen(q).values[0])
    return np.linalg.inv(q) - np.diag(floor)


def random_factor_model(s, K: int | None = None, block_psi: bool = True,
                        planted: bool = False, max_d: int = 30) -> FactorModel:
    """Factor model with ``d <= max_d``.

    With ``planted`` the latent covariance is chosen so that
    ``(Σ_Y + Φ)^{-1}`` has exact zeros, which makes the cluster graph sparse.
    Without ``block_psi`` a small dense perturbation couples the noise across
    clusters.
    """
    s = _as_stream(s)
    K = K or s.integers(2, 7)
    sizes = random_sizes(s, K, 1, 5)
    while sum(sizes) > max_d:
        sizes[int(np.argmax(sizes))] -= 1
    part = Partition.contiguous(sizes)
    loadings = [s.normal(n) + np.sign(s.uniform(-1, 1)) * 0.5 for n in sizes]
    psi_blocks = [random_pd(s, n, 0.3, 2.0) for n in sizes]
    psi = block_diag(*psi_blocks)
    if not block_psi:
        d = part.d
        noise = s.normal((d, d)) * 0.02
        psi = psi + 0.5 * (noise + noise.T)
        psi += np.eye(d) * max(0.0, 0.05 - sym_eigen(psi).values[-1])
    if planted:
        q = [a @ np.linalg.solve(b, a) for a, b in zip(loadings, psi_blocks)]
        sigma_y = _below_inverse(s, K, 1.0 / np.asarray(q))
    else:
        sigma_y = random_pd(s, K, 0.3, 3.0)
    return FactorModel(part, tuple(loadings), SymMatrix(sigma_y), SymMatrix(psi))


# ------------------------------------------------------ spectral chord model

def random_groups(s: Stream, K: int, max_groups: int = 3) -> list[list[int]]:
    """Random split of ``0..K-1`` into non-empty groups."""
    g = s.integers(1, min(K, max_groups) + 1)
    perm = s.permutation(K)
    cuts = sorted(s.permutation(K - 1)[:g - 1] + 1) if g > 1 else []
    bounds = [0, *cuts, K]
    return [sorted(int(i) for i in perm[a:b]) for a, b in zip(bounds[:-1], bounds[1:])]


def group_eigenvectors(s: Stream, groups, K: int) -> np.ndarray:
    """Orthogonal matrix whose columns are each supported on one group."""
    U = np.zeros((K, K))
    col = 0
    for grp in groups:
        q = random_orthogonal(s, len(grp))
        U[np.ix_(grp, range(col, col + len(grp)))] = q
        col += len(grp)
    return U


def random_spectral_chord(s, K: int | None = None, d1: int | None = None) -> SpectralChordSpec:
    """Eigenvectors with disjoint group supports; eigenvalues log-uniform in [0.5, 5]."""
    s = _as_stream(s)
    K = K or s.integers(3, 7)
    d1 = d1 or s.integers(1, 4)
    groups = random_groups(s, K)
    U = group_eigenvectors(s, groups, K)
    lam = np.exp(s.uniform(np.log(0.5), np.log(5.0), K))
    sigma_y = (U * lam) @ U.T
    loading = s.normal(d1) + 0.5
    psi1 = random_pd(s, d1, 0.3, 2.0)
    return SpectralChordSpec(loading, SymMatrix(psi1), SymMatrix(0.5 * (sigma_y + sigma_y.T)))


def unstructured_spectral_chord(s, K: int = 4, d1: int = 2) -> SpectralChordSpec:
    """Generic eigenvectors but a planted zero in ``(Σ_Y + σ² I)^{-1}``.

    Condition checks then have something to test: the zero pairs exist and
    the dense eigenvectors couple them.
    """
    s = _as_stream(s)
    loading = s.normal(d1) + 0.5
    psi1 = random_pd(s, d1, 0.3, 2.0)
    sigma2 = 1.0 / (loading @ np.linalg.solve(psi1, loading))
    sigma_y = _below_inverse(s, K, np.full(K, sigma2), density=1.0)
    return SpectralChordSpec(loading, SymMatrix(psi1), SymMatrix(sigma_y))


# ------------------------------------------------------ latent rotation model

def _distinct_scales(s: Stream, d_f: int) -> np.ndarray:
    while True:
        v = s.uniform(0.5, 2.0, d_f)
        if d_f < 2 or np.min(np.diff(np.sort(v))) >= 1e-3:
            return v


def coupling_dominant(s: Stream, K: int, zeros=()) -> np.ndarray:
    """``0.5 (B + B^T) + c I`` with uniform ``B`` and ``c`` giving diagonal dominance."""
    B = s.uniform(0.0, 1.0, (K, K))
    A = 0.5 * (B + B.T)
    for j, k in zeros:
        A[j, k] = A[k, j] = 0.0
    np.fill_diagonal(A, 0.0)
    np.fill_diagonal(A, A.sum(axis=1) + s.uniform(0.5, 1.5, K))
    return A


def coupling_m_matrix(s: Stream, K: int, density: float = 0.4,
                      margin: tuple[float, float] = (0.5, 1.5)) -> np.ndarray:
    """Nonnegative coupling whose inverse is sparse.

    ``Q`` is a diagonally dominant matrix with nonpositive off-diagonals (an
    M-matrix), so ``A = Q^{-1}`` is entrywise nonnegative and PD with the
    zeros of ``Q`` in ``A^{-1}``.
    """
    A = np.linalg.inv(sparse_precision(s, K, density, nonpositive=True, margin=margin))
    A = 0.5 * (A + A.T)
    return np.maximum(A, 0.0)


def random_latent_rotation(s, K: int | None = None, d_f: int | None = None,
                           coupling: str = "dominant", zeros=(), density: float = 0.4,
                           margin: tuple[float, float] = (0.5, 1.5)) -> LatentRotationSpec:
    """Random instance with ``K <= 6`` and ``d_f <= 5`` by default.

    ``coupling`` is ``"dominant"`` (dense ``A``, optional planted zeros in
    ``A``) or ``"m-matrix"`` (sparse ``A^{-1}``, with ``margin`` the range of
    its diagonal excess; a small margin means strong coupling).
    """
    s = _as_stream(s)
    K = K or s.integers(2, 7)
    d_f = d_f or s.integers(1, 6)
    if coupling == "dominant":
        A = coupling_dominant(s, K, zeros)
    elif coupling == "m-matrix":
        A = coupling_m_matrix(s, K, density, margin)
    else:
        raise ValueError(f"unknown coupling {coupling!r}")
    scales = tuple(_distinct_scales(s, d_f) for _ in range(K))
    rotations = tuple(random_orthogonal(s, d_f) for _ in range(K))
    return LatentRotationSpec(SymMatrix(A), scales, rotations)


# ------------------------------------------------ structured concentration

def _block_masked_pd(s: Stream, labels: np.ndarray, drop: set) -> np.ndarray:
    """Diagonally dominant matrix with cross-cluster blocks in ``drop`` zeroed."""
    n = labels.size
    m = s.uniform(-1.0, 1.0, (n, n))
    m = 0.5 * (m + m.T)
    for i in range(n):
        for k in range(n):
            pair = (min(labels[i], labels[k]), max(labels[i], labels[k]))
            if pair in drop:
                m[i, k] = 0.0
    np.fill_diagonal(m, 0.0)
    np.fill_diagonal(m, np.abs(m).sum(axis=1) + s.uniform(0.5, 1.5, n))
    return m


def random_invertible(s: Stream, n: int) -> np.ndarray:
    """Orthogonal times a diagonal scaling times orthogonal: condition number <= 4."""
    return random_orthogonal(s, n) @ np.diag(s.uniform(0.5, 2.0, n)) @ random_orthogonal(s, n)


def random_structured_precision(s, K: int | None = None, strict: bool = True,
                                orthogonal: bool = False) -> StructuredPrecision:
    """Λ couples first coordinates only among themselves (a K x K head ``M``).

    The remaining coordinates form a tail ``R``. For a strict instance every
    cluster pair with ``M_jk = 0`` also has a zero ``R`` block; otherwise at
    least one such pair keeps a nonzero tail block (when one exists).
    """
    s = _as_stream(s)
    K = K or s.integers(2, 6)
    sizes = random_sizes(s, K, 1, 4)
    if not strict:
        sizes = [max(2, n) for n in sizes]
    head = sparse_precision(s, K, 0.5)
    zero_pairs = {(j, k) for j in range(K) for k in range(j + 1, K) if head[j, k] == 0}
    if strict:
        drop = zero_pairs
    else:
        keep = sorted(zero_pairs)[s.integers(0, len(zero_pairs))] if zero_pairs else None
        drop = {p for p in zero_pairs if p != keep and s.uniform() < 0.5}
    tail_labels = np.concatenate([np.full(n - 1, j) for j, n in enumerate(sizes)]).astype(int)
    tail = _block_masked_pd(s, tail_labels, drop) if tail_labels.size else np.zeros((0, 0))

    d = sum(sizes)
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int)
    head_idx = starts
    tail_idx = np.array([starts[j] + i for j, n in enumerate(sizes) for i in range(1, n)], dtype=int)
    lam = np.zeros((d, d))
    lam[np.ix_(head_idx, head_idx)] = head
    if tail_idx.size:
        lam[np.ix_(tail_idx, tail_idx)] = tail
    draw = random_orthogonal if orthogonal else random_invertible
    transforms = tuple(draw(s, n) for n in sizes)
    return StructuredPrecision(random_partition(s, sizes), transforms, SymMatrix(lam))


# ------------------------------------------------------------ other families

def planted_zero_model(s, K: int | None = None) -> tuple[GgmModel, list[tuple[int, int]]]:
    """Gaussian model with exactly zero cross-covariance blocks ``Σ_{C_j, C_k}``.

    Returns the model and the planted 1-based cluster pairs.
    """
    s = _as_stream(s)
    K = K or s.integers(3, 7)
    sizes = random_sizes(s, K, 1, 4)
    pairs = [(j, k) for j in range(K) for k in range(j + 1, K)]
    planted = {p for p in pairs if s.uniform() < 0.4}
    if not planted:
        planted = {pairs[s.integers(0, len(pairs))]}
    labels = np.concatenate([np.full(n, j) for j, n in enumerate(sizes)]).astype(int)
    sigma_blocks = _block_masked_pd(s, labels, planted)
    part = random_partition(s, sizes)
    sigma = np.empty_like(sigma_blocks)
    order = part.block_order
    sigma[np.ix_(order, order)] = sigma_blocks
    model = model_from_covariance(SymMatrix(sigma), part)
    return model, sorted((j + 1, k + 1) for j, k in planted)


def random_model(s, d: int | None = None, K: int | None = None, sparse: bool = True) -> GgmModel:
    """Model with a random (optionally sparse) concentration and random clusters."""
    s = _as_stream(s)
    d = d or s.integers(3, 11)
    omega = sparse_precision(s, d, 0.35) if sparse else random_pd(s, d)
    K = K or s.integers(1, d + 1)
    cuts = sorted(s.permutation(d - 1)[:K - 1] + 1) if K > 1 else []
    sizes = np.diff([0, *cuts, d]).tolist()
    return model_from_precision(SymMatrix(omega), random_partition(s, sizes))


def random_marginal_linear(s, d: int) -> MarginalLinear:
    """Mixed-sign scalings with magnitudes log-uniform in [0.1, 10]."""
    s = _as_stream(s)
    mag = np.exp(s.uniform(np.log(0.1), np.log(10.0), d))
    sign = np.where(s.uniform(size=d) < 0.5, -1.0, 1.0)
    return MarginalLinear(tuple(s.normal(d).tolist()), tuple((sign * mag).tolist()))
