"""Linear dimension reductions and sample-level cluster summaries.

A linear reduction maps cluster ``C_j`` to ``Y_j = w_j^T (X_{C_j} - beta_j)``.
At the population level its effect on a Gaussian model is exact:
``Cov(Y) = W Σ W^T`` where ``W`` stacks the ``w_j`` on their cluster columns.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset, as_dataset
from .errors import (ConvergenceFailure, DegenerateCluster, DimensionMismatch, HeywoodCase,
                     IndexOutOfRange)
from .graphs import GgmModel, Partition
from .linalg import SymMatrix, invert_pd, sym_eigen

SAMPLE_METHODS = ("mean", "median", "pca", "factor")


@dataclass(frozen=True, eq=False)
class LinearReduction:
    directions: tuple[np.ndarray, ...]
    shifts: tuple[np.ndarray, ...]
    method_tag: str = "custom"

    def __post_init__(self):
        dirs = tuple(np.array(w, dtype=np.float64).reshape(-1) for w in self.directions)
        if self.shifts is None or len(self.shifts) == 0:
            shifts = tuple(np.zeros_like(w) for w in dirs)
        else:
            shifts = tuple(np.array(b, dtype=np.float64).reshape(-1) for b in self.shifts)
        if len(shifts) != len(dirs):
            raise DimensionMismatch("one shift vector per direction required")
        for j, (w, b) in enumerate(zip(dirs, shifts)):
            if w.shape != b.shape:
                raise DimensionMismatch(f"cluster {j + 1}: direction and shift lengths differ")
            if np.linalg.norm(w) <= 1e-12:
                raise ValueError(f"cluster {j + 1}: direction has (near) zero norm")
        for arr in dirs + shifts:
            arr.setflags(write=False)
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "shifts", shifts)

    @property
    def K(self) -> int:
        return len(self.directions)

    def check(self, partition: Partition) -> None:
        if self.K != partition.K:
            raise DimensionMismatch(f"reduction has {self.K} directions, partition has K={partition.K}")
        for j, (w, size) in enumerate(zip(self.directions, partition.sizes)):
            if w.size != size:
                raise DimensionMismatch(f"cluster {j + 1}: direction length {w.size}, cluster size {size}")

    def weight_matrix(self, partition: Partition) -> np.ndarray:
        """The ``K x d`` matrix with ``w_j`` on the columns of cluster ``j``."""
        self.check(partition)
        W = np.zeros((partition.K, partition.d))
        for j, w in enumerate(self.directions):
            W[j, partition.indices(j)] = w
        return W

    def apply(self, data, partition: Partition) -> np.ndarray:
        x = np.asarray(data.values if isinstance(data, Dataset) else data, dtype=np.float64)
        self.check(partition)
        out = np.empty((x.shape[0], self.K))
        for j, (w, b) in enumerate(zip(self.directions, self.shifts)):
            out[:, j] = (x[:, partition.indices(j)] - b) @ w
        return out

    def scaled(self, factors: Sequence[float]) -> "LinearReduction":
        return LinearReduction(tuple(c * w for c, w in zip(factors, self.directions)),
                               self.shifts, self.method_tag)

    def with_shifts(self, shifts) -> "LinearReduction":
        return LinearReduction(self.directions, tuple(shifts), self.method_tag)


@dataclass(frozen=True, eq=False)
class ReducedModel:
    sigma_y: SymMatrix
    omega_y: SymMatrix
    reduction: LinearReduction
    partition: Partition

    def __post_init__(self):
        K = self.partition.K
        if self.sigma_y.dim != K or self.omega_y.dim != K:
            raise DimensionMismatch("reduced matrices must be K x K")
        err = np.max(np.abs(self.sigma_y.values @ self.omega_y.values - np.eye(K)))
        if err > 1e-8:
            raise ValueError(f"sigma_y @ omega_y deviates from identity by {err:.3g}")


def build_mean(partition: Partition) -> LinearReduction:
    return LinearReduction(tuple(np.full(s, 1.0 / s) for s in partition.sizes), (), "mean")


def build_weighted(partition: Partition, weights: Sequence[Sequence[float]], tag: str = "weighted"):
    red = LinearReduction(tuple(weights), (), tag)
    red.check(partition)
    return red


def _per_cluster(index, K: int) -> list[int]:
    if np.isscalar(index):
        return [int(index)] * K
    idx = [int(i) for i in index]
    if len(idx) != K:
        raise DimensionMismatch(f"need {K} component indices, got {len(idx)}")
    return idx


def build_pca(model: GgmModel, component_index=1) -> LinearReduction:
    """Per-cluster eigenvectors of ``Cov(X_{C_j})``.

    ``component_index`` is 1-based (1 = leading) and may be a single integer
    or one integer per cluster. Singleton clusters always get direction ``[1]``.
    """
    part = model.partition
    idx = _per_cluster(component_index, part.K)
    dirs = []
    for j, (k, size) in enumerate(zip(idx, part.sizes)):
        if size == 1:
            dirs.append(np.ones(1))
            continue
        if not 1 <= k <= size:
            raise IndexOutOfRange(f"cluster {j + 1} has {size} components, asked for {k}")
        dirs.append(sym_eigen(model.cluster_cov(j)).vectors[:, k - 1].copy())
    return LinearReduction(tuple(dirs), (), "pca")


def reduce_model(model: GgmModel, red: LinearReduction) -> ReducedModel:
    """Exact covariance and concentration of the reduced vector."""
    W = red.weight_matrix(model.partition)
    sigma_y = SymMatrix(W @ model.sigma.values @ W.T)
    return ReducedModel(sigma_y, invert_pd(sigma_y), red, model.partition)


@dataclass(frozen=True, eq=False)
class FactorFit:
    loadings: np.ndarray
    uniquenesses: np.ndarray
    loglik: float
    n_iter: int
    heywood: bool

    def implied_cov(self) -> np.ndarray:
        return np.outer(self.loadings, self.loadings) + np.diag(self.uniquenesses)

    def scores(self, centered: np.ndarray) -> np.ndarray:
        """Regression (Thomson) factor scores ``Λ^T Σ^{-1} (x - mean)``."""
        weights = np.linalg.solve(self.implied_cov(), self.loadings)
        return centered @ weights


def _loglik(S, lam, psi):
    m = S.shape[0]
    sigma = np.outer(lam, lam) + np.diag(psi)
    sign, logdet = np.linalg.slogdet(sigma)
    return -0.5 * (m * np.log(2 * np.pi) + logdet + np.trace(np.linalg.solve(sigma, S)))


def _best_loadings(S, psi):
    """Likelihood-maximizing loadings for fixed uniquenesses."""
    r = 1.0 / np.sqrt(psi)
    eig = sym_eigen(S * np.outer(r, r))
    theta = eig.values[0]
    if theta <= 1.0:
        return np.zeros_like(psi)
    return np.sqrt(psi) * eig.vectors[:, 0] * np.sqrt(theta - 1.0)


def _em_map(S, diag, floor, psi):
    """One EM update of the uniquenesses, loadings profiled out."""
    lam = _best_loadings(S, psi)
    pl = lam / psi
    beta = pl / (1.0 + lam @ pl)
    s_beta = S @ beta
    c = 1.0 - beta @ lam + beta @ s_beta
    lam = s_beta / c
    return np.maximum(diag - lam * s_beta, floor)


def _profile_loglik(S, psi):
    return _loglik(S, _best_loadings(S, psi), psi)


def fit_one_factor(data, max_iter: int = 500, tol: float = 1e-8,
                   heywood_floor: float = 1e-6) -> FactorFit:
    """Maximum-likelihood one-factor model by EM on the sample covariance.

    The factor has unit variance. Loadings are profiled out (for fixed
    uniquenesses they have a closed form), the EM update of the
    uniquenesses is accelerated with SQUAREM extrapolation, and any
    extrapolated step that lowers the likelihood falls back to the plain EM
    step, so the likelihood never decreases. Plain EM crawls when the optimum
    sits at or near the Heywood boundary.

    Uniquenesses start at ``1 / (S^{-1})_ii``, the part of each variance
    not explained by the other variables (half of each variance when the
    sample covariance is singular). Iteration stops once the per-observation
    log-likelihood improves by less than ``tol``. Uniquenesses are floored
    at ``heywood_floor * var(x_i)``; reaching the floor marks the fit as a
    Heywood case and emits a :class:`HeywoodCase` warning.
    """
    x = np.asarray(data.values if isinstance(data, Dataset) else data, dtype=np.float64)
    n, m = x.shape
    if m < 2 or n <= m:
        raise ValueError(f"need n > m >= 2, got n={n}, m={m}")
    xc = x - x.mean(axis=0)
    S = xc.T @ xc / n
    diag = np.diag(S).copy()
    if np.any(diag <= 0):
        raise DegenerateCluster("a variable has zero variance")
    floor = heywood_floor * diag

    # start from one minus the squared multiple correlations
    try:
        psi = np.clip(1.0 / np.diag(np.linalg.inv(S)), floor, diag)
    except np.linalg.LinAlgError:
        psi = np.maximum(0.5 * diag, floor)
    ll = _profile_loglik(S, psi)
    for it in range(1, max_iter + 1):
        p1 = _em_map(S, diag, floor, psi)
        p2 = _em_map(S, diag, floor, p1)
        r = p1 - psi
        v = p2 - p1 - r
        nv = np.linalg.norm(v)
        best, best_ll = p2, _profile_loglik(S, p2)
        if nv > 0:
            alpha = min(-np.linalg.norm(r) / nv, -1.0)
            cand = np.maximum(psi - 2 * alpha * r + alpha * alpha * v, floor)
            cand = _em_map(S, diag, floor, cand)
            cand_ll = _profile_loglik(S, cand)
            if cand_ll > best_ll:
                best, best_ll = cand, cand_ll
        psi = best
        if best_ll - ll < tol:
            ll = best_ll
            break
        ll = best_ll
    else:
        raise ConvergenceFailure(f"factor EM did not converge in {max_iter} iterations")

    lam = _best_loadings(S, psi)
    nz = np.flatnonzero(np.abs(lam) > 1e-12)
    if nz.size and lam[nz[0]] < 0:
        lam = -lam
    heywood = bool(np.any(psi <= floor * (1 + 1e-9)))
    if heywood:
        warnings.warn("uniqueness at the Heywood floor", HeywoodCase, stacklevel=2)
    return FactorFit(lam, psi, float(_loglik(S, lam, psi)), it, heywood)


def _check_cluster_cov(xc: np.ndarray, j: int) -> np.ndarray:
    cov = xc.T @ xc / (xc.shape[0] - 1)
    vals = sym_eigen(cov).values
    if vals[0] <= 0 or vals[-1] <= 1e-10 * vals[0]:
        raise DegenerateCluster(f"cluster {j + 1}: sample covariance is numerically singular")
    return cov


def sample_reduce(data, partition: Partition, method: str) -> Dataset:
    """Summarize each cluster of every observation by one number.

    ``mean`` and ``median`` act row-wise on the raw coordinates. ``pca``
    projects the centered cluster onto the leading eigenvector of its sample
    covariance (divisor ``n - 1``). ``factor`` gives regression scores of a
    fitted one-factor model; a singleton cluster is passed through centered.
    """
    ds = as_dataset(data)
    if ds.d != partition.d:
        raise DimensionMismatch(f"data has {ds.d} columns, partition has d={partition.d}")
    if method not in SAMPLE_METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {SAMPLE_METHODS}")
    x = ds.values
    out = np.empty((ds.n, partition.K))
    for j in range(partition.K):
        block = x[:, partition.indices(j)]
        if method == "mean":
            out[:, j] = block.mean(axis=1)
        elif method == "median":
            out[:, j] = np.median(block, axis=1)
        else:
            xc = block - block.mean(axis=0)
            cov = _check_cluster_cov(xc, j)
            if block.shape[1] == 1:
                out[:, j] = xc[:, 0]
            elif method == "pca":
                out[:, j] = xc @ sym_eigen(cov).vectors[:, 0]
            else:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", HeywoodCase)
                    fit = fit_one_factor(block)
                out[:, j] = fit.scores(xc)
    return Dataset(out)
