"""Sampling, sparse graph estimation, StARS tuning and discrepancy rates."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import Dataset, as_dataset
from .errors import ConvergenceFailure, DegenerateColumn, DimensionMismatch, GridExhausted
from .graphs import EdgeSet, Partition
from .linalg import as_sym, cholesky
from .reduction import SAMPLE_METHODS, sample_reduce
from .rng import SAMPLING, SUBSAMPLE, sample_without_replacement, standard_normals, stream_id

RULES = ("or", "and")
ESTIMATORS = ("neighborhood", "threshold")
LASSO_GRID = (0.5, 0.4, 0.3, 0.2, 0.1, 0.05)
THRESHOLD_GRID = tuple(round(0.95 - 0.05 * i, 2) for i in range(19))


def sample_gaussian(sigma, n: int, seed: int) -> Dataset:
    """``n`` rows ``x = L z`` with ``L`` the Cholesky factor and ``z`` from the sampling stream."""
    sigma = as_sym(sigma)
    if n < 2:
        raise ValueError("need n >= 2")
    L = cholesky(sigma)
    z = standard_normals(seed, stream_id(SAMPLING), n * sigma.dim).reshape(n, sigma.dim)
    return Dataset(z @ L.T)


def standardize(x: np.ndarray) -> np.ndarray:
    """Center and scale each column to ``sum(x^2) / n == 1``."""
    xc = x - x.mean(axis=0)
    sd = np.sqrt((xc * xc).mean(axis=0))
    scale = np.abs(x).max(axis=0)
    bad = np.flatnonzero(sd <= 1e-12 * np.maximum(scale, 1e-300))
    if bad.size:
        raise DegenerateColumn(f"column {bad[0] + 1} has zero variance")
    return xc / sd


def correlation(data) -> np.ndarray:
    z = standardize(as_dataset(data).values)
    r = z.T @ z / z.shape[0]
    np.fill_diagonal(r, 1.0)
    return 0.5 * (r + r.T)


def _soft(x: float, t: float) -> float:
    if x > t:
        return x - t
    if x < -t:
        return x + t
    return 0.0


def lasso_objective(gram: np.ndarray, cross: np.ndarray, beta: np.ndarray, lam: float) -> float:
    """``(1/2n)|y - X b|^2 + lam |b|_1`` up to the constant ``y^T y / 2n``."""
    return 0.5 * beta @ gram @ beta - cross @ beta + lam * np.abs(beta).sum()


def lasso_cd(gram: np.ndarray, cross: np.ndarray, lam: float, tol: float = 1e-7,
             max_sweeps: int = 10000, check_objective: bool = False) -> np.ndarray:
    """Cyclic coordinate descent for the lasso in covariance form.

    ``gram = X^T X / n`` (unit diagonal for standardized columns) and
    ``cross = X^T y / n``. Stops when no coefficient moves by more than
    ``tol`` in a sweep.
    """
    p = cross.size
    beta = np.zeros(p)
    if p == 0:
        return beta
    diag = np.diag(gram).copy()
    grad = cross.copy()                     # cross - gram @ beta, kept current
    prev = lasso_objective(gram, cross, beta, lam) if check_objective else None
    for _ in range(max_sweeps):
        delta = 0.0
        for k in range(p):
            old = beta[k]
            new = _soft(grad[k] + diag[k] * old, lam) / diag[k]
            if new != old:
                grad -= gram[:, k] * (new - old)
                beta[k] = new
                delta = max(delta, abs(new - old))
        if check_objective:
            cur = lasso_objective(gram, cross, beta, lam)
            if cur > prev + 1e-12 * max(1.0, abs(prev)):
                raise AssertionError(f"lasso objective rose from {prev} to {cur}")
            prev = cur
        if delta < tol:
            return beta
    raise ConvergenceFailure(f"lasso did not converge in {max_sweeps} sweeps")


def _edges_from_support(support: np.ndarray, rule: str) -> EdgeSet:
    if rule == "or":
        adj = support | support.T
    elif rule == "and":
        adj = support & support.T
    else:
        raise ValueError(f"rule must be one of {RULES}, got {rule!r}")
    return EdgeSet.from_mask(adj)


def neighborhood_support(corr: np.ndarray, lam: float) -> np.ndarray:
    """``support[j, k]`` is True when ``X_k`` enters the lasso for node ``j``."""
    d = corr.shape[0]
    support = np.zeros((d, d), dtype=bool)
    for j in range(d):
        rest = np.r_[0:j, j + 1:d]
        beta = lasso_cd(corr[np.ix_(rest, rest)], corr[rest, j], lam)
        support[j, rest] = beta != 0.0
    return support


def neighborhood_selection(data, lam: float, rule: str = "or") -> EdgeSet:
    """Node-wise lasso on standardized columns; OR (default) or AND symmetrization."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if rule not in RULES:
        raise ValueError(f"rule must be one of {RULES}, got {rule!r}")
    return _edges_from_support(neighborhood_support(correlation(data), lam), rule)


def covariance_threshold(data, tau: float) -> EdgeSet:
    """Edge where the absolute sample correlation exceeds ``tau``."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    r = np.abs(correlation(data))
    np.fill_diagonal(r, 0.0)
    return EdgeSet.from_mask(r > tau)


def estimate_graph(data, estimator: str, param: float, rule: str = "or") -> EdgeSet:
    if estimator == "neighborhood":
        return neighborhood_selection(data, param, rule)
    if estimator == "threshold":
        return covariance_threshold(data, param)
    raise ValueError(f"estimator must be one of {ESTIMATORS}, got {estimator!r}")


# --------------------------------------------------------------------- StARS

@dataclass(frozen=True)
class StarsConfig:
    """Subsampling settings. ``subsample_size`` None means ``min(floor(10 sqrt n), floor(0.8 n))``."""

    grid: tuple[float, ...]
    subsample_count: int = 20
    subsample_size: int | None = None
    beta: float = 0.05

    def __post_init__(self):
        g = tuple(float(v) for v in self.grid)
        if not g:
            raise ValueError("grid must be non-empty")
        diffs = np.diff(g)
        if g and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("grid must be strictly monotone")
        if self.subsample_count < 2:
            raise ValueError("need at least two subsamples")
        if not 0 < self.beta < 0.5:
            raise ValueError("beta must lie in (0, 0.5)")
        if self.subsample_size is not None and self.subsample_size < 2:
            raise ValueError("subsample size must be at least 2")
        object.__setattr__(self, "grid", g)

    @property
    def sparsest_first(self) -> tuple[float, ...]:
        """Larger penalties and thresholds give sparser graphs."""
        return tuple(sorted(self.grid, reverse=True))

    def size_for(self, n: int) -> int:
        b = self.subsample_size
        if b is None:
            b = min(int(np.floor(10 * np.sqrt(n))), int(np.floor(0.8 * n)))
        if not 2 <= b < n:
            raise ValueError(f"subsample size {b} must satisfy 2 <= b < n = {n}")
        return b


@dataclass(frozen=True, eq=False)
class StarsResult:
    selected: float
    index: int
    grid: tuple[float, ...]
    instability: np.ndarray
    monotone: np.ndarray
    graph: EdgeSet
    exhausted: bool
    subsample_size: int

    def curve_rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.grid, self.instability.tolist(), self.monotone.tolist()))


def _subsample_supports(corrs, estimator, grid, rule):
    for c in corrs:
        for param in grid:
            if estimator == "neighborhood":
                yield _edges_from_support(neighborhood_support(c, param), rule).adjacency()
            else:
                r = np.abs(c)
                np.fill_diagonal(r, 0.0)
                yield r > param


def stars_select(data, estimator: str, config: StarsConfig, seed: int, rule: str = "or") -> StarsResult:
    """Pick the least sparse grid value whose monotonized instability stays at or below beta.

    Subsample ``i`` draws ``b`` rows without replacement from stream
    ``(seed, SUBSAMPLE << 32 | i)``. Instability at a grid value is the mean
    over vertex pairs of ``2 θ (1 - θ)`` with ``θ`` the edge frequency
    across subsamples; it is then made non-decreasing along the
    sparsest-first grid. If even the sparsest value is too unstable, the
    sparsest value is returned with ``exhausted`` set and a
    :class:`GridExhausted` warning.
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"estimator must be one of {ESTIMATORS}, got {estimator!r}")
    ds = as_dataset(data)
    n, d = ds.n, ds.d
    b = config.size_for(n)
    grid = config.sparsest_first
    corrs = [correlation(ds.rows(sample_without_replacement(seed, stream_id(SUBSAMPLE, i), n, b)))
             for i in range(config.subsample_count)]
    counts = np.zeros((len(grid), d, d))
    for pos, adj in enumerate(_subsample_supports(corrs, estimator, grid, rule)):
        counts[pos % len(grid)] += adj
    theta = counts / config.subsample_count
    iu = np.triu_indices(d, 1)
    if iu[0].size:
        inst = np.array([np.mean(2 * t[iu] * (1 - t[iu])) for t in theta])
    else:
        inst = np.zeros(len(grid))
    mono = np.maximum.accumulate(inst)
    ok = np.flatnonzero(mono <= config.beta)
    exhausted = ok.size == 0
    idx = 0 if exhausted else int(ok[-1])
    if exhausted:
        warnings.warn(f"no grid value reaches instability {config.beta}; using the sparsest",
                      GridExhausted, stacklevel=2)
    graph = estimate_graph(ds, estimator, grid[idx], rule)
    return StarsResult(grid[idx], idx, grid, inst, mono, graph, exhausted, b)


# -------------------------------------------------------------- discrepancy

def discrepancy_rate(e1: EdgeSet, e2: EdgeSet) -> float:
    """Share of the edges of ``e1`` that ``e2`` lacks; 0 when ``e1`` is empty."""
    if e1.n != e2.n:
        raise DimensionMismatch(f"edge sets on {e1.n} and {e2.n} vertices")
    if not e1.edges:
        return 0.0
    return len(e1.edges - e2.edges) / len(e1.edges)


@dataclass(frozen=True, eq=False)
class DiscrepancyTable:
    methods: tuple[str, ...]
    graph_kind: str
    rates: np.ndarray
    graphs: dict = field(default_factory=dict)
    stars: dict = field(default_factory=dict)

    def csv_rows(self) -> list[list[str]]:
        rows = [["method", *self.methods]]
        for m, row in zip(self.methods, self.rates):
            rows.append([m, *(f"{v:.6f}" for v in row)])
        return rows


def default_config(graph_kind: str) -> StarsConfig:
    return StarsConfig(LASSO_GRID if graph_kind == "conditional" else THRESHOLD_GRID)


def discrepancy_table(data, partition: Partition, methods: Sequence[str], graph_kind: str = "conditional",
                      config: StarsConfig | None = None, seed: int = 0, rule: str = "or") -> DiscrepancyTable:
    """Reduce with each method, estimate the K-vertex graph with StARS, compare pairwise.

    ``rates[i, j]`` is the discrepancy rate of method ``i`` against method ``j``.
    All methods share the same subsamples.
    """
    methods = tuple(methods)
    if not methods:
        raise ValueError("need at least one method")
    unknown = [m for m in methods if m not in SAMPLE_METHODS]
    if unknown:
        raise ValueError(f"unknown methods {unknown}; choose from {SAMPLE_METHODS}")
    if graph_kind not in ("conditional", "marginal"):
        raise ValueError("graph_kind must be 'conditional' or 'marginal'")
    config = config or default_config(graph_kind)
    estimator = "neighborhood" if graph_kind == "conditional" else "threshold"
    graphs, stars = {}, {}
    for m in methods:
        reduced = sample_reduce(data, partition, m)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", GridExhausted)
            res = stars_select(reduced, estimator, config, seed, rule)
        graphs[m], stars[m] = res.graph, res
    rates = np.array([[discrepancy_rate(graphs[a], graphs[b]) for b in methods] for a in methods])
    return DiscrepancyTable(methods, graph_kind, rates, graphs, stars)
