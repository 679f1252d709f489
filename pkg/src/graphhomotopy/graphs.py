"""Gaussian graphical models, cluster partitions and their graphs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch
from .linalg import DEFAULT_TOL, SymMatrix, as_sym, invert_pd, zero_pattern


@dataclass(frozen=True)
class Partition:
    """Disjoint clusters ``C_1..C_K`` covering ``{1..d}`` (1-based indices).

    Clusters need not be contiguous. :attr:`block_order` is the permutation
    (0-based) that lists the variables cluster by cluster, i.e. the ordering
    in which ``X = (X_{C_1}, ..., X_{C_K})``.
    """

    clusters: tuple[tuple[int, ...], ...]

    def __init__(self, clusters: Iterable[Iterable[int]]):
        cl = tuple(tuple(int(i) for i in c) for c in clusters)
        if not cl:
            raise ValueError("partition needs at least one cluster")
        if any(len(c) == 0 for c in cl):
            raise ValueError("clusters must be non-empty")
        flat = [i for c in cl for i in c]
        d = len(flat)
        if len(set(flat)) != d:
            raise ValueError("clusters overlap")
        if set(flat) != set(range(1, d + 1)):
            raise ValueError(f"clusters must cover 1..{d} exactly")
        object.__setattr__(self, "clusters", cl)

    @classmethod
    def contiguous(cls, sizes: Sequence[int]) -> "Partition":
        out, start = [], 1
        for s in sizes:
            out.append(range(start, start + s))
            start += s
        return cls(out)

    @classmethod
    def singletons(cls, d: int) -> "Partition":
        return cls([[i] for i in range(1, d + 1)])

    @property
    def d(self) -> int:
        return sum(len(c) for c in self.clusters)

    @property
    def K(self) -> int:
        return len(self.clusters)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.clusters)

    def indices(self, j: int) -> np.ndarray:
        """0-based column indices of cluster ``j`` (0-based cluster index)."""
        return np.asarray(self.clusters[j], dtype=int) - 1

    @property
    def block_order(self) -> np.ndarray:
        return np.concatenate([self.indices(j) for j in range(self.K)])

    @property
    def is_contiguous(self) -> bool:
        return bool(np.array_equal(self.block_order, np.arange(self.d)))

    def labels(self) -> np.ndarray:
        """Cluster index (0-based) of every variable."""
        lab = np.empty(self.d, dtype=int)
        for j in range(self.K):
            lab[self.indices(j)] = j
        return lab

    def to_json(self) -> list[list[int]]:
        return [list(c) for c in self.clusters]


@dataclass(frozen=True)
class EdgeSet:
    """Undirected simple graph on vertices ``1..n``; edges stored as ``(j, k)``, ``j < k``."""

    n: int
    edges: frozenset

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        n = int(n)
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        canon = set()
        for j, k in edges:
            j, k = int(j), int(k)
            if j == k:
                raise ValueError(f"self-loop at vertex {j}")
            a, b = min(j, k), max(j, k)
            if a < 1 or b > n:
                raise ValueError(f"edge ({j}, {k}) outside 1..{n}")
            canon.add((a, b))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(canon))

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "EdgeSet":
        m = np.asarray(mask, dtype=bool)
        i, j = np.nonzero(np.triu(m | m.T, k=1))
        return cls(m.shape[0], zip(i + 1, j + 1))

    @classmethod
    def complete(cls, n: int) -> "EdgeSet":
        return cls(n, ((j, k) for j in range(1, n + 1) for k in range(j + 1, n + 1)))

    def sorted(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for j, k in self.edges:
            a[j - 1, k - 1] = a[k - 1, j - 1] = True
        return a

    def __len__(self):
        return len(self.edges)

    def __contains__(self, pair):
        j, k = pair
        return (min(j, k), max(j, k)) in self.edges

    def __iter__(self):
        return iter(self.sorted())

    def issubset(self, other: "EdgeSet") -> bool:
        _same_n(self, other)
        return self.edges <= other.edges

    def to_json(self) -> list[list[int]]:
        return [list(e) for e in self.sorted()]


def _same_n(a: EdgeSet, b: EdgeSet) -> None:
    if a.n != b.n:
        raise DimensionMismatch(f"edge sets on {a.n} and {b.n} vertices")


@dataclass(frozen=True, eq=False)
class GgmModel:
    """Zero-mean Gaussian ``N_d(0, Σ)`` with its concentration matrix and clustering."""

    sigma: SymMatrix
    omega: SymMatrix
    partition: Partition

    def __post_init__(self):
        d = self.partition.d
        if self.sigma.dim != d or self.omega.dim != d:
            raise DimensionMismatch(
                f"matrices are {self.sigma.dim}x{self.sigma.dim}, partition has d={d}")
        err = np.max(np.abs(self.sigma.values @ self.omega.values - np.eye(d)))
        if err > 1e-8:
            raise ValueError(f"sigma @ omega deviates from identity by {err:.3g}")

    @property
    def d(self) -> int:
        return self.partition.d

    @property
    def K(self) -> int:
        return self.partition.K

    def cluster_cov(self, j: int) -> np.ndarray:
        idx = self.partition.indices(j)
        return self.sigma.values[np.ix_(idx, idx)]


def model_from_precision(omega, partition: Partition) -> GgmModel:
    omega = as_sym(omega)
    if omega.dim != partition.d:
        raise DimensionMismatch(f"omega is {omega.dim}x{omega.dim}, partition has d={partition.d}")
    return GgmModel(invert_pd(omega), omega, partition)


def model_from_covariance(sigma, partition: Partition) -> GgmModel:
    sigma = as_sym(sigma)
    if sigma.dim != partition.d:
        raise DimensionMismatch(f"sigma is {sigma.dim}x{sigma.dim}, partition has d={partition.d}")
    return GgmModel(sigma, invert_pd(sigma), partition)


def conditional_graph(model: GgmModel, tol: float = DEFAULT_TOL) -> EdgeSet:
    """Edges where the concentration matrix is nonzero (Gaussian conditional dependence)."""
    return EdgeSet.from_mask(zero_pattern(model.omega, tol).mask)


def marginal_graph(model: GgmModel, tol: float = DEFAULT_TOL) -> EdgeSet:
    """Edges where the covariance is nonzero (Gaussian marginal dependence)."""
    return EdgeSet.from_mask(zero_pattern(model.sigma, tol).mask)


def cluster_graph(raw: EdgeSet, partition: Partition) -> EdgeSet:
    """Clusters ``j, k`` are adjacent iff some raw edge crosses between them."""
    if raw.n != partition.d:
        raise DimensionMismatch(f"graph has {raw.n} vertices, partition has d={partition.d}")
    lab = partition.labels()
    out = set()
    for a, b in raw.edges:
        ca, cb = lab[a - 1], lab[b - 1]
        if ca != cb:
            out.add((int(ca) + 1, int(cb) + 1))
    return EdgeSet(partition.K, out)


def to_dot(graph: EdgeSet, labels: Sequence[str] | None = None, name: str = "G") -> str:
    """Render an undirected graph in DOT."""
    if labels is None:
        labels = [str(i) for i in range(1, graph.n + 1)]
    if len(labels) != graph.n:
        raise DimensionMismatch("one label per vertex required")
    lines = [f"graph {name} {{"]
    for i, lab in enumerate(labels, start=1):
        esc = str(lab).replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'  {i} [label="{esc}"];')
    for j, k in graph.sorted():
        lines.append(f"  {j} -- {k};")
    lines.append("}")
    return "\n".join(lines) + "\n"
