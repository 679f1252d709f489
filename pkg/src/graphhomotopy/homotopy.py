"""Graph-homotopy verdicts and executable forms of the preservation conditions.

The checks all follow one recipe: assemble the raw model, read the cluster
graph ``E_C`` off the block zero pattern of the raw concentration matrix,
read ``E_DR`` off the concentration matrix of the reduced vector, and compare.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag

from .errors import (DegenerateSpectrum, DimensionMismatch, IndexOutOfRange, NotPositiveDefinite,
                     PropertyViolation, SingularTransform)
from .graphs import (EdgeSet, GgmModel, Partition, cluster_graph, conditional_graph,
                     marginal_graph, model_from_covariance, model_from_precision)
from .linalg import (DEFAULT_TOL, SymMatrix, as_sym, eigen_groups, invert_pd, is_positive_definite,
                     sym_eigen, woodbury_precision, zero_pattern)
from .reduction import LinearReduction, ReducedModel, build_pca, reduce_model


class Status(str, enum.Enum):
    HOMOTOPIC = "Homotopic"
    WEAKLY_HOMOTOPIC = "WeaklyHomotopic"
    NOT_HOMOTOPIC = "NotHomotopic"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class HomotopyVerdict:
    status: Status
    spurious_edges: tuple[tuple[int, int], ...] = ()
    missing_edges: tuple[tuple[int, int], ...] = ()

    @property
    def is_weak(self) -> bool:
        """True for Homotopic and WeaklyHomotopic (no spurious edges)."""
        return self.status is not Status.NOT_HOMOTOPIC

    def to_json(self) -> dict:
        return {"status": self.status.value,
                "spurious_edges": [list(e) for e in self.spurious_edges],
                "missing_edges": [list(e) for e in self.missing_edges]}


def homotopy_verdict(e_dr: EdgeSet, e_c: EdgeSet) -> HomotopyVerdict:
    """Compare the reduced graph with the cluster graph.

    Spurious edges are in ``e_dr`` but not ``e_c``; missing edges the reverse.
    """
    if e_dr.n != e_c.n:
        raise DimensionMismatch(f"graphs on {e_dr.n} and {e_c.n} vertices")
    spurious = tuple(sorted(e_dr.edges - e_c.edges))
    missing = tuple(sorted(e_c.edges - e_dr.edges))
    if spurious:
        status = Status.NOT_HOMOTOPIC
    elif missing:
        status = Status.WEAKLY_HOMOTOPIC
    else:
        status = Status.HOMOTOPIC
    return HomotopyVerdict(status, spurious, missing)


def block_graph(precision, partition: Partition, tol: float = DEFAULT_TOL) -> EdgeSet:
    """Cluster graph read off the block zero pattern of a d x d matrix."""
    return cluster_graph(EdgeSet.from_mask(zero_pattern(precision, tol).mask), partition)


def pattern_graph(m, tol: float = DEFAULT_TOL) -> EdgeSet:
    return EdgeSet.from_mask(zero_pattern(m, tol).mask)


@dataclass(frozen=True)
class Analysis:
    """Outcome of comparing a reduction against the raw model's graphs."""

    verdict: HomotopyVerdict
    e_c: EdgeSet
    e_dr: EdgeSet
    matrices: dict = field(default_factory=dict, compare=False, repr=False)
    notes: dict = field(default_factory=dict, compare=False)

    @property
    def status(self) -> Status:
        return self.verdict.status


def analyze_reduction(model: GgmModel, red: LinearReduction, graph: str = "conditional",
                      tol: float = DEFAULT_TOL) -> tuple[Analysis, ReducedModel]:
    """Reduce a population model and compare graphs of the requested kind."""
    reduced = reduce_model(model, red)
    if graph == "conditional":
        raw = conditional_graph(model, tol)
        e_dr = pattern_graph(reduced.omega_y, tol)
    elif graph == "marginal":
        raw = marginal_graph(model, tol)
        e_dr = pattern_graph(reduced.sigma_y, tol)
    else:
        raise ValueError(f"graph must be 'conditional' or 'marginal', got {graph!r}")
    e_c = cluster_graph(raw, model.partition)
    mats = {"sigma": model.sigma.values, "omega": model.omega.values,
            "sigma_y": reduced.sigma_y.values, "omega_y": reduced.omega_y.values}
    analysis = Analysis(homotopy_verdict(e_dr, e_c), e_c, e_dr, mats, {"e_r": raw})
    return analysis, reduced


# ---------------------------------------------------------------- factor models

def _block_loadings(partition: Partition, loadings: Sequence[np.ndarray]) -> np.ndarray:
    A = np.zeros((partition.d, partition.K))
    for j, a in enumerate(loadings):
        A[partition.indices(j), j] = a
    return A


@dataclass(frozen=True, eq=False)
class FactorModel:
    """``X = A Y + eps`` with block-diagonal loadings ``A = diag(A_1, ..., A_K)``."""

    partition: Partition
    loadings: tuple[np.ndarray, ...]
    sigma_y: SymMatrix
    psi: SymMatrix

    def __post_init__(self):
        part = self.partition
        loads = tuple(np.array(a, dtype=np.float64).reshape(-1) for a in self.loadings)
        if len(loads) != part.K or any(a.size != s for a, s in zip(loads, part.sizes)):
            raise DimensionMismatch("one loading vector of length d_j per cluster required")
        sy, psi = as_sym(self.sigma_y), as_sym(self.psi)
        if sy.dim != part.K or psi.dim != part.d:
            raise DimensionMismatch("sigma_y must be K x K and psi d x d")
        if not is_positive_definite(sy):
            raise NotPositiveDefinite("sigma_y is not positive definite")
        if not is_positive_definite(psi):
            raise NotPositiveDefinite("psi is not positive definite")
        object.__setattr__(self, "loadings", loads)
        object.__setattr__(self, "sigma_y", sy)
        object.__setattr__(self, "psi", psi)
        if not is_positive_definite(self.sigma):
            raise NotPositiveDefinite("assembled covariance is not positive definite")

    @property
    def A(self) -> np.ndarray:
        return _block_loadings(self.partition, self.loadings)

    @property
    def sigma(self) -> SymMatrix:
        A = self.A
        return SymMatrix(A @ self.sigma_y.values @ A.T + self.psi.values)

    @property
    def psi_block_diagonal(self) -> bool:
        lab = self.partition.labels()
        cross = lab[:, None] != lab[None, :]
        return bool(np.all(self.psi.values[cross] == 0.0))

    def psi_block(self, j: int) -> np.ndarray:
        idx = self.partition.indices(j)
        return self.psi.values[np.ix_(idx, idx)]

    def phi(self) -> np.ndarray:
        """``(A^T Ψ^{-1} A)^{-1}``; diagonal entries ``1 / (A_j^T Ψ_j^{-1} A_j)``."""
        if not self.psi_block_diagonal:
            raise ValueError("phi needs a block-diagonal psi")
        q = [a @ np.linalg.solve(self.psi_block(j), a) for j, a in enumerate(self.loadings)]
        return np.diag(1.0 / np.asarray(q))

    def model(self) -> GgmModel:
        return model_from_covariance(self.sigma, self.partition)


def check_factor_homotopy(fm: FactorModel, tol: float = DEFAULT_TOL) -> Analysis:
    """Is the map from ``X`` to the latent factors ``Y`` graph-homotopic?

    ``E_DR`` is the zero pattern of ``Σ_Y^{-1}``; ``E_C`` is the block pattern
    of ``(A Σ_Y A^T + Ψ)^{-1}`` (through Woodbury when ``Ψ`` is block
    diagonal). With block-diagonal ``Ψ`` the cluster graph is also computed
    through the K x K route ``(Σ_Y + Φ)^{-1}`` and the two routes are compared
    in ``notes["routes_agree"]``.
    """
    part = fm.partition
    block_psi = fm.psi_block_diagonal
    if block_psi:
        precision = woodbury_precision(fm.A, fm.sigma_y, fm.psi)
    else:
        precision = invert_pd(fm.sigma)
    e_c = block_graph(precision, part, tol)
    omega_y = invert_pd(fm.sigma_y)
    e_dr = pattern_graph(omega_y, tol)
    mats = {"sigma": fm.sigma.values, "precision": precision.values,
            "sigma_y": fm.sigma_y.values, "omega_y": omega_y.values}
    notes = {"psi_block_diagonal": block_psi}
    if block_psi:
        phi = fm.phi()
        small = invert_pd(fm.sigma_y.values + phi)
        e_c_small = pattern_graph(small, tol)
        mats["phi"] = phi
        mats["sigma_y_plus_phi_inv"] = small.values
        notes["e_c_small_route"] = e_c_small
        notes["routes_agree"] = e_c_small == e_c
    return Analysis(homotopy_verdict(e_dr, e_c), e_c, e_dr, mats, notes)


# ------------------------------------------------------- spectral chord model

@dataclass(frozen=True, eq=False)
class SpectralChordSpec:
    """Factor model with one shared loading vector and i.i.d. noise blocks."""

    loading: np.ndarray
    psi_block: SymMatrix
    sigma_y: SymMatrix

    def __post_init__(self):
        a = np.array(self.loading, dtype=np.float64).reshape(-1)
        pb, sy = as_sym(self.psi_block), as_sym(self.sigma_y)
        if pb.dim != a.size:
            raise DimensionMismatch("psi block must be d1 x d1")
        if not is_positive_definite(pb) or not is_positive_definite(sy):
            raise NotPositiveDefinite("psi block and sigma_y must be positive definite")
        object.__setattr__(self, "loading", a)
        object.__setattr__(self, "psi_block", pb)
        object.__setattr__(self, "sigma_y", sy)

    @property
    def K(self) -> int:
        return self.sigma_y.dim

    @property
    def d1(self) -> int:
        return self.loading.size

    @property
    def noise_scale(self) -> float:
        """``σ² = 1 / (A_1^T Ψ_1^{-1} A_1)`` so that ``Φ = σ² I``."""
        return float(1.0 / (self.loading @ np.linalg.solve(self.psi_block.values, self.loading)))

    def eigen(self):
        return sym_eigen(self.sigma_y)

    def to_factor_model(self) -> FactorModel:
        part = Partition.contiguous([self.d1] * self.K)
        psi = block_diag(*([self.psi_block.values] * self.K))
        return FactorModel(part, (self.loading,) * self.K, self.sigma_y, SymMatrix(psi))


def verify_spectral_chord(spec: SpectralChordSpec, tol: float = DEFAULT_TOL):
    """Check the eigenvector-support condition of the spectral chord model.

    For every pair ``(j, k)`` where ``(Σ_Y + σ² I)^{-1}`` vanishes, the
    eigenvectors of ``Σ_Y`` must not couple ``j`` and ``k``. With a simple
    eigenvalue this is ``u_j u_k = 0``. For a repeated eigenvalue the
    individual eigenvectors are not unique, so the basis-free form is used:
    the ``(j, k)`` entry of the eigenspace projector must vanish.

    Returns ``(ok, violations)`` with violations as 1-based ``(i, j, k)``,
    ``i`` being the (first) eigenvector index of the offending eigenspace.
    """
    K = spec.K
    q = invert_pd(spec.sigma_y.values + spec.noise_scale * np.eye(K)).values
    off = np.abs(q - np.diag(np.diag(q)))
    scale = off.max()
    eig = spec.eigen()
    violations = []
    for grp in eigen_groups(eig.values):
        U = eig.vectors[:, grp.start:grp.stop]
        proj = U @ U.T
        for j in range(K):
            for k in range(j + 1, K):
                if off[j, k] <= tol * scale and abs(proj[j, k]) > tol:
                    violations.append((grp.start + 1, j + 1, k + 1))
    return not violations, violations


def spectral_chord_weak_homotopy(spec: SpectralChordSpec, tol: float = 1e-9) -> Analysis:
    """Assemble the model and confirm ``E_DR ⊆ E_C``.

    Raises :class:`PropertyViolation` if a spurious edge shows up.
    """
    ok, violations = verify_spectral_chord(spec)
    if not ok:
        raise ValueError(f"instance violates the eigenvector condition at {violations[:5]}")
    fm = spec.to_factor_model()
    precision = woodbury_precision(fm.A, fm.sigma_y, fm.psi)
    e_c = block_graph(precision, fm.partition, tol)
    omega_y = invert_pd(spec.sigma_y)
    e_dr = pattern_graph(omega_y, tol)
    verdict = homotopy_verdict(e_dr, e_c)
    if verdict.spurious_edges:
        raise PropertyViolation(f"spurious edges {verdict.spurious_edges} under spectral chord model")
    mats = {"sigma": fm.sigma.values, "precision": precision.values, "omega_y": omega_y.values}
    return Analysis(verdict, e_c, e_dr, mats, {"noise_scale": spec.noise_scale})


# ------------------------------------------------------- latent rotation model

@dataclass(frozen=True, eq=False)
class LatentRotationSpec:
    """Rotated latent vectors with Kronecker covariance ``D (A ⊗ I) D``.

    ``coupling`` is the K x K matrix ``A`` (symmetric, nonnegative, PD),
    ``scales[j]`` the diagonal of ``D_j`` and ``rotations[j]`` the orthogonal
    ``U_j``; cluster ``j`` is ``X_{C_j} = U_j Z_j``.
    """

    coupling: SymMatrix
    scales: tuple[np.ndarray, ...]
    rotations: tuple[np.ndarray, ...]

    def __post_init__(self):
        A = as_sym(self.coupling)
        K = A.dim
        scales = tuple(np.array(s, dtype=np.float64).reshape(-1) for s in self.scales)
        rots = tuple(np.array(u, dtype=np.float64) for u in self.rotations)
        if len(scales) != K or len(rots) != K:
            raise DimensionMismatch("need one scale vector and one rotation per cluster")
        d_f = scales[0].size
        if any(s.size != d_f for s in scales) or any(u.shape != (d_f, d_f) for u in rots):
            raise DimensionMismatch("all clusters must have dimension d_f")
        if np.any(A.values < 0):
            raise ValueError("coupling entries must be nonnegative")
        if any(np.any(s == 0) for s in scales):
            raise ValueError("scale diagonals must be nonzero")
        for j, u in enumerate(rots):
            if np.max(np.abs(u.T @ u - np.eye(d_f))) > 1e-10:
                raise ValueError(f"rotation {j + 1} is not orthogonal")
        if not is_positive_definite(A):
            raise NotPositiveDefinite("coupling matrix is not positive definite")
        object.__setattr__(self, "coupling", A)
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "rotations", rots)

    @property
    def K(self) -> int:
        return self.coupling.dim

    @property
    def d_f(self) -> int:
        return self.scales[0].size

    @property
    def partition(self) -> Partition:
        return Partition.contiguous([self.d_f] * self.K)

    def latent_cov(self) -> np.ndarray:
        D = np.diag(np.concatenate(self.scales))
        return D @ np.kron(self.coupling.values, np.eye(self.d_f)) @ D

    def cluster_spectrum(self, j: int) -> np.ndarray:
        """Eigenvalues ``a_jj d_{j,l}^2`` of cluster ``j`` in latent-coordinate order."""
        return self.coupling.values[j, j] * self.scales[j] ** 2

    def component_indices(self, coordinate: int) -> list[int]:
        """Per-cluster eigenvalue rank (1-based) of latent coordinate ``coordinate`` (1-based)."""
        if not 1 <= coordinate <= self.d_f:
            raise IndexOutOfRange(f"latent coordinate {coordinate} outside 1..{self.d_f}")
        out = []
        for j in range(self.K):
            spec = self.cluster_spectrum(j)
            out.append(1 + int(np.sum(spec > spec[coordinate - 1])))
        return out


def build_latent_rotation(spec: LatentRotationSpec) -> GgmModel:
    BU = block_diag(*spec.rotations)
    sigma = BU @ spec.latent_cov() @ BU.T
    return model_from_covariance(SymMatrix(sigma), spec.partition)


def check_latent_rotation(spec: LatentRotationSpec, eigenvector_index=1,
                          tol: float = DEFAULT_TOL) -> Analysis:
    """PCA reduction of a latent rotation model at the given per-cluster eigenvectors.

    ``eigenvector_index`` is 1-based by descending eigenvalue, one per cluster
    (or a single integer for all). The cluster graph must match the off-diagonal
    zero pattern of ``A^{-1}`` (Kronecker structure); a mismatch raises
    :class:`PropertyViolation`. ``notes["latent_coordinates"]`` records which
    latent coordinate each chosen eigenvector picks out. Homotopy is only
    guaranteed when that coordinate is the same in every cluster.
    """
    model = build_latent_rotation(spec)
    for j in range(spec.K):
        vals = np.sort(spec.cluster_spectrum(j))[::-1]
        gaps = -np.diff(vals)
        if gaps.size and gaps.min() < 1e-8 * vals[0]:
            warnings.warn(f"cluster {j + 1} has repeated eigenvalues; eigenvectors not unique",
                          DegenerateSpectrum, stacklevel=2)
    red = build_pca(model, eigenvector_index)
    analysis, _ = analyze_reduction(model, red, "conditional", tol)

    expected = pattern_graph(invert_pd(spec.coupling), tol)
    if expected != analysis.e_c:
        raise PropertyViolation(
            f"cluster graph {analysis.e_c.sorted()} differs from pattern of A^-1 {expected.sorted()}")
    coords = [int(np.argmax(np.abs(u.T @ w))) + 1 for u, w in zip(spec.rotations, red.directions)]
    analysis.notes.update(latent_coordinates=coords, coupling_inverse_graph=expected)
    return analysis


# ------------------------------------------------- structured concentration

@dataclass(frozen=True, eq=False)
class StructuredPrecision:
    """``Ω = diag(U_j) Λ diag(U_j)^T`` with the first coordinate of each block decoupled.

    ``lam`` is d x d in cluster-block order. Every block ``Λ_jk`` must have
    zeros in its first row beyond column 1 and in its first column beyond row 1.
    """

    partition: Partition
    transforms: tuple[np.ndarray, ...]
    lam: SymMatrix

    def __post_init__(self):
        part = self.partition
        lam = as_sym(self.lam)
        us = tuple(np.array(u, dtype=np.float64) for u in self.transforms)
        if lam.dim != part.d or len(us) != part.K:
            raise DimensionMismatch("lam must be d x d with one transform per cluster")
        for j, (u, s) in enumerate(zip(us, part.sizes)):
            if u.shape != (s, s):
                raise DimensionMismatch(f"transform {j + 1} must be {s} x {s}")
            if abs(np.linalg.det(u)) <= 1e-12 * max(1.0, np.abs(u).max()) ** s:
                raise SingularTransform(f"transform {j + 1} is singular")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "transforms", us)
        bad = self._first_coordinate_leaks()
        if bad:
            raise ValueError(f"blocks {bad[:5]} couple the first coordinate to the others")
        if not is_positive_definite(self.omega):
            raise NotPositiveDefinite("assembled concentration matrix is not positive definite")

    def _starts(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.partition.sizes)[:-1]])

    def _first_coordinate_leaks(self) -> list[tuple[int, int]]:
        lam = self.lam.values
        eps = 1e-12 * np.abs(lam).max()
        starts, sizes = self._starts(), self.partition.sizes
        bad = []
        for j, (sj, dj) in enumerate(zip(starts, sizes)):
            for k, (sk, dk) in enumerate(zip(starts, sizes)):
                blk = lam[sj:sj + dj, sk:sk + dk]
                if np.any(np.abs(blk[0, 1:]) > eps) or np.any(np.abs(blk[1:, 0]) > eps):
                    bad.append((j + 1, k + 1))
        return bad

    def block(self, j: int, k: int) -> np.ndarray:
        starts, sizes = self._starts(), self.partition.sizes
        return self.lam.values[starts[j]:starts[j] + sizes[j], starts[k]:starts[k] + sizes[k]]

    def strict(self) -> bool:
        """``(Λ_jk)_11 = 0`` only when the whole block ``Λ_jk`` is zero."""
        K = self.partition.K
        eps = 1e-12 * np.abs(self.lam.values).max()
        for j in range(K):
            for k in range(j + 1, K):
                blk = self.block(j, k)
                if abs(blk[0, 0]) <= eps and np.any(np.abs(blk) > eps):
                    return False
        return True

    @property
    def omega(self) -> SymMatrix:
        BU = block_diag(*self.transforms)
        inner = BU @ self.lam.values @ BU.T
        order = self.partition.block_order
        out = np.empty_like(inner)
        out[np.ix_(order, order)] = inner
        return SymMatrix(out)

    def reduction(self) -> LinearReduction:
        return LinearReduction(tuple(u[:, 0].copy() for u in self.transforms), (), "structured")


def check_structured_precision(sp: StructuredPrecision, strict: bool | None = None,
                               tol: float = DEFAULT_TOL) -> Analysis:
    """Reduce along the first column of each ``U_j`` and compare graphs.

    The result must be at least weakly homotopic, and homotopic when the
    strictness condition holds (detected when ``strict`` is None; passing
    ``strict=True`` for an instance that is not strict is an error).
    Violations raise :class:`PropertyViolation`.
    """
    holds = sp.strict()
    if strict and not holds:
        raise ValueError("strictness requested but some block has a zero (1,1) entry and is nonzero")
    model = model_from_precision(sp.omega, sp.partition)
    analysis, _ = analyze_reduction(model, sp.reduction(), "conditional", tol)
    status = analysis.status
    if status is Status.NOT_HOMOTOPIC:
        raise PropertyViolation(f"spurious edges {analysis.verdict.spurious_edges}")
    if holds and status is not Status.HOMOTOPIC:
        raise PropertyViolation(f"strict instance lost edges {analysis.verdict.missing_edges}")
    analysis.notes["strict"] = holds
    return analysis


def latent_rotation_structure(spec: LatentRotationSpec, coordinate: int = 1) -> StructuredPrecision:
    """The latent rotation concentration written in ``U Λ U^T`` form.

    Uses ``(A ⊗ I)^{-1} = A^{-1} ⊗ I``, so ``Λ = D^{-1} (A^{-1} ⊗ I) D^{-1}``.
    Columns of each ``U_j`` (and rows/columns of ``Λ``) are permuted so that
    latent ``coordinate`` comes first.
    """
    d_f = spec.d_f
    if not 1 <= coordinate <= d_f:
        raise IndexOutOfRange(f"latent coordinate {coordinate} outside 1..{d_f}")
    perm = [coordinate - 1] + [i for i in range(d_f) if i != coordinate - 1]
    dinv = 1.0 / np.concatenate([s[perm] for s in spec.scales])
    lam = dinv[:, None] * np.kron(invert_pd(spec.coupling).values, np.eye(d_f)) * dinv[None, :]
    transforms = tuple(u[:, perm] for u in spec.rotations)
    return StructuredPrecision(spec.partition, transforms, SymMatrix(lam))


# ------------------------------------------------------ variable transforms

@dataclass(frozen=True)
class MarginalLinear:
    """``Y_i = a_i + b_i X_i`` with every ``b_i`` nonzero."""

    a: tuple[float, ...]
    b: tuple[float, ...]


@dataclass(frozen=True)
class MultivariateLinear:
    """``Y = mu + A X`` with ``A`` invertible."""

    mu: tuple[float, ...]
    A: np.ndarray = field(hash=False, compare=False)


@dataclass(frozen=True)
class TransformReport:
    marginal_before: EdgeSet
    marginal_after: EdgeSet
    conditional_before: EdgeSet
    conditional_after: EdgeSet
    permutation: tuple[int, ...] | None = None

    @property
    def marginal_unchanged(self) -> bool:
        return self.marginal_before == self.marginal_after

    @property
    def conditional_unchanged(self) -> bool:
        return self.conditional_before == self.conditional_after

    def _relabel(self, g: EdgeSet) -> EdgeSet:
        p = self.permutation
        return EdgeSet(g.n, ((p[j - 1], p[k - 1]) for j, k in g.edges))

    @property
    def marginal_unchanged_after_relabel(self) -> bool | None:
        if self.permutation is None:
            return None
        return self._relabel(self.marginal_after) == self.marginal_before

    @property
    def conditional_unchanged_after_relabel(self) -> bool | None:
        if self.permutation is None:
            return None
        return self._relabel(self.conditional_after) == self.conditional_before


def _signed_permutation(A: np.ndarray) -> tuple[int, ...] | None:
    nz = A != 0
    if not (np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1)):
        return None
    return tuple(int(np.flatnonzero(row)[0]) + 1 for row in nz)


def analyze_transform(model: GgmModel, transform, tol: float = DEFAULT_TOL) -> TransformReport:
    """Marginal and conditional graphs of ``X`` and of a linearly transformed ``Y``.

    For a signed permutation ``A`` the report carries the relabeling
    (``Y_i`` is a multiple of ``X_{perm[i]}``) so graphs can be compared after
    relabeling.
    """
    d = model.d
    sigma = model.sigma.values
    perm = None
    if isinstance(transform, MarginalLinear):
        b = np.asarray(transform.b, dtype=np.float64)
        if b.size != d or len(transform.a) != d:
            raise DimensionMismatch(f"need {d} location and scale coefficients")
        if np.any(b == 0):
            raise SingularTransform("marginal scale coefficients must be nonzero")
        new_sigma = b[:, None] * sigma * b[None, :]
    elif isinstance(transform, MultivariateLinear):
        A = np.asarray(transform.A, dtype=np.float64)
        if A.shape != (d, d) or len(transform.mu) != d:
            raise DimensionMismatch(f"need a {d} x {d} matrix and a length-{d} shift")
        if np.linalg.matrix_rank(A) < d:
            raise SingularTransform("transformation matrix is singular")
        new_sigma = A @ sigma @ A.T
        perm = _signed_permutation(A)
    else:
        raise TypeError(f"unsupported transform {type(transform).__name__}")
    new_model = model_from_covariance(SymMatrix(new_sigma), model.partition)
    return TransformReport(marginal_graph(model, tol), marginal_graph(new_model, tol),
                           conditional_graph(model, tol), conditional_graph(new_model, tol), perm)
