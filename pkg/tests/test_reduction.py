import warnings

import numpy as np
import pytest
import sympy as sp

from graphhomotopy import synthetic as syn
from graphhomotopy.errors import (DegenerateCluster, DimensionMismatch, HeywoodCase, IndexOutOfRange,
                                  NotPositiveDefinite)
from graphhomotopy.estimation import sample_gaussian
from graphhomotopy.fixtures import WORKED_OMEGA, WORKED_OMEGA_Y_MEAN, WORKED_OMEGA_Y_PCA, worked_example
from graphhomotopy.graphs import Partition, model_from_covariance
from graphhomotopy.linalg import zero_pattern
from graphhomotopy.reduction import (LinearReduction, build_mean, build_pca, build_weighted, fit_one_factor,
                                     reduce_model, sample_reduce)
from oracles import reduce_exact, to_float

WORKED_PART = Partition([[1], [2, 3], [4]])


# ---------------------------------------------------------------- build_mean

def test_build_mean_worked_partition():
    red = build_mean(WORKED_PART)
    assert [w.tolist() for w in red.directions] == [[1.0], [0.5, 0.5], [1.0]]
    assert all(np.all(b == 0) for b in red.shifts)


def test_build_mean_singletons_and_single_cluster():
    assert [w.tolist() for w in build_mean(Partition.singletons(3)).directions] == [[1.0]] * 3
    assert build_mean(Partition([[1, 2, 3, 4]])).directions[0].tolist() == [0.25] * 4


def test_linear_reduction_validates():
    with pytest.raises(ValueError):
        LinearReduction((np.zeros(2),), ())
    with pytest.raises(DimensionMismatch):
        LinearReduction((np.ones(2),), (np.zeros(3),))
    with pytest.raises(DimensionMismatch):
        build_weighted(WORKED_PART, [[1.0], [1.0], [1.0]])


# ----------------------------------------------------------------- build_pca

def test_build_pca_worked_tie_rule():
    red = build_pca(worked_example(), 1)
    r = 1 / np.sqrt(2)
    assert np.allclose(red.directions[1], [r, r], atol=1e-14)
    assert red.directions[0].tolist() == [1.0] and red.directions[2].tolist() == [1.0]


def test_build_pca_singleton_ignores_index():
    red = build_pca(worked_example(), [5, 2, 7])
    assert red.directions[0].tolist() == [1.0]


def test_build_pca_second_component_closed_form():
    m = model_from_covariance(np.array([[2.0, 1.0], [1.0, 2.0]]), Partition([[1, 2]]))
    w = build_pca(m, 2).directions[0]
    r = 1 / np.sqrt(2)
    assert np.allclose(w, [r, -r], atol=1e-14)


def test_build_pca_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        build_pca(worked_example(), 3)
    with pytest.raises(DimensionMismatch):
        build_pca(worked_example(), [1, 1])


# -------------------------------------------------------------- reduce_model

def test_reduce_mean_worked_against_exact_oracle():
    half = sp.Rational(1, 2)
    sy_exact, oy_exact = reduce_exact(WORKED_OMEGA, [[1, 0, 0, 0], [0, half, half, 0], [0, 0, 0, 1]])
    assert sy_exact == sp.Matrix([[2, -1, 1], [-1, 1, -1], [1, -1, 2]])
    assert np.array_equal(to_float(oy_exact), WORKED_OMEGA_Y_MEAN)
    rm = reduce_model(worked_example(), build_mean(WORKED_PART))
    assert np.max(np.abs(rm.sigma_y.values - to_float(sy_exact))) <= 1e-12
    assert np.max(np.abs(rm.omega_y.values - WORKED_OMEGA_Y_MEAN)) <= 1e-10


def test_reduce_pca_worked_against_exact_oracle():
    r = 1 / sp.sqrt(2)
    _, oy_exact = reduce_exact(WORKED_OMEGA, [[1, 0, 0, 0], [0, r, r, 0], [0, 0, 0, 1]])
    assert np.max(np.abs(to_float(oy_exact) - WORKED_OMEGA_Y_PCA)) <= 1e-15
    rm = reduce_model(worked_example(), build_pca(worked_example(), 1))
    assert np.max(np.abs(rm.omega_y.values - WORKED_OMEGA_Y_PCA)) <= 1e-10


def test_reduce_identity_on_singletons():
    for seed in range(20):
        m = syn.random_model(seed, K=None)
        ms = model_from_covariance(m.sigma, Partition.singletons(m.partition.d))
        rm = reduce_model(ms, build_mean(ms.partition))
        assert np.max(np.abs(rm.sigma_y.values - m.sigma.values)) <= 1e-12
        assert np.max(np.abs(rm.omega_y.values - m.omega.values)) <= 1e-12 * max(1, np.abs(m.omega.values).max())


def test_reduce_weighted_and_degenerate_input():
    sigma = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    m = model_from_covariance(sigma, Partition([[1, 2], [3]]))
    red = build_weighted(m.partition, [[1.0, 1.0], [1.0]])
    good = reduce_model(m, red)
    assert np.allclose(good.sigma_y.values, np.diag([2.0, 1.0]))
    sigma = np.ones((2, 2)) + 1e-20 * np.eye(2)
    with pytest.raises(NotPositiveDefinite):
        model_from_covariance(sigma, Partition.singletons(2))


@pytest.mark.parametrize("c", [-2.0, 0.5, 10.0])
def test_scale_equivariance_of_pattern(c):
    for seed in range(30):
        m = syn.random_model(seed)
        red = build_pca(m, 1)
        s = syn.stream(seed, 31)
        factors = [c if s.uniform() < 0.5 else 1.0 for _ in range(red.K)]
        base = reduce_model(m, red)
        scaled = reduce_model(m, red.scaled(factors))
        assert zero_pattern(scaled.omega_y) == zero_pattern(base.omega_y)
        assert zero_pattern(scaled.sigma_y) == zero_pattern(base.sigma_y)


def test_shifts_do_not_change_covariance():
    for seed in range(30):
        m = syn.random_model(seed)
        red = build_mean(m.partition)
        s = syn.stream(seed, 32)
        shifted = red.with_shifts([s.normal(w.size) for w in red.directions])
        assert np.array_equal(reduce_model(m, shifted).sigma_y.values, reduce_model(m, red).sigma_y.values)


@pytest.mark.parametrize("seed", range(100))
def test_planted_zero_blocks_survive_linear_reduction(seed):
    m, planted = syn.planted_zero_model(seed)
    s = syn.stream(seed, 33)
    reds = [build_mean(m.partition), build_pca(m, 1),
            build_pca(m, [s.integers(1, n + 1) for n in m.partition.sizes]),
            build_weighted(m.partition, [s.normal(n) for n in m.partition.sizes])]
    for red in reds:
        sy = reduce_model(m, red).sigma_y.values
        for j, k in planted:
            assert abs(sy[j - 1, k - 1]) <= 1e-12


def test_sample_independent_of_shifts_and_reduction_apply():
    red = build_mean(WORKED_PART)
    x = np.arange(12.0).reshape(3, 4)
    assert np.allclose(red.apply(x, WORKED_PART), [[0, 1.5, 3], [4, 5.5, 7], [8, 9.5, 11]])
    assert np.allclose(red.with_shifts([[1.0], [1.0, 1.0], [0.0]]).apply(x, WORKED_PART)[:, :2],
                       [[-1, 0.5], [3, 4.5], [7, 8.5]])


# ------------------------------------------------------------- sample_reduce

def test_sample_reduce_mean_and_median():
    x = np.array([[1.0, 3.0], [1.0, 3.0]])
    assert sample_reduce(x, Partition([[1, 2]]), "mean").values.tolist() == [[2.0], [2.0]]
    x = np.array([[1.0, 2.0, 10.0], [4.0, 0.0, 1.0]])
    assert sample_reduce(x, Partition([[1, 2, 3]]), "median").values.tolist() == [[2.0], [1.0]]
    x = np.array([[1.0, 2.0, 10.0, 4.0], [0.0, 0.0, 0.0, 0.0]])
    assert sample_reduce(x, Partition([[1, 2, 3, 4]]), "median").values[0, 0] == 3.0


# Worked-example variant with Σ_23 = 1, so the middle cluster has the
# distinct leading direction (1, 1)/√2.
DISTINCT_SIGMA = np.array([[2.0, -1, -1, 1], [-1, 2, 1, -1], [-1, 1, 2, -1], [1, -1, -1, 2]])


def test_sample_reduce_pca_tracks_population_direction():
    x = sample_gaussian(DISTINCT_SIGMA, 5000, seed=5).values
    y = sample_reduce(x, WORKED_PART, "pca").values[:, 1]
    target = (x[:, 1] + x[:, 2]) / np.sqrt(2)
    assert abs(np.corrcoef(y, target)[0, 1]) >= 0.99


def test_sample_reduce_pca_isotropic_cluster_direction_is_arbitrary():
    # Σ_{C,C} = 2I in the worked example: the sample leading direction is
    # noise, so nothing ties it to (X_2 + X_3)/√2.
    corrs = []
    for seed in range(10):
        x = sample_gaussian(worked_example().sigma, 5000, seed=seed).values
        y = sample_reduce(x, WORKED_PART, "pca").values[:, 1]
        corrs.append(abs(np.corrcoef(y, (x[:, 1] + x[:, 2]) / np.sqrt(2))[0, 1]))
    assert min(corrs) < 0.9


def test_sample_reduce_pca_singleton_is_centered_passthrough():
    x = sample_gaussian(np.eye(3), 50, seed=1).values
    y = sample_reduce(x, Partition.singletons(3), "pca").values
    assert np.allclose(y, x - x.mean(axis=0))


def test_sample_reduce_errors():
    x = np.column_stack([np.ones(10), np.arange(10.0)])
    with pytest.raises(DegenerateCluster):
        sample_reduce(x, Partition.singletons(2), "pca")
    with pytest.raises(DegenerateCluster):
        sample_reduce(np.column_stack([np.arange(10.0), 2 * np.arange(10.0)]), Partition([[1, 2]]), "pca")
    assert sample_reduce(x, Partition.singletons(2), "mean").values[:, 0].tolist() == [1.0] * 10
    with pytest.raises(ValueError):
        sample_reduce(x, Partition.singletons(2), "ica")
    with pytest.raises(DimensionMismatch):
        sample_reduce(x, Partition.singletons(3), "mean")


def test_sample_reduce_factor_scores_correlate_with_latent():
    s = syn.stream(4, 40)
    y = s.normal(3000)
    x = np.column_stack([a * y + 0.6 * s.normal(3000) for a in (1.0, 0.8, 1.2)])
    z = sample_reduce(x, Partition([[1, 2, 3]]), "factor").values[:, 0]
    assert np.corrcoef(z, y)[0, 1] > 0.9


# ------------------------------------------------------------ fit_one_factor

def test_factor_recovers_loadings():
    s = syn.stream(7, 41)
    n = 20000
    y = s.normal(n)
    x = np.column_stack([y + np.sqrt(0.5) * s.normal(n), y + np.sqrt(0.5) * s.normal(n)])
    with warnings.catch_warnings():
        warnings.simplefilter("error", HeywoodCase)
        fit = fit_one_factor(x)
    # two indicators: loadings identified only up to their product
    assert abs(np.sqrt(fit.loadings[0] * fit.loadings[1]) - 1.0) <= 0.05
    assert np.all(fit.loadings > 0)
    s2 = syn.stream(7, 42)
    y = s2.normal(n)
    x3 = np.column_stack([y + np.sqrt(0.5) * s2.normal(n) for _ in range(3)])
    fit3 = fit_one_factor(x3)
    assert np.max(np.abs(fit3.loadings - 1.0)) <= 0.05
    assert np.max(np.abs(fit3.uniquenesses - 0.5)) <= 0.05


def test_factor_heywood_on_duplicate_column():
    x1 = syn.stream(1, 43).normal(500)
    x = np.column_stack([x1, x1, x1 + syn.stream(2, 43).normal(500)])
    with pytest.warns(HeywoodCase):
        fit = fit_one_factor(x)
    assert fit.heywood


def test_factor_independent_coordinates_give_small_loadings():
    x = syn.stream(3, 44).normal((20000, 3))
    fit = fit_one_factor(x)
    # sample correlations are O(n^-1/2), so loadings shrink like n^-1/4
    assert np.max(np.abs(fit.loadings)) <= 0.2
    small = fit_one_factor(syn.stream(3, 44).normal((200, 3)))
    assert np.max(np.abs(fit.loadings)) < np.max(np.abs(small.loadings))


def test_factor_loglik_not_below_start_and_sign():
    s = syn.stream(8, 45)
    y = s.normal(800)
    x = np.column_stack([-y + s.normal(800), -0.5 * y + s.normal(800), -2 * y + s.normal(800)])
    fit = fit_one_factor(x)
    first = np.flatnonzero(np.abs(fit.loadings) > 1e-12)[0]
    assert fit.loadings[first] > 0


def test_factor_rejects_small_inputs():
    with pytest.raises(ValueError):
        fit_one_factor(np.ones((5, 1)))
    with pytest.raises(ValueError):
        fit_one_factor(np.ones((2, 3)))
