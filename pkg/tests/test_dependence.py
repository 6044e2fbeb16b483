import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabgeo import dependence as dep
from stabgeo import geometry as geo
from stabgeo import moments as mo
from stabgeo.simulate import sample_vector
from stabgeo.spectral import (
    DiscreteAtoms,
    StableModel,
    atoms_model,
    independent_model,
    subgaussian_model,
)

TILTED_C = np.array([[2.0, 1.0], [1.0, 2.0]])


def random_atoms(seed, d, alpha, k=None):
    rng = np.random.default_rng(seed)
    k = k or d + 3
    return atoms_model(alpha, rng.standard_normal((k, d)), rng.uniform(0.2, 2.0, k))


def reflected_atoms(seed, alpha):
    # atoms (a, b) and (a, -b) with equal weights: symmetric under u2 -> -u2
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((3, 2))
    w = rng.uniform(0.2, 2.0, 3)
    return atoms_model(alpha, np.vstack([S, S * [1.0, -1.0]]), np.concatenate([w, w]))


# ----------------------------------------------------------- covariation


@pytest.mark.parametrize("alpha", [1.2, 1.5, 1.9])
def test_covariation_l_alpha(alpha):
    m = independent_model(alpha, 3)
    rng = np.random.default_rng(1)
    for _ in range(10):
        u1, u2 = rng.standard_normal((2, 3))
        expect = u1 @ (np.sign(u2) * np.abs(u2) ** (alpha - 1.0))
        assert dep.covariation(m, u1, u2) == pytest.approx(expect, rel=1e-12, abs=1e-14)


def test_covariation_diagonal_is_scale_power():
    m = random_atoms(2, 3, 1.6)
    u = np.array([0.3, -1.0, 0.5])
    assert dep.covariation(m, u, u) == pytest.approx(geo.gauge(m, u) ** 1.6, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), alpha=st.floats(1.05, 2.0))
def test_covariation_linear_in_first_slot(seed, alpha):
    m = random_atoms(seed, 3, alpha)
    rng = np.random.default_rng(seed)
    a, b, v = rng.standard_normal((3, 3))
    s, t = rng.standard_normal(2)
    lhs = dep.covariation(m, s * a + t * b, v)
    rhs = s * dep.covariation(m, a, v) + t * dep.covariation(m, b, v)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_covariation_errors():
    with pytest.raises(ValueError):
        dep.covariation(independent_model(1.0, 2), [1.0, 0.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        dep.covariation(independent_model(1.5, 2), [1.0, 0.0], [0.0, 0.0])


def test_covariation_matrix_sub_gaussian():
    # for sub-Gaussian laws [xi_i, xi_j] is proportional to C_ij
    m = subgaussian_model(TILTED_C, 1.5)
    M = dep.covariation_matrix(m)
    np.testing.assert_allclose(M / M[1, 1], TILTED_C / TILTED_C[1, 1], rtol=1e-12)


# ------------------------------------------------------------ regression


def test_regression_examples():
    assert dep.regression_coefficient(independent_model(1.5, 2)) == pytest.approx(0.0, abs=1e-14)
    assert dep.regression_coefficient(subgaussian_model(TILTED_C, 1.5)) == pytest.approx(0.5, rel=1e-12)
    a = dep.regression_coefficient(subgaussian_model(TILTED_C, 1.3))
    b = dep.regression_coefficient(subgaussian_model(TILTED_C, 1.9))
    assert a == pytest.approx(b, rel=1e-13)
    m = random_atoms(3, 2, 1.4)
    ratio = dep.covariation(m, [1.0, 0.0], [0.0, 1.0]) / dep.covariation(m, [0.0, 1.0], [0.0, 1.0])
    assert dep.regression_coefficient(m) == pytest.approx(ratio, rel=1e-12)
    with pytest.raises(ValueError):
        dep.regression_coefficient(independent_model(0.9, 2))


@pytest.mark.parametrize("alpha", [1.3, 1.7])
def test_regression_slope_monte_carlo(alpha):
    R = np.array([[1.0, 0.0], [0.6, 0.8]])
    m = subgaussian_model(R @ np.diag([1.0, 3.0]) @ R.T, alpha)
    X = sample_vector(m, 1_000_000, seed=31).data
    y = X[:, 1]
    sel = (np.abs(y) > 0.5) & (np.abs(y) < 3.0)
    x, y = X[sel, 0], y[sel]
    slope = np.sum(x * y) / np.sum(y * y)
    se = math.sqrt(np.sum((y * (x - slope * y)) ** 2)) / np.sum(y * y)
    assert abs(slope - dep.regression_coefficient(m)) < 3.0 * se


def test_conditional_mean_linear_in_plane():
    m = random_atoms(4, 2, 1.5)
    Y = np.array([[0.3], [1.0], [-2.0]])
    cm = dep.conditional_mean(m, 0, Y)
    np.testing.assert_allclose(cm.mean, dep.regression_coefficient(m) * Y[:, 0], rtol=1e-5)
    assert np.all(cm.density > 0)


def test_linearity_ellipsoid_witness():
    C = np.array([[2.0, 0.5, 0.3], [0.5, 1.5, -0.2], [0.3, -0.2, 1.0]])
    res = dep.regression_linearity_check(subgaussian_model(C, 1.5))
    w = np.linalg.solve(C, np.eye(3)[0])
    assert res.is_linear and res.residual < 1e-8
    np.testing.assert_allclose(res.a, w / w[0], rtol=1e-8, atol=1e-10)


def test_linearity_l_alpha_and_generic():
    res = dep.regression_linearity_check(independent_model(1.5, 3))
    assert res.is_linear
    np.testing.assert_allclose(res.a, [1.0, 0.0, 0.0], atol=1e-10)
    generic = atoms_model(1.5, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.5, 0.7, -0.4]])
    res = dep.regression_linearity_check(generic)
    assert not res.is_linear and res.residual > 1e-3


def test_linearity_plane_always_linear():
    res = dep.regression_linearity_check(random_atoms(5, 2, 1.4))
    assert res.is_linear


def test_nonlinear_conditional_mean_is_curved():
    # the non-linear model's conditional mean is not a linear function of y
    generic = atoms_model(1.5, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.5, 0.7, -0.4]])
    Y = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    cm = dep.conditional_mean(generic, 0, Y).mean
    assert abs(cm[2] - cm[0] - cm[1]) > 1e-3 * np.abs(cm).max()


# ----------------------------------------------------------------- James


def test_james_examples():
    assert dep.james_orthogonal_bivariate(independent_model(1.5, 2)).orthogonal
    assert dep.james_orthogonal_bivariate(independent_model(1.0, 2)).orthogonal
    assert dep.james_orthogonal_bivariate(subgaussian_model(np.diag([1.0, 3.0]), 1.2)).orthogonal
    res = dep.james_orthogonal_bivariate(subgaussian_model(TILTED_C, 1.5))
    assert not res.orthogonal and res.covariation != 0.0
    with pytest.raises(ValueError):
        dep.james_orthogonal_bivariate(independent_model(0.8, 2))


def test_james_strip_and_covariation_agree_on_50_models():
    agree = []
    for seed in range(50):
        alpha = 1.1 + 0.8 * (seed % 10) / 10
        m = reflected_atoms(seed, alpha) if seed % 2 else random_atoms(seed, 2, alpha)
        res = dep.james_orthogonal_bivariate(m)
        scale = dep.covariation(m, [0.0, 1.0], [0.0, 1.0])
        agree.append(res.orthogonal == (abs(res.covariation) <= 1e-9 * scale))
    assert all(agree)
    assert sum(dep.james_orthogonal_bivariate(reflected_atoms(s, 1.5)).orthogonal for s in range(5)) == 5


@pytest.mark.parametrize("C", [np.diag([1.0, 3.0]), TILTED_C, np.array([[1.0, -0.3], [-0.3, 0.5]])])
def test_james_symmetric_for_ellipses(C):
    m = subgaussian_model(C, 1.6)
    swapped = mo.linear_image_model(m, np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert dep.james_orthogonal_bivariate(m).orthogonal == dep.james_orthogonal_bivariate(swapped).orthogonal


def test_strong_james_examples():
    block = geo.star_sum(atoms_model(1.5, [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]), atoms_model(1.5, [[0.0, 0.0, 1.0]]))
    full = geo.star_sum(block, atoms_model(1.5, [[0.0, 1.0, 0.0]]))
    assert dep.strong_james_check(full, 2, 1).strong
    shared = atoms_model(1.5, [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    res = dep.strong_james_check(shared, 1, 1)
    assert not res.strong and res.margin < 0
    with pytest.raises(ValueError):
        dep.strong_james_check(shared, 1, 2)


def test_strong_implies_weak():
    for seed in range(50):
        m = random_atoms(seed, 3, 1.0 + (seed % 5) / 5)
        res = dep.strong_james_check(m, 1, 2, n_dir=16)
        assert res.weak or not res.strong
    res = dep.strong_james_check(independent_model(1.3, 3), 1, 2, n_dir=16)
    assert res.strong and res.weak


# ---------------------------------------------------------- independence


def test_independence_examples():
    assert dep.independence_check(independent_model(1.3, 3), [0])
    assert dep.independence_check(independent_model(1.3, 3), [0, 2])
    off = StableModel(1.3, DiscreteAtoms([[1.0, 1.0]], [1.0]), 2)
    assert not dep.independence_check(off, [0])
    with pytest.raises(ValueError):
        dep.independence_check(off, [0, 1])


@pytest.mark.parametrize("seed", range(6))
def test_independence_matches_charfun_factorization(seed):
    rng = np.random.default_rng(seed)
    if seed % 2:
        m = geo.star_sum(atoms_model(1.4, np.column_stack([rng.standard_normal((3, 2)), np.zeros(3)])),
                         atoms_model(1.4, [[0.0, 0.0, 1.0]]))
    else:
        m = random_atoms(seed, 3, 1.4)
    U = rng.standard_normal((16, 3))
    A, B = U * [1, 1, 0], U * [0, 0, 1]
    factor = np.allclose(mo.charfun(m, U), mo.charfun(m, A) * mo.charfun(m, B), rtol=1e-12, atol=0)
    assert dep.independence_check(m, [0, 1]) == factor


# -------------------------------------------------------------- portfolio


def test_portfolio_single_point():
    m = random_atoms(6, 2, 1.5)
    res = dep.portfolio_direction(m, [1.0, 2.0], 1.5, 0.5)
    np.testing.assert_allclose(res.u, [0.5, 0.5], atol=1e-12)
    assert res.gauge == pytest.approx(geo.gauge(m, [0.5, 0.5]))


def test_portfolio_cauchy_simplex():
    # mu = (1,1,1), r = 1 repeats the budget; on the simplex |u|_1 = 1 at best
    res = dep.portfolio_direction(independent_model(1.0, 3), [1.0, 1.0, 1.0], 1.0, 0.5)
    assert res.gauge == pytest.approx(1.0, abs=1e-8)
    assert res.u.sum() == pytest.approx(1.0, abs=1e-12)
    assert res.stationary


def test_portfolio_minimum_beats_random_feasible_points():
    m = random_atoms(7, 3, 1.5)
    mu = np.array([1.0, 2.0, 0.5])
    res = dep.portfolio_direction(m, mu, 1.2, 0.7)
    assert res.stationary
    assert res.moment == pytest.approx(mo.scalar_moment(m, res.u, 0.7).value)
    A = np.vstack([mu, np.ones(3)])
    u0 = np.linalg.lstsq(A, [1.2, 1.0], rcond=None)[0]
    n = np.linalg.svd(A)[2][-1]
    for t in np.random.default_rng(8).uniform(-5.0, 5.0, 100):
        assert res.gauge <= geo.gauge(m, u0 + t * n) + 1e-10


def test_portfolio_errors():
    m = random_atoms(9, 3, 1.5)
    with pytest.raises(ValueError):
        dep.portfolio_direction(m, [1.0, 1.0, 1.0], 2.0, 0.5)  # infeasible
    with pytest.raises(ValueError):
        dep.portfolio_direction(m, [1.0, 2.0, 3.0], 1.0, 0.5, sense="max")
    with pytest.raises(ValueError):
        dep.portfolio_direction(m, [1.0, 2.0, 3.0], 1.0, 1.5)
    with pytest.raises(ValueError):
        dep.portfolio_direction(random_atoms(9, 5, 1.5), np.arange(5.0), 1.0, 0.5)
