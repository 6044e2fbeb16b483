import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabgeo.quadrature import (
    arc_rule,
    axis_free_rule,
    circle_rule,
    composite_gauss_legendre,
    fibonacci_directions,
    integrate_radial,
    integrate_sphere,
    kappa,
    kink_sphere_rule,
    omega,
    orthant_nodes,
    radial_rule,
    sphere_rule,
    tanh_sinh,
)


def test_ball_volume_and_sphere_area_low_dims():
    assert kappa(1) == pytest.approx(2.0, rel=1e-15)
    assert kappa(2) == pytest.approx(math.pi, rel=1e-15)
    assert kappa(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-15)
    assert omega(2) == pytest.approx(2.0 * math.pi, rel=1e-15)
    assert omega(3) == pytest.approx(4.0 * math.pi, rel=1e-15)


@pytest.mark.parametrize("d", [2, 3, 4, 7])
def test_area_is_d_times_volume(d):
    assert omega(d) == pytest.approx(d * kappa(d), rel=1e-14)


@pytest.mark.parametrize("n", [4, 6, 9])
def test_circle_rule_rejects_small_or_odd(n):
    with pytest.raises(ValueError):
        circle_rule(n)


def test_circle_rule_cos_squared():
    res = integrate_sphere(circle_rule(64), lambda U: U[:, 0] ** 2)
    assert res.value == pytest.approx(math.pi, abs=1e-13)
    assert res.error < 1e-12


def test_sphere3_constant_and_z_squared():
    rule = sphere_rule(3, 16)
    assert rule.weights.sum() == pytest.approx(4.0 * math.pi, abs=1e-12)
    res = integrate_sphere(rule, lambda U: U[:, 2] ** 2)
    assert res.value == pytest.approx(4.0 * math.pi / 3.0, abs=1e-12)


def test_random_rule_requires_seed():
    with pytest.raises(ValueError):
        sphere_rule(5)


def test_random_rule_abs_coordinate_d5():
    # the integral of |u_1| over S^4 is 2 pi^2 / Gamma(3) = pi^2
    rule = sphere_rule(5, 200000, seed=7)
    res = integrate_sphere(rule, lambda U: np.abs(U[:, 0]))
    assert abs(res.value - math.pi**2) < 4.0 * res.error
    assert res.error < 0.05


def test_random_rule_is_seeded_and_antithetic():
    a = sphere_rule(4, 1000, seed=3)
    b = sphere_rule(4, 1000, seed=3)
    np.testing.assert_array_equal(a.nodes, b.nodes)
    half = a.size // 2
    np.testing.assert_allclose(a.nodes[:half], -a.nodes[half:], atol=0)
    assert a.randomized


@pytest.mark.parametrize(
    "rule",
    [circle_rule(64), sphere_rule(3, 12), axis_free_rule(2, 64), axis_free_rule(3, 8), arc_rule([0.3, 2.0, 4.0], 16)],
    ids=["circle", "gl3", "free2", "free3", "arcs"],
)
def test_deterministic_rules_integrate_constants(rule):
    assert rule.weights.sum() == pytest.approx(omega(rule.dim), rel=1e-13)
    np.testing.assert_allclose(np.linalg.norm(rule.nodes, axis=1), 1.0, atol=1e-14)


def test_axis_free_rules_avoid_coordinate_planes():
    for rule in (axis_free_rule(2, 128), axis_free_rule(3, 16)):
        assert np.min(np.abs(rule.nodes)) > 1e-3


def test_arc_rule_integrates_kinked_function_exactly():
    # |cos| is smooth between the kinks at +-pi/2
    rule = arc_rule([0.5 * math.pi, 1.5 * math.pi], 16)
    res = integrate_sphere(rule, lambda U: np.abs(U[:, 0]))
    assert res.value == pytest.approx(4.0, abs=1e-13)


def test_radial_gaussian_moment():
    res = integrate_radial(radial_rule(), lambda r: r * np.exp(-(r**2)))
    assert res.value == pytest.approx(0.5, abs=1e-13)
    assert res.error < 1e-10


def test_radial_rule_rejects_unknown_tail():
    with pytest.raises(ValueError):
        radial_rule(tail="heavy")


def test_tanh_sinh_endpoint_singularity():
    ts = tanh_sinh(0.0, 1.0)
    val = np.sum(ts.weights / np.sqrt(ts.dist_lo))
    assert val == pytest.approx(2.0, rel=1e-12)


def test_composite_gauss_legendre_polynomial():
    x, w = composite_gauss_legendre([0.0, 0.3, 1.0, 2.5], 6)
    assert np.sum(w * x**5) == pytest.approx(2.5**6 / 6.0, rel=1e-13)


def _kink_atoms():
    return np.array([[1.0, 0.2, -0.4], [0.3, 1.0, 0.5], [-0.2, 0.4, 1.0], [0.7, -0.7, 0.1]])


def test_kink_rule_weights_and_l1_ball_volume():
    S = np.eye(3)
    rule = kink_sphere_rule(S)
    assert rule.weights.sum() == pytest.approx(4.0 * math.pi, rel=1e-10)
    # volume of the l1 ball is (1/3) int ||u||_1^{-3}
    res = integrate_sphere(rule, lambda U: np.sum(np.abs(U), axis=1) ** -3.0 / 3.0)
    assert res.value == pytest.approx(4.0 / 3.0, rel=1e-7)


@pytest.mark.parametrize("alpha", [1.0, 1.3, 0.6])
def test_kink_rule_converges_on_tilted_atoms(alpha):
    S = _kink_atoms()
    S = S / np.linalg.norm(S, axis=1, keepdims=True)
    f = lambda U: (np.abs(U @ S.T) ** alpha).sum(axis=1) ** (-3.0 / alpha)
    fine = integrate_sphere(kink_sphere_rule(S, step=0.1, coarse=False), f).value
    res = integrate_sphere(kink_sphere_rule(S), f)
    assert res.value == pytest.approx(fine, rel=1e-7)
    assert res.error >= abs(res.value - fine)


def test_kink_rule_nodes_on_sphere():
    rule = kink_sphere_rule(_kink_atoms(), coarse=False)
    np.testing.assert_allclose(np.linalg.norm(rule.nodes, axis=1), 1.0, atol=1e-13)
    assert np.all(rule.weights > 0)


def test_fibonacci_directions_antithetic():
    U = fibonacci_directions(200)
    np.testing.assert_allclose(U[:100], -U[100:])
    with pytest.raises(ValueError):
        fibonacci_directions(7)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_orthant_nodes_nonnegative_unit(d):
    U = orthant_nodes(d, 8)
    assert np.all(U >= 0)
    np.testing.assert_allclose(np.linalg.norm(U, axis=1), 1.0)


@settings(max_examples=40, deadline=None)
@given(k=st.integers(0, 20), j=st.integers(0, 20))
def test_circle_rule_trig_exactness(k, j):
    # cos(k t) cos(j t) integrates to pi delta_kj (2 pi when both vanish)
    rule = circle_rule(64)
    th = np.arctan2(rule.nodes[:, 1], rule.nodes[:, 0])
    val = integrate_sphere(rule, np.cos(k * th) * np.cos(j * th)).value
    expect = 0.0 if k != j else (2.0 * math.pi if k == 0 else math.pi)
    assert val == pytest.approx(expect, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(a=st.integers(0, 6), b=st.integers(0, 6), c=st.integers(0, 6))
def test_sphere3_monomial_exactness(a, b, c):
    # closed form for the sphere monomial integral via Gamma functions
    rule = sphere_rule(3, 16)
    val = integrate_sphere(rule, lambda U: U[:, 0] ** a * U[:, 1] ** b * U[:, 2] ** c).value
    if a % 2 or b % 2 or c % 2:
        expect = 0.0
    else:
        be = [(m + 1) / 2.0 for m in (a, b, c)]
        expect = 2.0 * math.prod(math.gamma(x) for x in be) / math.gamma(sum(be))
    assert val == pytest.approx(expect, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.0, 2.0 * math.pi), min_size=1, max_size=6))
def test_arc_rule_weight_sum_any_breaks(breaks):
    rule = arc_rule(breaks, 8)
    assert rule.weights.sum() == pytest.approx(2.0 * math.pi, rel=1e-12)
