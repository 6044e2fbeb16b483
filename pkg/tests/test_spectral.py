import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabgeo import geometry as geo
from stabgeo.quadrature import circle_rule, omega, sphere_rule
from stabgeo.simulate import sample_vector
from stabgeo.spectral import (
    DiscreteAtoms,
    EmptyTailError,
    ExplicitGauge,
    Isotropic,
    StableModel,
    alpha_power,
    atoms_model,
    estimate_spectral_from_samples,
    fold_directions,
    independent_model,
    is_valid,
    isotropic_constant,
    isotropic_model,
    model_fingerprint,
    onesided_model,
    require_valid,
    scale_measure,
    spectral_from_star_body,
    subgaussian_model,
    tail_constant,
    total_mass,
    validate_model,
)


def codes(model):
    return {d.code for d in validate_model(model) if d.severity == "error"}


def test_independent_model_is_clean():
    assert validate_model(independent_model(1.5, 2)) == []


def test_single_atom_not_full_dimensional():
    m = StableModel(1.0, DiscreteAtoms([[1.0, 0.0]], [1.0]), 2)
    assert "full-dimensional" in codes(m)


def test_onesided_alpha_above_one_rejected():
    m = onesided_model(1.3, np.eye(2))
    assert "onesided-alpha" in codes(m)


@pytest.mark.parametrize("alpha", [0.0, -1.0, 2.5])
def test_alpha_out_of_range(alpha):
    m = StableModel(alpha, DiscreteAtoms(np.eye(2), [1.0, 1.0]), 2)
    assert "alpha-range" in codes(m)


def test_non_unit_direction_and_negative_weight():
    m = StableModel(1.0, DiscreteAtoms([[2.0, 0.0], [0.0, 1.0]], [1.0, -1.0]), 2)
    assert {"unit", "weight"} <= codes(m)


def test_unfolded_atom_flagged():
    m = StableModel(1.0, DiscreteAtoms([[-1.0, 0.0], [0.0, 1.0]], [1.0, 1.0]), 2)
    assert "fold" in codes(m)


def test_onesided_direction_outside_orthant():
    m = StableModel(0.5, DiscreteAtoms([[1.0, 0.0], [-0.6, 0.8]], [1.0, 1.0]), 2, "onesided")
    assert "orthant" in codes(m)


def test_alpha_two_non_elliptical_warns_only():
    diags = validate_model(independent_model(2.0, 2))
    assert [d.code for d in diags] == ["alpha-two"]
    assert diags[0].severity == "warning"
    assert validate_model(subgaussian_model(np.eye(2), 2.0)) == []


def test_explicit_gauge_homogeneity_checked():
    bad = StableModel(1.0, ExplicitGauge(lambda U: np.sum(U**2, axis=1)), 2)
    assert "homogeneity" in codes(bad)
    good = StableModel(1.0, ExplicitGauge(lambda U: np.abs(U).sum(axis=1)), 2)
    assert is_valid(good)


def test_subgaussian_matrix_must_be_positive_definite():
    assert "full-dimensional" in codes(subgaussian_model([[1.0, 1.0], [1.0, 1.0]], 1.5))
    assert "matrix" in codes(subgaussian_model([[1.0, 0.5], [0.0, 1.0]], 1.5))


def test_require_valid_raises_with_message():
    with pytest.raises(ValueError, match="full-dimensional"):
        require_valid(StableModel(1.0, DiscreteAtoms([[1.0, 0.0]], [1.0]), 2))


def test_atoms_model_folds_and_absorbs_length():
    m = atoms_model(1.5, [[-2.0, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(m.spectral.directions, [[1.0, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(m.spectral.weights, [2.0**1.5, 1.0])


def test_fold_directions_first_nonzero_positive():
    S = fold_directions([[0.0, -1.0, 2.0], [-1.0, 0.0, 0.0]])
    np.testing.assert_array_equal(S, [[0.0, 1.0, -2.0], [1.0, 0.0, 0.0]])


def test_isotropic_constant_closed_forms():
    # integral of |u_1| over the circle is 4, of u_1^2 over S^2 is 4 pi / 3
    assert isotropic_constant(2, 1.0) == pytest.approx(4.0, rel=1e-14)
    assert isotropic_constant(3, 2.0) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-14)


@pytest.mark.parametrize("d,alpha,scale", [(2, 1.0, 1.0), (3, 1.5, 2.0), (5, 0.7, 0.3)])
def test_isotropic_model_gauge_is_scaled_norm(d, alpha, scale):
    m = isotropic_model(alpha, d, scale)
    U = np.random.default_rng(1).standard_normal((5, d))
    np.testing.assert_allclose(alpha_power(m, U), (scale * np.linalg.norm(U, axis=1)) ** alpha, rtol=1e-13)


def test_star_body_unit_disk_density():
    rule = circle_rule(64)
    dens = spectral_from_star_body(lambda U: np.linalg.norm(U, axis=1), 1.0, rule)
    np.testing.assert_allclose(dens.values, 1.0 / 3.0, rtol=1e-15)


def test_star_body_radius_two_density():
    rule = circle_rule(64)
    dens = spectral_from_star_body(lambda U: 0.5 * np.linalg.norm(U, axis=1), 1.0, rule)
    np.testing.assert_allclose(dens.values, 8.0 / 3.0, rtol=1e-14)


def test_star_body_rejects_zero_radial_function():
    rule = circle_rule(16)
    with pytest.raises(ValueError, match="node 0"):
        spectral_from_star_body(lambda U: np.abs(U[:, 1]), 1.0, rule)


def _ellipse_gauge(U):
    return np.sqrt(U[:, 0] ** 2 + 0.25 * U[:, 1] ** 2)


def test_star_body_ellipse_matches_monte_carlo():
    rule = circle_rule(512)
    m = StableModel(1.0, spectral_from_star_body(_ellipse_gauge, 1.0, rule), 2)
    U = np.array([[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]])
    g = geo.gauge(m, U)
    # uniform points in the ellipse with semi-axes (1, 2)
    rng = np.random.default_rng(99)
    Z = rng.uniform(-1.0, 1.0, size=(1_000_000, 2))
    Z = Z[np.sum(Z**2, axis=1) <= 1.0] * [1.0, 2.0]
    area = 2.0 * math.pi
    for u, gu in zip(U, g):
        v = area * np.abs(Z @ u)
        mc, se = v.mean(), v.std(ddof=1) / math.sqrt(v.size)
        assert abs(gu - mc) < 3.0 * se
        # exact value (8/3)|D u| from the linear image of the unit disk; the
        # trapezoid rule on the kinked integrand limits agreement to ~1e-4
        assert gu == pytest.approx(8.0 / 3.0 * math.hypot(u[0], 2.0 * u[1]), rel=2e-4)


def test_estimate_point_mass():
    S = estimate_spectral_from_samples(np.tile([2.0, 0.0], (10, 1)), 1.0)
    np.testing.assert_allclose(S.directions, [[1.0, 0.0]])
    np.testing.assert_allclose(S.weights, [1.0])


def test_estimate_drops_subthreshold():
    S = estimate_spectral_from_samples([[3.0, 0.0], [0.0, 3.0], [0.1, 0.0]], 1.0)
    order = np.argsort(-S.directions[:, 0])
    np.testing.assert_allclose(S.directions[order], np.eye(2))
    np.testing.assert_allclose(S.weights[order], [0.5, 0.5])


def test_estimate_empty_tail():
    with pytest.raises(EmptyTailError):
        estimate_spectral_from_samples([[0.1, 0.2]], 5.0)


def test_estimate_binned_requires_symmetric_planar():
    with pytest.raises(ValueError):
        estimate_spectral_from_samples(np.ones((4, 3)), 0.5, n_bins=8)


def test_estimate_from_cauchy_samples_recovers_l1_gauge():
    m = independent_model(1.0, 2)
    X = sample_vector(m, 100_000, seed=5).data
    norms = np.linalg.norm(X, axis=1)
    t = np.quantile(norms, 0.999)
    shape = estimate_spectral_from_samples(X, t)
    frac = np.mean(norms >= t)
    mass = t * frac / tail_constant(1.0)
    est = StableModel(1.0, DiscreteAtoms(shape.directions, shape.weights * mass), 2)
    th = np.linspace(0.0, math.pi, 16, endpoint=False)
    U = np.column_stack([np.cos(th), np.sin(th)])
    rel = np.abs(geo.gauge(est, U) / np.abs(U).sum(axis=1) - 1.0)
    assert rel.max() < 0.10


def test_scale_and_mass():
    s = scale_measure(DiscreteAtoms([[1.0, 0.0]], [1.0]), 2.0)
    np.testing.assert_allclose(s.weights, [2.0])
    assert total_mass(DiscreteAtoms(np.eye(2), [1.0, 1.0])) == 2.0
    assert total_mass(Isotropic(3.5)) == 3.5
    with pytest.raises(ValueError):
        scale_measure(Isotropic(1.0), 0.0)
    with pytest.raises(TypeError):
        total_mass(subgaussian_model(np.eye(2), 1.0))


def test_density_mass_uses_rule_weights():
    rule = sphere_rule(3, 8)
    dens = spectral_from_star_body(lambda U: np.linalg.norm(U, axis=1), 1.0, rule)
    assert total_mass(dens) == pytest.approx(omega(3) / 4.0, rel=1e-12)


def test_fingerprint_stable_and_sensitive():
    a = independent_model(1.5, 2)
    assert model_fingerprint(a) == model_fingerprint(independent_model(1.5, 2))
    assert model_fingerprint(a) != model_fingerprint(independent_model(1.4, 2))
    assert model_fingerprint(a) != model_fingerprint(scale_measure(a, 2.0))


def test_atoms_are_read_only():
    m = independent_model(1.0, 2)
    with pytest.raises(ValueError):
        m.spectral.weights[0] = 5.0


atom_models = st.builds(
    lambda a, seed, k: atoms_model(a, np.random.default_rng(seed).standard_normal((k, 3))),
    st.floats(0.3, 2.0),
    st.integers(0, 10_000),
    st.integers(3, 7),
)


@settings(max_examples=40, deadline=None)
@given(m=atom_models, c=st.floats(1e-3, 1e3))
def test_scaling_keeps_models_clean(m, c):
    before = [d.code for d in validate_model(m)]
    after = [d.code for d in validate_model(scale_measure(m, c))]
    assert before == after


@settings(max_examples=40, deadline=None)
@given(m=atom_models, c=st.floats(0.1, 10.0))
def test_scaled_gauge(m, c):
    U = np.random.default_rng(0).standard_normal((4, 3))
    np.testing.assert_allclose(
        geo.gauge(scale_measure(m, c), U), c ** (1.0 / m.alpha) * geo.gauge(m, U), rtol=1e-12
    )


@settings(max_examples=30, deadline=None)
@given(m=atom_models)
def test_estimate_from_exact_atoms_reproduces_gauge(m):
    S, w = m.spectral.directions, m.spectral.weights
    # one sample per atom, lengths large enough to pass the threshold
    shape = estimate_spectral_from_samples(S * 10.0, 1.0)
    # the empirical measure only sees directions, so weight by repetition
    est = StableModel(m.alpha, DiscreteAtoms(S, w), 3)
    assert shape.weights.sum() == pytest.approx(1.0)
    U = np.random.default_rng(1).standard_normal((16, 3))
    np.testing.assert_allclose(geo.gauge(est, U), geo.gauge(m, U), rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(
    counts=st.lists(st.integers(1, 5), min_size=3, max_size=3),
    alpha=st.floats(0.4, 2.0),
)
def test_estimate_weights_from_repeated_atoms(counts, alpha):
    S = np.array([[1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [0.0, 1.0, 0.0]])
    X = np.repeat(S * 5.0, counts, axis=0)
    shape = estimate_spectral_from_samples(X, 1.0)
    src = StableModel(alpha, DiscreteAtoms(S, np.asarray(counts, float)), 3)
    mass = float(sum(counts))
    est = StableModel(alpha, DiscreteAtoms(shape.directions, shape.weights * mass), 3)
    U = np.random.default_rng(2).standard_normal((16, 3))
    np.testing.assert_allclose(geo.gauge(est, U), geo.gauge(src, U), rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(c=st.floats(0.01, 100.0), seed=st.integers(0, 1000))
def test_star_body_gauge_homogeneous(c, seed):
    rule = circle_rule(128)
    m = StableModel(1.3, spectral_from_star_body(_ellipse_gauge, 1.3, rule), 2)
    u = np.random.default_rng(seed).standard_normal((1, 2))
    assert geo.gauge(m, c * u)[0] == pytest.approx(c * geo.gauge(m, u)[0], rel=1e-10)
