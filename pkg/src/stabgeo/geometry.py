"""Star bodies, zonoids and related functionals of a stable model.

For a symmetric model the gauge ``||u||_F`` is the Minkowski functional of
the star body F; for alpha >= 1 it is also the support function of the
associated zonoid K (F is the polar of K).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import quadrature as qd
from .quadrature import QuadResult, SphereRule
from .spectral import (
    ONESIDED,
    SYMMETRIC,
    DiscreteAtoms,
    ExplicitGauge,
    Isotropic,
    SphericalDensity,
    StableModel,
    alpha_power,
    elliptical_gauge,
    fold_directions,
    isotropic_constant,
    isotropic_model,
    validate_model,
)

KINK_ATOM_LIMIT = 128
KINK_ATOM_LIMIT_3D = 8


def signed_power(t, p):
    """|t|**p * sign(t), with 0 mapped to 0."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sign(t) * np.abs(t) ** p
    return np.where(t == 0, 0.0, out)


def _as_rows(u, d: int):
    U = np.asarray(u, dtype=float)
    single = U.ndim == 1
    U = np.atleast_2d(U)
    if U.shape[1] != d:
        raise ValueError(f"expected vectors of length {d}")
    return U, single


def gauge(model: StableModel, u):
    """||u||_F; accepts a single vector or an (n, d) array."""
    U, single = _as_rows(u, model.dim)
    if model.kind == ONESIDED and np.any(U < 0):
        raise ValueError("one-sided gauge is defined on the positive orthant only")
    if isinstance(model.spectral, ExplicitGauge):
        g = np.asarray(model.spectral.func(U), dtype=float)
    else:
        g = np.maximum(alpha_power(model, U), 0.0) ** (1.0 / model.alpha)
    return float(g[0]) if single else g


def radial(model: StableModel, u):
    """Radial function 1/||u||_F (infinite where the gauge vanishes)."""
    g = np.asarray(gauge(model, u), dtype=float)
    with np.errstate(divide="ignore"):
        r = 1.0 / g
    return float(r) if r.ndim == 0 else r


def _gradient(model: StableModel, U: np.ndarray) -> np.ndarray:
    """Gradient of the gauge at the rows of U (no exponent checks)."""
    a = model.alpha
    sp = model.spectral
    if isinstance(sp, (DiscreteAtoms, SphericalDensity)):
        if isinstance(sp, DiscreteAtoms):
            S, w = sp.directions, sp.weights
        else:
            S, w = sp.rule.nodes, sp.rule.weights * sp.values
        ip = U @ S.T
        inner = (signed_power(ip, a - 1.0) * w) @ S
        h = alpha_power(model, U) ** (1.0 / a)
        return h[:, None] ** (1.0 - a) * inner
    if isinstance(sp, Isotropic):
        c = (sp.mass * isotropic_constant(model.dim, a) / qd.omega(model.dim)) ** (1.0 / a)
        return c * U / np.linalg.norm(U, axis=1, keepdims=True)
    if isinstance(sp, ExplicitGauge):
        if sp.grad is not None:
            return np.atleast_2d(sp.grad(U))
        return _fd_gradient(sp.func, U)
    raise TypeError("unsupported spectral description")


def _fd_gradient(func, U, rel_step: float = 1e-6) -> np.ndarray:
    n, d = U.shape
    out = np.empty_like(U)
    h = rel_step * np.linalg.norm(U, axis=1)
    for i in range(d):
        E = np.zeros_like(U)
        E[:, i] = h
        out[:, i] = (np.asarray(func(U + E)) - np.asarray(func(U - E))) / (2 * h)
    return out


def support_point(model: StableModel, u):
    """T(K, u): the gradient of h(K, .) at u (requires alpha > 1)."""
    if model.alpha <= 1.0:
        raise ValueError("support point needs alpha > 1 (the support set may not be a singleton)")
    if model.kind != SYMMETRIC:
        raise ValueError("support point is defined for symmetric models")
    if is_degenerate(model):
        raise ValueError("support point needs a full-dimensional model")
    U, single = _as_rows(u, model.dim)
    if np.any(np.linalg.norm(U, axis=1) == 0):
        raise ValueError("u must be nonzero")
    T = _gradient(model, U)
    return T[0] if single else T


def is_degenerate(model: StableModel) -> bool:
    return any(dg.code == "full-dimensional" for dg in validate_model(model))


def kink_angles(directions: np.ndarray, basis: Optional[np.ndarray] = None) -> np.ndarray:
    """Angles in a plane where |<v, s>| has a kink, for each direction s.

    ``basis`` holds two orthonormal rows spanning the plane (defaults to R^2).
    """
    S = np.atleast_2d(directions)
    P = S if basis is None else S @ np.asarray(basis).T
    keep = np.linalg.norm(P, axis=1) > 1e-14
    phi = np.arctan2(P[keep, 1], P[keep, 0])
    return np.concatenate([phi + 0.5 * np.pi, phi - 0.5 * np.pi])


def default_rule(model: StableModel, basis: Optional[np.ndarray] = None) -> SphereRule:
    """Sphere rule suited to the model's gauge.

    Discrete measures with few atoms get rules split at the kinks of the
    gauge (arcs in the plane, parallels and arcs on S^2); smooth gauges
    use the trapezoidal rule or the Gauss product rule.
    """
    d = model.dim if basis is None else np.asarray(basis).shape[0]
    sp = model.spectral
    if d == 2:
        if isinstance(sp, DiscreteAtoms) and sp.directions.shape[0] <= KINK_ATOM_LIMIT:
            kinks = kink_angles(sp.directions, basis)
            n_arcs = max(len(np.unique(np.round(np.mod(kinks, 2 * np.pi), 13))), 1)
            per_arc = max(16, int(math.ceil(512 / n_arcs)))
            per_arc += per_arc % 2
            return qd.arc_rule(kinks, per_arc)
        if isinstance(sp, DiscreteAtoms):
            return qd.circle_rule(4096)
        return qd.circle_rule()
    if d == 3:
        if basis is None and isinstance(sp, DiscreteAtoms) and sp.directions.shape[0] <= KINK_ATOM_LIMIT_3D:
            return qd.kink_sphere_rule(sp.directions)
        return qd.sphere_rule(3)
    raise ValueError("pass an explicit (seeded) sphere rule for d >= 4")


class GaugeView:
    """Gauge, radial function and support points of a model, with node caching."""

    def __init__(self, model: StableModel, rule: Optional[SphereRule] = None):
        self.model = model
        self.rule = default_rule(model) if rule is None and model.dim <= 3 else rule
        self._cache = None

    @property
    def node_gauge(self) -> np.ndarray:
        if self._cache is None:
            self._cache = gauge(self.model, self.rule.nodes)
        return self._cache

    def gauge(self, u):
        return gauge(self.model, u)

    def radial(self, u):
        return radial(self.model, u)

    def support(self, u):
        if self.model.alpha < 1:
            raise ValueError("the gauge is a support function only for alpha >= 1")
        return gauge(self.model, u)

    def support_point(self, u):
        return support_point(self.model, u)


# ------------------------------------------------------------- volumes


def volume(model: StableModel, rule: Optional[SphereRule] = None) -> QuadResult:
    """|F| = (1/d) * integral of rho_F**d over the sphere."""
    if model.kind != SYMMETRIC:
        raise ValueError("volume is defined for symmetric models")
    if is_degenerate(model):
        return QuadResult(math.inf, 0.0)
    if isinstance(model.spectral, Isotropic):
        s = gauge(model, np.eye(model.dim)[0])
        return QuadResult(qd.kappa(model.dim) / s**model.dim, 0.0)
    rule = default_rule(model) if rule is None else rule
    d = model.dim

    def f(V):
        g = gauge(model, V)
        if np.any(g <= 0):
            return np.full(V.shape[0], np.inf)
        return g ** (-float(d)) / d

    try:
        return qd.integrate_sphere(rule, f)
    except ValueError:
        return QuadResult(math.inf, 0.0)


def _orthonormal_complement(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    q, _ = np.linalg.qr(np.column_stack([u, np.eye(u.size)]))
    return q[:, 1:u.size].T


def subspace_section_volume(model: StableModel, basis, rule: Optional[SphereRule] = None) -> QuadResult:
    """Vol_k(F intersected with the span of the orthonormal rows of ``basis``)."""
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    k = B.shape[0]
    if not np.allclose(B @ B.T, np.eye(k), atol=1e-10):
        raise ValueError("basis rows must be orthonormal")
    if is_degenerate(model):
        return QuadResult(math.inf, 0.0)
    if k == 1:
        return QuadResult(2.0 * radial(model, B[0]), 0.0)
    if rule is None:
        rule = default_rule(model, B) if k <= 3 else None
        if rule is None:
            raise ValueError("pass an explicit sphere rule for k >= 4")

    def f(W):
        g = gauge(model, W @ B)
        return g ** (-float(k)) / k

    return qd.integrate_sphere(rule, f)


def section_volume(model: StableModel, u, rule: Optional[SphereRule] = None) -> QuadResult:
    """Vol_{d-1}(F intersected with the hyperplane orthogonal to u)."""
    u = np.asarray(u, dtype=float)
    if np.linalg.norm(u) == 0:
        raise ValueError("u must be nonzero")
    return subspace_section_volume(model, _orthonormal_complement(u), rule)


# --------------------------------------------------------- constructions


def star_sum(m1: StableModel, m2: StableModel) -> StableModel:
    """Model of the sum of independent vectors (spectral measures add)."""
    if m1.alpha != m2.alpha or m1.kind != m2.kind or m1.dim != m2.dim:
        raise ValueError("star sum needs equal alpha, kind and dimension")
    a, s1, s2 = m1.alpha, m1.spectral, m2.spectral
    if isinstance(s1, DiscreteAtoms) and isinstance(s2, DiscreteAtoms):
        S = np.concatenate([s1.directions, s2.directions])
        w = np.concatenate([s1.weights, s2.weights])
        return StableModel(a, DiscreteAtoms(S, w), m1.dim, m1.kind)
    if isinstance(s1, Isotropic) and isinstance(s2, Isotropic):
        return StableModel(a, Isotropic(s1.mass + s2.mass), m1.dim, m1.kind)
    if (
        isinstance(s1, SphericalDensity)
        and isinstance(s2, SphericalDensity)
        and s1.rule is s2.rule
    ):
        return StableModel(a, SphericalDensity(s1.rule, s1.values + s2.values), m1.dim, m1.kind)
    if m1.is_elliptical and m2.is_elliptical and a == 2.0:
        C = np.asarray(s1.matrix) + np.asarray(s2.matrix)
        return StableModel(a, elliptical_gauge(C), m1.dim, m1.kind)

    def func(U):
        return (alpha_power(m1, U) + alpha_power(m2, U)) ** (1.0 / a)

    return StableModel(a, ExplicitGauge(func, None, None, None, "star-sum"), m1.dim, m1.kind)


def substable_transform(model: StableModel, beta: float) -> StableModel:
    """Model of zeta**(1/alpha) * xi, zeta positive beta-stable: exponent alpha*beta, same F."""
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    if model.kind != SYMMETRIC:
        raise ValueError("sub-stable transform needs a symmetric model")
    matrix = model.spectral.matrix if model.is_elliptical else None

    def func(U):
        return gauge(model, np.atleast_2d(U))

    def grad(U):
        return _gradient(model, np.atleast_2d(U))

    sp = ExplicitGauge(func, grad, matrix, model, "substable")
    return StableModel(model.alpha * beta, sp, model.dim, SYMMETRIC)


def project_model(model: StableModel, basis) -> StableModel:
    """Model of the projection of xi onto span(basis rows), in basis coordinates."""
    if model.kind != SYMMETRIC:
        raise ValueError("projection needs a symmetric model")
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    k = B.shape[0]
    if not np.allclose(B @ B.T, np.eye(k), atol=1e-10):
        raise ValueError("basis rows must be orthonormal")
    a, sp = model.alpha, model.spectral
    if isinstance(sp, SphericalDensity):
        sp = sp.as_atoms()
    if isinstance(sp, DiscreteAtoms):
        P = sp.directions @ B.T
        n = np.linalg.norm(P, axis=1)
        keep = n > 1e-14
        S = fold_directions(P[keep] / n[keep, None])
        return StableModel(a, DiscreteAtoms(S, sp.weights[keep] * n[keep] ** a), k)
    if isinstance(sp, Isotropic):
        return isotropic_model(a, k, gauge(model, np.eye(model.dim)[0]))
    if model.is_elliptical and sp.base is None:
        return StableModel(a, elliptical_gauge(B @ np.asarray(sp.matrix) @ B.T), k)

    def func(V):
        return gauge(model, np.atleast_2d(V) @ B)

    return StableModel(a, ExplicitGauge(func, None, None, None, "projection"), k)


# ------------------------------------------------------------ ellipsoids


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """Centred ellipsoid {x : x' M x <= 1}."""

    matrix: np.ndarray

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float)
        if not np.allclose(M, M.T, atol=1e-12 * max(1.0, np.abs(M).max())):
            raise ValueError("ellipsoid matrix must be symmetric")
        M = 0.5 * (M + M.T)
        if np.linalg.eigvalsh(M).min() <= 0:
            raise ValueError("ellipsoid matrix must be positive definite")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def support(self, u):
        U = np.atleast_2d(np.asarray(u, dtype=float))
        Minv = np.linalg.inv(self.matrix)
        h = np.sqrt(np.einsum("ij,jk,ik->i", U, Minv, U))
        return float(h[0]) if np.ndim(u) == 1 else h

    def volume(self) -> float:
        return qd.kappa(self.dim) / math.sqrt(np.linalg.det(self.matrix))


def ellipsoid_model(E: Ellipsoid, alpha: float) -> StableModel:
    """Sub-Gaussian model whose associated zonoid is the ellipsoid E."""
    return StableModel(alpha, elliptical_gauge(2.0 * np.linalg.inv(E.matrix)), E.dim)


def model_ellipsoid(model: StableModel) -> Ellipsoid:
    """Zonoid K of an elliptical model as an Ellipsoid."""
    if not model.is_elliptical:
        raise ValueError("model is not elliptical")
    return Ellipsoid(2.0 * np.linalg.inv(np.asarray(model.spectral.matrix)))


class JohnEllipsoid(NamedTuple):
    ellipsoid: Ellipsoid
    inner_ratio: float   # max h(E,u)/h(K,u) over constraint nodes, <= 1
    outer_ratio: float   # max h(K,u)/h(E,u) over constraint nodes, <= sqrt(d)(1+eps)
    iterations: int
    directions: np.ndarray


def john_directions(d: int) -> np.ndarray:
    if d == 2:
        return qd.circle_rule(128).nodes
    if d == 3:
        return qd.fibonacci_directions(770)
    raise ValueError("John ellipsoids are available for d = 2 or 3")


def john_ellipsoid(
    model: StableModel,
    directions=None,
    tol: float = 1e-10,
    gap_tol: float = 1e-10,
    max_iter: int = 200_000,
) -> JohnEllipsoid:
    """Maximal-volume centred ellipsoid inside the polytope {<x,u_i> <= h(K,u_i)}.

    Solved through the polar problem: the minimal centred ellipsoid
    containing the points u_i/h(K,u_i), by coordinate ascent on the
    design weights (Frank-Wolfe steps with away steps).  Stops once the
    log-determinant improves by less than ``tol`` and the relative design
    gap max_i g_i/d - 1 is below ``gap_tol``.
    """
    if model.alpha < 1.0:
        raise ValueError("John ellipsoid needs alpha >= 1 (K convex)")
    if is_degenerate(model):
        raise ValueError("John ellipsoid needs a full-dimensional model")
    d = model.dim
    U = john_directions(d) if directions is None else np.atleast_2d(np.asarray(directions, dtype=float))
    h = gauge(model, U)
    A = U / h[:, None]
    n = A.shape[0]
    p = np.full(n, 1.0 / n)
    X = A.T @ (p[:, None] * A)
    Xinv = np.linalg.inv(X)
    logdet = np.linalg.slogdet(X)[1]
    g = np.einsum("ij,jk,ik->i", A, Xinv, A)
    it = 0
    for it in range(1, max_iter + 1):
        j = int(np.argmax(g))
        kap = g[j]
        masked = np.where(p > 0, g, np.inf)
        k = int(np.argmin(masked))
        gk = g[k]
        if kap - d >= d - gk:
            tau = (kap - d) / (d * (kap - 1.0))
            a = A[j]
            X = (1.0 - tau) * X + tau * np.outer(a, a)
            p *= 1.0 - tau
            p[j] += tau
        else:
            tmax = p[k] / (1.0 - p[k]) if p[k] < 1 else 0.0
            tau = tmax if gk <= 1.0 else min((d - gk) / (d * (gk - 1.0)), tmax)
            a = A[k]
            X = (1.0 + tau) * X - tau * np.outer(a, a)
            p *= 1.0 + tau
            p[k] -= tau
            if tau == tmax:
                p[k] = 0.0
        Xinv = np.linalg.inv(X)
        g = np.einsum("ij,jk,ik->i", A, Xinv, A)
        new_logdet = np.linalg.slogdet(X)[1]
        improvement = new_logdet - logdet
        logdet = new_logdet
        if 0 <= improvement < tol and g.max() / d - 1.0 < gap_tol:
            break
    else:
        raise RuntimeError(f"John ellipsoid did not converge in {max_iter} iterations")
    kap = float(g.max())
    M = kap * X
    E = Ellipsoid(0.5 * (M + M.T))
    hE = E.support(U)
    return JohnEllipsoid(E, float(np.max(hE / h)), float(np.max(h / hE)), it, U)


def metric_m_alpha(m1: StableModel, m2: StableModel, rule: Optional[SphereRule] = None) -> float:
    """sup over rule nodes of |h(K1,u)**alpha - h(K2,u)**alpha|."""
    if m1.alpha != m2.alpha:
        raise ValueError("metric needs equal exponents")
    if m1.kind != SYMMETRIC or m2.kind != SYMMETRIC:
        raise ValueError("metric needs symmetric models")
    if m1.dim != m2.dim:
        raise ValueError("metric needs equal dimensions")
    rule = qd.sphere_rule(m1.dim) if rule is None else rule
    U = rule.nodes
    return float(np.max(np.abs(alpha_power(m1, U) - alpha_power(m2, U))))


def norm_of_body(model: StableModel, rule: Optional[SphereRule] = None) -> float:
    """||K|| = max over nodes of h(K,u)."""
    rule = qd.sphere_rule(model.dim) if rule is None else rule
    return float(np.max(gauge(model, rule.nodes)))


# ------------------------------------------------------------ I(F)


def _gauge_function(model_or_func, d):
    if isinstance(model_or_func, StableModel):
        if model_or_func.dim != d:
            raise ValueError(f"this functional needs d = {d}")
        return lambda V: gauge(model_or_func, V)
    return model_or_func


def iF_functional(model, n_per_arc: int = 64) -> QuadResult:
    """Principal value of the integral of du/(u1 u2) over F (d = 2).

    Pairing each angle with its mirror image across the vertical axis
    turns the principal value into the proper integral

        -4 * int_0^{pi/2} [log g(c, s) - log g(-c, s)] / sin(2t) dt,

    with (c, s) = (cos t, sin t).  Gauss-Legendre panels avoid the axes
    and are split at kinks of discrete gauges.
    """
    if isinstance(model, StableModel):
        if model.kind != SYMMETRIC:
            raise ValueError("I(F) needs a symmetric model")
        if is_degenerate(model):
            raise ValueError("I(F) needs a full-dimensional model")
    g = _gauge_function(model, 2)
    brk = [0.0, 0.5 * np.pi]
    sp = model.spectral if isinstance(model, StableModel) else None
    if isinstance(sp, DiscreteAtoms):
        k = np.mod(kink_angles(sp.directions), np.pi)
        k = np.concatenate([k, np.pi - k])
        brk.extend(k[(k > 1e-12) & (k < 0.5 * np.pi - 1e-12)].tolist())
    brk = np.unique(np.asarray(brk))

    def integral(npts):
        t, w = qd.composite_gauss_legendre(brk, npts)
        c, s = np.cos(t), np.sin(t)
        num = np.log(g(np.column_stack([c, s]))) - np.log(g(np.column_stack([-c, s])))
        return -4.0 * float(np.sum(w * num / np.sin(2.0 * t)))

    val = integral(n_per_arc)
    err = abs(val - integral(max(n_per_arc // 2, 4)))
    return QuadResult(val, err)


def iF_functional_nd(model, k: int, n: int = 200_000, seed: int = 0) -> QuadResult:
    """Experimental: I(F) for even k >= 4 by Monte Carlo over the positive orthant."""
    if k == 2:
        return iF_functional(model)
    if k % 2:
        raise ValueError("I(F) is used for even dimensions")
    g = _gauge_function(model, k)
    rng = np.random.Generator(np.random.PCG64(seed))
    V = np.abs(rng.standard_normal((n, k)))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    signs = np.array(np.meshgrid(*[[1.0, -1.0]] * k, indexing="ij")).reshape(k, -1).T
    acc = np.zeros(n)
    for eps in signs:
        acc += np.prod(eps) * np.log(g(V * eps))
    vals = acc / np.prod(V, axis=1)
    scale = -qd.omega(k) / 2**k
    return QuadResult(scale * float(np.mean(vals)), abs(scale) * float(np.std(vals, ddof=1)) / math.sqrt(n))


# --------------------------------------------------------- orthogonality


class BirkhoffResult(NamedTuple):
    orthogonal: bool
    margin: float
    c_min: float


def _line_minimum(gfun, X: np.ndarray, Y: np.ndarray, iters: int = 120):
    """Minimise c -> g(x + c y) row-wise by golden-section search."""
    gx = gfun(X)
    gy = gfun(Y)
    R = 2.0 * gx / gy + 1e-12
    lo, hi = -R, R
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c1 = hi - invphi * (hi - lo)
    c2 = lo + invphi * (hi - lo)
    f1 = gfun(X + c1[:, None] * Y)
    f2 = gfun(X + c2[:, None] * Y)
    for _ in range(iters):
        left = f1 < f2
        hi = np.where(left, c2, hi)
        lo = np.where(left, lo, c1)
        c2n = np.where(left, c1, lo + invphi * (hi - lo))
        c1n = np.where(left, hi - invphi * (hi - lo), c2)
        new = np.where(left, c1n, c2n)
        fn = gfun(X + new[:, None] * Y)
        f1, f2 = np.where(left, fn, f2), np.where(left, f1, fn)
        c1, c2 = c1n, c2n
    c = 0.5 * (lo + hi)
    fmin = gfun(X + c[:, None] * Y)
    use0 = gx <= fmin
    return np.where(use0, gx, fmin), np.where(use0, 0.0, c), gx


def birkhoff_orthogonal(model: StableModel, x, y, tol: float = 1e-7) -> BirkhoffResult:
    """Is x normal to y, i.e. ||x + c y|| >= ||x|| for every real c?"""
    if model.kind != SYMMETRIC:
        raise ValueError("orthogonality needs a symmetric model")
    X = np.atleast_2d(np.asarray(x, dtype=float))
    Y = np.atleast_2d(np.asarray(y, dtype=float))
    if np.linalg.norm(X) == 0 or np.linalg.norm(Y) == 0:
        raise ValueError("x and y must be nonzero")
    fmin, c, gx = _line_minimum(lambda V: gauge(model, V), X, Y)
    margin = float(fmin[0] - gx[0])
    return BirkhoffResult(bool(fmin[0] >= gx[0] * (1.0 - tol)), margin, float(c[0]))


# ------------------------------------------------------ zonoid volume


def zonoid_volume(model: StableModel, rule: Optional[SphereRule] = None) -> QuadResult:
    """|K| for the associated zonoid (alpha >= 1).

    In the plane |K| = (1/2) * int (h**2 - h'**2) dtheta with h' the
    angular derivative of the support function.  In higher dimensions the
    radial function of K is obtained from rho_K(x) = 1/h(F, x) by
    maximising <x, v>/g(v) over the sphere.
    """
    if model.alpha < 1.0:
        raise ValueError("the zonoid exists for alpha >= 1")
    d = model.dim
    sp = model.spectral
    if isinstance(sp, Isotropic):
        return QuadResult(qd.kappa(d) * gauge(model, np.eye(d)[0]) ** d, 0.0)
    if model.is_elliptical and sp.base is None:
        return QuadResult(model_ellipsoid(model).volume(), 0.0)
    if d == 2:
        rule = default_rule(model) if rule is None else rule

        def f(V):
            h = gauge(model, V)
            perp = np.column_stack([-V[:, 1], V[:, 0]])
            dh = np.sum(_gradient(model, V) * perp, axis=1)
            return 0.5 * (h**2 - dh**2)

        return qd.integrate_sphere(rule, f)
    if model.alpha <= 1.0:
        raise ValueError("zonoid volume in d >= 3 needs alpha > 1")
    rule = qd.sphere_rule(d) if rule is None else rule
    hF = _polar_gauge(model, rule.nodes)
    vals = hF ** (-float(d)) / d
    return qd.integrate_sphere(rule, vals)


def _polar_gauge(model: StableModel, X: np.ndarray, iters: int = 400) -> np.ndarray:
    """h(F, x) = max over unit v of <x, v>/g(v), by projected gradient ascent."""
    d = model.dim
    cand = qd.sphere_rule(d, 24).nodes if d == 3 else qd.sphere_rule(d, 4000, seed=1).nodes
    gc = gauge(model, cand)
    best = np.empty(X.shape[0], dtype=int)
    for i in range(0, X.shape[0], 512):
        best[i:i + 512] = np.argmax((X[i:i + 512] @ cand.T) / gc[None, :], axis=1)
    V = cand[best].copy()

    def phi(V):
        return np.sum(X * V, axis=1) / gauge(model, V)

    val = phi(V)
    eta = np.full(X.shape[0], 0.1)
    for _ in range(iters):
        gv = gauge(model, V)
        xv = np.sum(X * V, axis=1)
        G = X / gv[:, None] - xv[:, None] * _gradient(model, V) / gv[:, None] ** 2
        G -= np.sum(G * V, axis=1)[:, None] * V
        Vn = V + eta[:, None] * G
        Vn /= np.linalg.norm(Vn, axis=1, keepdims=True)
        vn = phi(Vn)
        ok = vn >= val
        V = np.where(ok[:, None], Vn, V)
        val = np.where(ok, vn, val)
        eta = np.where(ok, eta * 1.5, eta * 0.3)
        if np.all(eta < 1e-14):
            break
    return val


# ------------------------------------------------------ isotropic position


def isotropic_position(model: StableModel) -> StableModel:
    """Linear image of the spectral measure with sum_j w_j s_j s_j^T = I.

    Directions become M**(-1/2) s_j (renormalised) and weights absorb the
    squared length, so the second-moment matrix of the measure is I.
    """
    sp = model.spectral
    if isinstance(sp, SphericalDensity):
        sp = sp.as_atoms()
    if not isinstance(sp, DiscreteAtoms):
        raise ValueError("isotropic position is implemented for atom models")
    S, w = sp.directions, sp.weights
    M = (S * w[:, None]).T @ S
    vals, vecs = np.linalg.eigh(M)
    if vals.min() <= 0:
        raise ValueError("spectral measure is not full-dimensional")
    R = vecs @ np.diag(vals**-0.5) @ vecs.T
    T = S @ R.T
    n = np.linalg.norm(T, axis=1)
    return StableModel(model.alpha, DiscreteAtoms(T / n[:, None], w * n**2), model.dim, model.kind)


def isotropic_volume_bounds(d: int, alpha: float):
    """(lower, upper) for |F| when the spectral measure is isotropic, alpha >= 1.

    upper = omega_d(alpha) = (2 Gamma(1 + 1/alpha))**d / Gamma(1 + d/alpha),
    the volume of the unit l_alpha ball; lower = omega_d(2) / c_alpha with
    c_alpha**(alpha/d) = Gamma(1 + d/2) Gamma((1+alpha)/2) / (Gamma(3/2) Gamma((d+alpha)/2)).
    """
    if alpha < 1.0:
        raise ValueError("volume bounds need alpha >= 1")

    def om(a):
        return math.exp(d * math.log(2.0 * math.gamma(1.0 + 1.0 / a)) - math.lgamma(1.0 + d / a))

    lc = math.lgamma(1.0 + d / 2.0) + math.lgamma((1.0 + alpha) / 2.0) - math.lgamma(1.5) - math.lgamma((d + alpha) / 2.0)
    c_alpha = math.exp(lc * d / alpha)
    return om(2.0) / c_alpha, om(alpha)
