"""Covariation, regression, orthogonality and independence diagnostics."""
from __future__ import annotations

import math
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from . import geometry as geo
from . import moments as mo
from . import quadrature as qd
from .spectral import SYMMETRIC, DiscreteAtoms, StableModel, alpha_power

DEFAULT_TOL = 1e-7


def _alpha_above_one(model: StableModel, what: str) -> None:
    if model.kind != SYMMETRIC:
        raise ValueError(f"{what} needs a symmetric model")
    if model.alpha <= 1.0:
        raise ValueError(f"{what} needs alpha > 1")


def covariation(model: StableModel, u1, u2) -> float:
    """[<xi,u1>, <xi,u2>]_alpha = h(K,u2)**(alpha-1) <T(K,u2), u1>."""
    _alpha_above_one(model, "covariation")
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    if np.linalg.norm(u2) == 0:
        raise ValueError("second argument must be nonzero")
    h = geo.gauge(model, u2)
    T = geo.support_point(model, u2)
    return float(h ** (model.alpha - 1.0) * (T @ u1))


def covariation_matrix(model: StableModel) -> np.ndarray:
    """Matrix with entries [xi_i, xi_j]_alpha."""
    d = model.dim
    E = np.eye(d)
    return np.array([[covariation(model, E[i], E[j]) for j in range(d)] for i in range(d)])


def regression_coefficient(model: StableModel) -> float:
    """Slope of the (linear) regression E(xi_1 | xi_2) in the plane."""
    _alpha_above_one(model, "regression")
    if model.dim != 2:
        raise ValueError("regression_coefficient is for d = 2; use conditional_mean")
    T = geo.support_point(model, np.array([0.0, 1.0]))
    return float(T[0] / T[1])


class ConditionalMean(NamedTuple):
    mean: np.ndarray
    numerator: np.ndarray
    density: np.ndarray


def conditional_mean(model: StableModel, axis: int, Y, n_circle: int = 512) -> ConditionalMean:
    """E(xi_axis | remaining coordinates = y) for the rows of Y (d = 2, 3).

    The numerator E(xi_axis; eta in dy)/dy is the Fourier inverse of
    i d/du_axis of the characteristic function restricted to u_axis = 0; in
    polar coordinates its radial part is a sine profile with power
    alpha + k - 2, where k = d - 1.
    """
    _alpha_above_one(model, "conditional mean")
    d = model.dim
    if d not in (2, 3):
        raise ValueError("conditional means are available for d = 2 and 3")
    k = d - 1
    rest = [i for i in range(d) if i != axis]
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if Y.shape[1] != k:
        raise ValueError(f"points must have {k} coordinates")
    if k == 1:
        W = np.array([[1.0], [-1.0]])
        wts = np.ones(2)
    else:
        rule = qd.circle_rule(n_circle, offset=np.pi / n_circle)
        W, wts = rule.nodes, rule.weights
    U = np.zeros((W.shape[0], d))
    U[:, rest] = W
    g = geo.gauge(model, U)
    dh = geo._gradient(model, U)[:, axis]
    a = model.alpha
    S = (Y @ W.T) / g[None, :]
    sin_prof = mo.fourier_profile(a, a + k - 2.0, "sin")
    cos_prof = mo.fourier_profile(a, k - 1.0, "cos")
    c = (2.0 * np.pi) ** (-k)
    num = c * (sin_prof(S) * (wts * a * g ** (-float(k)) * dh)[None, :]).sum(axis=1)
    den = c * (cos_prof(S) * (wts * g ** (-float(k)))[None, :]).sum(axis=1)
    return ConditionalMean(num / den, num, den)


class LinearityResult(NamedTuple):
    is_linear: bool
    a: np.ndarray
    residual: float


def regression_linearity_check(model: StableModel, axis: int = 0, n_nodes: int = 256,
                               tol: float = DEFAULT_TOL) -> LinearityResult:
    """Is E(xi_axis | other coordinates) linear?

    Linearity holds when the gradients of h(K, .) at the directions u
    orthogonal to e_axis all lie in a hyperplane {<., a> = 0} whose normal
    has a nonzero axis coordinate.  The fit pins a_axis = 1 and solves the
    least-squares problem; the residual is max |<grad h, a>| / |grad h|.
    """
    _alpha_above_one(model, "linearity check")
    d = model.dim
    a = np.zeros(d)
    a[axis] = 1.0
    if d == 2:
        a[1 - axis] = -regression_coefficient(model if axis == 0 else _swap(model))
        return LinearityResult(True, a, 0.0)
    rest = [i for i in range(d) if i != axis]
    if d == 3:
        W = qd.circle_rule(n_nodes, offset=np.pi / n_nodes).nodes
    else:
        W = qd.fibonacci_directions(n_nodes * (d - 2))[:, : d - 1]
        W /= np.linalg.norm(W, axis=1, keepdims=True)
    U = np.zeros((W.shape[0], d))
    U[:, rest] = W
    G = geo.support_point(model, U)
    sol, *_ = np.linalg.lstsq(G[:, rest], -G[:, axis], rcond=None)
    a[rest] = sol
    res = np.abs(G @ a) / np.linalg.norm(G, axis=1)
    r = float(res.max())
    return LinearityResult(r < tol, a, r)


def _swap(model: StableModel) -> StableModel:
    return mo.linear_image_model(model, np.array([[0.0, 1.0], [1.0, 0.0]]))


class JamesResult(NamedTuple):
    orthogonal: bool
    margin: float
    covariation: Optional[float]


def james_orthogonal_bivariate(model: StableModel, n_nodes: int = 4096,
                               tol: float = DEFAULT_TOL) -> JamesResult:
    """Is xi_2 James orthogonal to xi_1?

    Strip test: F lies in R x [-a, a] with a = rho_F(e_2).  The maximum of
    rho_F(u)|u_2| is taken over circle nodes and polished by golden-section
    search around the best node.  For alpha > 1 the covariation
    [xi_1, xi_2]_alpha is reported as a cross-check.
    """
    if model.kind != SYMMETRIC or model.dim != 2:
        raise ValueError("bivariate James orthogonality needs a symmetric model in the plane")
    if model.alpha < 1.0:
        raise ValueError("James orthogonality test needs alpha >= 1 (convex gauge)")
    th = (np.arange(n_nodes) + 0.5) * np.pi / n_nodes

    def height(t):
        t = np.atleast_1d(t)
        U = np.column_stack([np.cos(t), np.sin(t)])
        return geo.radial(model, U) * np.abs(U[:, 1])

    vals = height(th)
    i = int(np.argmax(vals))
    lo, hi = th[i] - np.pi / n_nodes, th[i] + np.pi / n_nodes
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(80):
        c1 = hi - invphi * (hi - lo)
        c2 = lo + invphi * (hi - lo)
        if height(c1)[0] > height(c2)[0]:
            hi = c2
        else:
            lo = c1
    best = max(vals[i], float(height(0.5 * (lo + hi))[0]))
    a = float(geo.radial(model, np.array([0.0, 1.0])))
    margin = best / a - 1.0
    cov = covariation(model, [1.0, 0.0], [0.0, 1.0]) if model.alpha > 1.0 else None
    return JamesResult(bool(margin <= tol), margin, cov)


class StrongJamesResult(NamedTuple):
    strong: bool
    weak: bool
    margin: float


def _block_directions(k: int, n: int) -> np.ndarray:
    if k == 1:
        return np.array([[1.0]])
    if k == 2:
        return qd.circle_rule(2 * n, offset=np.pi / (2 * n)).nodes[:n]
    return qd.fibonacci_directions(n)


def strong_james_check(model: StableModel, d1: int, d2: int, n_dir: int = 64,
                       tol: float = DEFAULT_TOL) -> StrongJamesResult:
    """Strong James orthogonality of the second block to the first.

    Checks ||u + v||_F >= ||v||_F for u in the first coordinate block and v
    in the second, minimising exactly over the scale of u along each pair
    of directions.  The weak variant uses only u = c(1,...,1,0,...,0) and
    v = (0,...,0,1,...,1).
    """
    if model.kind != SYMMETRIC:
        raise ValueError("James orthogonality needs a symmetric model")
    if d1 + d2 != model.dim or d1 < 1 or d2 < 1:
        raise ValueError("block sizes must be positive and sum to the dimension")
    A = _block_directions(d1, n_dir)
    B = _block_directions(d2, n_dir)
    X = np.zeros((A.shape[0] * B.shape[0], model.dim))
    Y = np.zeros_like(X)
    X[:, d1:] = np.repeat(B, A.shape[0], axis=0)
    Y[:, :d1] = np.tile(A, (B.shape[0], 1))
    gfun = lambda V: geo.gauge(model, V)  # noqa: E731
    fmin, _, gx = geo._line_minimum(gfun, X, Y)
    rel = fmin / gx - 1.0
    margin = float(rel.min())
    xw = np.concatenate([np.zeros(d1), np.ones(d2)])[None, :]
    yw = np.concatenate([np.ones(d1), np.zeros(d2)])[None, :]
    fw, _, gw = geo._line_minimum(gfun, xw, yw)
    weak = bool(fw[0] >= gw[0] * (1.0 - tol))
    return StrongJamesResult(bool(margin >= -tol), weak, margin)


def independence_check(model: StableModel, block: Sequence[int], n_dir: int = 64,
                       tol: float = DEFAULT_TOL) -> bool:
    """Are the coordinate blocks H1 = block and H2 = rest independent?

    Independence holds iff g((u1, u2))**alpha = g((u1, 0))**alpha + g((0, u2))**alpha.
    """
    if model.kind != SYMMETRIC:
        raise ValueError("independence check needs a symmetric model")
    d = model.dim
    b1 = sorted(set(int(i) for i in block))
    b2 = [i for i in range(d) if i not in b1]
    if not b1 or not b2:
        raise ValueError("both blocks must be nonempty")
    A = _block_directions(len(b1), n_dir)
    B = _block_directions(len(b2), n_dir)
    scales = np.array([0.25, 1.0, 4.0])
    U1 = np.zeros((A.shape[0], d))
    U1[:, b1] = A
    U2 = np.zeros((B.shape[0], d))
    U2[:, b2] = B
    P1 = np.repeat(U1, B.shape[0] * scales.size, axis=0)
    P2 = np.tile(np.repeat(U2, scales.size, axis=0), (A.shape[0], 1))
    P2 *= np.tile(scales, A.shape[0] * B.shape[0])[:, None]
    joint = alpha_power(model, P1 + P2)
    parts = alpha_power(model, P1) + alpha_power(model, P2)
    return bool(np.all(np.abs(joint - parts) <= tol * np.maximum(parts, 1e-300)))


class PortfolioResult(NamedTuple):
    u: np.ndarray
    gauge: float
    moment: float
    stationary: bool


def portfolio_direction(model: StableModel, mu, r: float, lam: float, sense: str = "min",
                        n_starts: int = 16, tol: float = 1e-8) -> PortfolioResult:
    """Optimise E|<xi,u>|**lam over {<u,mu> = r, sum(u) = 1}.

    The moment is an increasing function of the gauge, so the gauge is
    optimised.  The affine set is parametrised by its null space and a
    deterministic Halton multistart of local searches is run; ties go to
    the lowest start index.  Maximisation is only defined when the
    feasible set is a single point, since a convex gauge is unbounded on a
    line.
    """
    if model.kind != SYMMETRIC:
        raise ValueError("portfolio selection needs a symmetric model")
    d = model.dim
    if d > 4:
        raise ValueError("portfolio search supports d <= 4")
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    mo._check_open(lam, 0.0, model.alpha, "lambda")
    mu = np.asarray(mu, dtype=float)
    A = np.vstack([mu, np.ones(d)])
    b = np.array([r, 1.0])
    u0, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.linalg.norm(A @ u0 - b) > 1e-10 * (1.0 + np.abs(b).max()):
        raise ValueError("constraints are infeasible")
    _, s, Vt = np.linalg.svd(A)
    rank = int(np.sum(s > 1e-12 * s.max()))
    N = Vt[rank:].T
    if N.shape[1] == 0:
        g = float(geo.gauge(model, u0))
        return PortfolioResult(u0, g, mo.scalar_moment(model, u0, lam).value, True)
    if sense == "max":
        raise ValueError("the gauge is unbounded on a feasible line; maximisation is undefined")
    k = N.shape[1]

    def obj(z):
        return float(geo.gauge(model, u0 + N @ z))

    starts = 4.0 * (qmc.Halton(d=k, scramble=False).random(n_starts + 1)[1:] - 0.5)
    best = None
    for i, z0 in enumerate(starts):
        res = minimize(obj, z0, method="Powell", options={"xtol": 1e-12, "ftol": 1e-14, "maxfev": 20000})
        res = minimize(obj, res.x, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxfev": 20000})
        if best is None or res.fun < best[1] - tol:
            best = (res.x, res.fun, i)
    z = best[0]
    u = u0 + N @ z
    g = obj(z)
    eps = 1e-5 * (1.0 + np.linalg.norm(z))
    stationary = all(
        obj(z + s * eps * e) >= g - tol * max(1.0, g) for e in np.eye(k) for s in (-1.0, 1.0)
    )
    return PortfolioResult(u, g, mo.scalar_moment(model, u, lam).value, stationary)
