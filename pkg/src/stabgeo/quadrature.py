"""Spherical and radial integration rules.

Every analytic routine in the package funnels its integrals through the
rules defined here.  Rules are immutable; integrals come back as
``QuadResult(value, error)`` where ``error`` is either a level-halving
difference (deterministic rules) or a Monte Carlo standard error
(randomized rules on high-dimensional spheres).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy.special import roots_legendre

ArrayOrCallable = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]

DEFAULT_CIRCLE_NODES = 512
DEFAULT_SPHERE3_LEVEL = 64
DEFAULT_RANDOM_NODES = 200_000


class QuadResult(NamedTuple):
    """Integral value together with an error estimate."""

    value: float
    error: float


def kappa(d: int) -> float:
    """Volume of the unit ball in R^d."""
    return math.pi ** (d / 2.0) / math.gamma(1.0 + d / 2.0)


def omega(d: int) -> float:
    """Surface area of the unit sphere S^{d-1}."""
    return d * kappa(d)


@dataclass(frozen=True, eq=False)
class SphereRule:
    """Nodes and weights on the unit sphere of R^d.

    ``coarse`` is an optional lower-level companion rule; integrating with
    both gives the level-halving error estimate.  Randomized rules carry
    their seed and no coarse companion (their error is a standard error).
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    exactness: str
    seed: Optional[int] = None
    coarse: Optional["SphereRule"] = None

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        weights = np.ascontiguousarray(self.weights, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != self.dim:
            raise ValueError("nodes must have shape (n, dim)")
        if weights.shape != (nodes.shape[0],):
            raise ValueError("one weight per node is required")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @property
    def randomized(self) -> bool:
        return self.exactness == "randomized"


def _check_finite(values: np.ndarray) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        idx = int(np.flatnonzero(bad.reshape(bad.shape[0], -1).any(axis=1))[0])
        raise ValueError(f"integrand is not finite at node {idx}")


def circle_rule(n: int = DEFAULT_CIRCLE_NODES, offset: float = 0.0) -> SphereRule:
    """Trapezoidal rule with ``n`` equally spaced angles on the unit circle.

    ``n`` must be even (so that every node has its antipode) and at least 8.
    The first angle sits at ``offset``.
    """
    n = int(n)
    if n < 8:
        raise ValueError("circle rule needs at least 8 nodes")
    if n % 2:
        raise ValueError("circle rule needs an even number of nodes")
    theta = offset + 2.0 * np.pi * np.arange(n) / n
    nodes = np.column_stack([np.cos(theta), np.sin(theta)])
    weights = np.full(n, 2.0 * np.pi / n)
    coarse = None
    if n // 2 >= 8 and (n // 2) % 2 == 0:
        coarse = circle_rule(n // 2, offset)
    return SphereRule(2, nodes, weights, f"trig:{n - 1}", coarse=coarse)


def _gl_sphere3(level: int, coarse: bool = True, offset: float = 0.0) -> SphereRule:
    t, wt = roots_legendre(level)
    m = 2 * level
    phi = offset + 2.0 * np.pi * np.arange(m) / m
    sin_t = np.sqrt(1.0 - t**2)
    nodes = np.empty((level * m, 3))
    nodes[:, 0] = np.outer(sin_t, np.cos(phi)).ravel()
    nodes[:, 1] = np.outer(sin_t, np.sin(phi)).ravel()
    nodes[:, 2] = np.repeat(t, m)
    weights = np.outer(wt, np.full(m, 2.0 * np.pi / m)).ravel()
    comp = None
    if coarse and level >= 8 and level % 2 == 0:
        comp = _gl_sphere3(level // 2, coarse=True, offset=offset)
    return SphereRule(3, nodes, weights, f"poly:{2 * level - 1}", coarse=comp)


def _random_sphere(d: int, n: int, seed: int) -> SphereRule:
    if n % 2:
        raise ValueError("randomized rule needs an even node count")
    rng = np.random.Generator(np.random.PCG64(seed))
    half = rng.standard_normal((n // 2, d))
    half /= np.linalg.norm(half, axis=1, keepdims=True)
    nodes = np.concatenate([half, -half])
    weights = np.full(n, omega(d) / n)
    return SphereRule(d, nodes, weights, "randomized", seed=seed)


def sphere_rule(d: int, level: Optional[int] = None, seed: Optional[int] = None) -> SphereRule:
    """Default rule on S^{d-1}.

    d=2: ``level`` equally spaced angles (default 512).
    d=3: ``level`` Gauss-Legendre nodes in the polar cosine times
    ``2*level`` azimuths (default 64 x 128).
    d>=4: ``level`` antithetic random directions (default 2e5); a seed is
    mandatory.
    """
    d = int(d)
    if d < 2:
        raise ValueError("sphere rules need d >= 2")
    if d == 2:
        return circle_rule(DEFAULT_CIRCLE_NODES if level is None else level)
    if d == 3:
        return _gl_sphere3(DEFAULT_SPHERE3_LEVEL if level is None else int(level))
    if seed is None:
        raise ValueError("a seed is required for randomized rules (d >= 4)")
    return _random_sphere(d, DEFAULT_RANDOM_NODES if level is None else int(level), int(seed))


def axis_free_rule(d: int, level: Optional[int] = None) -> SphereRule:
    """Deterministic rule (d = 2, 3) with no node on a coordinate hyperplane.

    Used for integrands carrying a removable 1/(u_1 ... u_d) factor.
    """
    if d == 2:
        n = DEFAULT_CIRCLE_NODES if level is None else int(level)
        if n % 4:
            raise ValueError("axis-free circle rule needs n divisible by 4")
        return circle_rule(n, offset=np.pi / n)
    if d == 3:
        level = DEFAULT_SPHERE3_LEVEL if level is None else int(level)
        if level % 2:
            raise ValueError("axis-free sphere rule needs an even level")
        return _gl_sphere3(level, offset=np.pi / (2 * level))
    raise ValueError("axis-free rules exist for d = 2 and 3")


def arc_rule(breakpoints: Sequence[float], n_per_arc: int = 32) -> SphereRule:
    """Composite Gauss-Legendre rule on the circle split at given angles.

    Used for integrands with known kinks (piecewise analytic gauges).  The
    breakpoints are reduced mod 2*pi; each arc gets ``n_per_arc`` nodes.
    """
    b = np.sort(np.mod(np.asarray(breakpoints, dtype=float), 2.0 * np.pi))
    b = np.unique(np.round(b, 15))
    if b.size == 0:
        b = np.array([0.0])
    ends = np.append(b, b[0] + 2.0 * np.pi)
    t, wt = roots_legendre(int(n_per_arc))
    lo, hi = ends[:-1], ends[1:]
    keep = hi - lo > 1e-14
    lo, hi = lo[keep], hi[keep]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    theta = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    w = (half[:, None] * wt[None, :]).ravel()
    nodes = np.column_stack([np.cos(theta), np.sin(theta)])
    coarse = None
    if n_per_arc >= 8:
        coarse = arc_rule(b, n_per_arc // 2)
    return SphereRule(2, nodes, w, f"arcs:{lo.size}x{n_per_arc}", coarse=coarse)


def graded_arc_rule(breakpoints: Sequence[float], step: float = 1.0 / 16.0, tmax: float = 4.5, coarse: bool = True) -> SphereRule:
    """Tanh-sinh rule on the circle split at given angles.

    Nodes crowd double exponentially towards every breakpoint, which suits
    integrands with logarithmic spikes or structure on scales far below
    the arc length next to a break.  The coarse companion doubles the step.
    """
    b = np.unique(np.round(np.sort(np.mod(np.asarray(breakpoints, dtype=float), 2.0 * np.pi)), 15))
    if b.size == 0:
        b = np.array([0.0])
    ends = np.append(b, b[0] + 2.0 * np.pi)
    theta, w = [], []
    for lo, hi in zip(ends[:-1], ends[1:]):
        if hi - lo > 1e-14:
            ts = tanh_sinh(lo, hi, step, tmax)
            theta.append(ts.nodes)
            w.append(ts.weights)
    theta, w = np.concatenate(theta), np.concatenate(w)
    nodes = np.column_stack([np.cos(theta), np.sin(theta)])
    comp = graded_arc_rule(b, 2.0 * step, tmax, coarse=False) if coarse else None
    return SphereRule(2, nodes, w, f"graded-arcs:{b.size}", coarse=comp)


def _evaluate(rule: SphereRule, f: ArrayOrCallable) -> np.ndarray:
    vals = f(rule.nodes) if callable(f) else np.asarray(f, dtype=float)
    vals = np.asarray(vals, dtype=float)
    if vals.shape[0] != rule.size:
        raise ValueError("integrand must provide one value per node")
    _check_finite(vals)
    return vals


def _weighted_sum(weights: np.ndarray, vals: np.ndarray):
    if vals.ndim == 1:
        return float(np.sum(weights * vals))
    return np.tensordot(weights, vals, axes=(0, 0))


def integrate_sphere(rule: SphereRule, f: ArrayOrCallable) -> QuadResult:
    """Integrate ``f`` over the sphere with ``rule``.

    ``f`` is either a callable taking the (n, d) node array or an array of
    precomputed node values (the first axis indexes nodes; trailing axes
    are integrated componentwise).
    """
    vals = _evaluate(rule, f)
    value = _weighted_sum(rule.weights, vals)
    if rule.randomized:
        n2 = rule.size // 2
        pair = 0.5 * (vals[:n2] + vals[n2:])
        total = omega(rule.dim)
        err = total * np.std(pair, axis=0, ddof=1) / math.sqrt(n2)
    elif rule.coarse is not None and callable(f):
        coarse_val = _weighted_sum(rule.coarse.weights, _evaluate(rule.coarse, f))
        err = np.abs(value - coarse_val)
    else:
        err = np.zeros_like(np.asarray(value, dtype=float))
    if np.ndim(value) == 0:
        return QuadResult(float(value), float(err))
    return QuadResult(np.asarray(value), np.asarray(err))


@dataclass(frozen=True, eq=False)
class RadialRule:
    """Exp-sinh rule on (0, inf) with a declared tail class.

    ``tail`` is ``"exp"`` for integrands decaying like exp(-r**a) and
    ``"algebraic"`` for r**(-s) decay; both are handled by the same
    double-exponential change of variables, the label documents intent.
    """

    nodes: np.ndarray
    weights: np.ndarray
    tail: str
    step: float


def radial_rule(step: float = 1.0 / 32.0, tmax: float = 4.5, tail: str = "exp") -> RadialRule:
    if tail not in ("exp", "algebraic"):
        raise ValueError("tail must be 'exp' or 'algebraic'")
    k = np.arange(-int(round(tmax / step)), int(round(tmax / step)) + 1)
    t = k * step
    r = np.exp(0.5 * np.pi * np.sinh(t))
    w = step * 0.5 * np.pi * np.cosh(t) * r
    keep = (r > 1e-300) & np.isfinite(r)
    return RadialRule(r[keep], w[keep], tail, step)


def integrate_radial(rule: RadialRule, f: Callable[[np.ndarray], np.ndarray]) -> QuadResult:
    """Integrate ``f`` over (0, inf); error from the half-density subrule."""
    vals = np.asarray(f(rule.nodes), dtype=float)
    with np.errstate(invalid="ignore"):
        vals = np.where(rule.weights * np.abs(vals) < 1e-300, 0.0, vals)
    _check_finite(vals)
    value = float(np.sum(rule.weights * vals))
    # nodes with even index on the t-grid form the rule with doubled step
    k0 = int(np.argmin(np.abs(rule.nodes - 1.0)))
    sub = (np.arange(rule.nodes.size) - k0) % 2 == 0
    coarse = float(2.0 * np.sum(rule.weights[sub] * vals[sub]))
    return QuadResult(value, abs(value - coarse))


def gauss_legendre(a: float, b: float, n: int):
    """Gauss-Legendre nodes and weights on [a, b]."""
    t, w = roots_legendre(int(n))
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * t, half * w


def composite_gauss_legendre(breaks: Sequence[float], n: int):
    """Composite Gauss-Legendre rule over consecutive breakpoints."""
    b = np.asarray(breaks, dtype=float)
    t, w = roots_legendre(int(n))
    lo, hi = b[:-1], b[1:]
    half = 0.5 * (hi - lo)
    x = (0.5 * (hi + lo))[:, None] + half[:, None] * t[None, :]
    return x.ravel(), (half[:, None] * w[None, :]).ravel()


class TanhSinh(NamedTuple):
    """Nodes, weights and exact distances to both interval ends."""

    nodes: np.ndarray
    weights: np.ndarray
    dist_lo: np.ndarray
    dist_hi: np.ndarray


def tanh_sinh(a: float, b: float, step: float = 1.0 / 32.0, tmax: float = 6.1) -> TanhSinh:
    """Double exponential rule on [a, b] for endpoint-singular integrands.

    Distances to the ends are returned separately because nodes come within
    about 1e-300 of the endpoints, far below the resolution of the node
    coordinates themselves.
    """
    k = np.arange(-int(round(tmax / step)), int(round(tmax / step)) + 1)
    t = k * step
    y = 0.5 * np.pi * np.sinh(t)
    half = 0.5 * (b - a)
    with np.errstate(over="ignore"):
        lo = 2.0 * half / (np.exp(-2.0 * y) + 1.0)
        hi = 2.0 * half / (np.exp(2.0 * y) + 1.0)
        e = np.exp(-2.0 * np.abs(y))
        w = step * half * 0.5 * np.pi * np.cosh(t) * 4.0 * e / (1.0 + e) ** 2
    keep = (lo > 0) & (hi > 0) & (w > 0)
    x = np.where(lo[keep] < hi[keep], a + lo[keep], b - hi[keep])
    return TanhSinh(x, w[keep], lo[keep], hi[keep])


def kink_sphere_rule(directions, step: float = 0.3, az_tmax: float = 3.0, coarse: bool = True) -> SphereRule:
    """Rule on S^2 for integrands with kinks on the great circles <w, s_j> = 0.

    The polar axis is the first direction.  In the polar cosine t the
    rule is tanh-sinh on panels split where a kink circle touches a
    parallel (|t| = sin of its tilt) and where two kink circles cross;
    on each parallel the azimuth is split at the kink crossings.  The arcs
    also use tanh-sinh (truncated at ``az_tmax``) because for non-integer
    alpha the integrand behaves like |beta - beta_0|**alpha at each kink,
    which costs Gauss rules their fast convergence.
    """
    S = np.atleast_2d(np.asarray(directions, dtype=float))
    S = S / np.linalg.norm(S, axis=1, keepdims=True)
    e = S[0]
    a = np.eye(3)[int(np.argmin(np.abs(e)))]
    b1 = a - (a @ e) * e
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(e, b1)
    c = S @ e
    q = np.hypot(S @ b1, S @ b2)
    phase = np.arctan2(S @ b2, S @ b1)
    tilted = q > 1e-12
    br = np.concatenate([[-1.0, 1.0], q[tilted & (q < 1.0 - 1e-12)], -q[tilted & (q < 1.0 - 1e-12)]])
    if np.any(~tilted):
        br = np.append(br, 0.0)
    # crossings of two kink circles put two azimuthal kinks together
    i, j = np.triu_indices(S.shape[0], 1)
    X = np.cross(S[i], S[j])
    nx = np.linalg.norm(X, axis=1)
    tx = (X[nx > 1e-12] @ e) / nx[nx > 1e-12]
    br = np.concatenate([br, tx, -tx])
    br = np.unique(np.round(np.clip(br, -1.0, 1.0), 14))
    az = tanh_sinh(-1.0, 1.0, step, az_tmax)
    extremes = np.concatenate([phase[tilted], phase[tilted] + np.pi])
    gt, gw = az.nodes, az.weights
    nodes, weights = [], []
    for lo, hi in zip(br[:-1], br[1:]):
        ts = tanh_sinh(lo, hi, step)
        for t, wt in zip(ts.nodes, ts.weights):
            st = math.sqrt(max(1.0 - t * t, 0.0))
            if st == 0.0:
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                rhs = -t * c[tilted] / (st * q[tilted])
            ok = np.abs(rhs) < 1.0
            ang = np.arccos(rhs[ok])
            # the extremes of <w, s_j> along the parallel are split too: just past a
            # tangency they are sharp near-zero minima inside an otherwise smooth arc
            kinks = np.concatenate([phase[tilted][ok] + ang, phase[tilted][ok] - ang, extremes])
            kb = np.unique(np.round(np.mod(kinks, 2.0 * np.pi), 14))
            if kb.size == 0:
                kb = np.array([0.0])
            ends = np.append(kb, kb[0] + 2.0 * np.pi)
            l, h = ends[:-1], ends[1:]
            keep = h - l > 1e-14
            l, h = l[keep], h[keep]
            beta = (0.5 * (l + h))[:, None] + (0.5 * (h - l))[:, None] * gt[None, :]
            bw = ((0.5 * (h - l))[:, None] * gw[None, :]).ravel()
            beta = beta.ravel()
            nodes.append(t * e[None, :] + st * (np.cos(beta)[:, None] * b1 + np.sin(beta)[:, None] * b2))
            weights.append(wt * bw)
    comp = kink_sphere_rule(S, 2.0 * step, az_tmax, coarse=False) if coarse else None
    return SphereRule(3, np.vstack(nodes), np.concatenate(weights), f"kinks:{S.shape[0]}", coarse=comp)


def fibonacci_directions(n: int) -> np.ndarray:
    """Deterministic, nearly uniform antithetic directions on S^2 (n even)."""
    if n % 2:
        raise ValueError("n must be even")
    m = n // 2
    k = np.arange(m) + 0.5
    z = k / m  # upper hemisphere, z in (0, 1)
    golden = math.pi * (3.0 - math.sqrt(5.0))
    phi = golden * np.arange(m)
    r = np.sqrt(1.0 - z**2)
    half = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return np.concatenate([half, -half])


def orthant_nodes(d: int, n: int = 64) -> np.ndarray:
    """Directions covering the closed positive orthant of S^{d-1}."""
    if d == 1:
        return np.ones((1, 1))
    if d == 2:
        th = np.linspace(0.0, 0.5 * np.pi, n + 1)
        return np.column_stack([np.cos(th), np.sin(th)])
    if d == 3:
        pts = []
        for i in range(n + 1):
            for j in range(n + 1 - i):
                k = n - i - j
                pts.append((i, j, k))
        pts = np.asarray(pts, dtype=float)
        return pts / np.linalg.norm(pts, axis=1, keepdims=True)
    rng = np.random.Generator(np.random.PCG64(12345))
    pts = np.abs(rng.standard_normal((n * n, d)))
    pts = np.concatenate([pts, np.eye(d)])
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def legendre_coefficients(values: np.ndarray, n: int) -> np.ndarray:
    """Map values at n Gauss-Legendre points (last axis) to Legendre coefficients."""
    t, w = roots_legendre(n)
    P = np.polynomial.legendre.legvander(t, n - 1)  # (n, n): P_l(t_k)
    scale = (2.0 * np.arange(n) + 1.0) / 2.0
    return (values * w) @ P * scale
