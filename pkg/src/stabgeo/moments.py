"""Densities, density functionals and moments of symmetric stable vectors.

Every routine here is a closed form evaluated by deterministic quadrature;
the Monte Carlo counterparts live in :mod:`stabgeo.simulate`.  Results are
reported as ``MomentReport(value, error, formula)``.
"""
from __future__ import annotations

import functools
import math
from typing import NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import gamma, gammaln, j0, rgamma, sici, spherical_jn

from . import geometry as geo
from . import quadrature as qd
from .quadrature import SphereRule
from .spectral import (
    SYMMETRIC,
    DiscreteAtoms,
    ExplicitGauge,
    Isotropic,
    SphericalDensity,
    StableModel,
    alpha_power,
    atoms_model,
    elliptical_gauge,
    isotropic_constant,
)

BOUNDARY_GAP = 1e-9


class MomentReport(NamedTuple):
    """A closed-form value, its numerical error estimate and a formula label."""

    value: float
    error: float
    formula: str


def _symmetric(model: StableModel) -> None:
    if model.kind != SYMMETRIC:
        raise ValueError("this operation needs a symmetric model (use the onesided module)")


def _full(model: StableModel) -> None:
    _symmetric(model)
    if geo.is_degenerate(model):
        raise ValueError("model is not full-dimensional")


def _check_open(lam: float, lo: float, hi: float, what: str) -> None:
    if not (lo + BOUNDARY_GAP < lam < hi - BOUNDARY_GAP):
        raise ValueError(f"{what} = {lam} outside ({lo}, {hi}): the moment does not exist")


# ------------------------------------------------------------ radial profiles


def radial_panels(alpha: float, power: float, eps: float = 1e-18) -> np.ndarray:
    """Breakpoints on [0, R] for integrands r**power * exp(-r**alpha).

    Geometric near the origin, then widths min(b/2, 0.75 b**(1-alpha)/alpha)
    so that each panel sees a bounded change of the exponential.
    """
    R = 1.0
    while math.exp(-(R**alpha)) * R ** max(power, 0.0) > eps:
        R *= 1.25
    pts = [0.0]
    b = 1e-6
    while b < min(1.0, R):
        pts.append(b)
        b *= 2.0
    b = min(1.0, R)
    while b < R:
        pts.append(b)
        b = b + min(0.5 * b, 0.75 * b ** (1.0 - alpha) / alpha)
    pts.append(R)
    return np.unique(np.asarray(pts))


class FourierProfile:
    """G(s) = int_0^inf trig(r s) exp(-r**alpha) r**power dr.

    ``parity`` is ``"cos"`` or ``"sin"``.  Each panel is integrated with a
    Legendre-Filon rule: the smooth factor is expanded in Legendre
    polynomials and the oscillatory moments are spherical Bessel functions,
    so large |s| costs nothing extra.  Large batches of s go through a
    cubic spline table in log(1 + |s|).
    """

    DIRECT_LIMIT = 4096
    TABLE_SIZE = 6000

    def __init__(self, alpha: float, power: float, parity: str = "cos", n_gl: int = 20):
        if parity not in ("cos", "sin"):
            raise ValueError("parity must be 'cos' or 'sin'")
        self.alpha, self.power, self.parity = float(alpha), float(power), parity
        brk = radial_panels(alpha, power)
        lo, hi = brk[:-1], brk[1:]
        self.mid = 0.5 * (lo + hi)
        self.half = 0.5 * (hi - lo)
        t, _ = qd.gauss_legendre(-1.0, 1.0, n_gl)
        r = self.mid[:, None] + self.half[:, None] * t[None, :]
        vals = np.exp(-(r**alpha)) * r**power
        self.coef = qd.legendre_coefficients(vals, n_gl)  # (panels, L)
        self.ell = np.arange(n_gl)
        self._table = None
        self._table_max = 0.0

    def _direct(self, s: np.ndarray) -> np.ndarray:
        out = np.empty(s.size)
        shift = 0.5 * np.pi * self.ell
        chunk = max(1, int(2e6 // (self.mid.size * self.ell.size)))
        for i in range(0, s.size, chunk):
            sc = s[i:i + chunk, None, None]
            jl = spherical_jn(self.ell[None, None, :], sc * self.half[None, :, None])
            ph = sc * self.mid[None, :, None] + shift[None, None, :]
            trig = np.cos(ph) if self.parity == "cos" else np.sin(ph)
            out[i:i + chunk] = np.einsum("spl,pl->s", jl * trig, 2.0 * self.coef * self.half[:, None])
        return out

    SERIES_START = 8.0
    SERIES_TERMS = 80
    SERIES_RTOL = 1e-14

    def _series(self, s: np.ndarray):
        """Large-s expansion from the behaviour of the integrand at r = 0.

        Term k is (-1)**k / k! Gamma(nu + 1) trig(pi (nu + 1) / 2) s**(-nu - 1)
        with nu = power + alpha k.  Summed up to its smallest term, which is
        returned as the truncation error.
        """
        k = np.arange(self.SERIES_TERMS)
        nu1 = self.power + self.alpha * k + 1.0
        trig = np.cos(0.5 * np.pi * nu1) if self.parity == "cos" else np.sin(0.5 * np.pi * nu1)
        trig[np.abs(trig) < 1e-15] = 0.0
        logc = gammaln(nu1) - gammaln(k + 1.0)
        sign = np.where(k % 2 == 0, 1.0, -1.0) * np.sign(trig)
        logt = logc[None, :] + np.log(np.abs(trig) + 1e-300)[None, :] - nu1[None, :] * np.log(s)[:, None]
        mag = np.exp(np.minimum(logt, 700.0))
        mag[:, trig == 0.0] = 0.0
        # optimal truncation: stop before the smallest nonzero term
        live = np.where(mag > 0, mag, np.inf)
        stop = np.argmin(live[:, 1:], axis=1) + 1
        keep = k[None, :] < stop[:, None]
        val = np.sum(np.where(keep, sign[None, :] * mag, 0.0), axis=1)
        err = live[np.arange(s.size), stop]
        err = np.where(np.isfinite(err), err, 0.0)
        return val, err

    def _evaluate(self, a: np.ndarray) -> np.ndarray:
        out = np.empty(a.size)
        use = np.zeros(a.size, dtype=bool)
        big = a >= self.SERIES_START
        if np.any(big):
            val, err = self._series(a[big])
            ok = err <= self.SERIES_RTOL * np.abs(val)
            idx = np.flatnonzero(big)[ok]
            out[idx] = val[ok]
            use[idx] = True
        rest = ~use
        if np.any(rest):
            ar = a[rest]
            if ar.size <= self.DIRECT_LIMIT:
                out[rest] = self._direct(ar)
            else:
                if self._table is None or ar.max() > self._table_max:
                    self._build_table(max(ar.max(), 1.0))
                out[rest] = self._table(np.log1p(ar))
        return out

    def _build_table(self, smax: float) -> None:
        tmax = math.log1p(smax) * 1.05 + 1e-3
        grid = np.linspace(0.0, tmax, self.TABLE_SIZE)
        self._table = CubicSpline(grid, self._direct(np.expm1(grid)))
        self._table_max = math.expm1(tmax)

    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        flat = s.ravel()
        a = np.abs(flat)
        sign = np.sign(flat) if self.parity == "sin" else 1.0
        return (sign * self._evaluate(a)).reshape(s.shape)


_PROFILES = {}


def fourier_profile(alpha: float, power: float, parity: str = "cos") -> FourierProfile:
    key = (float(alpha), float(power), parity)
    if key not in _PROFILES:
        _PROFILES[key] = FourierProfile(alpha, power, parity)
    return _PROFILES[key]


# ------------------------------------------------------------ densities


def charfun(model: StableModel, u):
    """exp(-||u||_F**alpha)."""
    _symmetric(model)
    U, single = geo._as_rows(u, model.dim)
    val = np.exp(-alpha_power(model, U))
    return float(val[0]) if single else val


def _density_rule(model: StableModel, rule: Optional[SphereRule]) -> SphereRule:
    if rule is not None:
        return rule
    if model.dim == 2 and not isinstance(model.spectral, DiscreteAtoms):
        return qd.circle_rule(256)
    return geo.default_rule(model)


def _density_on_rule(model, X, rule, parity="cos", with_abs=False):
    d = model.dim
    prof = fourier_profile(model.alpha, d - 1.0, parity)
    g = geo.gauge(model, rule.nodes)
    wg = rule.weights * g ** (-float(d))
    out = np.empty(X.shape[0])
    mag = np.empty(X.shape[0])
    step = max(1, 2_000_000 // rule.size)
    for i in range(0, X.shape[0], step):
        vals = prof((X[i:i + step] @ rule.nodes.T) / g[None, :]) * wg[None, :]
        out[i:i + step] = vals.sum(axis=1)
        mag[i:i + step] = np.abs(vals).sum(axis=1)
    c = (2.0 * np.pi) ** -d
    return (c * out, c * mag) if with_abs else c * out


FAR_RATIO = 4.0
BOX_KINK_LIMIT_3D = 10


def _graded_breaks(width: float, top: float) -> np.ndarray:
    """0 and +-width * 2**k up to top: panels refined toward a zero line."""
    k = np.arange(int(math.ceil(math.log2(max(top / width, 1.0)))) + 1)
    b = np.minimum(width * 2.0**k, top)
    return np.unique(np.concatenate([-b, [0.0], b]))


def _far_nodes(model: StableModel, x: np.ndarray, gmin: float, n: int):
    """Nodes w, weights and exact cosines <x/|x|, w> for one far point x.

    The integrand has a spike of angular width about g/|x| where <x, w>
    vanishes, which a fixed rule cannot see.  Nodes are placed by their
    offset from that zero set, so the cosine is formed without cancellation.
    """
    r = float(np.linalg.norm(x))
    e = x / r
    width = 0.25 * gmin / r
    if model.dim == 2:
        perp = np.array([-e[1], e[0]])
        base = _graded_breaks(width, 0.25 * np.pi)
        sp = model.spectral
        kinks = np.empty(0)
        if isinstance(sp, DiscreteAtoms) and sp.directions.shape[0] <= geo.KINK_ATOM_LIMIT:
            kinks = geo.kink_angles(sp.directions) - math.atan2(e[1], e[0])
        W, wts, cs = [], [], []
        for j in (1.0, -1.0):
            # tau is the offset from the zero line at angle j pi/2 from e
            tk = np.mod(kinks - j * 0.5 * np.pi + np.pi, 2.0 * np.pi) - np.pi
            tk = tk[np.abs(tk) < 0.5 * np.pi]
            br = np.unique(np.concatenate([base, tk, [-0.5 * np.pi, 0.5 * np.pi]]))
            tau, wt = qd.composite_gauss_legendre(br, n)
            c, sn = -j * np.sin(tau), j * np.cos(tau)
            W.append(c[:, None] * e[None, :] + sn[:, None] * perp[None, :])
            wts.append(wt)
            cs.append(c)
        return np.vstack(W), np.concatenate(wts), np.concatenate(cs)
    a = np.eye(3)[int(np.argmin(np.abs(e)))]
    b1 = a - (a @ e) * e
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(e, b1)
    br = np.unique(np.concatenate([_graded_breaks(width, 0.5), [-1.0, 1.0]]))
    t, wt = qd.composite_gauss_legendre(br, n)
    nb = 8 * n
    beta = 2.0 * np.pi * (np.arange(nb) + 0.5) / nb
    st = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    W = (t[:, None, None] * e[None, None, :]
         + st[:, None, None] * (np.cos(beta)[None, :, None] * b1 + np.sin(beta)[None, :, None] * b2))
    return W.reshape(-1, 3), np.repeat(wt * (2.0 * np.pi / nb), nb), np.repeat(t, nb)


def _far_density(model: StableModel, x: np.ndarray, gmin: float, n: int = 16):
    """(value, sum of absolute terms) for one far point."""
    d = model.dim
    prof = fourier_profile(model.alpha, d - 1.0, "cos")
    W, wts, cs = _far_nodes(model, x, gmin, n)
    g = geo.gauge(model, W)
    r = float(np.linalg.norm(x))
    terms = prof(r * cs / g) * wts * g ** (-float(d)) / (2.0 * np.pi) ** d
    return float(np.sum(terms)), float(np.sum(np.abs(terms)))


def density(model: StableModel, x, rule: Optional[SphereRule] = None):
    """Density f(x) by Fourier inversion in polar coordinates (d = 2, 3).

    f(x) = (2 pi)**(-d) * int_S g(u)**(-d) G(<u,x>/g(u)) du with the cosine
    profile G of power d-1.  Returns a MomentReport whose value (and error)
    is an array when x holds several points.
    """
    _full(model)
    if model.dim not in (2, 3):
        raise ValueError("densities are available for d = 2 and 3")
    X, single = geo._as_rows(x, model.dim)
    given = rule is not None
    rule = _density_rule(model, rule)
    val, mag = _density_on_rule(model, X, rule, with_abs=True)
    # rounding in the cancelling angular sum, plus the level-halving estimate
    err = 1e-15 * mag
    if rule.coarse is not None:
        err = np.maximum(err, np.abs(val - _density_on_rule(model, X, rule.coarse)))
    if not given:
        gmin = float(np.min(geo.gauge(model, rule.nodes)))
        for i in np.flatnonzero(np.linalg.norm(X, axis=1) > FAR_RATIO * gmin):
            val[i], mag_i = _far_density(model, X[i], gmin)
            err[i] = max(1e-15 * mag_i, abs(val[i] - _far_density(model, X[i], gmin, 8)[0]))
    if single:
        return MomentReport(float(val[0]), float(err[0]), "fourier-inversion")
    return MomentReport(val, err, "fourier-inversion")


def density_imaginary_part(model: StableModel, x, rule: Optional[SphereRule] = None) -> np.ndarray:
    """Imaginary part of the inversion integral; zero by central symmetry."""
    X, _ = geo._as_rows(x, model.dim)
    return _density_on_rule(model, X, _density_rule(model, rule), parity="sin")


def density_at_zero(model: StableModel, rule: Optional[SphereRule] = None) -> MomentReport:
    """f(0) = (2 pi)**(-d) Gamma(1 + d/alpha) |F|."""
    _symmetric(model)
    d = model.dim
    vol = geo.volume(model, rule)
    if math.isinf(vol.value):
        return MomentReport(math.inf, 0.0, "f0-volume")
    c = math.exp(gammaln(1.0 + d / model.alpha)) / (2.0 * np.pi) ** d
    return MomentReport(c * vol.value, c * vol.error, "f0-volume")


def second_moment_body(model: StableModel, rule: Optional[SphereRule] = None):
    """int_F v v^T dv = (d+2)**-1 int_S u u^T rho(u)**(d+2) du, with error."""
    _full(model)
    d = model.dim
    rule = geo.default_rule(model) if rule is None else rule

    def f(U):
        rho = geo.radial(model, U) ** (d + 2.0) / (d + 2.0)
        return (U[:, :, None] * U[:, None, :]) * rho[:, None, None]

    res = qd.integrate_sphere(rule, f)
    return np.asarray(res.value), np.asarray(res.error)


def density_hessian_at_zero(model: StableModel, rule: Optional[SphereRule] = None) -> np.ndarray:
    """Hessian of f at 0: -(2 pi)**(-d) Gamma(1 + (d+2)/alpha) int_F v v^T dv."""
    d = model.dim
    M, _ = second_moment_body(model, rule)
    c = math.exp(gammaln(1.0 + (d + 2.0) / model.alpha)) / (2.0 * np.pi) ** d
    H = -c * M
    return 0.5 * (H + H.T)


def milman_pajor_bound(model: StableModel, w, rule: Optional[SphereRule] = None):
    """(lhs, rhs) of int_F sum w_i**2 x_i**2 dx >= d/(d+2) |F|**(1+2/d) (prod w)**(2/d) kappa_d**(-2/d)."""
    w = np.asarray(w, dtype=float)
    d = model.dim
    M, _ = second_moment_body(model, rule)
    lhs = float(np.sum(w**2 * np.diag(M)))
    vol = geo.volume(model, rule).value
    rhs = d / (d + 2.0) * vol ** (1.0 + 2.0 / d) * np.prod(w) ** (2.0 / d) * qd.kappa(d) ** (-2.0 / d)
    return lhs, float(rhs)


# --------------------------------------------------------------- moments


def _gamma_ratio(lam: float, alpha: float) -> float:
    """Gamma(1 - lam/alpha) / Gamma(1 - lam/2); identically 1 at alpha = 2."""
    if alpha == 2.0:
        return 1.0
    return float(gamma(1.0 - lam / alpha) * rgamma(1.0 - lam / 2.0))


def norm_moment(model: StableModel, lam: float, rule: Optional[SphereRule] = None) -> MomentReport:
    """E||xi||**lam for lam in (-d, alpha) (any lam > -d for alpha = 2).

    2**(lam-1) pi**(-d/2) Gamma((d+lam)/2) Gamma(1-lam/alpha)/Gamma(1-lam/2)
    times the sphere integral of g(u)**lam.
    """
    _full(model)
    d, a = model.dim, model.alpha
    _check_open(lam, -d, a if a < 2.0 else math.inf, "lambda")
    if lam == 0.0:
        return MomentReport(1.0, 0.0, "norm-moment")
    c = 2.0 ** (lam - 1.0) * np.pi ** (-d / 2.0) * math.exp(gammaln((d + lam) / 2.0)) * _gamma_ratio(lam, a)
    if isinstance(model.spectral, Isotropic):
        s = geo.gauge(model, np.eye(d)[0])
        return MomentReport(c * qd.omega(d) * s**lam, 0.0, "norm-moment")
    rule = geo.default_rule(model) if rule is None else rule
    res = qd.integrate_sphere(rule, lambda U: geo.gauge(model, U) ** lam)
    return MomentReport(c * res.value, abs(c) * res.error, "norm-moment")


def isotropic_norm_moment(alpha: float, d: int, scale: float, lam: float) -> float:
    """E||xi||**lam for the isotropic law with gauge scale*|u| (classical form)."""
    _check_open(lam, -d, alpha if alpha < 2.0 else math.inf, "lambda")
    return float(
        (2.0 * scale) ** lam
        * math.exp(gammaln((d + lam) / 2.0) - gammaln(d / 2.0))
        * _gamma_ratio(lam, alpha)
    )


def norm_moment_lower_bound(model: StableModel, lam: float, rule: Optional[SphereRule] = None) -> float:
    """Lower bound from the dual mixed volume inequality (equality for balls), lam in (0, alpha)."""
    _check_open(lam, 0.0, model.alpha, "lambda")
    d = model.dim
    vol = geo.volume(model, rule).value
    return isotropic_norm_moment(model.alpha, d, 1.0, lam) * (qd.kappa(d) / vol) ** (lam / d)


def scalar_moment(model: StableModel, u, lam: float) -> MomentReport:
    """E|<xi, u>|**lam for lam in (-1, alpha)."""
    _symmetric(model)
    a = model.alpha
    _check_open(lam, -1.0, a if a < 2.0 else math.inf, "lambda")
    g = geo.gauge(model, np.asarray(u, dtype=float))
    c = 2.0**lam * math.exp(gammaln((lam + 1.0) / 2.0)) / math.sqrt(np.pi) * _gamma_ratio(lam, a)
    return MomentReport(c * g**lam, 0.0, "scalar-moment")


def moment_limit_ratio(model: StableModel, rule: Optional[SphereRule] = None) -> MomentReport:
    """lim_{lam -> alpha} E||xi||**lam / Gamma(1 - lam/alpha).

    Equals 2**alpha Gamma((alpha+1)/2) / (sqrt(pi) Gamma(1 - alpha/2))
    times the total spectral mass.
    """
    _full(model)
    a, d = model.alpha, model.dim
    if a >= 2.0:
        raise ValueError("the limit ratio needs alpha < 2")
    sp = model.spectral
    if isinstance(sp, DiscreteAtoms):
        mass, err = float(np.sum(sp.weights)), 0.0
    elif isinstance(sp, Isotropic):
        mass, err = float(sp.mass), 0.0
    else:
        rule = geo.default_rule(model) if rule is None else rule
        res = qd.integrate_sphere(rule, lambda U: alpha_power(model, U))
        c = isotropic_constant(d, a)
        mass, err = res.value / c, res.error / c
    k = 2.0**a * math.exp(gammaln((a + 1.0) / 2.0)) / math.sqrt(np.pi) * float(rgamma(1.0 - a / 2.0))
    return MomentReport(k * mass, k * err, "moment-limit")


# ----------------------------------------------------- bivariate moments


def _line_parts(model: StableModel, x: np.ndarray, axis: int):
    """Even and odd parts of g(w)**q along w = e_axis + x * e_other.

    Returns (q, G0, E, O) with g(w+)**q = G0 + E + O and g(w-)**q = G0 + E - O
    where w+- use +-x.  E is computed without cancellation.
    """
    other = 1 - axis
    sp = model.spectral
    if isinstance(sp, SphericalDensity):
        sp = sp.as_atoms()
    if isinstance(sp, DiscreteAtoms):
        q = model.alpha
        a = sp.directions[:, axis][None, :]
        b = sp.directions[:, other][None, :]
        w = sp.weights[None, :]
        xb = x[:, None] * b
        A = np.abs(a)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(A > 0, xb / np.where(A > 0, A, 1.0), np.inf)
            small = np.abs(t) < 0.1
            even = np.where(small, A**q * _even_series(q, np.where(small, t, 0.0)), 0.0)
            big = ~small
            direct = 0.5 * (np.abs(a + xb) ** q + np.abs(a - xb) ** q) - A**q
            even = np.where(big, direct, even)
            odd = 0.5 * (np.abs(a + xb) ** q - np.abs(a - xb) ** q)
        G0 = float(np.sum(sp.weights * np.abs(sp.directions[:, axis]) ** q))
        return q, G0, (w * even).sum(axis=1), (w * odd).sum(axis=1)
    if isinstance(sp, Isotropic):
        c2 = geo.gauge(model, np.eye(2)[0]) ** 2
        return 2.0, c2, c2 * x**2, np.zeros_like(x)
    if model.is_elliptical and sp.base is None:
        C = np.asarray(sp.matrix)
        return 2.0, 0.5 * C[axis, axis], 0.5 * C[other, other] * x**2, C[0, 1] * x
    # generic explicit gauge: plain differences
    W = np.zeros((x.size, 2))
    W[:, axis] = 1.0
    W[:, other] = x
    gp = geo.gauge(model, W)
    W[:, other] = -x
    gm = geo.gauge(model, W)
    G0 = geo.gauge(model, np.eye(2)[axis])
    return 1.0, G0, 0.5 * (gp + gm) - G0, 0.5 * (gp - gm)


def _even_series(q: float, t: np.ndarray, terms: int = 18) -> np.ndarray:
    """((1+t)**q + (1-t)**q)/2 - 1 for |t| < 0.1."""
    out = np.zeros_like(t)
    coef = 1.0
    t2 = t * t
    power = np.ones_like(t)
    for k in range(1, 2 * terms + 1):
        coef *= (q - k + 1.0) / k
        if k % 2 == 0:
            power = power * t2
            out += coef * power
    return out


def _power_differences(p: float, e: np.ndarray, o: np.ndarray, terms: int = 40):
    """Return ((1+a)**p + (1+b)**p - 2, (1+a)**p - (1+b)**p) for a,b = (e+-o)/2.

    Uses the binomial series on power sums of a and b, which are expanded in
    e and o so no cancellation occurs; falls back to direct evaluation when
    |a| or |b| >= 0.1.
    """
    a = 0.5 * (e + o)
    b = 0.5 * (e - o)
    direct_sum = (1 + a) ** p + (1 + b) ** p - 2.0
    direct_diff = (1 + a) ** p - (1 + b) ** p
    small = np.maximum(np.abs(a), np.abs(b)) < 0.1
    es, os_ = np.where(small, e, 0.0), np.where(small, o, 0.0)
    ssum = np.zeros_like(e)
    sdiff = np.zeros_like(e)
    coef = 1.0
    for k in range(1, terms + 1):
        coef *= (p - k + 1.0) / k
        # a**k + b**k and a**k - b**k from the binomial expansion in (e, o)
        even_part = np.zeros_like(e)
        odd_part = np.zeros_like(e)
        for j in range(k + 1):
            term = math.comb(k, j) * es ** (k - j) * os_**j
            if j % 2 == 0:
                even_part += term
            else:
                odd_part += term
        scale = 2.0 ** (1 - k)
        ssum += coef * scale * even_part
        sdiff += coef * scale * odd_part
    return np.where(small, ssum, direct_sum), np.where(small, sdiff, direct_diff)


def _slope_pieces(model: StableModel, axis: int) -> np.ndarray:
    """Breakpoints in (0, 1) where the gauge along e_axis + x e_other has kinks."""
    sp = model.spectral
    pts = [0.0, 1.0]
    if isinstance(sp, DiscreteAtoms):
        S = sp.directions
        other = 1 - axis
        nz = np.abs(S[:, other]) > 1e-15
        xk = np.abs(S[nz, axis] / S[nz, other])
        pts.extend(xk[(xk > 1e-12) & (xk < 1 - 1e-12)].tolist())
    return np.unique(np.asarray(pts))


def _slope_integral(model, axis, lam, mu, kind, step):
    """int_0^1 x**(-mu-1) * Phi(x) dx along w = e_axis + x e_other.

    kind "abs": Phi = 2 g(e)**lam - g(w+)**lam - g(w-)**lam
    kind "signed": Phi = g(w+)**lam - g(w-)**lam
    """
    brk = _slope_pieces(model, axis)
    total = 0.0
    for lo, hi in zip(brk[:-1], brk[1:]):
        ts = qd.tanh_sinh(lo, hi, step=step)
        x = ts.nodes if lo > 0 else ts.dist_lo
        q, G0, E, O = _line_parts(model, x, axis)
        p = lam / q
        s, dlt = _power_differences(p, 2.0 * E / G0, 2.0 * O / G0)
        phi = -(G0**p) * s if kind == "abs" else G0**p * dlt
        # combine in logs: weight, singular factor and phi underflow separately
        with np.errstate(divide="ignore"):
            logv = np.log(np.abs(phi)) + np.log(ts.weights) - (mu + 1.0) * np.log(x)
        vals = np.where(phi == 0.0, 0.0, np.sign(phi) * np.exp(np.minimum(logv, 700.0)))
        total += float(np.sum(vals))
    return total


def _require_2d(model: StableModel) -> None:
    _full(model)
    if model.dim != 2:
        raise ValueError("this moment is implemented for d = 2")


def mixed_abs_moment_2d(model: StableModel, lam1: float, lam2: float) -> MomentReport:
    """E|xi_1|**lam1 |xi_2|**lam2 for lam1, lam2 > 0, lam1 + lam2 < alpha.

    The radial part of the double integral is done in closed form; the
    angular part is folded onto the first quadrant and written in the slope
    variable, where it is an endpoint-singular integral over [0, 1].
    """
    _require_2d(model)
    a = model.alpha
    if not (lam1 > 0 and lam2 > 0):
        raise ValueError("exponents must be positive")
    lam = lam1 + lam2
    _check_open(lam, 0.0, a, "lambda1 + lambda2")
    g1 = geo.gauge(model, np.array([1.0, 0.0]))
    g2 = geo.gauge(model, np.array([0.0, 1.0]))

    def angular(step):
        j = 2.0 * g2**lam / lam1 + 2.0 * g1**lam / lam2
        j += _slope_integral(model, 0, lam, lam2, "abs", step)
        j += _slope_integral(model, 1, lam, lam1, "abs", step)
        return 2.0 * j

    const = 2.0 ** (lam - 2.0) / np.pi * float(gamma(1.0 - lam / a)) / lam
    for li in (lam1, lam2):
        const *= li * math.exp(gammaln((li + 1.0) / 2.0)) * float(rgamma(1.0 - li / 2.0))
    fine = const * angular(1.0 / 32.0)
    coarse = const * angular(1.0 / 16.0)
    return MomentReport(fine, abs(fine - coarse), "mixed-abs-moment")


def signed_mixed_moment_2d(model: StableModel, lam1: float, lam2: float) -> MomentReport:
    """E xi_1**<lam1> xi_2**<lam2> (signed powers), lam_i in [0, 1), lam1 + lam2 < alpha."""
    _require_2d(model)
    a = model.alpha
    for li in (lam1, lam2):
        if li < 0:
            raise ValueError("exponents must be nonnegative")
        if abs(li - 1.0) < BOUNDARY_GAP:
            raise ValueError("exponent 1 is not covered by the signed moment formula")
        if li > 1.0:
            raise ValueError("exponents above 1 make the principal value diverge")
    lam = lam1 + lam2
    if lam == 0.0:
        r = sign_moment_2d(model)
        return MomentReport(r.value, r.error, "signed-mixed-moment")
    _check_open(lam, 0.0, a, "lambda1 + lambda2")

    def pv(step):
        j = _slope_integral(model, 0, lam, lam2, "signed", step)
        j += _slope_integral(model, 1, lam, lam1, "signed", step)
        return -(1.0 / lam) * 2.0 * j

    const = -(2.0**lam) / np.pi * float(gamma(1.0 - lam / a))
    for li in (lam1, lam2):
        const *= math.exp(gammaln(1.0 + li / 2.0)) * float(rgamma(0.5 - li / 2.0))
    fine = const * pv(1.0 / 32.0)
    coarse = const * pv(1.0 / 16.0)
    return MomentReport(fine, abs(fine - coarse), "signed-mixed-moment")


def sign_moment_2d(model: StableModel) -> MomentReport:
    """E sign(xi_1 xi_2) = -I(F)/pi**2."""
    _require_2d(model)
    res = geo.iF_functional(model)
    val = -res.value / np.pi**2
    if not -1.0 - 1e-9 <= val <= 1.0 + 1e-9:
        raise ArithmeticError(f"sign moment {val} outside [-1, 1]")
    return MomentReport(val, res.error / np.pi**2, "sign-moment")


def linear_image_model(model: StableModel, B) -> StableModel:
    """Model of B xi for an invertible matrix B."""
    B = np.asarray(B, dtype=float)
    if abs(np.linalg.det(B)) < 1e-14:
        raise ValueError("matrix is singular")
    sp = model.spectral
    if isinstance(sp, SphericalDensity):
        sp = sp.as_atoms()
    if isinstance(sp, DiscreteAtoms):
        return atoms_model(model.alpha, sp.directions @ B.T, sp.weights)
    if model.is_elliptical and sp.base is None:
        return StableModel(model.alpha, elliptical_gauge(B @ np.asarray(sp.matrix) @ B.T), model.dim)

    def func(U):
        return geo.gauge(model, np.atleast_2d(U) @ B)

    return StableModel(model.alpha, ExplicitGauge(func, None, None, None, "linear-image"), model.dim)


def orthant_probability_2d(model: StableModel, A=None) -> MomentReport:
    """P(xi in A R_+^2) = 1/4 - I(F_eta)/(4 pi**2) with eta = A**-1 xi."""
    _require_2d(model)
    A = np.eye(2) if A is None else np.asarray(A, dtype=float)
    eta = linear_image_model(model, np.linalg.inv(A))
    res = geo.iF_functional(eta)
    val = 0.25 - res.value / (4.0 * np.pi**2)
    if not -1e-9 <= val <= 1.0 + 1e-9:
        raise ArithmeticError(f"orthant probability {val} outside [0, 1]")
    return MomentReport(val, res.error / (4.0 * np.pi**2), "orthant-probability")


def orthant_probability_nd(model: StableModel, n: int = 200_000, seed: int = 0) -> MomentReport:
    """Experimental even-d version: 2**-d * (1 + (-1)**(d/2) pi**-d I(F)) plus lower-order terms
    is not certified; only the full-dimensional I-term is included."""
    d = model.dim
    if d == 2:
        return orthant_probability_2d(model)
    res = geo.iF_functional_nd(model, d, n=n, seed=seed)
    sgn = (-1) ** (d // 2)
    val = 2.0**-d * (1.0 + sgn * res.value / np.pi**d)
    return MomentReport(val, 2.0**-d * res.error / np.pi**d, "orthant-probability-experimental")


# ------------------------------------------------ sections and integrals


def subspace_density_integral(model: StableModel, basis, rule: Optional[SphereRule] = None) -> MomentReport:
    """Integral of f over the orthogonal complement of span(basis rows).

    Equals (2 pi)**(-k) Gamma(1 + k/alpha) Vol_k(F intersected with H).
    """
    _full(model)
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    k = B.shape[0]
    if not 1 <= k <= model.dim:
        raise ValueError("subspace dimension must lie in [1, d]")
    vol = geo.subspace_section_volume(model, B, rule)
    c = math.exp(gammaln(1.0 + k / model.alpha)) / (2.0 * np.pi) ** k
    return MomentReport(c * vol.value, c * vol.error, "subspace-integral")


def marginal_line_integral(model: StableModel, u, rule: Optional[SphereRule] = None) -> MomentReport:
    """int_R f(t u) dt = (2 pi)**(1-d) Gamma(1 + (d-1)/alpha) Vol_{d-1}(F cap u-perp)."""
    _full(model)
    u = np.asarray(u, dtype=float)
    nrm = np.linalg.norm(u)
    if nrm == 0:
        raise ValueError("u must be nonzero")
    d = model.dim
    vol = geo.section_volume(model, u / nrm, rule)
    c = math.exp(gammaln(1.0 + (d - 1.0) / model.alpha)) / (2.0 * np.pi) ** (d - 1)
    return MomentReport(c * vol.value / nrm, c * vol.error / nrm, "line-integral")


def renyi_overlap(model: StableModel, c: float, rule: Optional[SphereRule] = None) -> MomentReport:
    """int f(c x) f(x) dx = (1 + |c|**alpha)**(-d/alpha) f(0)."""
    if c == 0:
        raise ValueError("c must be nonzero")
    f0 = density_at_zero(model, rule)
    k = (1.0 + abs(c) ** model.alpha) ** (-model.dim / model.alpha)
    return MomentReport(k * f0.value, k * f0.error, "renyi-overlap")


def intersection_body_moment(model: StableModel, rule: Optional[SphereRule] = None) -> MomentReport:
    """E rho_{IF}(xi) = d/(pi (d-1)) Gamma(1 + 1/alpha) |F|."""
    _full(model)
    d = model.dim
    vol = geo.volume(model, rule)
    c = d / (np.pi * (d - 1.0)) * math.gamma(1.0 + 1.0 / model.alpha)
    return MomentReport(c * vol.value, c * vol.error, "intersection-body-moment")


def intersection_body_functional(model: StableModel, X, rule: Optional[SphereRule] = None) -> np.ndarray:
    """rho_{IF}(x) = Vol_{d-1}(F cap x-perp) / |x| for each row of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = np.linalg.norm(X, axis=1)
    if model.dim == 2:
        perp = np.column_stack([-X[:, 1], X[:, 0]]) / n[:, None]
        return 2.0 * geo.radial(model, perp) / n
    return np.array([geo.section_volume(model, x / m, rule).value / m for x, m in zip(X, n)])


def section_product_bound_2d(model: StableModel, rule: Optional[SphereRule] = None):
    """(f(0), bound) with bound = Gamma(1+2/a) / (2 Gamma(1+1/a)**2) f_1(0) f_2(0)."""
    _require_2d(model)
    a = model.alpha
    f0 = density_at_zero(model, rule).value
    f1 = subspace_density_integral(model, [[1.0, 0.0]]).value
    f2 = subspace_density_integral(model, [[0.0, 1.0]]).value
    k = math.gamma(1.0 + 2.0 / a) / (2.0 * math.gamma(1.0 + 1.0 / a) ** 2)
    return f0, k * f1 * f2


# ------------------------------------------- expectations through zeta


def zeta_panels(alpha: float) -> np.ndarray:
    """Panels for the density alpha t**(alpha-1) exp(-t**alpha) of zeta."""
    return radial_panels(alpha, alpha - 1.0, eps=1e-17)


def zeta_mean(kernel, C, alpha: float, n_gl: int = 16, max_panels: int = 6000):
    """E kernel(c * zeta) for every entry c of C, where P(zeta > t) = exp(-t**alpha).

    Returns (values, errors).  Panels of the zeta density are refined so
    each covers at most one period of an oscillation at frequency c; the
    error is the change against a half-order Gauss rule.
    """
    C = np.asarray(C, dtype=float)
    flat = np.abs(C.ravel())
    out = np.empty(flat.size)
    err = np.empty(flat.size)
    base = zeta_panels(alpha)
    widths = np.diff(base)
    key = np.floor(np.log2(np.maximum(flat, 1e-300))).clip(-80, 80)
    for k in np.unique(key):
        idx = np.flatnonzero(key == k)
        cmax = flat[idx].max()
        m = np.maximum(1, np.ceil(widths * cmax / (2.0 * np.pi))).astype(int)
        if m.sum() > max_panels:
            m = np.maximum(1, (m * max_panels / m.sum()).astype(int))
        starts = np.repeat(base[:-1], m)
        steps = np.repeat(widths / m, m)
        offs = np.arange(m.sum()) - np.repeat(np.cumsum(m) - m, m)
        brk = np.append(starts + offs * steps, base[-1])
        res = []
        for npts in (n_gl, n_gl // 2):
            t, w = qd.composite_gauss_legendre(brk, npts)
            dens = w * alpha * t ** (alpha - 1.0) * np.exp(-(t**alpha))
            vals = np.empty(idx.size)
            chunk = max(1, int(2e6 // t.size))
            for i in range(0, idx.size, chunk):
                cc = flat[idx[i:i + chunk]]
                vals[i:i + chunk] = kernel(cc[:, None] * t[None, :]) @ dens
            res.append(vals)
        out[idx] = res[0]
        err[idx] = np.abs(res[0] - res[1])
    return out.reshape(C.shape), err.reshape(C.shape)


def _cin(x):
    si, ci = sici(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.euler_gamma + np.log(x) - ci
    small = x < 1e-3
    x2 = x * x
    series = x2 / 4.0 - x2 * x2 / 96.0 + x2**3 / 4320.0
    return np.where(small, series, val)


def _si(x):
    return sici(x)[0]


def _contour_mean(kind: str, C, alpha: float, h: float = 0.05):
    """E Cin(c zeta) or E Si(c zeta) for c >= 1, returned as (values, errors).

    Both reduce to J = int_0^inf exp(i c s) g(s) ds with
    g(s) = (1 - exp(-s**alpha)) / s, since E log zeta = -gamma / alpha:
    E Cin = gamma (1 - 1/alpha) + log c + Re J and E Si = pi/2 - Im J.
    J is taken along the ray s = y exp(i theta) with theta = pi / (2 (1 + alpha)),
    where exp(i c s) and exp(-s**alpha) decay at the same angular rate, so an
    exp-sinh rule converges fast however many oscillations the real line
    would carry.  The error is the change against the rule with step 2h.
    """
    C = np.asarray(C, dtype=float)
    rot = np.exp(0.5j * np.pi / (1.0 + alpha))
    t = np.arange(-5.0, 2.5 + 0.5 * h, h)
    u = np.exp(0.5 * np.pi * np.sinh(t))
    w = h * u * 0.5 * np.pi * np.cosh(t) * np.exp(1j * rot * u)
    s = rot * u[None, :] / C[:, None]
    g = -np.expm1(-(s**alpha)) / s
    fine = rot / C * (g @ w)
    coarse = rot / C * (g[:, ::2] @ (2.0 * w[::2]))
    if kind == "cin":
        base = np.euler_gamma * (1.0 - 1.0 / alpha) + np.log(C)
        return base + fine.real, np.abs(fine.real - coarse.real)
    return 0.5 * np.pi - fine.imag, np.abs(fine.imag - coarse.imag)


SMALL_ARGUMENT = 1e-4


@functools.lru_cache(maxsize=32)
def _small_argument_table(kind: str, alpha: float, degree: int = 64):
    """Chebyshev interpolant in log10 c of E kernel(c zeta) on [1e-4, 1].

    The mean is analytic in log c, so a fixed-degree interpolant built once
    per (kernel, alpha) replaces thousands of kernel calls per argument.
    The error bound adds the node errors to the residual at the midpoints.
    """
    kernel = _cin if kind == "cin" else _si
    lo = np.log10(SMALL_ARGUMENT)
    to_c = lambda x: 10.0 ** (lo + 0.5 * (x + 1.0) * -lo)
    x = np.cos(np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1))
    v, e = zeta_mean(kernel, to_c(x), alpha)
    coef = np.polynomial.chebyshev.chebfit(x, v, degree)
    xm = np.cos(np.pi * np.arange(1, 2 * degree + 2) / (2 * degree + 2))
    vm, em = zeta_mean(kernel, to_c(xm), alpha)
    resid = np.abs(np.polynomial.chebyshev.chebval(xm, coef) - vm).max()
    return coef, float(resid + e.max() + em.max())


def _small_argument_mean(kind: str, C, alpha: float):
    """E Cin(c zeta) or E Si(c zeta) for c < 1 (Taylor series below 1e-4)."""
    C = np.asarray(C, dtype=float)
    val = np.empty_like(C)
    err = np.empty_like(C)
    tiny = C < SMALL_ARGUMENT
    g = lambda k: gamma(1.0 + k / alpha)
    if kind == "cin":
        # Cin(x) = x^2/4 - x^4/96 + x^6/4320 - ...
        c2 = C[tiny] ** 2
        val[tiny] = c2 * (g(2) / 4.0 - c2 * (g(4) / 96.0 - c2 * g(6) / 4320.0))
        err[tiny] = c2**4 * g(8) / 322560.0
    else:
        # Si(x) = x - x^3/18 + x^5/600 - ...
        c1 = C[tiny]
        c2 = c1**2
        val[tiny] = c1 * (g(1) - c2 * (g(3) / 18.0 - c2 * g(5) / 600.0))
        err[tiny] = c1 * c2**3 * g(7) / 35280.0
    if np.any(~tiny):
        coef, bound = _small_argument_table(kind, float(alpha))
        lo = np.log10(SMALL_ARGUMENT)
        x = (np.log10(C[~tiny]) - lo) / (-0.5 * lo) - 1.0
        val[~tiny] = np.polynomial.chebyshev.chebval(x, coef)
        err[~tiny] = bound
    return val, err


def _kernel_mean(kind: str, C, alpha: float):
    # the rotated contour for c >= 1, a cached interpolant below
    C = np.abs(np.asarray(C, dtype=float))
    big = C >= 1.0
    val = np.empty_like(C)
    err = np.empty_like(C)
    if np.any(~big):
        val[~big], err[~big] = _small_argument_mean(kind, C[~big], alpha)
    if np.any(big):
        val[big], err[big] = _contour_mean(kind, C[big], alpha)
    return val, err


def _ball_kernel(d):
    if d == 2:
        def k2(x):
            small = x < 1e-4
            return np.where(small, x * x / 4.0, 1.0 - j0(x))
        return k2
    if d == 3:
        c = math.sqrt(2.0 / np.pi)

        def k3(x):
            small = x < 1e-3
            series = x**3 / 3.0 - x**5 / 30.0
            return c * np.where(small, series, _si(x) - np.sin(x))
        return k3
    raise ValueError("ball probabilities are available for d = 2 and 3")


def _kernel_rule(model: StableModel, rule: Optional[SphereRule]) -> SphereRule:
    if rule is not None:
        return rule
    if model.dim == 2 and isinstance(model.spectral, DiscreteAtoms):
        return geo.default_rule(model)
    return qd.axis_free_rule(model.dim, 256 if model.dim == 2 else 32)


def _prob_check(val: float, err: float, name: str, low: float = 0.0) -> float:
    """Clip a probability into [low, 1], failing if it lies outside by more than its error."""
    slack = max(1e-8, err)
    if not low - slack <= val <= 1.0 + slack:
        raise ArithmeticError(f"{name} {val} outside [0, 1] beyond its error {err:.1e}")
    return min(max(val, low), 1.0)


def ball_probability(model: StableModel, r: float, rule: Optional[SphereRule] = None) -> MomentReport:
    """P(|xi| <= r) = (2 pi)**(-d/2) int_S E Lambda_d(r zeta rho(u)) du.

    Lambda_2(x) = 1 - J_0(x) and Lambda_3(x) = sqrt(2/pi)(Si(x) - sin x)
    are the radial integrals of the Bessel kernel over [0, x].
    """
    _full(model)
    d = model.dim
    if r <= 0:
        return MomentReport(0.0, 0.0, "ball-probability")
    kern = _ball_kernel(d)
    rule = geo.default_rule(model) if rule is None else rule
    c = r * geo.radial(model, rule.nodes)
    vals, errs = zeta_mean(kern, c, model.alpha)
    k = (2.0 * np.pi) ** (-d / 2.0)
    val = k * float(np.sum(rule.weights * vals))
    err = k * float(np.sum(rule.weights * errs))
    if rule.coarse is not None:
        cc = r * geo.radial(model, rule.coarse.nodes)
        err += abs(val - k * float(np.sum(rule.coarse.weights * zeta_mean(kern, cc, model.alpha)[0])))
    val = _prob_check(val, err, "ball probability")
    return MomentReport(val, err, "ball-probability")


def _unique_lines(D: np.ndarray) -> np.ndarray:
    D = D / np.linalg.norm(D, axis=1, keepdims=True)
    lead = D[np.arange(len(D)), np.argmax(np.abs(D), axis=1)]
    return np.unique(np.round(D * np.sign(lead)[:, None], 12), axis=0)


def _axis_rule(model: StableModel, normals=None) -> SphereRule:
    """Rule split at the coordinate planes, extra planes and the gauge kinks.

    The box and Laplace kernels carry log spikes or jumps on the planes
    u_i = 0 (and, for boxes, <u, eps * a> = 0) whose width shrinks with the
    arguments, so those planes become breaks of a graded rule.
    """
    d = model.dim
    D = np.eye(d) if normals is None else np.vstack([np.eye(d), normals])
    sp = model.spectral
    atoms = sp.directions if isinstance(sp, DiscreteAtoms) else None
    if d == 2:
        breaks = geo.kink_angles(D)
        if atoms is not None and atoms.shape[0] <= geo.KINK_ATOM_LIMIT:
            breaks = np.concatenate([breaks, geo.kink_angles(atoms)])
        return qd.graded_arc_rule(breaks)
    D = _unique_lines(D)
    if atoms is not None:
        both = _unique_lines(np.vstack([D, atoms]))
        if both.shape[0] <= BOX_KINK_LIMIT_3D:
            D = both
    # a polar axis off the coordinate planes keeps nodes off u1 u2 u3 = 0
    first = np.argmax(np.abs(np.prod(D, axis=1)))
    return qd.kink_sphere_rule(np.roll(D, -first, axis=0))


def box_probability(model: StableModel, a, rule: Optional[SphereRule] = None) -> MomentReport:
    """P(xi in the box with half-widths a), d = 2 or 3.

    Starting from pi**-d int_F E prod sin(a_i v_i zeta)/v_i dv, the product
    of sines is expanded into single trigonometric terms whose radial
    integrals are Cin (d = 2) or Si (d = 3).
    """
    _full(model)
    d = model.dim
    a = np.asarray(a, dtype=float)
    if a.shape != (d,) or np.any(a <= 0):
        raise ValueError("half-widths must be positive, one per coordinate")
    if d not in (2, 3):
        raise ValueError("box probabilities are available for d = 2 and 3")
    if rule is None:
        signs = np.array([[1, 1, -1], [1, -1, 1], [-1, 1, 1], [1, 1, 1]] if d == 3 else [[1, 1], [1, -1]], dtype=float)
        rule = _axis_rule(model, signs * a)

    def evaluate(rl):
        U = rl.nodes
        rho = geo.radial(model, U)
        if d == 2:
            sp = U @ np.array([a[0], a[1]])
            sm = U @ np.array([a[0], -a[1]])
            vp, ep = _kernel_mean("cin", rho * sp, model.alpha)
            vm, em = _kernel_mean("cin", rho * sm, model.alpha)
            f, e = vp - vm, ep + em
            den = 2.0 * U[:, 0] * U[:, 1]
        else:
            combos = [((1, 1, -1), 1.0), ((1, -1, 1), 1.0), ((-1, 1, 1), 1.0), ((1, 1, 1), -1.0)]
            f = np.zeros(U.shape[0])
            e = np.zeros(U.shape[0])
            for eps, coef in combos:
                s = U @ (np.asarray(eps) * a)
                v, ev = _kernel_mean("si", rho * s, model.alpha)
                f += coef * np.sign(s) * v
                e += ev
            den = 4.0 * U[:, 0] * U[:, 1] * U[:, 2]
        # the integrand stays finite on the coordinate planes; graded rules may
        # put a node there to rounding, with negligible weight, and it is dropped
        ok = den != 0
        f = np.where(ok, f, 0.0) / np.where(ok, den, 1.0)
        e = np.where(ok, e, 0.0) / np.abs(np.where(ok, den, 1.0))
        return np.pi**-d * float(np.sum(rl.weights * f)), np.pi**-d * float(np.sum(rl.weights * e))

    val, err = evaluate(rule)
    if rule.coarse is not None:
        err += abs(val - evaluate(rule.coarse)[0])
    val = _prob_check(val, err, "box probability")
    return MomentReport(val, err, "box-probability")


def laplace_abs(model: StableModel, lam, rule: Optional[SphereRule] = None) -> MomentReport:
    """E exp(-sum lam_i |xi_i|) for positive lam (d = 2, 3).

    pi**-d int_F E prod zeta lam_i/(zeta**2 v_i**2 + lam_i**2) dv; after the
    substitution y = zeta r the zeta expectation becomes the survival
    weight exp(-(y g(u))**alpha) of a radial integral.
    """
    _full(model)
    d = model.dim
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (d,) or np.any(lam <= 0):
        raise ValueError("lambda must be positive, one per coordinate")
    if d not in (2, 3):
        raise ValueError("Laplace functionals are available for d = 2 and 3")
    rule = _axis_rule(model) if rule is None else rule
    rr = qd.radial_rule(1.0 / 32.0, 5.0)
    scale = float(np.exp(np.mean(np.log(lam))))

    def evaluate(rl, step):
        U = rl.nodes
        g = geo.gauge(model, U)
        y = scale * rr.nodes[::step]
        wy = scale * rr.weights[::step] * step
        prod = np.ones((U.shape[0], y.size))
        for i in range(d):
            prod *= lam[i] / ((y[None, :] * U[:, i:i + 1]) ** 2 + lam[i] ** 2)
        vals = prod * y[None, :] ** (d - 1) * np.exp(-((y[None, :] * g[:, None]) ** model.alpha))
        return np.pi**-d * float(np.sum(rl.weights * (vals @ wy)))

    val = evaluate(rule, 1)
    err = abs(val - evaluate(rule, 2))
    if rule.coarse is not None:
        err += abs(val - evaluate(rule.coarse, 1))
    val = _prob_check(val, err, "Laplace functional", low=np.finfo(float).tiny)
    return MomentReport(val, err, "laplace-abs")
