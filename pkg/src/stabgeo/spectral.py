"""Spectral measures and stable models.

A symmetric model is described by its exponent ``alpha`` and a spectral
measure sigma so that the characteristic function is
``exp(-||u||_F**alpha)`` with

    ||u||_F**alpha = sum_j w_j |<u, s_j>|**alpha.

Discrete atoms of symmetric models are stored on the half-sphere whose
first nonzero coordinate is positive; a weight stands for both +s and -s
(no hidden factor of two).  One-sided models use the same weights with
``<u, s_j>**alpha`` for u in the positive orthant.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Union

import numpy as np
from scipy.special import gammaln

from .quadrature import SphereRule, omega

SYMMETRIC = "symmetric"
ONESIDED = "onesided"
KINDS = (SYMMETRIC, ONESIDED)

UNIT_TOL = 1e-12


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def fold_directions(S: np.ndarray) -> np.ndarray:
    """Flip rows so that the first nonzero coordinate is positive."""
    S = np.array(S, dtype=float, copy=True)
    for i in range(S.shape[0]):
        nz = np.flatnonzero(np.abs(S[i]) > 1e-15)
        if nz.size and S[i, nz[0]] < 0:
            S[i] = -S[i]
    return S


@dataclass(frozen=True, eq=False)
class DiscreteAtoms:
    """Finitely many weighted unit directions."""

    directions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        S = np.atleast_2d(np.asarray(self.directions, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if w.shape != (S.shape[0],):
            raise ValueError("one weight per direction is required")
        object.__setattr__(self, "directions", _readonly(S))
        object.__setattr__(self, "weights", _readonly(w))

    @property
    def dim(self) -> int:
        return self.directions.shape[1]


@dataclass(frozen=True, eq=False)
class SphericalDensity:
    """Nonnegative density tabulated on the nodes of a sphere rule.

    The density lives on the whole sphere (no folding), so
    ``||u||**alpha = sum_i q_i f_i |<u, v_i>|**alpha`` with rule weights q.
    """

    rule: SphereRule
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.rule.size,):
            raise ValueError("one density value per rule node is required")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def dim(self) -> int:
        return self.rule.dim

    def as_atoms(self) -> DiscreteAtoms:
        w = self.rule.weights * self.values
        keep = w > 0
        return DiscreteAtoms(self.rule.nodes[keep], w[keep])


@dataclass(frozen=True, eq=False)
class Isotropic:
    """Uniform spectral measure of total mass ``mass`` on the whole sphere."""

    mass: float


@dataclass(frozen=True, eq=False)
class ExplicitGauge:
    """Gauge given directly as a function of u.

    ``func`` maps an (n, d) array to n gauge values and must be positively
    homogeneous of degree one.  ``matrix`` is set for elliptical gauges
    ``sqrt(u' C u / 2)``; ``base`` for sub-stable transforms.
    """

    func: Callable[[np.ndarray], np.ndarray]
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    matrix: Optional[np.ndarray] = None
    base: Optional["StableModel"] = None
    label: str = "explicit"


Spectral = Union[DiscreteAtoms, SphericalDensity, Isotropic, ExplicitGauge]


@dataclass(frozen=True, eq=False)
class StableModel:
    """Exponent, spectral description, kind and dimension."""

    alpha: float
    spectral: Spectral
    dim: int
    kind: str = SYMMETRIC

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "dim", int(self.dim))
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")

    @property
    def is_elliptical(self) -> bool:
        return isinstance(self.spectral, ExplicitGauge) and self.spectral.matrix is not None

    def fingerprint(self) -> str:
        return model_fingerprint(self)


class Diagnostic(NamedTuple):
    code: str
    message: str
    severity: str  # "error" or "warning"


def isotropic_constant(d: int, alpha: float) -> float:
    """Integral of |<u, e1>|**alpha over S^{d-1}."""
    return 2.0 * math.pi ** ((d - 1) / 2.0) * math.exp(
        gammaln((alpha + 1.0) / 2.0) - gammaln((d + alpha) / 2.0)
    )


def alpha_power(model: StableModel, U: np.ndarray) -> np.ndarray:
    """Return ||u||_F**alpha for each row of U (one-sided: psi(u))."""
    U = np.atleast_2d(np.asarray(U, dtype=float))
    a = model.alpha
    sp = model.spectral
    if isinstance(sp, (DiscreteAtoms, SphericalDensity)):
        if isinstance(sp, DiscreteAtoms):
            S, w = sp.directions, sp.weights
        else:
            S, w = sp.rule.nodes, sp.rule.weights * sp.values
        out = np.empty(U.shape[0])
        chunk = max(1, int(4e6 // max(S.shape[0], 1)))
        for i in range(0, U.shape[0], chunk):
            ip = U[i:i + chunk] @ S.T
            if model.kind == ONESIDED:
                ip = np.maximum(ip, 0.0)
            out[i:i + chunk] = np.abs(ip) ** a @ w
        return out
    if isinstance(sp, Isotropic):
        c = sp.mass * isotropic_constant(model.dim, a) / omega(model.dim)
        return c * np.linalg.norm(U, axis=1) ** a
    if isinstance(sp, ExplicitGauge):
        g = np.asarray(sp.func(U), dtype=float)
        return g**a
    raise TypeError(f"unsupported spectral description {type(sp).__name__}")


def validate_model(model: StableModel) -> List[Diagnostic]:
    """List every violated structural condition (empty list if clean)."""
    out: List[Diagnostic] = []
    a, d, sp = model.alpha, model.dim, model.spectral
    if not (0.0 < a <= 2.0):
        out.append(Diagnostic("alpha-range", "alpha must lie in (0, 2]", "error"))
    if model.kind == ONESIDED and not (0.0 < a < 1.0):
        out.append(Diagnostic("onesided-alpha", "one-sided requires alpha<1", "error"))
    if a == 2.0 and model.kind == SYMMETRIC and not model.is_elliptical:
        out.append(Diagnostic("alpha-two", "spectral measure not unique at alpha=2", "warning"))
    if isinstance(sp, (DiscreteAtoms, SphericalDensity)):
        if sp.dim != d:
            out.append(Diagnostic("dimension", "spectral dimension differs from model dimension", "error"))
            return out
        if isinstance(sp, DiscreteAtoms):
            S, w = sp.directions, sp.weights
            norms = np.linalg.norm(S, axis=1)
            if np.any(np.abs(norms - 1.0) > UNIT_TOL):
                out.append(Diagnostic("unit", "direction not of unit length", "error"))
            if model.kind == SYMMETRIC:
                folded = fold_directions(S)
                if not np.array_equal(folded, S):
                    out.append(Diagnostic("fold", "atom not on the canonical half-sphere", "error"))
        else:
            S, w = sp.rule.nodes, sp.rule.weights * sp.values
            if np.any(sp.values < 0):
                out.append(Diagnostic("weight", "negative density value", "error"))
        if np.any(w < 0):
            out.append(Diagnostic("weight", "negative weight", "error"))
        if not np.sum(w) > 0:
            out.append(Diagnostic("mass", "total mass must be positive", "error"))
        if model.kind == ONESIDED and np.any(S < -UNIT_TOL):
            out.append(Diagnostic("orthant", "one-sided direction outside the positive orthant", "error"))
        M = (S * np.maximum(w, 0)[:, None]).T @ S
        if M.shape == (d, d) and np.linalg.matrix_rank(M, tol=1e-12 * max(np.trace(M), 1e-300)) < d:
            out.append(Diagnostic("full-dimensional", "not full-dimensional", "error"))
    elif isinstance(sp, Isotropic):
        if not sp.mass > 0:
            out.append(Diagnostic("mass", "total mass must be positive", "error"))
        if model.kind == ONESIDED:
            out.append(Diagnostic("orthant", "isotropic measure is not one-sided", "error"))
    elif isinstance(sp, ExplicitGauge):
        if sp.matrix is not None:
            C = np.asarray(sp.matrix)
            if C.shape != (d, d) or not np.allclose(C, C.T, atol=1e-12):
                out.append(Diagnostic("matrix", "matrix must be symmetric d x d", "error"))
            elif np.linalg.eigvalsh(C).min() <= 0:
                out.append(Diagnostic("full-dimensional", "not full-dimensional", "error"))
        out.extend(_check_homogeneous(model))
    return out


def _check_homogeneous(model: StableModel, n: int = 16) -> List[Diagnostic]:
    rng = np.random.Generator(np.random.PCG64(2024))
    U = rng.standard_normal((n, model.dim))
    if model.kind == ONESIDED:
        U = np.abs(U)
    c = rng.uniform(0.2, 5.0, size=n)
    f = model.spectral.func
    g1 = np.asarray(f(U * c[:, None]), dtype=float)
    g0 = c * np.asarray(f(U), dtype=float)
    if not np.allclose(g1, g0, rtol=1e-9, atol=1e-300):
        return [Diagnostic("homogeneity", "explicit gauge is not 1-homogeneous", "error")]
    if np.any(g0 <= 0):
        return [Diagnostic("full-dimensional", "not full-dimensional", "error")]
    return []


def is_valid(model: StableModel) -> bool:
    return not any(dg.severity == "error" for dg in validate_model(model))


def require_valid(model: StableModel) -> None:
    errs = [dg.message for dg in validate_model(model) if dg.severity == "error"]
    if errs:
        raise ValueError("invalid model: " + "; ".join(errs))


# ---------------------------------------------------------------- builders


def atoms_model(alpha: float, vectors, weights=None, kind: str = SYMMETRIC) -> StableModel:
    """Model from arbitrary (not necessarily unit) atom vectors.

    An atom y with weight w is mapped to (y/|y|, w |y|**alpha); zero
    vectors are dropped and symmetric atoms are folded.
    """
    Y = np.atleast_2d(np.asarray(vectors, dtype=float))
    w = np.ones(Y.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    norms = np.linalg.norm(Y, axis=1)
    keep = norms > 0
    S = Y[keep] / norms[keep, None]
    w = w[keep] * norms[keep] ** alpha
    if kind == SYMMETRIC:
        S = fold_directions(S)
    return StableModel(alpha, DiscreteAtoms(S, w), Y.shape[1], kind)


def independent_model(alpha: float, d: int, weights=None) -> StableModel:
    """Atoms on the coordinate axes: independent components."""
    w = np.ones(d) if weights is None else np.asarray(weights, dtype=float)
    return StableModel(alpha, DiscreteAtoms(np.eye(d), w), d)


def isotropic_model(alpha: float, d: int, scale: float = 1.0) -> StableModel:
    """Rotation invariant model with gauge ``scale * |u|``."""
    mass = scale**alpha * omega(d) / isotropic_constant(d, alpha)
    return StableModel(alpha, Isotropic(mass), d)


def elliptical_gauge(C) -> ExplicitGauge:
    C = _readonly(C)

    def func(U):
        U = np.atleast_2d(U)
        q = 0.5 * np.einsum("ij,jk,ik->i", U, C, U)
        return np.sqrt(np.maximum(q, 0.0))

    def grad(U):
        U = np.atleast_2d(U)
        g = func(U)
        return 0.5 * (U @ C) / g[:, None]

    return ExplicitGauge(func, grad, C, None, "elliptical")


def subgaussian_model(C, alpha: float) -> StableModel:
    """Sub-Gaussian model with ||u||_F**2 = <Cu, u>/2."""
    C = np.asarray(C, dtype=float)
    return StableModel(alpha, elliptical_gauge(C), C.shape[0])


def onesided_model(alpha: float, directions, weights=None) -> StableModel:
    """One-sided model with Laplace exponent sum_j w_j <u, s_j>**alpha."""
    return atoms_model(alpha, directions, weights, kind=ONESIDED)


# ------------------------------------------------------------ operations


def total_mass(measure) -> float:
    if isinstance(measure, StableModel):
        measure = measure.spectral
    if isinstance(measure, DiscreteAtoms):
        return float(np.sum(measure.weights))
    if isinstance(measure, SphericalDensity):
        return float(np.sum(measure.rule.weights * measure.values))
    if isinstance(measure, Isotropic):
        return float(measure.mass)
    raise TypeError("total mass is defined for spectral measures only")


def scale_measure(measure, c: float):
    """Multiply all weights by ``c > 0`` (the gauge scales by c**(1/alpha))."""
    if not c > 0:
        raise ValueError("scale factor must be positive")
    if isinstance(measure, StableModel):
        return StableModel(measure.alpha, scale_measure(measure.spectral, c), measure.dim, measure.kind)
    if isinstance(measure, DiscreteAtoms):
        return DiscreteAtoms(measure.directions, measure.weights * c)
    if isinstance(measure, SphericalDensity):
        return SphericalDensity(measure.rule, measure.values * c)
    if isinstance(measure, Isotropic):
        return Isotropic(measure.mass * c)
    raise TypeError("cannot scale an explicit gauge")


def spectral_from_star_body(L: Callable[[np.ndarray], np.ndarray], alpha: float, rule: SphereRule) -> SphericalDensity:
    """Spectral density rho_L**(d+alpha)/(d+alpha) on the rule nodes.

    With this density the model gauge satisfies
    ``||u||**alpha = integral over L of |<u, y>|**alpha dy``.
    """
    g = np.asarray(L(rule.nodes), dtype=float)
    with np.errstate(divide="ignore"):
        rho = 1.0 / g
    bad = ~np.isfinite(rho) | (rho <= 0)
    if np.any(bad):
        raise ValueError(f"radial function is not finite and positive at node {int(np.flatnonzero(bad)[0])}")
    d = rule.dim
    return SphericalDensity(rule, rho ** (d + alpha) / (d + alpha))


class EmptyTailError(ValueError):
    """No sample reaches the requested threshold."""


def estimate_spectral_from_samples(samples, t: float, kind: str = SYMMETRIC, n_bins: Optional[int] = None) -> DiscreteAtoms:
    """Empirical direction law of the samples with norm at least ``t``.

    Each retained sample contributes weight 1/m (m retained samples);
    identical directions are merged.  With ``n_bins`` (d=2, symmetric) the
    folded angles are binned and each bin becomes one atom at its centre.
    """
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    norms = np.linalg.norm(X, axis=1)
    keep = norms >= t
    m = int(np.sum(keep))
    if m == 0:
        raise EmptyTailError(f"no sample has norm >= {t}")
    S = X[keep] / norms[keep, None]
    if kind == SYMMETRIC:
        S = fold_directions(S)
    if n_bins is not None:
        if S.shape[1] != 2 or kind != SYMMETRIC:
            raise ValueError("angular binning is available for symmetric d=2 only")
        ang = np.mod(np.arctan2(S[:, 1], S[:, 0]) + 0.5 * np.pi, np.pi) - 0.5 * np.pi
        edges = np.linspace(-0.5 * np.pi, 0.5 * np.pi, n_bins + 1)
        counts, _ = np.histogram(ang, bins=edges)
        centres = 0.5 * (edges[:-1] + edges[1:])
        nz = counts > 0
        D = np.column_stack([np.cos(centres[nz]), np.sin(centres[nz])])
        return DiscreteAtoms(fold_directions(D), counts[nz] / m)
    uniq, inverse = np.unique(S, axis=0, return_inverse=True)
    w = np.bincount(inverse.ravel(), minlength=uniq.shape[0]) / m
    return DiscreteAtoms(uniq, w)


def tail_constant(alpha: float) -> float:
    """c with P(|X| > x) ~ c x**(-alpha) for E exp(iuX) = exp(-|u|**alpha)."""
    if not 0 < alpha < 2:
        raise ValueError("tail constant requires alpha in (0, 2)")
    return 2.0 * math.gamma(alpha) * math.sin(0.5 * math.pi * alpha) / math.pi


def tail_mass_estimate(samples, t: float, alpha: float) -> float:
    """Total spectral mass implied by the exceedance frequency at level t."""
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    frac = float(np.mean(np.linalg.norm(X, axis=1) >= t))
    if frac == 0:
        raise EmptyTailError(f"no sample has norm >= {t}")
    return t**alpha * frac / tail_constant(alpha)


def model_fingerprint(model: StableModel) -> str:
    h = hashlib.sha256()
    h.update(f"{model.alpha!r}|{model.kind}|{model.dim}|".encode())
    sp = model.spectral
    h.update(type(sp).__name__.encode())
    if isinstance(sp, DiscreteAtoms):
        h.update(np.ascontiguousarray(sp.directions).tobytes())
        h.update(np.ascontiguousarray(sp.weights).tobytes())
    elif isinstance(sp, SphericalDensity):
        h.update(np.ascontiguousarray(sp.rule.nodes).tobytes())
        h.update(np.ascontiguousarray(sp.values).tobytes())
    elif isinstance(sp, Isotropic):
        h.update(repr(float(sp.mass)).encode())
    else:
        h.update(sp.label.encode())
        if sp.matrix is not None:
            h.update(np.ascontiguousarray(sp.matrix, dtype=float).tobytes())
        if sp.base is not None:
            h.update(model_fingerprint(sp.base).encode())
    return h.hexdigest()[:16]
