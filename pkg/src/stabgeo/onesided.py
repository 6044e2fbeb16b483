"""One-sided strictly stable laws, p-sums and L1(p)-zonoids.

A one-sided model is a ``StableModel`` of kind ``"onesided"`` whose atoms
lie in the nonnegative orthant.  Its Laplace exponent is
``psi(u) = sum_j w_j <u, s_j>**alpha`` for u >= 0, so weights here
already include the Gamma(1 - alpha) factor that appears when the exponent
is written through the Levy measure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import gammaln

from . import quadrature as qd
from .spectral import ONESIDED, DiscreteAtoms, EmptyTailError, StableModel, onesided_model


def _require_onesided(model: StableModel) -> DiscreteAtoms:
    if model.kind != ONESIDED:
        raise ValueError("expected a one-sided model")
    if not isinstance(model.spectral, DiscreteAtoms):
        raise ValueError("one-sided models are described by atoms")
    if not 0.0 < model.alpha < 1.0:
        raise ValueError("one-sided laws need alpha in (0, 1)")
    return model.spectral


def _nonneg(u, d: int) -> np.ndarray:
    U = np.atleast_2d(np.asarray(u, dtype=float))
    if U.shape[1] != d:
        raise ValueError(f"expected vectors of length {d}")
    if np.any(U < 0):
        raise ValueError("Laplace arguments must be coordinatewise nonnegative")
    return U


def laplace_exponent(model: StableModel, u):
    """psi(u) = sum_j w_j <u, s_j>**alpha for u >= 0."""
    sp = _require_onesided(model)
    U = _nonneg(u, model.dim)
    val = (U @ sp.directions.T) ** model.alpha @ sp.weights
    return float(val[0]) if np.ndim(u) == 1 else val


def laplace(model: StableModel, u):
    """E exp(-<xi, u>) = exp(-psi(u))."""
    return np.exp(-laplace_exponent(model, u))


# ------------------------------------------------------------ zonoids


def l1p_zonoid_support(Y, w, p: float, u):
    """h(K, u) = sum_j w_j ||y_j o u||_p for the L1(p)-zonoid with atoms (y_j, w_j).

    Each atom contributes the rescaled l_q-ball y_j B_q (1/p + 1/q = 1),
    whose support function at u is the l_p-norm of the coordinatewise
    product.  ``p = inf`` gives max-zonoids.
    """
    if not p >= 1.0:
        raise ValueError("L1(p)-zonoids need p >= 1")
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    w = np.asarray(w, dtype=float)
    if np.any(Y < 0) or np.any(w < 0):
        raise ValueError("atoms and weights must be nonnegative")
    U = np.atleast_2d(np.asarray(u, dtype=float))
    P = np.abs(U[:, None, :] * Y[None, :, :])
    if math.isinf(p):
        norms = P.max(axis=2)
    else:
        norms = np.linalg.norm(P, ord=p, axis=2)
    val = norms @ w
    return float(val[0]) if np.ndim(u) == 1 else val


class L1pZonoid(NamedTuple):
    atoms: np.ndarray
    weights: np.ndarray
    p: float


def assoc_zonoid(model: StableModel) -> L1pZonoid:
    """The L1(1/alpha)-zonoid K with psi(u) = h(K, u**alpha): atoms s_j**alpha."""
    sp = _require_onesided(model)
    a = model.alpha
    return L1pZonoid(sp.directions**a, sp.weights.copy(), 1.0 / a)


def assoc_zonoid_support(model: StableModel, u):
    """h(K, u**alpha), equal to psi(u)."""
    K = assoc_zonoid(model)
    U = _nonneg(u, model.dim)
    val = l1p_zonoid_support(K.atoms, K.weights, K.p, U**model.alpha)
    return float(val[0]) if np.ndim(u) == 1 else val


def substable_laplace_exponent(model: StableModel, beta: float, u):
    """Exponent of zeta**(1/alpha) xi with zeta positive beta-stable: psi(u)**beta."""
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    return laplace_exponent(model, u) ** beta


def lq_ball_support(u, scale, q: float):
    """Support function of the rescaled l_q-ball {x : ||x / scale||_q <= 1}."""
    U = np.atleast_2d(np.asarray(u, dtype=float))
    p = math.inf if q == 1.0 else (1.0 if math.isinf(q) else q / (q - 1.0))
    val = np.linalg.norm(U * np.asarray(scale, dtype=float), ord=p, axis=1)
    return float(val[0]) if np.ndim(u) == 1 else val


def onesided_tail_constant(alpha: float) -> float:
    """c with P(S > t) ~ c t**(-alpha) for E exp(-uS) = exp(-u**alpha)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return 1.0 / math.gamma(1.0 - alpha)


def estimate_onesided_spectral(samples, t: float, alpha: float) -> DiscreteAtoms:
    """Atoms of the Laplace exponent from the samples with norm at least t.

    Each exceedance contributes its direction with weight
    t**alpha / (n c_alpha), where c_alpha is the one-sided tail constant.
    """
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    n = X.shape[0]
    r = np.linalg.norm(X, axis=1)
    keep = r >= t
    m = int(keep.sum())
    if m == 0:
        raise EmptyTailError(f"no sample has norm >= {t}")
    S = X[keep] / r[keep, None]
    w = np.full(m, t**alpha / (n * onesided_tail_constant(alpha)))
    return DiscreteAtoms(S, w)


# ------------------------------------------------------------ p-sums


@dataclass(frozen=True, eq=False)
class PSumModel:
    """Law strictly stable for coordinatewise p-sums with exponent alpha <= p.

    ``core`` is the one-sided model of xi**p, with exponent alpha / p.
    """

    p: float
    alpha: float
    core: StableModel

    def __post_init__(self):
        if not (0.0 < self.p < math.inf):
            raise ValueError("finite p > 0 required (use maxstable_cdf for p = inf)")
        if not 0.0 < self.alpha < self.p:
            raise ValueError("need 0 < alpha < p")
        if abs(self.core.alpha - self.alpha / self.p) > 1e-14:
            raise ValueError("core exponent must equal alpha / p")
        _require_onesided(self.core)

    @property
    def dim(self) -> int:
        return self.core.dim


def psum_model(p: float, alpha: float, directions, weights=None) -> PSumModel:
    return PSumModel(float(p), float(alpha), onesided_model(alpha / p, directions, weights))


def psum_transform(model: PSumModel) -> StableModel:
    """Arithmetic-sum core of a p-sum model (the law of xi**p)."""
    return model.core


def psum_from_core(core: StableModel, p: float) -> PSumModel:
    """Inverse of psum_transform."""
    return PSumModel(float(p), core.alpha * p, core)


def psum_character(model: PSumModel, u):
    """E exp(-sum (u_i xi_i)**p) = exp(-h(K, u**alpha)) with K an L1(p/alpha)-zonoid."""
    U = _nonneg(u, model.dim)
    return laplace(model.core, U**model.p) if np.ndim(u) > 1 else float(laplace(model.core, U[0] ** model.p))


def psum_zonoid(model: PSumModel) -> L1pZonoid:
    """The L1(p/alpha)-zonoid of a p-sum model."""
    K = assoc_zonoid(model.core)
    return L1pZonoid(K.atoms, K.weights, model.p / model.alpha)


def psum_combine(X1, X2, p: float):
    """Coordinatewise p-sum (x**p + y**p)**(1/p); p = inf is the maximum."""
    X1 = np.asarray(X1, dtype=float)
    X2 = np.asarray(X2, dtype=float)
    if math.isinf(p):
        return np.maximum(X1, X2)
    return (X1**p + X2**p) ** (1.0 / p)


def maxstable_cdf(Y, w, u):
    """P(xi <= 1/u) = exp(-sum_j w_j max_i u_i y_ji) for strictly positive u."""
    U = np.atleast_2d(np.asarray(u, dtype=float))
    if np.any(U <= 0):
        raise ValueError("max-zonoid CDF needs strictly positive u")
    val = np.exp(-l1p_zonoid_support(Y, w, math.inf, U))
    return float(val[0]) if np.ndim(u) == 1 else val


# ------------------------------------------------------------ moments


def onesided_moment_pos(model: StableModel, u, beta: float) -> float:
    """E<xi,u>**beta = Gamma(1 - beta/alpha)/Gamma(1 - beta) psi(u)**(beta/alpha), beta in (0, alpha)."""
    a = model.alpha
    if not 0.0 < beta < a:
        raise ValueError("beta must lie in (0, alpha)")
    psi = laplace_exponent(model, np.asarray(u, dtype=float))
    if psi <= 0:
        raise ValueError("psi(u) must be positive")
    return float(math.exp(gammaln(1.0 - beta / a) - gammaln(1.0 - beta)) * psi ** (beta / a))


def onesided_moment_neg(model: StableModel, u, lam: float) -> float:
    """E<xi,u>**(-lam-1) = Gamma((1+lam)/alpha)/(alpha Gamma(1+lam)) psi(u)**(-(1+lam)/alpha), lam > -1."""
    a = model.alpha
    if not lam > -1.0:
        raise ValueError("lambda must exceed -1")
    psi = laplace_exponent(model, np.asarray(u, dtype=float))
    if psi <= 0:
        raise ValueError("psi(u) must be positive")
    return float(math.exp(gammaln((1.0 + lam) / a) - gammaln(1.0 + lam)) / a * psi ** (-(1.0 + lam) / a))


def laplace_ordering(m1: StableModel, m2: StableModel, n_nodes: int = 2000, tol: float = 1e-12) -> str:
    """Compare Laplace transforms pointwise on the positive orthant.

    Returns ``"<="`` if L1 <= L2 everywhere (psi1 >= psi2), ``">="`` for the
    reverse, ``"=="`` when both hold and ``"incomparable"`` otherwise.
    Both exponents are homogeneous, so unit directions suffice.
    """
    _require_onesided(m1)
    _require_onesided(m2)
    if m1.dim != m2.dim or m1.alpha != m2.alpha:
        raise ValueError("models must share dimension and exponent")
    U = np.abs(qd.fibonacci_directions(n_nodes)) if m1.dim > 2 else None
    if m1.dim == 2:
        th = np.linspace(0.0, 0.5 * np.pi, n_nodes)
        U = np.column_stack([np.cos(th), np.sin(th)])
    if m1.dim == 1:
        U = np.ones((1, 1))
    U = np.vstack([U, np.eye(m1.dim)])
    p1 = laplace_exponent(m1, U)
    p2 = laplace_exponent(m2, U)
    scale = np.maximum(np.maximum(p1, p2), 1e-300)
    le = bool(np.all(p1 >= p2 - tol * scale))
    ge = bool(np.all(p2 >= p1 - tol * scale))
    if le and ge:
        return "=="
    if le:
        return "<="
    if ge:
        return ">="
    return "incomparable"
