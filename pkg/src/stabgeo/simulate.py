"""Seeded samplers and Monte Carlo estimators.

Randomness comes from numpy's PCG64.  A batch of n draws is split into
fixed chunks of ``CHUNK`` rows; chunk k uses ``PCG64(seed).jumped(k)``, so
the output does not depend on how many worker threads (``STABGEO_THREADS``)
process the chunks.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .onesided import PSumModel
from .spectral import (
    ONESIDED,
    SYMMETRIC,
    DiscreteAtoms,
    ExplicitGauge,
    Isotropic,
    SphericalDensity,
    StableModel,
    model_fingerprint,
)

RNG_NAME = "numpy.PCG64"
RNG_VERSION = 1
CHUNK = 1 << 16
_HEADER = "# stabgeo-batch"


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("STABGEO_THREADS", "1")))
    except ValueError:
        return 1


def _check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def _chunked(n: int, seed: int, draw: Callable[[np.random.Generator, int], np.ndarray]) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be at least 1")
    seed = _check_seed(seed)
    sizes = [min(CHUNK, n - s) for s in range(0, n, CHUNK)]
    base = np.random.PCG64(seed)

    def job(k):
        return draw(np.random.Generator(base.jumped(k)), sizes[k])

    workers = min(_threads(), len(sizes))
    if workers == 1:
        parts = [job(k) for k in range(len(sizes))]
    else:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(job, range(len(sizes))))
    return np.concatenate(parts, axis=0)


# ------------------------------------------------------------ scalar laws


def _sas(rng: np.random.Generator, alpha: float, shape) -> np.ndarray:
    """Chambers-Mallows-Stuck draws with E exp(iuX) = exp(-|u|**alpha)."""
    if alpha == 2.0:
        return math.sqrt(2.0) * rng.standard_normal(shape)
    V = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, shape)
    W = rng.standard_exponential(shape)
    if alpha == 1.0:
        return np.tan(V)
    return (np.sin(alpha * V) / np.cos(V) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * V) / W) ** ((1.0 - alpha) / alpha))


def _positive(rng: np.random.Generator, alpha: float, shape) -> np.ndarray:
    """Kanter draws with E exp(-uS) = exp(-u**alpha).

    Evaluated in logs: for alpha close to 1 the powers 1/(1 - alpha) of the
    sine factors underflow separately although their ratio is moderate.
    """
    U = np.maximum(rng.uniform(0.0, 1.0, shape), 1e-300)
    W = rng.standard_exponential(shape)
    a = alpha
    b = (1.0 - a) / a
    logS = (np.log(np.sin(a * np.pi * U)) + b * np.log(np.sin((1.0 - a) * np.pi * U))
            - np.log(np.sin(np.pi * U)) / a - b * np.log(W))
    return np.exp(logS)


def sample_sas_scalar(alpha: float, n: int, seed: int) -> np.ndarray:
    """n standard symmetric alpha-stable draws (alpha = 2 gives N(0, 2))."""
    if not 0.0 < alpha <= 2.0:
        raise ValueError("alpha must lie in (0, 2]")
    return _chunked(n, seed, lambda rng, m: _sas(rng, alpha, m))


def sample_positive_stable(alpha: float, n: int, seed: int) -> np.ndarray:
    """n positive strictly stable draws with Laplace transform exp(-u**alpha)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return _chunked(n, seed, lambda rng, m: _positive(rng, alpha, m))


# ------------------------------------------------------------ vectors


@dataclass(frozen=True, eq=False)
class SampleBatch:
    data: np.ndarray
    seed: int
    fingerprint: str
    alpha: float
    kind: str

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def to_csv(self, path) -> None:
        header = f"stabgeo-batch alpha={self.alpha!r} kind={self.kind} seed={self.seed} fingerprint={self.fingerprint}"
        np.savetxt(path, self.data, delimiter=",", fmt="%.17g", header=header, comments="# ")

    @classmethod
    def from_csv(cls, path) -> "SampleBatch":
        with open(path) as fh:
            first = fh.readline()
        meta = {}
        if first.startswith(_HEADER):
            for tok in first[len(_HEADER):].split():
                k, _, v = tok.partition("=")
                meta[k] = v
        data = read_samples(path)
        return cls(data, int(meta.get("seed", -1)), meta.get("fingerprint", ""),
                   float(meta.get("alpha", "nan")), meta.get("kind", SYMMETRIC))


def read_samples(path) -> np.ndarray:
    """CSV with one vector per row; comment lines and a text header are skipped."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rows.append([float(t) for t in line.split(",")])
            except ValueError:
                if rows:
                    raise
                continue  # header row
    if not rows:
        return np.zeros((0, 0))
    return np.asarray(rows, dtype=float)


def _atoms(model: StableModel) -> Optional[DiscreteAtoms]:
    sp = model.spectral
    if isinstance(sp, DiscreteAtoms):
        return sp
    if isinstance(sp, SphericalDensity):
        return sp.as_atoms()
    return None


def _vector_draw(model: StableModel) -> Callable[[np.random.Generator, int], np.ndarray]:
    a, d = model.alpha, model.dim
    at = _atoms(model)
    if at is not None:
        M = at.weights[:, None] ** (1.0 / a) * at.directions
        if model.kind == ONESIDED:
            return lambda rng, m: _positive(rng, a, (m, M.shape[0])) @ M
        return lambda rng, m: _sas(rng, a, (m, M.shape[0])) @ M
    sp = model.spectral
    if isinstance(sp, Isotropic):
        from .geometry import gauge

        s = float(gauge(model, np.eye(d)[0]))
        return _subgaussian_draw(2.0 * s * s * np.eye(d), a)
    if isinstance(sp, ExplicitGauge) and sp.label == "substable" and sp.base is not None:
        base = sp.base
        inner = _vector_draw(base)
        beta = a / base.alpha

        def sub(rng, m):
            z = _positive(rng, beta, m)
            return z[:, None] ** (1.0 / base.alpha) * inner(rng, m)
        return sub
    if isinstance(sp, ExplicitGauge) and sp.matrix is not None and sp.base is None:
        return _subgaussian_draw(np.asarray(sp.matrix), a)
    raise ValueError(f"cannot sample from a model given by an explicit gauge ({sp.label})")


def _subgaussian_draw(C: np.ndarray, alpha: float):
    L = np.linalg.cholesky(C)

    def draw(rng, m):
        G = rng.standard_normal((m, C.shape[0])) @ L.T
        if alpha == 2.0:
            return G
        A = _positive(rng, alpha / 2.0, m)
        return np.sqrt(A)[:, None] * G
    return draw


def sample_vector(model: StableModel, n: int, seed: int) -> SampleBatch:
    """Draws of xi; for atoms xi = sum_j w_j**(1/alpha) s_j X_j with i.i.d. standard X_j."""
    data = _chunked(n, seed, _vector_draw(model))
    return SampleBatch(data, int(seed), model_fingerprint(model), model.alpha, model.kind)


def sample_subgaussian(C, alpha: float, n: int, seed: int) -> SampleBatch:
    """sqrt(A) G with G ~ N(0, C) and A positive alpha/2-stable."""
    from .spectral import subgaussian_model

    return sample_vector(subgaussian_model(np.asarray(C, dtype=float), alpha), n, seed)


def sample_substable(model: StableModel, beta: float, n: int, seed: int) -> SampleBatch:
    """zeta**(1/alpha) xi with zeta positive beta-stable."""
    from .geometry import substable_transform

    return sample_vector(substable_transform(model, beta), n, seed)


def sample_onesided(model: StableModel, n: int, seed: int) -> SampleBatch:
    if model.kind != ONESIDED:
        raise ValueError("expected a one-sided model")
    return sample_vector(model, n, seed)


def sample_psum(model: PSumModel, n: int, seed: int) -> np.ndarray:
    """Draws of a p-sum stable vector: the core draws raised to 1/p."""
    return sample_onesided(model.core, n, seed).data ** (1.0 / model.p)


# ------------------------------------------------------------ estimators


def mc_functional(batch, functional: Callable[[np.ndarray], np.ndarray]) -> Tuple[float, float]:
    """Sample mean and standard error of functional(rows)."""
    X = batch.data if isinstance(batch, SampleBatch) else np.asarray(batch, dtype=float)
    if X.shape[0] == 0:
        raise ValueError("empty batch")
    v = np.asarray(functional(X), dtype=float)
    return mean_se(v)


def mean_se(v) -> Tuple[float, float]:
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("no values")
    m = float(np.mean(v))
    se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return m, se


def median_of_means(v, blocks: int = 32) -> Tuple[float, float]:
    """Median of block means with the asymptotic standard error sqrt(pi/2) sd/sqrt(k)."""
    v = np.asarray(v, dtype=float).ravel()
    k = min(blocks, v.size)
    means = np.array([b.mean() for b in np.array_split(v, k)])
    return float(np.median(means)), float(math.sqrt(0.5 * np.pi) * np.std(means, ddof=1) / math.sqrt(k))


def tail_corrected_values(v, index: float, level: float = 1e-3) -> np.ndarray:
    """Per-draw values of the tail-corrected mean estimator.

    |v| is assumed to have a Pareto tail with the given index > 1.  Values
    beyond the empirical (1 - level)-quantile T of |v| are replaced by
    sign(v) (T + T/(index - 1)), the conditional mean of a Pareto tail.
    """
    if not index > 1.0:
        raise ValueError("tail index must exceed 1 for a finite mean")
    v = np.asarray(v, dtype=float).ravel()
    if math.isinf(index):
        return v
    T = float(np.quantile(np.abs(v), 1.0 - level))
    big = np.abs(v) > T
    return np.clip(v, -T, T) + np.sign(v) * big * (T / (index - 1.0))


def tail_corrected_mean(v, index: float, level: float = 1e-3) -> Tuple[float, float]:
    """Mean of a heavy-tailed variable with a Pareto tail extrapolation.

    The estimator is an ordinary sample mean of bounded values, so its
    standard error is the usual one.
    """
    return mean_se(tail_corrected_values(v, index, level))


def ratio_mean(num, den) -> Tuple[float, float]:
    """mean(num)/mean(den) with the delta-method standard error."""
    num = np.asarray(num, dtype=float).ravel()
    den = np.asarray(den, dtype=float).ravel()
    d = float(np.mean(den))
    r = float(np.mean(num)) / d
    _, se = mean_se((num - r * den) / d)
    return r, se


def heavy_mean(v, index: float, level: float = 1e-3) -> Tuple[float, float]:
    """Plain mean when the variance is finite (index > 2), tail-corrected otherwise."""
    if index > 2.0:
        return mean_se(v)
    return tail_corrected_mean(v, index, level)


def empirical_charfun(batch, U) -> np.ndarray:
    """Real part of the empirical characteristic function at the rows of U."""
    X = batch.data if isinstance(batch, SampleBatch) else np.asarray(batch, dtype=float)
    U = np.atleast_2d(np.asarray(U, dtype=float))
    out = np.zeros(U.shape[0])
    for i in range(0, X.shape[0], CHUNK):
        out += np.cos(X[i:i + CHUNK] @ U.T).sum(axis=0)
    return out / X.shape[0]


def empirical_laplace(batch, U) -> np.ndarray:
    X = batch.data if isinstance(batch, SampleBatch) else np.asarray(batch, dtype=float)
    U = np.atleast_2d(np.asarray(U, dtype=float))
    out = np.zeros(U.shape[0])
    for i in range(0, X.shape[0], CHUNK):
        out += np.exp(-(X[i:i + CHUNK] @ U.T)).sum(axis=0)
    return out / X.shape[0]


def estimate_zonoid_from_samples(batch, alpha: float, directions) -> Tuple[np.ndarray, np.ndarray]:
    """Mean of (1/2)|<xi, u>| per direction, with standard errors.

    For alpha in (1, 2] this estimates h(K, u) Gamma(1 - 1/alpha)/pi; the
    mean uses the tail correction since the variance is infinite for
    alpha < 2.
    """
    if not alpha > 1.0:
        raise ValueError("the zonoid of a random vector needs alpha > 1")
    X = batch.data if isinstance(batch, SampleBatch) else np.asarray(batch, dtype=float)
    if X.shape[0] == 0:
        raise ValueError("empty batch")
    U = np.atleast_2d(np.asarray(directions, dtype=float))
    vals, ses = [], []
    for u in U:
        m, s = heavy_mean(0.5 * np.abs(X @ u), alpha if alpha < 2.0 else math.inf)
        vals.append(m)
        ses.append(s)
    return np.array(vals), np.array(ses)


def zonoid_scale(alpha: float) -> float:
    """pi / Gamma(1 - 1/alpha): maps the sample-zonoid estimate to the gauge."""
    return math.pi / math.gamma(1.0 - 1.0 / alpha)


def zscore(formula: float, mc: float, se: float, formula_err: float = 0.0) -> float:
    den = math.sqrt(se * se + formula_err * formula_err)
    if den == 0.0:
        return 0.0 if formula == mc else math.inf
    return abs(formula - mc) / den
