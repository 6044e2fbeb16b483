"""scikit-learn style estimators built on the sample-based routines.

Both estimators are unsupervised: ``fit(X)`` takes samples of the stable
vector.  They do not transform X; instead they expose the fitted body
through ``gauge(U)`` / ``predict(U)`` evaluated at directions U.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import geometry as geo
from . import simulate as sim
from ._validation import check_alpha, check_directions, check_samples
from .spectral import (
    SYMMETRIC,
    DiscreteAtoms,
    StableModel,
    estimate_spectral_from_samples,
    tail_mass_estimate,
)


class SpectralMeasureEstimator(BaseEstimator):
    """Tail estimate of the spectral measure from samples.

    The directions of the samples whose norm exceeds the threshold give
    the shape of the measure and the exceedance frequency gives its total
    mass.  The threshold is either given (``threshold``) or taken as the
    empirical ``quantile`` of the sample norms.
    """

    def __init__(self, alpha=1.0, threshold=None, quantile=0.999, n_bins=None):
        self.alpha = alpha
        self.threshold = threshold
        self.quantile = quantile
        self.n_bins = n_bins

    def fit(self, X, y=None):
        X = check_samples(X)
        a = check_alpha(self.alpha, closed_high=False)
        norms = np.linalg.norm(X, axis=1)
        t = float(self.threshold) if self.threshold is not None else float(np.quantile(norms, self.quantile))
        shape = estimate_spectral_from_samples(X, t, SYMMETRIC, self.n_bins)
        mass = tail_mass_estimate(X, t, a)
        self.threshold_ = t
        self.n_exceed_ = int(np.sum(norms >= t))
        self.spectral_ = DiscreteAtoms(shape.directions, shape.weights * mass)
        self.model_ = StableModel(a, self.spectral_, X.shape[1])
        return self

    def gauge(self, U):
        check_is_fitted(self, "model_")
        return geo.gauge(self.model_, check_directions(U, self.model_.dim))

    def predict(self, U):
        return self.gauge(U)


class ZonoidSupportEstimator(BaseEstimator):
    """Support function of the associated zonoid from samples (alpha > 1).

    h(K, u) is estimated by pi / Gamma(1 - 1/alpha) times the mean of
    |<xi, u>| / 2, with a Pareto tail correction of the mean.
    """

    def __init__(self, alpha=1.5, tail_level=1e-3):
        self.alpha = alpha
        self.tail_level = tail_level

    def fit(self, X, y=None):
        X = check_samples(X, min_samples=2)
        check_alpha(self.alpha, low=1.0)
        self.samples_ = X
        self.n_features_in_ = X.shape[1]
        return self

    def _estimate(self, U):
        check_is_fitted(self, "samples_")
        U = check_directions(U, self.n_features_in_)
        est, se = sim.estimate_zonoid_from_samples(self.samples_, float(self.alpha), U)
        c = sim.zonoid_scale(float(self.alpha))
        return c * est, c * se

    def predict(self, U):
        return self._estimate(U)[0]

    def predict_se(self, U):
        return self._estimate(U)[1]
