"""Scikit-learn style estimators wrapping the maximum-likelihood fits.

Each estimator follows the fit/score_samples/sample conventions of
``sklearn.mixture`` models: ``fit(X)`` runs the multi-start ML procedure,
after which ``score_samples`` gives per-point log-densities, ``sample``
draws from the fitted distribution, and ``aic_``/``bic_``/``ks_stat_``
summarize fit quality.  ``get_params``/``set_params`` come from
``BaseEstimator``, so the classes compose with pipelines and model-selection
utilities.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, DensityMixin
from sklearn.exceptions import NotFittedError

from ._validation import as_samples
from .fit import Dataset, MODELS, distribution_for, fit_ml
from .numerics import OptimizerConfig, RngStream


class _MLDensityEstimator(BaseEstimator, DensityMixin):
    """Shared fit machinery; subclasses pin the model family."""

    _family = None          # e.g. "bun"
    _has_symmetric = True

    def __init__(self, symmetric=False, n_starts=8, max_iters=20000, random_state=42):
        self.symmetric = symmetric
        self.n_starts = n_starts
        self.max_iters = max_iters
        self.random_state = random_state

    def _model_name(self):
        if self.symmetric:
            if not self._has_symmetric:
                raise ValueError(f"{type(self).__name__} has no symmetric variant")
            return f"{self._family}-sym"
        return self._family

    def fit(self, X, y=None):
        x = as_samples(X)
        cfg = OptimizerConfig(x_tol=1e-10, f_tol=1e-12, grad_tol=1e-8,
                              max_iters=self.max_iters, n_starts=self.n_starts)
        report = fit_ml(Dataset(x), self._model_name(), cfg=cfg,
                        rng=RngStream(self.random_state))
        self.report_ = report
        self.params_ = dict(report.estimates)
        self.loglik_ = report.loglik
        self.aic_ = report.aic
        self.bic_ = report.bic
        self.ks_stat_ = report.ks_stat
        self.ks_pvalue_ = report.ks_pvalue
        self.converged_ = report.converged
        self.distribution_ = distribution_for(report)
        return self

    def _check_fitted(self):
        if not hasattr(self, "distribution_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet")

    def score_samples(self, X):
        self._check_fitted()
        return self.distribution_.log_pdf(as_samples(X))

    def score(self, X, y=None):
        return float(np.mean(self.score_samples(X)))

    def cdf(self, X):
        self._check_fitted()
        return self.distribution_.cdf(as_samples(X))

    def sample(self, n_samples=1, random_state=None):
        self._check_fitted()
        seed = self.random_state if random_state is None else random_state
        draws = self.distribution_.sample(int(n_samples), RngStream(seed))
        return np.asarray(draws, float).reshape(-1, 1)


class BUNEstimator(_MLDensityEstimator):
    """ML estimator for the bimodal-unimodal normal family."""

    _family = "bun"


class BUStEstimator(_MLDensityEstimator):
    """ML estimator for the bimodal-unimodal Student-t family."""

    _family = "bust"


class BULEstimator(_MLDensityEstimator):
    """ML estimator for the bimodal-unimodal Laplace family."""

    _family = "bul"


class LogBUNEstimator(_MLDensityEstimator):
    """ML estimator for the log-BUN lifetime family (positive data)."""

    _family = "logbun"
    _has_symmetric = False


__all__ = ["BUNEstimator", "BUStEstimator", "BULEstimator", "LogBUNEstimator"]
