"""Log-BUN lifetime distribution: T = exp(X) with X bimodal-unimodal normal.

Reduces to the lognormal at k = 0, a = 0.  Raw moments follow from the MGF
of the standardized parent, E[T^r] = e^{r mu} M_Z(r sigma); the hazard is
pdf / survival.
"""

from __future__ import annotations

import numpy as np

from .base import Density
from .bun import BUN, BUNParams
from .numerics import RngStream


class LogBUN(Density):
    """Lifetime distribution of exp(X) for X ~ BUN(mu, sigma, k, a)."""

    support = (0.0, np.inf)

    def __init__(self, mu, sigma, k, a=0.0):
        self.params = BUNParams(float(mu), float(sigma), float(k), float(a))
        self.mu, self.sigma, self.k, self.a = mu, sigma, k, a
        self.parent = BUN(mu, sigma, k, a)

    def log_pdf(self, t):
        t = np.asarray(t, float)
        if np.any(t <= 0):
            raise ValueError("log_pdf requires t > 0")
        return self.parent.log_pdf(np.log(t)) - np.log(t)

    def cdf(self, t):
        t = np.asarray(t, float)
        out = np.zeros(np.shape(t))
        pos = t > 0
        safe = np.where(pos, t, 1.0)
        out = np.where(pos, self.parent.cdf(np.log(safe)), 0.0)
        return out if np.ndim(t) else float(out)

    def quantile(self, p):
        return np.exp(self.parent.quantile(p))

    def sample(self, n, rng=None):
        return np.exp(self.parent.sample(n, rng or RngStream()))

    def moment(self, r):
        """E[T^r] = e^{r mu} M_Z(r sigma) with M_Z the MGF of the
        standardized parent; r = 0 gives 1."""
        if r == 0:
            return 1.0
        return float(np.exp(r * self.mu) * self.parent.mgf(r * self.sigma))

    def hazard(self, t):
        t = np.asarray(t, float)
        surv = 1.0 - self.cdf(t)
        if np.any(np.asarray(surv) <= 0):
            raise OverflowError("survival underflowed to 0; hazard undefined at this t")
        return self.pdf(t) / surv
