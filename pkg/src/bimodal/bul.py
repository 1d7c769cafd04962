"""Bimodal-unimodal Laplace (BUL) distribution.

``BUL(mu, sigma, k, a)`` has density proportional to
``(1 + ((x - mu - a)/sigma)^2) * exp(-k |x - mu| / sigma)`` with k > 0.
A quadratic factor pushes mass away from ``mu + a`` while the Laplace tilt
pulls it back toward ``mu``; the competition yields one, two or three local
maxima.  The CDF has a piecewise closed form (the antiderivative of a
quadratic times an exponential), and the standardized moments expand in the
moments of a Laplace variable with scale 1/k.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .base import Density, is_local_max


@dataclass(frozen=True)
class BULParams:
    mu: float
    sigma: float
    k: float
    a: float = 0.0

    def __post_init__(self):
        vals = (self.mu, self.sigma, self.k, self.a)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("BUL parameters must be finite")
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")
        if self.k <= 0:
            raise ValueError("k must be > 0 (integrability of the tilt)")


def _laplace_moment(s, k):
    """s-th moment of a Laplace(0, 1/k) variable: s!/k^s for even s, else 0."""
    return factorial(s) / k ** s if s % 2 == 0 else 0.0


class BUL(Density):
    """Bimodal-unimodal Laplace distribution."""

    def __init__(self, mu, sigma, k, a=0.0):
        self.params = BULParams(float(mu), float(sigma), float(k), float(a))
        self.mu, self.sigma, self.k, self.a = mu, sigma, k, a
        self.b = a / sigma
        self.c = 2.0 * (1.0 + self.b ** 2 + 2.0 / (k * k))

    # -- pdf / cdf ------------------------------------------------------------

    def log_pdf(self, x):
        u = (np.asarray(x, float) - self.mu) / self.sigma
        return (np.log(self.k) - np.log(self.sigma) - np.log(self.c)
                + np.log1p((u - self.b) ** 2) - self.k * np.abs(u))

    def cdf(self, x):
        u = (np.asarray(x, float) - self.mu) / self.sigma
        k, b, c = self.k, self.b, self.c
        v = u - b
        un = np.minimum(u, 0.0)
        up = np.maximum(u, 0.0)
        low = np.exp(k * un) * (1.0 + v * v - 2.0 * v / k + 2.0 / (k * k)) / c
        high = 1.0 - np.exp(-k * up) * (1.0 + v * v + 2.0 * v / k + 2.0 / (k * k)) / c
        return np.clip(np.where(u <= 0, low, high), 0.0, 1.0)

    def _quantile_bracket(self):
        w = self.sigma * (abs(self.b) + 1.0 + 50.0 / self.k)
        return self.mu - w, self.mu + w

    # -- moments ---------------------------------------------------------------

    def moment(self, r):
        """E[Z^r] of the standardized variable Z = (X - mu)/sigma, r in 1..6,
        via the Laplace-moment expansion."""
        r = int(r)
        if not 1 <= r <= 6:
            raise ValueError("moment order must be in {1,...,6}")
        k, b, c = self.k, self.b, self.c
        return float((2.0 / c) * ((1.0 + b * b) * _laplace_moment(r, k)
                                  - 2.0 * b * _laplace_moment(r + 1, k)
                                  + _laplace_moment(r + 2, k)))

    # -- modes -------------------------------------------------------------------

    def stationary_points(self):
        """Positive-side stationary points of the symmetric (a = 0) density:
        roots of k u^2 - 2 u + k = 0, i.e. u = (1 +- sqrt(1 - k^2))/k for
        k < 1 (none for k >= 1)."""
        k = self.k
        if k >= 1.0:
            return []
        root = np.sqrt(1.0 - k * k)
        return [(1.0 - root) / k, (1.0 + root) / k]

    def modes(self):
        """All strict local maxima, ascending.

        For a = 0 the candidates are analytic: the kink at mu plus the
        mirrored outer stationary points when k < 1 (the inner pair are
        minima).  For a != 0 the stationary structure shifts and the search
        is numeric.
        """
        mu, sigma = self.mu, self.sigma
        if self.a == 0.0:
            cand = [mu]
            for u in self.stationary_points():
                cand += [mu - sigma * u, mu + sigma * u]
            h = 1e-4 * max(1.0, sigma)
            return sorted(m for m in set(cand) if is_local_max(self.pdf, m, h=h))
        return self.numeric_modes()

    # -- likelihood -----------------------------------------------------------

    def loglik(self, x):
        x = np.asarray(x, float)
        n = x.size
        mu, sg, k, b = self.mu, self.sigma, self.k, self.b
        u = (x - mu) / sg
        return float(n * np.log(k / (2.0 * sg)) - n * np.log(1.0 + b * b + 2.0 / (k * k))
                     - k * np.sum(np.abs(u)) + np.sum(np.log1p((u - b) ** 2)))

    def score(self, x):
        """Gradient of ``loglik`` in (mu, sigma, k, a); sign(0) := 0."""
        x = np.asarray(x, float)
        n = x.size
        mu, sg, k, a, b = self.mu, self.sigma, self.k, self.a, self.b
        cc = 1.0 + b * b + 2.0 / (k * k)
        u = (x - mu) / sg
        v = u - b
        w = v / (1.0 + v * v)
        d_mu = (k / sg) * np.sum(np.sign(x - mu)) - (2.0 / sg) * np.sum(w)
        d_sigma = (-n / sg + 2.0 * n * a * a / (sg ** 3 * cc)
                   + (k / sg ** 2) * np.sum(np.abs(x - mu)) - (2.0 / sg) * np.sum(v * w))
        d_k = n / k + 4.0 * n / (k ** 3 * cc) - np.sum(np.abs(u))
        d_a = -2.0 * n * a / (sg ** 2 * cc) - (2.0 / sg) * np.sum(w)
        return np.array([d_mu, d_sigma, d_k, d_a])
