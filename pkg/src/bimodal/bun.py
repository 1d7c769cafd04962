"""Bimodal-unimodal normal (BUN) distribution.

``BUN(mu, sigma, k, a)`` multiplies a normal kernel located at ``mu + a``
by the tilt ``exp(k |x - mu| / sigma)``.  The family is symmetric about
``mu`` when ``a = 0``, reduces to the normal when ``k = 0``, and is bimodal
exactly when ``sigma * k > |a|``.  Everything below has a closed form: the
normalizer, CDF, MGF, the first four standardized moments, the mode set,
the two-truncated-normal mixture representation, and the score vector of
the log-likelihood.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .base import Density, is_local_max
from .numerics import (RngStream, norm_cdf, norm_log_cdf, norm_pdf,
                       norm_quantile, _LOG_2PI)


@dataclass(frozen=True)
class BUNParams:
    mu: float
    sigma: float
    k: float
    a: float = 0.0

    def __post_init__(self):
        vals = (self.mu, self.sigma, self.k, self.a)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("BUN parameters must be finite")
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")


@dataclass(frozen=True)
class BUNAux:
    """Cached pieces of the normalizer and moment formulas (z-space)."""

    p_t: float   # e^{kb} Phi(k+b)
    n_t: float   # e^{-kb} Phi(k-b)
    delta: float
    log_delta: float
    p_k: float   # k + b
    n_k: float   # k - b
    n_d: float   # e^{-kb} phi(k-b) = e^{kb} phi(k+b)
    p: float     # weight of the left truncated component
    s: float     # (p_t - n_t) / delta
    rho: float   # 2 e^{kb} phi(k+b) / delta


@dataclass(frozen=True)
class TruncatedNormalSpec:
    """Standard-deviation-1 normal truncated to (lower, upper), z-space."""

    mean: float
    sd: float
    lower: float
    upper: float


def _aux(k, b):
    log_pt = k * b + norm_log_cdf(k + b)
    log_nt = -k * b + norm_log_cdf(k - b)
    log_delta = logsumexp([log_pt, log_nt])
    p_t, n_t = np.exp(log_pt), np.exp(log_nt)
    delta = np.exp(log_delta)
    n_d = float(np.exp(-k * b) * norm_pdf(k - b))
    return BUNAux(p_t=float(p_t), n_t=float(n_t), delta=float(delta),
                  log_delta=float(log_delta), p_k=k + b, n_k=k - b, n_d=n_d,
                  p=float(np.exp(log_nt - log_delta)),
                  s=float((p_t - n_t) / delta),
                  rho=float(2.0 * n_d / delta))


class BUN(Density):
    """Bimodal-unimodal normal distribution."""

    def __init__(self, mu, sigma, k, a=0.0):
        self.params = BUNParams(float(mu), float(sigma), float(k), float(a))
        self.mu, self.sigma, self.k, self.a = mu, sigma, k, a
        self.b = a / sigma
        self.aux = _aux(self.k, self.b)
        # log normalizer of the z-space pdf: c^-1 = e^{k^2/2} * delta
        self._log_cinv = 0.5 * k * k + self.aux.log_delta

    # -- pdf / cdf ---------------------------------------------------------

    def log_pdf(self, x):
        z = (np.asarray(x, float) - self.mu) / self.sigma
        return (-self._log_cinv + self.k * np.abs(z)
                - 0.5 * (z - self.b) ** 2 - 0.5 * _LOG_2PI - np.log(self.sigma))

    def cdf(self, x):
        z = (np.asarray(x, float) - self.mu) / self.sigma
        k, b = self.k, self.b
        left = np.exp(-k * b) * norm_cdf(z + k - b)
        right = (self.aux.n_t
                 + np.exp(k * b) * (norm_cdf(z - k - b) - norm_cdf(-k - b)))
        out = np.where(z <= 0, left, right) / self.aux.delta
        return np.clip(out, 0.0, 1.0)

    def _quantile_bracket(self):
        w = self.sigma * (abs(self.k) + abs(self.b) + 8.0)
        return self.mu - w, self.mu + w

    # -- stochastic representation ----------------------------------------

    def mixture(self):
        """Two-truncated-normal mixture of the standardized variable:
        weight ``p`` on the left component (support z < 0)."""
        b, k = self.b, self.k
        left = TruncatedNormalSpec(mean=b - k, sd=1.0, lower=-np.inf, upper=0.0)
        right = TruncatedNormalSpec(mean=b + k, sd=1.0, lower=0.0, upper=np.inf)
        return self.aux.p, left, right

    def mixture_pdf_z(self, z):
        """Mixture density in z-space; equals the standardized pdf pointwise."""
        z = np.asarray(z, float)
        p, left, right = self.mixture()
        fl = norm_pdf(z - left.mean) / norm_cdf(-left.mean)
        fr = norm_pdf(z - right.mean) / norm_cdf(right.mean)
        return np.where(z < 0, p * fl, (1.0 - p) * fr)

    def sample(self, n, rng=None):
        rng = rng or RngStream()
        n = int(n)
        u_sel = rng.uniform(size=n)
        u = rng.uniform(size=n)
        p, left, right = self.mixture()
        m1, m2 = left.mean, right.mean
        # inverse-CDF draws for each truncated component
        z_left = m1 + norm_quantile(np.clip(u * norm_cdf(-m1), 1e-300, 1.0 - 1e-16))
        tail = norm_cdf(-m2)
        z_right = m2 + norm_quantile(np.clip(tail + u * (1.0 - tail), 1e-300, 1.0 - 1e-16))
        z = np.where(u_sel < p, z_left, z_right)
        return self.mu + self.sigma * z

    # -- moments -----------------------------------------------------------

    def mgf(self, t):
        """MGF of the standardized variable Z = (X - mu) / sigma."""
        t = np.asarray(t, float)
        k, b = self.k, self.b
        num = logsumexp(np.stack([
            (k + t) * b + 0.5 * (k + t) ** 2 + norm_log_cdf(k + b + t),
            -(k - t) * b + 0.5 * (k - t) ** 2 + norm_log_cdf(k - b - t)]), axis=0)
        return np.exp(num - self._log_cinv)

    def moments(self):
        """(E Z, E Z^2, E Z^3, E Z^4) of the standardized variable."""
        aux = self.aux
        pt, nt, d = aux.p_t, aux.n_t, aux.delta
        pk, nk, nd = aux.p_k, aux.n_k, aux.n_d
        k, b = self.k, self.b
        m1 = (pk * pt - nk * nt) / d
        m2 = ((1 + pk ** 2) * pt + (1 + nk ** 2) * nt + 2 * k * nd) / d
        m3 = ((3 * pk + pk ** 3) * pt - (3 * nk + nk ** 3) * nt + 4 * k * b * nd) / d
        m4 = ((3 + 6 * pk ** 2 + pk ** 4) * pt + (3 + 6 * nk ** 2 + nk ** 4) * nt
              + (2 * k ** 3 + 10 * k + 6 * b * b * k) * nd) / d
        return m1, m2, m3, m4

    # -- modes ---------------------------------------------------------------

    def modes(self):
        """Mode set, ascending.  Bimodal iff sigma*k > |a|; each returned
        point is verified to be a local maximum of the pdf."""
        mu, sigma, k, a = self.mu, self.sigma, self.k, self.a
        sk = sigma * k
        if sk > abs(a):
            cand = [mu + a - sk, mu + a + sk]
        elif sk <= -abs(a):
            cand = [mu]
        elif a < 0:
            cand = [mu + a - sk]
        else:
            cand = [mu + a + sk]
        return sorted(m for m in cand
                      if is_local_max(self.pdf, m, h=1e-5 * max(1.0, sigma)))

    # -- likelihood ----------------------------------------------------------

    def loglik(self, x):
        x = np.asarray(x, float)
        n = x.size
        mu, sg, k, a = self.mu, self.sigma, self.k, self.a
        return float(-n * k * k / 2 - n * np.log(sg) - n * self.aux.log_delta
                     - n / 2 * _LOG_2PI + (k / sg) * np.sum(np.abs(x - mu))
                     - 0.5 * np.sum(((x - mu - a) / sg) ** 2))

    def score(self, x):
        """Gradient of ``loglik`` in (mu, sigma, k, a); sign(0) := 0."""
        x = np.asarray(x, float)
        n = x.size
        mu, sg, k, a = self.mu, self.sigma, self.k, self.a
        s, rho = self.aux.s, self.aux.rho
        r = (x - mu - a) / sg
        d_mu = -(k / sg) * np.sum(np.sign(x - mu)) + np.sum(r) / sg
        d_sigma = (-n / sg + n * k * a * s / sg ** 2
                   - (k / sg ** 2) * np.sum(np.abs(x - mu)) + np.sum(r ** 2) / sg)
        d_k = -n * k - n * a * s / sg - n * rho + np.sum(np.abs(x - mu)) / sg
        d_a = -n * k * s / sg + np.sum(r) / sg
        return np.array([d_mu, d_sigma, d_k, d_a])
