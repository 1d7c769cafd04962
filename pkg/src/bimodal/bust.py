"""Bimodal-unimodal Student-t (BUSt) distribution.

Two-branch density split at ``mu``: the right branch is a t kernel centered
at ``mu + a + k`` with squared scale ``s_minus = sigma^2 - 2 a k / nu``, the
left one is centered at ``mu + a - k`` with ``s_plus = sigma^2 + 2 a k / nu``.
Requires ``nu sigma^2 > 2 |a k|`` so both scales stay positive.  The family
is symmetric when ``a = 0``, Student-t when ``k = 0``, bimodal for
``k > |a|``, and converges to a bimodal-unimodal normal as ``nu`` grows.

The distribution is an exact mixture of two truncated t components that do
not overlap, which gives the sampler and the closed-form moments; moments of
the truncated components come from an integration-by-parts recursion.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.special import gammaln, logsumexp

from .base import Density, is_local_max
from .bun import BUN
from .numerics import (Quadrature, RngStream, digamma, integrate_interval,
                       t_cdf, t_log_cdf, t_log_pdf, t_pdf, t_quantile)


@dataclass(frozen=True)
class BUStParams:
    mu: float
    sigma: float
    k: float
    a: float
    nu: float

    def __post_init__(self):
        vals = (self.mu, self.sigma, self.k, self.a, self.nu)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("BUSt parameters must be finite")
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")
        if self.nu <= 0:
            raise ValueError("nu must be > 0")
        if self.nu * self.sigma ** 2 <= 2.0 * abs(self.a * self.k):
            raise ValueError("requires nu * sigma^2 > 2|a k| (branch scales must stay positive)")


@dataclass(frozen=True)
class TruncatedTSpec:
    """Location-scale t truncated to (lower, upper)."""

    center: float
    scale: float
    nu: float
    lower: float
    upper: float


class BUSt(Density):
    """Bimodal-unimodal Student-t distribution."""

    def __init__(self, mu, sigma, k, a=0.0, nu=4.0):
        self.params = BUStParams(float(mu), float(sigma), float(k), float(a), float(nu))
        self.mu, self.sigma, self.k, self.a, self.nu = mu, sigma, k, a, nu
        self.s_minus = sigma * sigma - 2.0 * a * k / nu
        self.s_plus = sigma * sigma + 2.0 * a * k / nu
        self.q_minus = (a + k) / np.sqrt(self.s_minus)
        self.q_plus = (k - a) / np.sqrt(self.s_plus)
        self._log_wm = -0.5 * nu * np.log(self.s_minus) + t_log_cdf(self.q_minus, nu)
        self._log_wp = -0.5 * nu * np.log(self.s_plus) + t_log_cdf(self.q_plus, nu)
        self.log_delta = float(logsumexp([self._log_wm, self._log_wp]))

    # -- pdf / cdf ---------------------------------------------------------

    def log_pdf(self, x):
        x = np.asarray(x, float)
        nu = self.nu
        um = (x - self.mu - self.a - self.k) / np.sqrt(self.s_minus)
        up = (x - self.mu - self.a + self.k) / np.sqrt(self.s_plus)
        log_right = -0.5 * (nu + 1) * np.log(self.s_minus) + t_log_pdf(um, nu)
        log_left = -0.5 * (nu + 1) * np.log(self.s_plus) + t_log_pdf(up, nu)
        return np.where(x >= self.mu, log_right, log_left) - self.log_delta

    def cdf(self, x):
        x = np.asarray(x, float)
        nu = self.nu
        um = (x - self.mu - self.a - self.k) / np.sqrt(self.s_minus)
        up = (x - self.mu - self.a + self.k) / np.sqrt(self.s_plus)
        wm, wp = np.exp(self._log_wm), np.exp(self._log_wp)
        delta = np.exp(self.log_delta)
        left = self.s_plus ** (-0.5 * nu) * t_cdf(up, nu)
        right = (self.s_minus ** (-0.5 * nu)
                 * (t_cdf(um, nu) - t_cdf((-self.k - self.a) / np.sqrt(self.s_minus), nu))
                 + wp)
        return np.clip(np.where(x <= self.mu, left, right) / delta, 0.0, 1.0)

    def _quantile_bracket(self):
        w = (abs(self.k) + abs(self.a) + 8.0 * max(np.sqrt(self.s_minus), np.sqrt(self.s_plus))
             * (1.0 if self.nu >= 1.5 else 1e3))
        return self.mu - w, self.mu + w

    # -- mixture representation / sampling ----------------------------------

    def mixture(self):
        """Weights and truncated-t component specs; the weighted component
        densities reproduce the pdf pointwise."""
        r_minus = float(np.exp(self._log_wm - self.log_delta))
        r_plus = float(np.exp(self._log_wp - self.log_delta))
        upper = TruncatedTSpec(center=self.mu + self.a + self.k,
                               scale=float(np.sqrt(self.s_minus)), nu=self.nu,
                               lower=self.mu, upper=np.inf)
        lower = TruncatedTSpec(center=self.mu + self.a - self.k,
                               scale=float(np.sqrt(self.s_plus)), nu=self.nu,
                               lower=-np.inf, upper=self.mu)
        return r_minus, r_plus, upper, lower

    def mixture_pdf(self, x):
        x = np.asarray(x, float)
        r_minus, r_plus, upper, lower = self.mixture()
        fu = (t_pdf((x - upper.center) / upper.scale, self.nu) / upper.scale
              / t_cdf(self.q_minus, self.nu))
        fl = (t_pdf((x - lower.center) / lower.scale, self.nu) / lower.scale
              / t_cdf(self.q_plus, self.nu))
        return np.where(x >= self.mu, r_minus * fu, r_plus * fl)

    def sample(self, n, rng=None):
        rng = rng or RngStream()
        n = int(n)
        u_sel = rng.uniform(size=n)
        u = rng.uniform(size=n)
        r_minus, _, upper, lower = self.mixture()
        dm = t_cdf(self.q_minus, self.nu)
        dp = t_cdf(self.q_plus, self.nu)
        # component CDF inversion: upper component lives on (mu, inf),
        # i.e. standardized t truncated to (-q_minus, inf)
        pu = np.clip(1.0 - dm + u * dm, 1e-300, 1.0 - 1e-16)
        pl = np.clip(u * dp, 1e-300, 1.0 - 1e-16)
        x_up = upper.center + upper.scale * t_quantile(pu, self.nu)
        x_lo = lower.center + lower.scale * t_quantile(pl, self.nu)
        return np.where(u_sel < r_minus, x_up, x_lo)

    # -- moments -------------------------------------------------------------

    def _component_moments(self, q, r):
        """E[W^m], m = 0..r, for standard t truncated to (-q, inf)."""
        nu = self.nu
        c_nu = np.exp(gammaln((nu + 1) / 2) - gammaln(nu / 2) - 0.5 * np.log(nu * np.pi))
        big_p = t_cdf(q, nu)
        a_ = -q
        beta = c_nu * (1.0 + a_ * a_ / nu) ** (-(nu - 1) / 2)
        j = [big_p, nu * beta / (nu - 1.0)]
        for m in range(2, r + 1):
            j.append((nu * (m - 1) * j[m - 2] + nu * beta * a_ ** (m - 1)) / (nu - m))
        return [v / big_p for v in j]

    def moment(self, r):
        """E[X^r] for r in {1,...,4} via the truncated mixture; needs nu > r."""
        r = int(r)
        if not 1 <= r <= 4:
            raise ValueError("moment order must be in {1,...,4}")
        if self.nu <= r:
            raise ValueError(f"moment of order {r} requires nu > {r}")
        r_minus, r_plus, upper, lower = self.mixture()
        eta = self._component_moments(self.q_minus, r)
        lam = [(-1.0) ** l * v for l, v in enumerate(self._component_moments(self.q_plus, r))]
        e_up = sum(comb(r, j) * upper.center ** (r - j) * upper.scale ** j * eta[j]
                   for j in range(r + 1))
        e_lo = sum(comb(r, j) * lower.center ** (r - j) * lower.scale ** j * lam[j]
                   for j in range(r + 1))
        return float(r_minus * e_up + r_plus * e_lo)

    def moment_cross_product(self, r):
        """Binomial cross-product combination of the component moments:
        sum_i C(r,i) R-^i R+^{r-i} E[X1^i] E[X2^{r-i}].

        Kept only for comparison; it does not satisfy the mixture identity
        and disagrees with quadrature except in degenerate cases.
        """
        r = int(r)
        if self.nu <= r:
            raise ValueError(f"moment of order {r} requires nu > {r}")
        r_minus, r_plus, upper, lower = self.mixture()
        eta = self._component_moments(self.q_minus, r)
        lam = [(-1.0) ** l * v for l, v in enumerate(self._component_moments(self.q_plus, r))]

        def e_up(m):
            return sum(comb(m, j) * upper.center ** (m - j) * upper.scale ** j * eta[j]
                       for j in range(m + 1))

        def e_lo(m):
            return sum(comb(m, j) * lower.center ** (m - j) * lower.scale ** j * lam[j]
                       for j in range(m + 1))

        return float(sum(comb(r, i) * r_minus ** i * r_plus ** (r - i) * e_up(i) * e_lo(r - i)
                         for i in range(r + 1)))

    # -- modes ---------------------------------------------------------------

    def modes(self):
        """Mode set, ascending; bimodal iff k > |a|.  Each point is verified
        to be a local maximum."""
        mu, k, a = self.mu, self.k, self.a
        if k > abs(a):
            cand = [mu + a - k, mu + a + k]
        elif k <= -abs(a):
            cand = [mu]
        elif a < 0:
            cand = [mu + a - k]
        else:
            cand = [mu + a + k]
        return sorted(m for m in cand
                      if is_local_max(self.pdf, m, h=1e-5 * max(1.0, self.sigma)))

    # -- normal limit --------------------------------------------------------

    def normal_limit(self):
        """The BUN limit of this family as nu -> infinity.

        The tilt shape of this family is expressed in x-units while the BUN
        tilt is per sigma-unit, so the matched BUN has shape k / sigma (they
        coincide at sigma = 1)."""
        return BUN(self.mu, self.sigma, self.k / self.sigma, self.a)

    def normal_limit_gap(self, grid=None):
        """sup |pdf - limit pdf| over a probe grid."""
        lim = self.normal_limit()
        if grid is None:
            w = abs(self.k) + abs(self.a) + 6.0 * self.sigma
            grid = self.mu + np.linspace(-w, w, 801)
        return float(np.max(np.abs(self.pdf(grid) - lim.pdf(grid))))

    # -- likelihood ------------------------------------------------------------

    def loglik(self, x):
        x = np.asarray(x, float)
        n = x.size
        nu = self.nu
        right = x >= self.mu
        um = x[right] - self.mu - self.a - self.k
        up = x[~right] - self.mu - self.a + self.k
        return float(
            -n * self.log_delta
            - 0.5 * (nu + 1) * (np.log(self.s_minus) * right.sum()
                                + np.log(self.s_plus) * (~right).sum())
            + n * (gammaln((nu + 1) / 2) - gammaln(nu / 2) - 0.5 * np.log(nu * np.pi))
            - 0.5 * (nu + 1) * (np.sum(np.log1p(um ** 2 / (nu * self.s_minus)))
                                + np.sum(np.log1p(up ** 2 / (nu * self.s_plus)))))

    def _dtcdf_dnu(self, q):
        """d/dnu of the standard-t CDF at fixed argument q, by quadrature of
        the nu-derivative of the density."""
        nu = self.nu

        def integrand(t):
            w = 1.0 + t * t / nu
            dlog = (0.5 * digamma((nu + 1) / 2) - 0.5 * digamma(nu / 2) - 0.5 / nu
                    - 0.5 * np.log(w) + (nu + 1) * t * t / (2.0 * nu * nu * w))
            return t_pdf(t, nu) * dlog

        return integrate_interval(integrand, -np.inf, q, Quadrature(1e-12, 1e-12, 200))

    def score(self, x):
        """Gradient of ``loglik`` in (mu, sigma, k, a, nu).

        The nu component includes the derivative of the t CDF with respect
        to nu (evaluated by quadrature), which the closed-form pieces alone
        do not capture."""
        x = np.asarray(x, float)
        n = x.size
        mu, sg, k, a, nu = self.mu, self.sigma, self.k, self.a, self.nu
        sm, sp = self.s_minus, self.s_plus
        qm, qp = self.q_minus, self.q_plus
        dm_cdf, dp_cdf = t_cdf(qm, nu), t_cdf(qp, nu)
        dm_pdf, dp_pdf = t_pdf(qm, nu), t_pdf(qp, nu)
        delta = np.exp(self.log_delta)
        right = x >= mu
        um = x[right] - mu - a - k
        up = x[~right] - mu - a + k
        n_r, n_l = right.sum(), (~right).sum()
        am = 1.0 + um ** 2 / (nu * sm)
        ap = 1.0 + up ** 2 / (nu * sp)
        c1 = (nu + 1.0) / nu
        sum_um = np.sum(um / (sm * am))
        sum_up = np.sum(up / (sp * ap))
        sum_um2 = np.sum(um ** 2 / (sm ** 2 * am))
        sum_up2 = np.sum(up ** 2 / (sp ** 2 * ap))

        d_mu = c1 * sum_um + c1 * sum_up

        ddelta_dsg = (-nu * sg * sm ** (-0.5 * nu - 1) * dm_cdf
                      - (a + k) * sg * sm ** (-0.5 * (nu + 3)) * dm_pdf
                      - nu * sg * sp ** (-0.5 * nu - 1) * dp_cdf
                      - (k - a) * sg * sp ** (-0.5 * (nu + 3)) * dp_pdf)
        d_sigma = (-n * ddelta_dsg / delta
                   - (nu + 1) * sg * n_r / sm + c1 * sg * sum_um2
                   - (nu + 1) * sg * n_l / sp + c1 * sg * sum_up2)

        ddelta_dk = (a * sm ** (-0.5 * nu - 1) * dm_cdf
                     + sm ** (-0.5 * (nu + 1)) * dm_pdf * (1.0 + (a + k) * a / (nu * sm))
                     - a * sp ** (-0.5 * nu - 1) * dp_cdf
                     + sp ** (-0.5 * (nu + 1)) * dp_pdf * (1.0 - (k - a) * a / (nu * sp)))
        d_k = (-n * ddelta_dk / delta
               + (nu + 1) * a * n_r / (nu * sm) + c1 * sum_um - c1 * (a / nu) * sum_um2
               - (nu + 1) * a * n_l / (nu * sp) - c1 * sum_up + c1 * (a / nu) * sum_up2)

        ddelta_da = (k * sm ** (-0.5 * nu - 1) * dm_cdf
                     + sm ** (-0.5 * (nu + 1)) * dm_pdf * (1.0 + (a + k) * k / (nu * sm))
                     - k * sp ** (-0.5 * nu - 1) * dp_cdf
                     - sp ** (-0.5 * (nu + 1)) * dp_pdf * (1.0 + (k - a) * k / (nu * sp)))
        d_a = (-n * ddelta_da / delta
               + (nu + 1) * k * n_r / (nu * sm) + c1 * sum_um - c1 * (k / nu) * sum_um2
               - (nu + 1) * k * n_l / (nu * sp) + c1 * sum_up + c1 * (k / nu) * sum_up2)

        sm_nu = 2.0 * a * k / nu ** 2
        sp_nu = -2.0 * a * k / nu ** 2
        qm_nu = -(a + k) * (a * k / nu ** 2) * sm ** -1.5
        qp_nu = (k - a) * (a * k / nu ** 2) * sp ** -1.5
        ddelta_dnu = (sm ** (-0.5 * nu) * ((-0.5 * np.log(sm) - 0.5 * nu * sm_nu / sm) * dm_cdf
                                           + dm_pdf * qm_nu + self._dtcdf_dnu(qm))
                      + sp ** (-0.5 * nu) * ((-0.5 * np.log(sp) - 0.5 * nu * sp_nu / sp) * dp_cdf
                                             + dp_pdf * qp_nu + self._dtcdf_dnu(qp)))
        # s + nu * ds/dnu = sigma^2 for both branches, hence dA/dnu below
        d_nu = (-n * ddelta_dnu / delta
                + n * (0.5 * digamma((nu + 1) / 2) - 0.5 * digamma(nu / 2) - 0.5 / nu)
                - 0.5 * np.log(sm) * n_r - 0.5 * (nu + 1) * sm_nu / sm * n_r
                - 0.5 * np.sum(np.log(am)) + 0.5 * (nu + 1) * sg * sg / nu ** 2 * sum_um2
                - 0.5 * np.log(sp) * n_l - 0.5 * (nu + 1) * sp_nu / sp * n_l
                - 0.5 * np.sum(np.log(ap)) + 0.5 * (nu + 1) * sg * sg / nu ** 2 * sum_up2)

        return np.array([d_mu, d_sigma, d_k, d_a, d_nu])
