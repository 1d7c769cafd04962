"""Common density contract shared by every distribution in the package.

A :class:`Density` exposes ``log_pdf``, ``pdf``, ``cdf``, ``quantile``,
``sample`` and ``support``; subclasses override the closed forms they have
and inherit numeric fallbacks (bracketed CDF inversion, inverse-CDF
sampling, grid-plus-refinement mode search) for the rest.
"""

from __future__ import annotations

import abc

import numpy as np

from .numerics import RngStream


class Density(abc.ABC):
    """Scalar continuous distribution."""

    #: (lower, upper) endpoints of the support
    support = (-np.inf, np.inf)

    @abc.abstractmethod
    def log_pdf(self, x):
        ...

    @abc.abstractmethod
    def cdf(self, x):
        ...

    def pdf(self, x):
        return np.exp(self.log_pdf(x))

    def _quantile_bracket(self):
        """Initial finite bracket guaranteed to be expandable to cover any
        p in (0,1).  Subclasses may override with something tighter."""
        lo, hi = self.support
        if np.isfinite(lo) and np.isfinite(hi):
            return lo, hi
        return (-1.0 if not np.isfinite(lo) else lo,
                1.0 if not np.isfinite(hi) else hi)

    def quantile(self, p):
        """Invert the CDF by bracket expansion plus vectorized bisection."""
        p_arr = np.atleast_1d(np.asarray(p, float))
        if np.any((p_arr <= 0.0) | (p_arr >= 1.0)):
            raise ValueError("quantile requires 0 < p < 1")
        lo0, hi0 = self._quantile_bracket()
        lo = np.full(p_arr.shape, float(lo0))
        hi = np.full(p_arr.shape, float(hi0))
        sup_lo, sup_hi = self.support
        for _ in range(200):
            need = self.cdf(lo) > p_arr
            if not np.any(need):
                break
            lo = np.where(need, np.maximum(lo - np.maximum(2 * np.abs(lo), 1.0), sup_lo), lo)
        for _ in range(200):
            need = self.cdf(hi) < p_arr
            if not np.any(need):
                break
            hi = np.where(need, np.minimum(hi + np.maximum(2 * np.abs(hi), 1.0), sup_hi), hi)
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < p_arr
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.max(hi - lo) < 1e-14 * np.maximum(1.0, np.abs(lo).max()):
                break
        out = 0.5 * (lo + hi)
        return out if np.ndim(p) else float(out[0])

    def sample(self, n, rng=None):
        """Inverse-CDF sampling; deterministic under a fixed seed."""
        rng = rng or RngStream()
        u = rng.uniform(size=int(n))
        return np.asarray(self.quantile(u), float)

    def numeric_modes(self, lo=None, hi=None, n_grid=4096, tol=1e-8):
        """All strict local maxima of the pdf, ascending.

        The search covers [quantile(1e-6), quantile(1-1e-6)] widened by 20%
        (or the interval supplied), on a dense grid followed by
        golden-section refinement of each grid-local maximum.
        """
        if lo is None or hi is None:
            qlo = self.quantile(1e-6)
            qhi = self.quantile(1.0 - 1e-6)
            pad = 0.2 * (qhi - qlo)
            lo = qlo - pad if lo is None else lo
            hi = qhi + pad if hi is None else hi
        sup_lo, sup_hi = self.support
        lo, hi = max(lo, sup_lo), min(hi, sup_hi)
        xs = np.linspace(lo, hi, n_grid)
        ys = np.asarray(self.pdf(xs), float)
        modes = []
        for i in range(1, n_grid - 1):
            if ys[i] > ys[i - 1] and ys[i] > ys[i + 1]:
                modes.append(_golden_max(self.pdf, xs[i - 1], xs[i + 1], tol))
        # dedupe refined locations that collapsed together
        out = []
        for m in sorted(modes):
            if not out or abs(m - out[-1]) > 50 * tol * max(1.0, abs(m)):
                out.append(m)
        return out


def _golden_max(f, a, b, tol):
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol * max(1.0, abs(a) + abs(b)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def is_local_max(pdf, x, h=1e-4):
    """Second-difference test used to certify reported modes."""
    return pdf(x) >= pdf(x - h) and pdf(x) >= pdf(x + h)
