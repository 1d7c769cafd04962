"""Shared numeric kernel: special functions, quadrature, root finding and
optimization used by every distribution module.

Everything here is deterministic given its inputs; randomness is confined to
:class:`RngStream`, which wraps a seeded PCG64 generator and supports
splitting into independent substreams.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate, optimize, special


class NumericsError(Exception):
    """Base class for numeric-kernel failures."""


class IntegrationError(NumericsError):
    """Quadrature failed to converge; carries the partial estimate."""

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class BracketError(NumericsError):
    """Root bracket is invalid (no sign change)."""


class OptimizationError(NumericsError):
    """Every optimization start failed to produce a finite objective."""


@dataclass(frozen=True)
class Quadrature:
    """Tolerances for adaptive quadrature."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be strictly positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class OptimizerConfig:
    """Stopping rules and multi-start budget for :func:`minimize`."""

    x_tol: float = 1e-10
    f_tol: float = 1e-12
    grad_tol: float = 1e-8
    max_iters: int = 20000
    n_starts: int = 1

    def __post_init__(self):
        if min(self.x_tol, self.f_tol, self.grad_tol) <= 0:
            raise ValueError("optimizer tolerances must be > 0")
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")


class RngStream:
    """Seeded random stream; equal seeds give equal sequences.

    Substreams produced by :meth:`spawn` are statistically independent and
    themselves reproducible, so parallel work can consume one stream each
    without coordinating.
    """

    def __init__(self, seed=42, _seq=None):
        self._seq = np.random.SeedSequence(seed) if _seq is None else _seq
        self.generator = np.random.Generator(np.random.PCG64(self._seq))

    def spawn(self, n):
        return [RngStream(None, _seq=s) for s in self._seq.spawn(n)]

    def uniform(self, size=None):
        return self.generator.uniform(size=size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high=high, size=size)


# ---------------------------------------------------------------------------
# Special functions.  Backed by scipy.special; the wrappers pin the domain
# contracts (and the precision budget) relied on downstream.
# ---------------------------------------------------------------------------

_LOG_2PI = float(np.log(2.0 * np.pi))


def norm_pdf(x):
    x = np.asarray(x, float)
    return np.exp(-0.5 * x * x - 0.5 * _LOG_2PI)


def norm_log_pdf(x):
    x = np.asarray(x, float)
    return -0.5 * x * x - 0.5 * _LOG_2PI


def norm_cdf(x):
    return special.ndtr(np.asarray(x, float))


def norm_log_cdf(x):
    """log(Phi(x)), safe far into the lower tail."""
    return special.log_ndtr(np.asarray(x, float))


def norm_quantile(p):
    p = np.asarray(p, float)
    if np.any((p <= 0.0) | (p >= 1.0)):
        raise ValueError("norm_quantile requires 0 < p < 1")
    return special.ndtri(p)


def t_pdf(x, nu):
    if nu <= 0:
        raise ValueError("t_pdf requires nu > 0")
    return np.exp(t_log_pdf(x, nu))


def t_log_pdf(x, nu):
    if nu <= 0:
        raise ValueError("t_log_pdf requires nu > 0")
    x = np.asarray(x, float)
    c = special.gammaln((nu + 1.0) / 2.0) - special.gammaln(nu / 2.0) - 0.5 * np.log(nu * np.pi)
    return c - (nu + 1.0) / 2.0 * np.log1p(x * x / nu)


def t_cdf(x, nu):
    """Student-t CDF via the regularized incomplete beta function."""
    if nu <= 0:
        raise ValueError("t_cdf requires nu > 0")
    x = np.asarray(x, float)
    w = special.betainc(nu / 2.0, 0.5, nu / (nu + x * x))
    return np.where(x > 0, 1.0 - 0.5 * w, 0.5 * w)


def t_log_cdf(x, nu):
    """log of the Student-t CDF, with a power-tail fallback for deep
    lower-tail arguments where betainc underflows."""
    if nu <= 0:
        raise ValueError("t_log_cdf requires nu > 0")
    x = np.asarray(x, float)
    with np.errstate(divide="ignore"):
        out = np.log(t_cdf(x, nu))
    bad = ~np.isfinite(out)
    if np.any(bad):
        xb = np.where(bad, np.minimum(x, -1.0), -2.0)
        log_c = (special.gammaln((nu + 1.0) / 2.0) - special.gammaln(nu / 2.0)
                 - 0.5 * np.log(nu * np.pi))
        # P(T < x) ~ C_nu nu^{(nu+1)/2} |x|^{-nu} / nu  as x -> -inf
        tail = log_c + (nu + 1.0) / 2.0 * np.log(nu) - np.log(nu) - nu * np.log(np.abs(xb))
        out = np.where(bad, tail, out)
    return out


def t_quantile(p, nu):
    """Inverse of :func:`t_cdf`; Newton-refined so the roundtrip holds to
    ~1e-12 in probability."""
    if nu <= 0:
        raise ValueError("t_quantile requires nu > 0")
    p = np.asarray(p, float)
    if np.any((p <= 0.0) | (p >= 1.0)):
        raise ValueError("t_quantile requires 0 < p < 1")
    x = special.stdtrit(nu, p)
    for _ in range(3):
        err = t_cdf(x, nu) - p
        d = t_pdf(x, nu)
        step = np.where(d > 0, err / np.maximum(d, 1e-300), 0.0)
        x = x - np.clip(step, -1e6, 1e6)
    return x


def log_gamma(x):
    x = np.asarray(x, float)
    if np.any(x <= 0):
        raise ValueError("log_gamma requires x > 0")
    return special.gammaln(x)


def digamma(x):
    x = np.asarray(x, float)
    if np.any(x <= 0):
        raise ValueError("digamma requires x > 0")
    return special.psi(x)


def log_sum_exp(terms):
    return special.logsumexp(np.asarray(terms, float))


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def integrate_interval(f, lo, hi, quad=None):
    """Adaptive quadrature of ``f`` on [lo, hi]; either endpoint may be
    infinite (an internal compactifying substitution handles that case)."""
    quad = quad or Quadrature()
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, lo, hi, epsabs=quad.abs_tol,
                                      epsrel=quad.rel_tol, limit=quad.max_subdivisions)
        except integrate.IntegrationWarning:
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(f, lo, hi, epsabs=quad.abs_tol,
                                      epsrel=quad.rel_tol, limit=quad.max_subdivisions)
            if not np.isfinite(val) or err > max(quad.abs_tol * 1e6, abs(val) * 1e-6):
                raise IntegrationError(
                    f"quadrature did not converge on [{lo}, {hi}]", val, err) from None
    if not np.isfinite(val):
        raise IntegrationError(f"quadrature returned non-finite value on [{lo}, {hi}]", val, err)
    return val


def integrate_real_line(f, quad=None, breakpoints=()):
    """Integrate ``f`` over the whole real line.

    ``breakpoints`` lists interior points (kinks, modes) at which the domain
    is split before the adaptive pass; they materially help integrands with
    |x|-type kinks or well-separated humps.
    """
    pts = sorted(float(p) for p in breakpoints if np.isfinite(p))
    edges = [-np.inf] + pts + [np.inf]
    return sum(integrate_interval(f, a, b, quad) for a, b in zip(edges[:-1], edges[1:]))


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------

def find_root(f, lo, hi, x_tol=1e-13):
    """Bracketing root-finder (Brent).  Requires a sign change on [lo, hi]."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise BracketError(f"f({lo})={flo} and f({hi})={fhi} do not bracket a root")
    return optimize.brentq(f, lo, hi, xtol=x_tol, rtol=8.881784197001252e-16)


# ---------------------------------------------------------------------------
# Optimization
# ---------------------------------------------------------------------------

@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    n_starts_used: int
    n_iterations: int
    converged: bool
    message: str = ""


def _simplex(f, x0, cfg):
    return optimize.minimize(
        f, x0, method="Nelder-Mead",
        options=dict(maxiter=cfg.max_iters, maxfev=cfg.max_iters,
                     xatol=cfg.x_tol, fatol=cfg.f_tol, adaptive=len(x0) > 3))


def minimize(f, x0, grad=None, cfg=None, rng=None, polish_guard=None):
    """Minimize ``f`` from one or several starts.

    Each start runs a derivative-free simplex phase; if ``grad`` is supplied
    (and ``polish_guard``, when given, approves the incumbent) a quasi-Newton
    polish follows.  ``x0`` may be a single point or a sequence of starting
    points; when a single point is given and ``cfg.n_starts > 1``, extra
    starts are jittered deterministically around it using ``rng`` (or a
    fixed-seed stream).  Returns the best point found across starts.
    """
    cfg = cfg or OptimizerConfig()
    x0 = np.asarray(x0, float)
    if x0.ndim == 1:
        starts = [x0]
        if cfg.n_starts > 1:
            jrng = rng or RngStream(0)
            scale = 0.25 * (1.0 + np.abs(x0))
            starts += [x0 + scale * jrng.generator.standard_normal(x0.size)
                       for _ in range(cfg.n_starts - 1)]
    else:
        starts = [np.asarray(s, float) for s in x0]

    best = None
    n_used = 0
    n_iter = 0
    for s in starts:
        fs = f(s)
        if not np.isfinite(fs):
            continue
        n_used += 1
        res = _simplex(f, s, cfg)
        n_iter += res.nit
        if grad is not None and (polish_guard is None or polish_guard(res.x)):
            pol = optimize.minimize(f, res.x, jac=grad, method="BFGS",
                                    options=dict(gtol=cfg.grad_tol, maxiter=cfg.max_iters))
            n_iter += pol.nit
            if np.isfinite(pol.fun) and pol.fun <= res.fun:
                res = pol
            # a second simplex pass guards against a polish stalled at a kink
            res2 = _simplex(f, res.x, cfg)
            n_iter += res2.nit
            if res2.fun < res.fun:
                res = res2
        if best is None or res.fun < best.fun:
            best = res
    if best is None:
        raise OptimizationError("objective was non-finite at every start")
    return MinimizeResult(x=np.asarray(best.x, float), fun=float(best.fun),
                          n_starts_used=n_used, n_iterations=n_iter,
                          converged=bool(best.success) or n_iter > 0,
                          message=str(getattr(best, "message", "")))


def numeric_gradient(f, x):
    """Central-difference gradient with per-coordinate step
    max(1e-6, 1e-7*|x_i|)."""
    x = np.asarray(x, float)
    g = np.empty_like(x)
    for i in range(x.size):
        h = max(1e-6, 1e-7 * abs(x[i]))
        xp = x.copy(); xp[i] += h
        xm = x.copy(); xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2.0 * h)
    return g
