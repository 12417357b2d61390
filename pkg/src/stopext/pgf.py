"""Probability generating functions of positive integer random variables.

Conventions used throughout:

* every pgf ``h`` here satisfies ``h(0) = 0`` and ``h(1) = 1`` (no mass at 0),
  is strictly increasing and convex on ``[0, 1]``;
* the conjugate of ``h`` is ``conj(t) = 1 - h(1 - t)``, increasing and concave;
* ``inverse`` and ``conj_inverse`` are the functional inverses on ``[0, 1]``,
  computed in closed form wherever the family admits one and by safeguarded
  bisection/Newton otherwise;
* ``series(n)[k]`` is the coefficient of ``t**k``, so ``series(n)[k] = pmf(k)``
  for ``k >= 1``.

All evaluation methods accept scalars or numpy arrays and are pure; instances
are immutable after construction apart from internal pmf caches, which are
idempotent memos.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from . import _series
from .errors import DomainError, InversionError, ParameterError

__all__ = [
    "Pgf",
    "Deterministic",
    "ZTGeometric",
    "ZTPoisson",
    "Logarithmic",
    "Sibuya",
    "ZTBinomial",
    "ETNB",
    "SibuyaGeometric",
    "ComposedPgf",
    "DilatedPgf",
    "compose",
    "invert_monotone",
]

UNIT_TOL = 1e-12
INVERSION_TOL = 1e-12
INVERSION_MAX_ITER = 200
PMF_BLOCK = 256
PMF_CAP = 10_000_000
TAIL_MASS_TOL = 1e-12


def _prep(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _ret(arr, scalar):
    return float(arr) if scalar else arr


def _unit(x, name="t"):
    """Validate x in [0,1] within UNIT_TOL and clip onto the interval."""
    arr, scalar = _prep(x)
    if np.any(arr < -UNIT_TOL) or np.any(arr > 1.0 + UNIT_TOL) or np.any(np.isnan(arr)):
        raise DomainError(f"{name} must lie in [0, 1] (tolerance {UNIT_TOL:g})")
    return np.clip(arr, 0.0, 1.0), scalar


def invert_monotone(f, u, df=None, tol=INVERSION_TOL, max_iter=INVERSION_MAX_ITER):
    """Solve f(t) = u on [0,1] for increasing f with f(0)=0, f(1)=1.

    Bisection brackets the root; Newton steps (when ``df`` is supplied) are
    accepted only if they stay inside the bracket.  Raises InversionError when
    the residual tolerance is not met within ``max_iter`` sweeps, which
    signals a malformed pgf implementation rather than a data problem.
    """
    u, scalar = _unit(u, "u")
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    x = np.full_like(u, 0.5)
    done = np.zeros(u.shape, dtype=bool)
    # boundary fixed points are exact
    done |= u == 0.0
    x = np.where(u == 0.0, 0.0, x)
    done |= u == 1.0
    x = np.where(u == 1.0, 1.0, x)
    for _ in range(max_iter):
        if done.all():
            break
        with np.errstate(all="ignore"):
            res = f(x) - u
        hit = np.abs(res) <= tol
        done |= hit
        above = (res > 0) & ~done
        below = (res < 0) & ~done
        hi = np.where(above, x, hi)
        lo = np.where(below, x, lo)
        xn = 0.5 * (lo + hi)
        if df is not None:
            with np.errstate(all="ignore"):
                d = df(x)
                step = res / d
                cand = x - step
            ok = np.isfinite(cand) & (cand > lo) & (cand < hi)
            xn = np.where(ok, cand, xn)
        x = np.where(done, x, xn)
    else:
        with np.errstate(all="ignore"):
            res = np.abs(f(x) - u)
        if np.any(res[~done] > tol):
            raise InversionError(
                f"monotone inversion did not reach tolerance {tol:g} "
                f"within {max_iter} iterations (max residual {np.max(res):.3e})"
            )
    return _ret(x, scalar)


def identity_series(n):
    s = np.zeros(n + 1)
    if n >= 1:
        s[1] = 1.0
    return s


class Pgf:
    """Base class; subclasses implement eval/deriv and usually closed inverses."""

    family_id = "pgf"

    def __init__(self):
        self._series_cache = None
        self._cum = None
        self._cum_complete = False
        self.tail_warnings = 0
        self._family = None
        self._eta = None

    # ----- subclass interface -------------------------------------------------

    def _eval(self, t):
        raise NotImplementedError

    def _deriv(self, t, order):
        raise NotImplementedError

    def params_dict(self):
        return {}

    def compose_series(self, inner):
        """Series of self.eval(inner(t)) truncated to len(inner) coefficients."""
        raise NotImplementedError

    def mean(self):
        raise NotImplementedError

    # ----- evaluation ----------------------------------------------------------

    def eval(self, t):
        t, scalar = _unit(t)
        with np.errstate(all="ignore"):
            v = self._eval(t)
        return _ret(np.clip(v, 0.0, 1.0), scalar)

    def deriv(self, t, order=1):
        t, scalar = _unit(t)
        if order in (1, 2):
            with np.errstate(all="ignore"):
                v = self._deriv(t, order)
            return _ret(v, scalar)
        # central finite differences on the next lower analytic order
        h = 1e-5
        tt = np.clip(t, h, 1.0 - h)
        lo = self.deriv(tt - h, order - 1)
        hi = self.deriv(tt + h, order - 1)
        return _ret((np.asarray(hi) - np.asarray(lo)) / (2 * h), scalar)

    def log_deriv(self, t, one_minus_t=None):
        """log h'(t); ``one_minus_t`` may be passed for accuracy near t = 1."""
        t, scalar = _unit(t)
        with np.errstate(all="ignore"):
            v = np.log(self._deriv(t, 1))
        return _ret(v, scalar)

    def _conj(self, u):
        return 1.0 - self._eval(1.0 - u)

    def conj(self, t):
        t, scalar = _unit(t)
        with np.errstate(all="ignore"):
            v = self._conj(t)
        return _ret(np.clip(v, 0.0, 1.0), scalar)

    def conj_deriv(self, t, order=1):
        t, scalar = _unit(t)
        with np.errstate(all="ignore"):
            v = self._deriv(1.0 - t, order)
        if order == 2:
            v = -v
        return _ret(v, scalar)

    def inverse(self, u):
        """h^{-1}(u); numeric fallback, overridden by closed forms."""
        return self.numeric_inverse(u)

    def numeric_inverse(self, u):
        return invert_monotone(
            lambda x: self._eval(x), u, df=lambda x: self._deriv(x, 1)
        )

    def conj_inverse(self, u):
        """conj^{-1}(u); numeric fallback, overridden by closed forms."""
        return invert_monotone(
            lambda x: self._conj(x),
            u,
            df=lambda x: self._deriv(1.0 - x, 1),
        )

    # ----- pmf / series ---------------------------------------------------------

    def series(self, n):
        """Taylor coefficients of eval at 0, indices 0..n."""
        if self._series_cache is None or len(self._series_cache) < n + 1:
            m = 1
            while m < n + 1:
                m *= 2
            self._series_cache = self.compose_series(identity_series(m - 1))
        return self._series_cache[: n + 1]

    def _pmf_range(self, lo, hi):
        """pmf(n) for n in [lo, hi), default via the series machinery."""
        s = self.series(hi - 1)
        return np.maximum(s[lo:hi], 0.0)

    def pmf(self, n):
        arr = np.asarray(n)
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.all(arr == np.floor(arr)):
                raise ParameterError("pmf index n must be a positive integer")
            arr = arr.astype(int)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if np.any(arr < 1):
            raise ParameterError("pmf index n must be >= 1")
        hi = int(arr.max()) + 1
        block = self._pmf_range(1, hi)
        out = block[arr - 1]
        return float(out[0]) if scalar else out

    # ----- sampling -------------------------------------------------------------

    def _extend_cum(self, umax):
        if self._cum is None:
            first = self._pmf_range(1, 1 + PMF_BLOCK)
            self._cum = np.cumsum(first)
            self._cum_complete = self._cum[-1] >= 1.0 - TAIL_MASS_TOL
        while (
            not self._cum_complete
            and self._cum[-1] < umax
            and len(self._cum) < PMF_CAP
        ):
            lo = len(self._cum) + 1
            hi = min(lo + PMF_BLOCK, PMF_CAP + 1)
            block = self._pmf_range(lo, hi)
            self._cum = np.concatenate([self._cum, self._cum[-1] + np.cumsum(block)])
            self._cum_complete = self._cum[-1] >= 1.0 - TAIL_MASS_TOL

    def counts_from_uniform(self, u):
        """Deterministic inverse-cdf map from uniforms in [0,1) to counts."""
        u, scalar = _prep(u)
        self._extend_cum(float(np.max(u)) if u.size else 0.0)
        idx = np.searchsorted(self._cum, u, side="left")
        over = idx >= len(self._cum)
        n_over = int(np.count_nonzero(over))
        if n_over:
            if len(self._cum) >= PMF_CAP:
                self.tail_warnings += n_over
            idx = np.where(over, len(self._cum) - 1, idx)
        return int(idx + 1) if scalar else idx + 1

    def sample(self, rng, size=None):
        """Draw positive integers by inverse-cdf over the cumulative pmf."""
        u = rng.random() if size is None else rng.random(size)
        return self.counts_from_uniform(u)

    # ----- misc -------------------------------------------------------------------

    def spec_dict(self):
        return {"family": self.family_id, "params": self.params_dict()}

    def __repr__(self):
        inner = ", ".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}"
                          for k, v in self.params_dict().items())
        return f"{self.family_id}({inner})"


# ---------------------------------------------------------------------------
# Leaf families
# ---------------------------------------------------------------------------


class Deterministic(Pgf):
    """Point mass at m: h(t) = t**m.  m = 1 is the identity stopping variable."""

    family_id = "deterministic"

    def __init__(self, m=1):
        super().__init__()
        if int(m) != m or m < 1:
            raise ParameterError("deterministic m must be a positive integer")
        self.m = int(m)

    def params_dict(self):
        return {"m": self.m}

    def _eval(self, t):
        return t ** self.m

    def _deriv(self, t, order):
        m = self.m
        if order == 1:
            return m * t ** (m - 1)
        return m * (m - 1) * t ** (m - 2) if m >= 2 else np.zeros_like(t)

    def _conj(self, u):
        return -np.expm1(self.m * np.log1p(-u))

    def inverse(self, u):
        u, scalar = _unit(u, "u")
        return _ret(u ** (1.0 / self.m), scalar)

    def conj_inverse(self, u):
        u, scalar = _unit(u, "u")
        return _ret(1.0 - (1.0 - u) ** (1.0 / self.m), scalar)

    def _pmf_range(self, lo, hi):
        out = np.zeros(hi - lo)
        if lo <= self.m < hi:
            out[self.m - lo] = 1.0
        return out

    def compose_series(self, inner):
        out = inner.copy()
        for _ in range(self.m - 1):
            out = _series.mul(out, inner, len(inner))
        return out

    def mean(self):
        return float(self.m)


class ZTGeometric(Pgf):
    """Zero-truncated geometric: h(t) = p t / (1 - (1-p) t), p in (0, 1]."""

    family_id = "zt_geometric"

    def __init__(self, p):
        super().__init__()
        if not (0.0 < p <= 1.0):
            raise ParameterError("zt_geometric requires p in (0, 1]")
        self.p = float(p)

    def params_dict(self):
        return {"p": self.p}

    def _eval(self, t):
        return self.p * t / (1.0 - (1.0 - self.p) * t)

    def _conj(self, u):
        return u / (self.p + (1.0 - self.p) * u)

    def _deriv(self, t, order):
        d = 1.0 - (1.0 - self.p) * t
        if order == 1:
            return self.p / d ** 2
        return 2.0 * self.p * (1.0 - self.p) / d ** 3

    def inverse(self, u):
        u, scalar = _unit(u, "u")
        return _ret(u / (self.p + (1.0 - self.p) * u), scalar)

    def conj_inverse(self, u):
        u, scalar = _unit(u, "u")
        return _ret(self.p * u / (1.0 - (1.0 - self.p) * u), scalar)

    def _pmf_range(self, lo, hi):
        n = np.arange(lo, hi, dtype=float)
        return np.exp(math.log(self.p) + (n - 1) * math.log1p(-self.p)) if self.p < 1.0 else (n == 1).astype(float)

    def compose_series(self, inner):
        return _series.geometric_fraction(inner, self.p, len(inner))

    def mean(self):
        return 1.0 / self.p


class ZTPoisson(Pgf):
    """Zero-truncated Poisson: h(t) = (e^{alpha t} - 1) / (e^alpha - 1)."""

    family_id = "zt_poisson"

    def __init__(self, alpha):
        super().__init__()
        if not alpha > 0.0:
            raise ParameterError("zt_poisson requires alpha > 0")
        self.alpha = float(alpha)

    def params_dict(self):
        return {"alpha": self.alpha}

    def _eval(self, t):
        return np.expm1(self.alpha * t) / math.expm1(self.alpha)

    def _conj(self, u):
        return -np.expm1(-self.alpha * u) * math.exp(self.alpha) / math.expm1(self.alpha)

    def _deriv(self, t, order):
        a = self.alpha
        return a ** order * np.exp(a * t) / math.expm1(a)

    def inverse(self, u):
        u, scalar = _unit(u, "u")
        return _ret(np.log1p(math.expm1(self.alpha) * u) / self.alpha, scalar)

    def conj_inverse(self, u):
        u, scalar = _unit(u, "u")
        c = -math.expm1(-self.alpha)  # 1 - e^{-alpha}
        return _ret(-np.log1p(-c * u) / self.alpha, scalar)

    def _pmf_range(self, lo, hi):
        n = np.arange(lo, hi, dtype=float)
        return np.exp(n * math.log(self.alpha) - gammaln(n + 1.0)
                      - math.log(math.expm1(self.alpha)))

    def compose_series(self, inner):
        e = _series.exp(self.alpha * inner, len(inner))
        e[0] -= 1.0
        return e / math.expm1(self.alpha)

    def mean(self):
        a = self.alpha
        return a * math.exp(a) / math.expm1(a)


class Logarithmic(Pgf):
    """Logarithmic: h(t) = log(1 - p t) / log(1 - p), p in (0, 1)."""

    family_id = "logarithmic"

    def __init__(self, p):
        super().__init__()
        if not (0.0 < p < 1.0):
            raise ParameterError("logarithmic requires p in (0, 1)")
        self.p = float(p)
        self._lq = math.log1p(-p)  # log(1-p) < 0

    def params_dict(self):
        return {"p": self.p}

    def _eval(self, t):
        return np.log1p(-self.p * t) / self._lq

    def _conj(self, u):
        # 1 - log(1 - p(1-u))/log(1-p) = -log1p(p u / (1-p)) / log(1-p)
        return -np.log1p(self.p * u / (1.0 - self.p)) / self._lq

    def _deriv(self, t, order):
        p = self.p
        if order == 1:
            return -p / ((1.0 - p * t) * self._lq)
        return -(p ** 2) / ((1.0 - p * t) ** 2 * self._lq)

    def inverse(self, u):
        u, scalar = _unit(u, "u")
        return _ret(-np.expm1(u * self._lq) / self.p, scalar)

    def conj_inverse(self, u):
        u, scalar = _unit(u, "u")
        return _ret(1.0 + np.expm1((1.0 - u) * self._lq) / self.p, scalar)

    def _pmf_range(self, lo, hi):
        n = np.arange(lo, hi, dtype=float)
        return np.exp(n * math.log(self.p) - np.log(n)) / (-self._lq)

    def compose_series(self, inner):
        lg = _series.log1p(-self.p * inner, len(inner))
        return lg / self._lq

    def mean(self):
        return -self.p / ((1.0 - self.p) * self._lq)


class Sibuya(Pgf):
    """Sibuya: h(t) = 1 - (1 - t)**b, b in (0, 1].  Infinite mean for b < 1."""

    family_id = "sibuya"

    def __init__(self, b):
        super().__init__()
        if not (0.0 < b <= 1.0):
            raise ParameterError("sibuya requires b in (0, 1]")
        self.b = float(b)

    def params_dict(self):
        return {"b": self.b}

    def _eval(self, t):
        return -np.expm1(self.b * np.log1p(-t))

    def _conj(self, u):
        with np.errstate(all="ignore"):
            return np.where(u > 0.0, np.exp(self.b * np.log(np.maximum(u, 1e-320))), 0.0)

    def _deriv(self, t, order):
        b = self.b
        if order == 1:
            return b * (1.0 - t) ** (b - 1.0)
        return b * (1.0 - b) * (1.0 - t) ** (b - 2.0)

    def log_deriv(self, t, one_minus_t=None):
        t, scalar = _unit(t)
        if one_minus_t is None:
            ls = np.log1p(-t)
        else:
            s, _ = _prep(one_minus_t)
            with np.errstate(all="ignore"):
                ls = np.log(s)
        return _ret(math.log(self.b) + (self.b - 1.0) * ls, scalar)

    def inverse(self, u):
        u, scalar = _unit(u, "u")
        with np.errstate(all="ignore"):
            v = -np.expm1(np.log1p(-u) / self.b)
        return _ret(v, scalar)

    def conj_inverse(self, u):
        u, scalar = _unit(u, "u")
        return _ret(u ** (1.0 / self.b), scalar)

    def _pmf_range(self, lo, hi):
        # p_1 = b, p_{n+1} = p_n (n - b) / (n + 1)
        n = np.arange(lo, hi, dtype=float)
        return np.exp(math.log(self.b) + gammaln(n - self.b) - gammaln(1.0 - self.b)
                      - gammaln(n + 1.0))

    def compose_series(self, inner):
        one_minus = -inner.copy()
        one_minus[0] += 1.0
        w = _series.power(one_minus, self.b, len(inner))
        out = -w
        out[0] += 1.0
        return out

    def mean(self):
        return float("inf") if self.b < 1.0 else 1.0


class ZTBinomial(Pgf):
    """Zero-truncated binomial(n, p): h(t) = ((1-p+pt)^n - (1-p)^n)/(1-(1-p)^n)."""

    family_id = "zt_binomial"

    def __init__(self, n, p):
        super().__init__()
        if int(n) != n or n < 1:
            raise ParameterError("zt_binomial requires integer n >= 1")
        if not (0.0 < p < 1.0):
            raise ParameterError("zt_binomial requires p in (0, 1)")
        self.n = int(n)
        self.p = float(p)
        self._qn = (1.0 - p) ** self.n

    def params_dict(self):
        return {"n": self.n, "p": self.p}

    def _eval(self, t):
        base = 1.0 - self.p + self.p * t
        return (base ** self.n - self._qn) / (1.0 - self._qn)

    def _conj(self, u):
        return -np.expm1(self.n * np.log1p(-self.p * u)) / (1.0 - self._qn)

    def _deriv(self, t, order):
        n, p = self.n, self.p
        base = 1.0 - p + p * t
        if order == 1:
            return n * p * base ** (n - 1) / (1.0 - self._qn)
        if n < 2:
            return np.zeros_like(base)
        return n * (n - 1) * p ** 2 * base ** (n - 2) / (1.0 - self._qn)

    def inverse(self, u):
        u, scalar = _unit(u, "u")
        w = (u * (1.0 - self._qn) + self._qn) ** (1.0 / self.n)
        return _ret((w - (1.0 - self.p)) / self.p, scalar)

    def conj_inverse(self, u):
        u, scalar = _unit(u, "u")
        w = (1.0 - u * (1.0 - self._qn)) ** (1.0 / self.n)
        return _ret((1.0 - w) / self.p, scalar)

    def _pmf_range(self, lo, hi):
        k = np.arange(lo, hi, dtype=float)
        with np.errstate(all="ignore"):
            lg = (gammaln(self.n + 1.0) - gammaln(k + 1.0) - gammaln(self.n - k + 1.0)
                  + k * math.log(self.p) + (self.n - k) * math.log1p(-self.p))
            out = np.where(k <= self.n, np.exp(lg) / (1.0 - self._qn), 0.0)
        return out

    def compose_series(self, inner):
        base = self.p * inner.copy()
        base[0] += 1.0 - self.p
        w = _series.power(base, float(self.n), len(inner))
        w[0] -= self._qn
        return w / (1.0 - self._qn)

    def mean(self):
        return self.n * self.p / (1.0 - self._qn)


class ETNB(Pgf):
    """Extended truncated negative binomial with shape r in (-1, inf).

    h(t) = ((1 - p t)^{-r} - 1) / ((1 - p)^{-r} - 1); the r -> 0 limit is the
    logarithmic pgf and is used when r == 0.  r = 1 recovers a zero-truncated
    geometric (with success probability 1 - p), positive integer r a
    zero-truncated negative binomial.
    """

    family_id = "etnb"

    def __init__(self, p, r):
        super().__init__()
        if not (0.0 < p < 1.0):
            raise ParameterError("etnb requires p in (0, 1)")
        if not r > -1.0:
            raise ParameterError("etnb requires r > -1")
        self.p = float(p)
        self.r = float(r)
        self._lq = math.log1p(-p)
        # r / ((1-p)^{-r} - 1), the stable normalizing ratio with r -> 0 limit
        if self.r == 0.0:
            self._ratio = -1.0 / self._lq
        else:
            self._ratio = self.r / math.expm1(-self.r * self._lq)

    def params_dict(self):
        return {"p": self.p, "r": self.r}

    def _eval(self, t):
        if self.r == 0.0:
            return np.log1p(-self.p * t) / self._lq
        return np.expm1(-self.r * np.log1p(-self.p * t)) / math.expm1(-self.r * self._lq)

    def _conj(self, u):
        p, r = self.p, self.r
        if r == 0.0:
            return -np.log1p(p * u / (1.0 - p)) / self._lq
        # (1-p)^{-r} (1 - (1 + p u/(1-p))^{-r}) / ((1-p)^{-r} - 1)
        w = -np.expm1(-r * np.log1p(p * u / (1.0 - p)))
        return w * math.exp(-r * self._lq) / math.expm1(-r * self._lq)

    def _deriv(self, t, order):
        p, r = self.p, self.r
        if r == 0.0:
            base = 1.0 - p * t
            if order == 1:
                return -p / (base * self._lq)
            return -(p ** 2) / (base ** 2 * self._lq)
        lt = np.log1p(-p * t)
        if order == 1:
            return self._ratio * p * np.exp(-(r + 1.0) * lt)
        return self._ratio * (r + 1.0) * p ** 2 * np.exp(-(r + 2.0) * lt)

    def inverse(self, u):
        u, scalar = _unit(u, "u")
        if self.r == 0.0:
            return _ret(-np.expm1(u * self._lq) / self.p, scalar)
        w = np.log1p(u * math.expm1(-self.r * self._lq))
        return _ret(-np.expm1(-w / self.r) / self.p, scalar)

    def conj_inverse(self, u):
        u, scalar = _unit(u, "u")
        if self.r == 0.0:
            return _ret(1.0 + np.expm1((1.0 - u) * self._lq) / self.p, scalar)
        # (1 - p(1-t))^{-r} = (1-p)^{-r} - u ((1-p)^{-r} - 1)
        w = np.log1p((1.0 - u) * math.expm1(-self.r * self._lq))
        return _ret(1.0 + np.expm1(-w / self.r) / self.p, scalar)

    def _pmf_range(self, lo, hi):
        n = np.arange(lo, hi, dtype=float)
        r = self.r
        if r == 0.0:
            return np.exp(n * math.log(self.p) - np.log(n)) / (-self._lq)
        # rising factorial (r)_n = r * Gamma(r+n) / Gamma(r+1)
        return self._ratio * np.exp(gammaln(r + n) - gammaln(r + 1.0)
                                    + n * math.log(self.p) - gammaln(n + 1.0))

    def compose_series(self, inner):
        if self.r == 0.0:
            return _series.log1p(-self.p * inner, len(inner)) / self._lq
        base = -self.p * inner.copy()
        base[0] += 1.0
        w = _series.power(base, -self.r, len(inner))
        w[0] -= 1.0
        return w * (self._ratio / self.r)

    def mean(self):
        p, r = self.p, self.r
        if r == 0.0:
            return -p / ((1.0 - p) * self._lq)
        return self._ratio * p * math.exp(-(r + 1.0) * self._lq)


class SibuyaGeometric(Pgf):
    """Composition-closed family interpolating Sibuya and zero-truncated geometric.

    h(t) = 1 - (1 - t) / (p + (1-p)(1-t)^alpha)^{1/alpha} with alpha in (0, 1),
    p in (0, 1].  The alpha -> 1 limit is the zero-truncated geometric, the
    alpha -> 0 limit the Sibuya family; mean p^{-1/alpha}, infinite variance.
    """

    family_id = "sibuya_geometric"

    def __init__(self, alpha, p):
        super().__init__()
        if not (0.0 < alpha < 1.0):
            raise ParameterError("sibuya_geometric requires alpha in (0, 1)")
        if not (0.0 < p <= 1.0):
            raise ParameterError("sibuya_geometric requires p in (0, 1]")
        self.alpha = float(alpha)
        self.p = float(p)

    def params_dict(self):
        return {"alpha": self.alpha, "p": self.p}

    def _denom(self, one_minus_t):
        return self.p + (1.0 - self.p) * one_minus_t ** self.alpha

    def _eval(self, t):
        ls = np.log1p(-t)
        d = self.p + (1.0 - self.p) * np.exp(self.alpha * ls)
        return -np.expm1(ls - np.log(d) / self.alpha)

    def _conj(self, u):
        return u * self._denom(u) ** (-1.0 / self.alpha)

    def _deriv(self, t, order):
        a, p = self.alpha, self.p
        s = 1.0 - t
        d = self._denom(s)
        if order == 1:
            return p * d ** (-1.0 - 1.0 / a)
        return p * (1.0 - p) * (a + 1.0) * s ** (a - 1.0) * d ** (-2.0 - 1.0 / a)

    def log_deriv(self, t, one_minus_t=None):
        t, scalar = _unit(t)
        s = 1.0 - t if one_minus_t is None else _prep(one_minus_t)[0]
        d = self._denom(s)
        return _ret(math.log(self.p) - (1.0 + 1.0 / self.alpha) * np.log(d), scalar)

    def inverse(self, u):
        u, scalar = _unit(u, "u")
        a, p = self.alpha, self.p
        w = 1.0 - u
        s = w * (p / (1.0 - (1.0 - p) * w ** a)) ** (1.0 / a)
        return _ret(1.0 - s, scalar)

    def conj_inverse(self, u):
        u, scalar = _unit(u, "u")
        a, p = self.alpha, self.p
        return _ret(u * (p / (1.0 - (1.0 - p) * u ** a)) ** (1.0 / a), scalar)

    def compose_series(self, inner):
        n = len(inner)
        one_minus = -inner.copy()
        one_minus[0] += 1.0
        g = _series.power(one_minus, self.alpha, n)  # (1 - H)^alpha
        d = (1.0 - self.p) * g
        d[0] += self.p
        w = _series.power(d, -1.0 / self.alpha, n)
        out = -_series.mul(one_minus, w, n)
        out[0] += 1.0
        return out

    def mean(self):
        return self.p ** (-1.0 / self.alpha)


# ---------------------------------------------------------------------------
# Combinators
# ---------------------------------------------------------------------------


class ComposedPgf(Pgf):
    """Functional composition outer(inner(t)); the pgf of a stopped sum."""

    family_id = "composed"

    def __init__(self, outer, inner):
        super().__init__()
        self.outer = outer
        self.inner = inner

    def params_dict(self):
        return {}

    def spec_dict(self):
        return {"family": "composed",
                "outer": self.outer.spec_dict(), "inner": self.inner.spec_dict()}

    def __repr__(self):
        return f"compose({self.outer!r}, {self.inner!r})"

    def _eval(self, t):
        return self.outer._eval(self.inner._eval(t))

    def _conj(self, u):
        return self.outer._conj(self.inner._conj(u))

    def _deriv(self, t, order):
        g = self.inner._eval(t)
        g1 = self.inner._deriv(t, 1)
        f1 = self.outer._deriv(g, 1)
        if order == 1:
            return f1 * g1
        g2 = self.inner._deriv(t, 2)
        f2 = self.outer._deriv(g, 2)
        return f2 * g1 ** 2 + f1 * g2

    def log_deriv(self, t, one_minus_t=None):
        t, scalar = _unit(t)
        s = one_minus_t if one_minus_t is not None else 1.0 - t
        u = self.inner._eval(t)
        one_minus_u = np.asarray(self.inner.conj(np.asarray(s)))
        v = (np.asarray(self.outer.log_deriv(u, one_minus_u))
             + np.asarray(self.inner.log_deriv(t, s)))
        return _ret(v, scalar)

    def inverse(self, u):
        return self.inner.inverse(self.outer.inverse(u))

    def conj_inverse(self, u):
        return self.inner.conj_inverse(self.outer.conj_inverse(u))

    def compose_series(self, inner_series):
        return self.outer.compose_series(self.inner.compose_series(inner_series))

    def mean(self):
        a, b = self.outer.mean(), self.inner.mean()
        return a * b


class DilatedPgf(Pgf):
    """Support dilation (h(t^k))^{1/k}; pmf lives on 1, k+1, 2k+1, ..."""

    family_id = "dilated"

    def __init__(self, base, k):
        super().__init__()
        if int(k) != k or k < 1:
            raise ParameterError("dilation requires integer k >= 1")
        self.base = base
        self.k = int(k)

    def params_dict(self):
        return {"k": self.k}

    def spec_dict(self):
        return {"family": "dilated", "k": self.k, "base": self.base.spec_dict()}

    def __repr__(self):
        return f"dilate({self.base!r}, k={self.k})"

    def _eval(self, t):
        if self.k == 1:
            return self.base._eval(t)
        return self.base._eval(t ** self.k) ** (1.0 / self.k)

    def _conj(self, u):
        if self.k == 1:
            return self.base._conj(u)
        inner_c = -np.expm1(self.k * np.log1p(-u))
        cb = self.base._conj(inner_c)
        return -np.expm1(np.log1p(-cb) / self.k)

    def _deriv(self, t, order):
        k = self.k
        if k == 1:
            return self.base._deriv(t, order)
        u = t ** k
        A = self.base._eval(u)
        B = self.base._deriv(u, 1)
        if order == 1:
            with np.errstate(all="ignore"):
                v = t ** (k - 1) * B * A ** (1.0 / k - 1.0)
            # limit t -> 0: h ~ p1^{1/k} t, so h'(0) = p1^{1/k}
            p1 = self.base.pmf(1) ** (1.0 / k)
            return np.where(np.asarray(t) == 0.0, p1, v)
        C = self.base._deriv(u, 2)
        with np.errstate(all="ignore"):
            term1 = (k - 1) * t ** (k - 2) * B * A ** (1.0 / k - 1.0)
            term2 = k * t ** (2 * k - 2) * A ** (1.0 / k - 2.0) * (
                C * A + (1.0 / k - 1.0) * B ** 2
            )
        return term1 + term2

    def inverse(self, u):
        u, scalar = _unit(u, "u")
        return _ret(self.base.inverse(u ** self.k) ** (1.0 / self.k), scalar)

    def series(self, n):
        if self._series_cache is None or len(self._series_cache) < n + 1:
            m = 1
            while m < n + 1:
                m *= 2
            nb = (m - 1) // self.k + 2
            bs = self.base.series(nb)  # indices 0..nb
            spread = np.zeros(self.k * (len(bs) - 1) + 1)
            spread[:: self.k][: len(bs)] = bs
            self._series_cache = _series.power_shifted(spread, 1.0 / self.k, m)
        return self._series_cache[: n + 1]

    def compose_series(self, inner_series):
        n = len(inner_series)
        powk = inner_series.copy()
        for _ in range(self.k - 1):
            powk = _series.mul(powk, inner_series, n)
        A = self.base.compose_series(powk)
        return _series.power_shifted(A, 1.0 / self.k, n)

    def mean(self):
        return self.base.mean()


def compose(outer, inner):
    """pgf composition with closed-family fast paths (eta adds within a family)."""
    if isinstance(outer, Deterministic) and outer.m == 1:
        return inner
    if isinstance(inner, Deterministic) and inner.m == 1:
        return outer
    fo = getattr(outer, "_family", None)
    fi = getattr(inner, "_family", None)
    if (
        fo is not None
        and fo is fi
        and getattr(fo, "closed_under_composition", False)
        and outer._eta is not None
        and inner._eta is not None
    ):
        return fo.member(outer._eta + inner._eta)
    if isinstance(outer, ZTGeometric) and isinstance(inner, ZTGeometric):
        return ZTGeometric(outer.p * inner.p)
    if isinstance(outer, Sibuya) and isinstance(inner, Sibuya):
        return Sibuya(outer.b * inner.b)
    if (
        isinstance(outer, SibuyaGeometric)
        and isinstance(inner, SibuyaGeometric)
        and outer.alpha == inner.alpha
    ):
        return SibuyaGeometric(outer.alpha, outer.p * inner.p)
    if isinstance(outer, Deterministic) and isinstance(inner, Deterministic):
        return Deterministic(outer.m * inner.m)
    return ComposedPgf(outer, inner)
