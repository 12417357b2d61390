"""Continuous base distributions: exponential, lognormal, Gumbel, logistic, GEV.

The GEV uses the convention F(x) = exp(-(1 - shape*(x-loc)/scale)^(1/shape)).
Note the sign of ``shape``: in this convention a *negative* shape gives the
heavy upper tail (Frechet type) and the support is bounded above for
``shape > 0``.  The Gumbel limit is taken for |shape| < 1e-8.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import log_ndtr, ndtr, ndtri

from .errors import DomainError, ParameterError

__all__ = [
    "ContinuousModel",
    "Exponential",
    "LogNormal",
    "Gumbel",
    "Logistic",
    "GEV",
    "model_from_spec",
]

_GUMBEL_SHAPE_TOL = 1e-8


def _prep(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _ret(arr, scalar):
    return float(arr) if scalar else arr


class ContinuousModel:
    """Real-valued distribution exposed through cdf/pdf/quantile/sampler."""

    dist_id = "continuous"
    support = (-math.inf, math.inf)

    def _cdf(self, x):
        raise NotImplementedError

    def _pdf(self, x):
        raise NotImplementedError

    def _logpdf(self, x):
        with np.errstate(all="ignore"):
            return np.log(self._pdf(x))

    def _sf(self, x):
        return 1.0 - self._cdf(x)

    def _quantile(self, u):
        raise NotImplementedError

    def params_dict(self):
        return {}

    def spec_dict(self):
        return {"dist": self.dist_id, "params": self.params_dict()}

    def cdf(self, x):
        x, scalar = _prep(x)
        lo, hi = self.support
        with np.errstate(all="ignore"):
            v = np.where(x <= lo, 0.0, np.where(x >= hi, 1.0, self._cdf(np.clip(x, lo, hi))))
        return _ret(v, scalar)

    def sf(self, x):
        x, scalar = _prep(x)
        lo, hi = self.support
        with np.errstate(all="ignore"):
            v = np.where(x <= lo, 1.0, np.where(x >= hi, 0.0, self._sf(np.clip(x, lo, hi))))
        return _ret(v, scalar)

    def pdf(self, x):
        x, scalar = _prep(x)
        lo, hi = self.support
        inside = (x > lo) & (x < hi)
        with np.errstate(all="ignore"):
            v = np.where(inside, self._pdf(np.clip(x, lo, hi)), 0.0)
        return _ret(v, scalar)

    def logpdf(self, x):
        x, scalar = _prep(x)
        lo, hi = self.support
        inside = (x > lo) & (x < hi)
        with np.errstate(all="ignore"):
            v = np.where(inside, self._logpdf(np.clip(x, lo, hi)), -math.inf)
        return _ret(v, scalar)

    def quantile(self, u):
        u, scalar = _prep(u)
        if np.any(u < -1e-12) or np.any(u > 1.0 + 1e-12) or np.any(np.isnan(u)):
            raise DomainError("quantile argument must lie in [0, 1]")
        u = np.clip(u, 0.0, 1.0)
        lo, hi = self.support
        with np.errstate(all="ignore"):
            v = np.where(u <= 0.0, lo, np.where(u >= 1.0, hi, self._quantile(np.clip(u, 1e-320, 1.0))))
        return _ret(v, scalar)

    def sample(self, rng, size=None):
        u = rng.random() if size is None else rng.random(size)
        return self.quantile(u)

    def __repr__(self):
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params_dict().items())
        return f"{self.dist_id}({inner})"


class Exponential(ContinuousModel):
    dist_id = "exponential"

    def __init__(self, rate):
        if not rate > 0.0:
            raise ParameterError("exponential requires rate > 0")
        self.rate = float(rate)
        self.support = (0.0, math.inf)

    def params_dict(self):
        return {"rate": self.rate}

    def _cdf(self, x):
        return -np.expm1(-self.rate * x)

    def _sf(self, x):
        return np.exp(-self.rate * x)

    def _pdf(self, x):
        return self.rate * np.exp(-self.rate * x)

    def _logpdf(self, x):
        return math.log(self.rate) - self.rate * x

    def _quantile(self, u):
        return -np.log1p(-u) / self.rate

    def mean(self):
        return 1.0 / self.rate


class LogNormal(ContinuousModel):
    """Parametrized by the mean and sd of log X."""

    dist_id = "lognormal"

    def __init__(self, mu, sigma):
        if not sigma > 0.0:
            raise ParameterError("lognormal requires sigma > 0")
        self.mu = float(mu)
        self.sigma = float(sigma)
        self.support = (0.0, math.inf)

    def params_dict(self):
        return {"mu": self.mu, "sigma": self.sigma}

    def _z(self, x):
        return (np.log(x) - self.mu) / self.sigma

    def _cdf(self, x):
        return ndtr(self._z(x))

    def _sf(self, x):
        return ndtr(-self._z(x))

    def _pdf(self, x):
        z = self._z(x)
        return np.exp(-0.5 * z * z) / (x * self.sigma * math.sqrt(2.0 * math.pi))

    def _logpdf(self, x):
        z = self._z(x)
        return -0.5 * z * z - np.log(x) - math.log(self.sigma) - 0.5 * math.log(2.0 * math.pi)

    def logsf(self, x):
        x, scalar = _prep(x)
        with np.errstate(all="ignore"):
            v = np.where(x <= 0.0, 0.0, log_ndtr(-self._z(np.maximum(x, 1e-320))))
        return _ret(v, scalar)

    def _quantile(self, u):
        return np.exp(self.mu + self.sigma * ndtri(u))


class Gumbel(ContinuousModel):
    dist_id = "gumbel"

    def __init__(self, loc, scale):
        if not scale > 0.0:
            raise ParameterError("gumbel requires scale > 0")
        self.loc = float(loc)
        self.scale = float(scale)

    def params_dict(self):
        return {"loc": self.loc, "scale": self.scale}

    def _cdf(self, x):
        return np.exp(-np.exp(-(x - self.loc) / self.scale))

    def _pdf(self, x):
        z = (x - self.loc) / self.scale
        return np.exp(-z - np.exp(-z)) / self.scale

    def _logpdf(self, x):
        z = (x - self.loc) / self.scale
        return -z - np.exp(-z) - math.log(self.scale)

    def _quantile(self, u):
        return self.loc - self.scale * np.log(-np.log(u))


class Logistic(ContinuousModel):
    dist_id = "logistic"

    def __init__(self, loc, scale):
        if not scale > 0.0:
            raise ParameterError("logistic requires scale > 0")
        self.loc = float(loc)
        self.scale = float(scale)

    def params_dict(self):
        return {"loc": self.loc, "scale": self.scale}

    def _cdf(self, x):
        z = (x - self.loc) / self.scale
        return 0.5 * (1.0 + np.tanh(0.5 * z))

    def _sf(self, x):
        z = (x - self.loc) / self.scale
        return 0.5 * (1.0 - np.tanh(0.5 * z))

    def _pdf(self, x):
        z = np.abs(x - self.loc) / self.scale
        e = np.exp(-z)
        return e / (self.scale * (1.0 + e) ** 2)

    def _logpdf(self, x):
        z = np.abs(x - self.loc) / self.scale
        return -z - 2.0 * np.log1p(np.exp(-z)) - math.log(self.scale)

    def _quantile(self, u):
        return self.loc + self.scale * (np.log(u) - np.log1p(-u))


class GEV(ContinuousModel):
    """Generalized extreme value in the convention noted in the module docstring."""

    dist_id = "gev"

    def __init__(self, loc, scale, shape):
        if not scale > 0.0:
            raise ParameterError("gev requires scale > 0")
        self.loc = float(loc)
        self.scale = float(scale)
        self.shape = float(shape)
        if abs(self.shape) < _GUMBEL_SHAPE_TOL:
            self.support = (-math.inf, math.inf)
        elif self.shape > 0.0:
            self.support = (-math.inf, self.loc + self.scale / self.shape)
        else:
            self.support = (self.loc + self.scale / self.shape, math.inf)

    def params_dict(self):
        return {"loc": self.loc, "scale": self.scale, "shape": self.shape}

    def _w(self, x):
        """(1 - shape*(x-loc)/scale)^(1/shape), the exponent argument."""
        z = (x - self.loc) / self.scale
        if abs(self.shape) < _GUMBEL_SHAPE_TOL:
            return np.exp(-z)
        return np.exp(np.log1p(-self.shape * z) / self.shape)

    def _cdf(self, x):
        return np.exp(-self._w(x))

    def _pdf(self, x):
        z = (x - self.loc) / self.scale
        w = self._w(x)
        if abs(self.shape) < _GUMBEL_SHAPE_TOL:
            return np.exp(-w - z) / self.scale
        return np.exp(-w) * w ** (1.0 - self.shape) / self.scale

    def _logpdf(self, x):
        z = (x - self.loc) / self.scale
        if abs(self.shape) < _GUMBEL_SHAPE_TOL:
            return -np.exp(-z) - z - math.log(self.scale)
        lw = np.log1p(-self.shape * z) / self.shape
        return -np.exp(lw) + (1.0 - self.shape) * lw - math.log(self.scale)

    def _quantile(self, u):
        if abs(self.shape) < _GUMBEL_SHAPE_TOL:
            return self.loc - self.scale * np.log(-np.log(u))
        return self.loc + self.scale / self.shape * (-np.expm1(self.shape * np.log(-np.log(u))))


_MODEL_CLASSES = {
    "exponential": (Exponential, ("rate",)),
    "lognormal": (LogNormal, ("mu", "sigma")),
    "gumbel": (Gumbel, ("loc", "scale")),
    "logistic": (Logistic, ("loc", "scale")),
    "gev": (GEV, ("loc", "scale", "shape")),
}


def model_from_spec(spec: dict) -> ContinuousModel:
    """Build a base model from {"dist": ..., "params": {...}}."""
    dist = spec.get("dist")
    if dist not in _MODEL_CLASSES:
        raise ParameterError(f"unknown base distribution '{dist}'")
    cls, names = _MODEL_CLASSES[dist]
    params = dict(spec.get("params", {}))
    if dist == "exponential" and "lambda" in params:
        params["rate"] = params.pop("lambda")
    unknown = set(params) - set(names)
    if unknown:
        raise ParameterError(f"{dist}: unknown parameters {sorted(unknown)}")
    missing = set(names) - set(params)
    if missing:
        raise ParameterError(f"{dist}: missing parameters {sorted(missing)}")
    return cls(**params)
