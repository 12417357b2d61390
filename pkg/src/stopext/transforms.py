"""Stopped-extreme model transformations.

Six kinds of transformed model are supported, all defined at the cdf level by
a monotone map g applied to the base cdf:

====================  =========================================
stopped_max           g = h                (max of N copies)
stopped_min           g = conj(h)          (min of N copies)
max_precursor         g = h^{-1}
min_precursor         g = conj(h)^{-1}
combined_max          g = H_eta, eta real  (closed families only)
combined_min          g = 1 - H_eta(1 - t)
====================  =========================================

H_eta is realized as member(beta + eta^+) o member(beta + eta^-)^{-1} with the
anchor beta = eta0 + |eta| + 1; the result does not depend on the anchor and a
regression test asserts that.  Densities use the inner map's derivative, in
log space where the derivative under- or overflows.
"""

from __future__ import annotations

import numpy as np

from .catalog import StoppingFamily
from .continuous import ContinuousModel
from .errors import ClosureError, ParameterError
from .pgf import Pgf

__all__ = [
    "TransformedModel",
    "stopped_max",
    "stopped_min",
    "max_precursor",
    "min_precursor",
    "combined_extension",
    "two_param_combined",
    "KINDS",
]

KINDS = (
    "stopped_max",
    "stopped_min",
    "max_precursor",
    "min_precursor",
    "combined_max",
    "combined_min",
)


class _CdfMap:
    """Monotone map of [0,1], propagated as (value, complement) pairs.

    Carrying the survival side through every step keeps the far tails exact:
    intermediates very close to 1 would otherwise lose the complement to
    rounding before the next map in a chain can use it.
    """

    def apply_pair(self, u, w):
        raise NotImplementedError

    def inverse_pair(self, u, w):
        raise NotImplementedError

    def log_deriv(self, u, one_minus_u=None):
        raise NotImplementedError

    @staticmethod
    def _reconcile(value, complement):
        """Pick the relatively accurate channel; value saturates towards 1."""
        v = np.asarray(value)
        c = np.asarray(complement)
        return np.clip(np.where(v <= 0.5, v, 1.0 - c), 0.0, 1.0)

    def apply(self, u):
        u = np.asarray(u, dtype=float)
        return self._reconcile(*self.apply_pair(u, 1.0 - u))

    def inverse(self, u):
        u = np.asarray(u, dtype=float)
        return self._reconcile(*self.inverse_pair(u, 1.0 - u))


class _DirectMap(_CdfMap):
    """g = h (flavor max) or g = conj(h) (flavor min)."""

    def __init__(self, pgf: Pgf, flavor: str):
        self.pgf = pgf
        self.min_flavor = flavor == "min"

    def apply_pair(self, u, w):
        if self.min_flavor:
            return self.pgf.conj(u), self.pgf.eval(w)
        return self.pgf.eval(u), self.pgf.conj(w)

    def inverse_pair(self, u, w):
        if self.min_flavor:
            return self.pgf.conj_inverse(u), self.pgf.inverse(w)
        return self.pgf.inverse(u), self.pgf.conj_inverse(w)

    def log_deriv(self, u, one_minus_u=None):
        if self.min_flavor:
            # conj'(u) = h'(1-u); pass the accurate reflection when available
            s = one_minus_u if one_minus_u is not None else 1.0 - np.asarray(u)
            return self.pgf.log_deriv(s, np.asarray(u))
        return self.pgf.log_deriv(u, one_minus_u)


class _InverseMap(_CdfMap):
    """g = h^{-1} (flavor max) or g = conj(h)^{-1} (flavor min)."""

    def __init__(self, pgf: Pgf, flavor: str):
        self.pgf = pgf
        self.min_flavor = flavor == "min"

    def apply_pair(self, u, w):
        if self.min_flavor:
            return self.pgf.conj_inverse(u), self.pgf.inverse(w)
        return self.pgf.inverse(u), self.pgf.conj_inverse(w)

    def inverse_pair(self, u, w):
        if self.min_flavor:
            return self.pgf.conj(u), self.pgf.eval(w)
        return self.pgf.eval(u), self.pgf.conj(w)

    def log_deriv(self, u, one_minus_u=None):
        w = one_minus_u if one_minus_u is not None else 1.0 - np.asarray(u)
        s, sc = self.apply_pair(np.asarray(u), np.asarray(w))
        if self.min_flavor:
            return -np.asarray(self.pgf.log_deriv(np.asarray(sc), np.asarray(s)))
        return -np.asarray(self.pgf.log_deriv(np.asarray(s), np.asarray(sc)))


class _ChainMap(_CdfMap):
    """Composition of maps, applied right to left like function composition."""

    def __init__(self, outer: _CdfMap, inner: _CdfMap):
        self.outer = outer
        self.inner = inner

    def apply_pair(self, u, w):
        mid, midc = self.inner.apply_pair(u, w)
        return self.outer.apply_pair(mid, midc)

    def inverse_pair(self, u, w):
        mid, midc = self.outer.inverse_pair(u, w)
        return self.inner.inverse_pair(mid, midc)

    def log_deriv(self, u, one_minus_u=None):
        w = one_minus_u if one_minus_u is not None else 1.0 - np.asarray(u)
        mid, midc = self.inner.apply_pair(np.asarray(u), np.asarray(w))
        return np.asarray(self.outer.log_deriv(mid, midc)) + np.asarray(
            self.inner.log_deriv(u, one_minus_u)
        )


class TransformedModel(ContinuousModel):
    """Continuous model with cdf g(F_X(y)) for a kind-appropriate map g."""

    def __init__(self, kind: str, base: ContinuousModel, cdf_map: _CdfMap,
                 stopping_desc: str, eta: float | None = None):
        if kind not in KINDS:
            raise ParameterError(f"unknown transform kind '{kind}'")
        self.kind = kind
        self.base = base
        self.map = cdf_map
        self.stopping_desc = stopping_desc
        self.eta = eta
        self.support = base.support
        self.dist_id = kind

    def params_dict(self):
        return {}

    def spec_dict(self):
        out = {"kind": self.kind, "stopping": self._stopping_spec(),
               "base": self.base.spec_dict()}
        if self.eta is not None:
            out["eta"] = self.eta
        return out

    def _stopping_spec(self):
        m = self.map
        if isinstance(m, (_DirectMap, _InverseMap)):
            return m.pgf.spec_dict()
        return {"describe": self.stopping_desc}

    def __repr__(self):
        return f"{self.kind}({self.stopping_desc}, {self.base!r})"

    # ContinuousModel surface -------------------------------------------------

    def _cdf(self, x):
        f = np.asarray(self.base.cdf(x))
        s = np.asarray(self.base.sf(x))
        v, c = self.map.apply_pair(f, s)
        return self.map._reconcile(v, c)

    def _sf(self, x):
        f = np.asarray(self.base.cdf(x))
        s = np.asarray(self.base.sf(x))
        v, c = self.map.apply_pair(f, s)
        return self.map._reconcile(c, v)

    def _pdf(self, x):
        with np.errstate(all="ignore"):
            return np.exp(self._logpdf(x))

    def _logpdf(self, x):
        f = np.asarray(self.base.cdf(x))
        s = np.asarray(self.base.sf(x))
        with np.errstate(all="ignore"):
            ld = np.asarray(self.map.log_deriv(f, s))
            base_lp = np.asarray(self.base.logpdf(x))
            out = ld + base_lp
        # past the representable range of the base density the product is 0
        return np.where(np.isneginf(base_lp), -np.inf, out)

    def _quantile(self, u):
        return np.asarray(self.base.quantile(self.map.inverse(u)))


def _desc(stopping) -> str:
    return repr(stopping)


def stopped_max(stopping: Pgf, base: ContinuousModel) -> TransformedModel:
    """Y = max of N i.i.d. copies of X: cdf h_N(F_X)."""
    return TransformedModel("stopped_max", base, _DirectMap(stopping, "max"),
                            _desc(stopping))


def stopped_min(stopping: Pgf, base: ContinuousModel) -> TransformedModel:
    """Y = min of N i.i.d. copies of X: cdf 1 - h_N(1 - F_X)."""
    return TransformedModel("stopped_min", base, _DirectMap(stopping, "min"),
                            _desc(stopping))


def max_precursor(stopping: Pgf, base: ContinuousModel) -> TransformedModel:
    """Y whose N-stopped maximum is X: cdf h_N^{-1}(F_X)."""
    return TransformedModel("max_precursor", base, _InverseMap(stopping, "max"),
                            _desc(stopping))


def min_precursor(stopping: Pgf, base: ContinuousModel) -> TransformedModel:
    """Y whose N-stopped minimum is X: cdf conj(h_N)^{-1}(F_X)."""
    return TransformedModel("min_precursor", base, _InverseMap(stopping, "min"),
                            _desc(stopping))


def _combined_map(family: StoppingFamily, eta: float, flavor: str,
                  beta: float | None = None) -> _CdfMap:
    if not family.closed_under_composition:
        raise ClosureError(
            f"combined extension requires a family closed under composition; "
            f"'{family.family_id}' is not"
        )
    if beta is None:
        # any beta >= eta0 realizes H_eta (both member indices stay >= eta0);
        # keeping beta small keeps the intermediate power exponents ~e^beta
        # instead of ~e^(beta+|eta|), which would underflow the complement
        # channel for |eta| beyond ~2.5 on infinite-mean families
        beta = family.eta0 + 1.0
    elif beta < family.eta0:
        raise ParameterError(f"anchor beta must be >= eta0 = {family.eta0:g}")
    eta_plus = max(eta, 0.0)
    eta_minus = max(-eta, 0.0)
    outer = family.member(beta + eta_plus)
    inner = family.member(beta + eta_minus)
    return _ChainMap(_DirectMap(outer, flavor), _InverseMap(inner, flavor))


def combined_extension(family: StoppingFamily, eta: float, base: ContinuousModel,
                       flavor: str = "max", beta: float | None = None) -> TransformedModel:
    """Two-sided extension H_eta(F_X) (flavor max) or its conjugate (flavor min).

    eta may take any real sign; eta >= eta0 reduces pointwise to the stopped
    extreme, eta <= -eta0 to the precursor, and eta = 0 to the base model.
    """
    if flavor not in ("max", "min"):
        raise ParameterError("flavor must be 'max' or 'min'")
    kind = "combined_max" if flavor == "max" else "combined_min"
    cdf_map = _combined_map(family, float(eta), flavor, beta)
    return TransformedModel(kind, base, cdf_map, family.describe(), eta=float(eta))


def two_param_combined(stop_inner: Pgf, stop_outer: Pgf, base: ContinuousModel,
                       flavor: str = "max",
                       outer_is_extreme: bool = True) -> TransformedModel:
    """General two-parameter combined transform of Definition-3 type.

    With ``outer_is_extreme`` the cdf is h_{outer}(h_{inner}^{-1}(F_X)) for
    flavor max (the stopped extreme of a precursor); otherwise the precursor of
    a stopped extreme, h_{outer}^{-1}(h_{inner}(F_X)).  Flavor min uses the
    conjugate maps throughout.  The stopping operands may come from non-closed
    families.
    """
    if flavor not in ("max", "min"):
        raise ParameterError("flavor must be 'max' or 'min'")
    if outer_is_extreme:
        cdf_map = _ChainMap(_DirectMap(stop_outer, flavor),
                            _InverseMap(stop_inner, flavor))
    else:
        cdf_map = _ChainMap(_InverseMap(stop_outer, flavor),
                            _DirectMap(stop_inner, flavor))
    kind = "combined_max" if flavor == "max" else "combined_min"
    desc = f"({stop_inner!r}, {stop_outer!r})"
    return TransformedModel(kind, base, cdf_map, desc)
