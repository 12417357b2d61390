"""Catalog of stopping-model families and the combinators that build new ones.

Every family is parametrized by ``eta = -log Pr(N = 1)`` with parameter space
``[eta0, inf)``.  Families closed under pgf composition compose additively in
eta; the ``closed_under_composition`` / ``auto_reversible`` flags recorded here
are declarations taken at construction time and are re-verified numerically by
the property checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, PairingError, ParameterError
from .pgf import (
    ETNB,
    ComposedPgf,
    Deterministic,
    DilatedPgf,
    Logarithmic,
    Pgf,
    Sibuya,
    SibuyaGeometric,
    ZTBinomial,
    ZTGeometric,
    ZTPoisson,
    _ret,
    _unit,
    compose,
)

__all__ = [
    "StoppingFamily",
    "make_family",
    "reversal_partner",
    "sandwich_family",
    "dilation_family",
    "auto_reversible_from_pair",
    "FAMILY_IDS",
]

ETA_TOL = 1e-12


@dataclass
class StoppingFamily:
    """A uniparametric stopping model exposed through eta = -log Pr(N=1)."""

    family_id: str
    shape: dict
    eta0: float
    closed_under_composition: bool
    auto_reversible: bool
    contains_identity: bool
    _member: Callable[[float], Pgf] = field(repr=False)
    reversal_partner_id: Optional[str] = None

    def member(self, eta: float) -> Pgf:
        if eta < self.eta0 - ETA_TOL:
            raise DomainError(
                f"{self.family_id}: eta = {eta:g} below family minimum {self.eta0:g}"
            )
        eta = max(float(eta), self.eta0)
        member = self._member(eta)
        member._family = self
        member._eta = eta
        return member

    def describe(self) -> str:
        inner = ", ".join(f"{k}={v:g}" for k, v in self.shape.items())
        return f"{self.family_id}({inner})" if inner else self.family_id

    def spec_dict(self) -> dict:
        return {"family": self.family_id, "shape": dict(self.shape)}


def _solve_native(pmf1: Callable[[float], float], eta: float, lo: float, hi: float) -> float:
    """Solve -log pmf1(x) = eta for a monotone pmf1 by bisection on [lo, hi]."""
    target = math.exp(-eta)
    flo, fhi = pmf1(lo), pmf1(hi)
    increasing = fhi > flo
    a, b = lo, hi
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = pmf1(mid)
        if abs(fm - target) <= 1e-15:
            return mid
        if (fm > target) == increasing:
            b = mid
        else:
            a = mid
    return 0.5 * (a + b)


# ----- member constructors --------------------------------------------------


def _member_degenerate(eta: float) -> Pgf:
    if eta > ETA_TOL:
        raise DomainError("degenerate family has the single member at eta = 0")
    return Deterministic(1)


def _member_geometric(eta: float) -> Pgf:
    return Deterministic(1) if eta <= ETA_TOL else ZTGeometric(math.exp(-eta))


def _member_sibuya(eta: float) -> Pgf:
    return Deterministic(1) if eta <= ETA_TOL else Sibuya(math.exp(-eta))


def _member_sibuya_geometric(alpha: float):
    def member(eta: float) -> Pgf:
        if eta <= ETA_TOL:
            return Deterministic(1)
        return SibuyaGeometric(alpha, math.exp(-eta))

    return member


def _member_zt_poisson(eta: float) -> Pgf:
    if eta <= ETA_TOL:
        return Deterministic(1)
    alpha = _solve_native(
        lambda a: a / math.expm1(a), eta, 1e-12, max(50.0, 4.0 * eta + 20.0)
    )
    return ZTPoisson(alpha)


def _member_logarithmic(eta: float) -> Pgf:
    if eta <= ETA_TOL:
        return Deterministic(1)
    p = _solve_native(lambda p: -p / math.log1p(-p), eta, 1e-15, 1.0 - 1e-15)
    return Logarithmic(p)


def _member_zt_binomial(n: int):
    def pmf1(p: float) -> float:
        return n * p * (1.0 - p) ** (n - 1) / -math.expm1(n * math.log1p(-p))

    def member(eta: float) -> Pgf:
        if eta <= ETA_TOL:
            return Deterministic(1)
        p = _solve_native(pmf1, eta, 1e-15, 1.0 - 1e-15)
        return ZTBinomial(n, p)

    return member


def _member_etnb(r: float):
    def pmf1(p: float) -> float:
        if r == 0.0:
            return -p / math.log1p(-p)
        return r * p / math.expm1(-r * math.log1p(-p))

    def member(eta: float) -> Pgf:
        if eta <= ETA_TOL:
            return Deterministic(1)
        if -1.0 < r < 0.0 and eta >= -math.log(-r):
            raise DomainError(
                f"etnb(r={r:g}): eta must stay below {-math.log(-r):g} "
                "(Pr(N=1) cannot go under |r|)"
            )
        p = _solve_native(pmf1, eta, 1e-15, 1.0 - 1e-15)
        return ETNB(p, r)

    return member


# ----- Proposition-3 sandwich members with printed closed forms ---------------


class PoissonLogMember(Pgf):
    """Member of the composition-closed family sandwiching a geometric between
    a zero-truncated Poisson and a logarithmic pgf; eta in [alpha, inf)."""

    family_id = "pois_log"

    def __init__(self, alpha: float, eta: float):
        super().__init__()
        if not alpha > 0.0:
            raise ParameterError("pois_log requires alpha > 0")
        if eta < alpha - ETA_TOL:
            raise DomainError("pois_log requires eta >= alpha")
        self.alpha = float(alpha)
        self.eta = max(float(eta), alpha)
        a, e = self.alpha, self.eta
        self._A = math.exp(e) * math.expm1(a)  # e^eta (e^alpha - 1)
        self._B = math.exp(a) - math.exp(e)
        self._C = math.expm1(e)

    def params_dict(self):
        return {"alpha": self.alpha, "eta": self.eta}

    def _ratio(self, t):
        E = np.expm1(self.alpha * t)
        return (self._A + self._B * E) / (self._A - self._C * E)

    def _eval(self, t):
        return np.log(self._ratio(t)) / self.alpha

    def _deriv(self, t, order):
        a = self.alpha
        E = np.expm1(a * t)
        N = self._A + self._B * E
        D = self._A - self._C * E
        if order == 1:
            return (E + 1.0) * (self._B / N + self._C / D)
        return a * (E + 1.0) * (
            (self._B / N + self._C / D)
            + (E + 1.0) * (self._C ** 2 / D ** 2 - self._B ** 2 / N ** 2)
        )

    def inverse(self, u):
        u, scalar = _unit(u, "u")
        r = np.exp(self.alpha * u)
        E = self._A * (r - 1.0) / (self._B + r * self._C)
        return _ret(np.log1p(E) / self.alpha, scalar)

    def compose_series(self, inner):
        return self._decomposition().compose_series(inner)

    def _decomposition(self) -> Pgf:
        if getattr(self, "_decomp", None) is None:
            a = self.alpha
            inner = ZTPoisson(a)
            outer = Logarithmic(-math.expm1(-a))
            mid_eta = self.eta - a
            if mid_eta <= ETA_TOL:
                self._decomp = ComposedPgf(outer, inner)
            else:
                self._decomp = ComposedPgf(
                    outer, ComposedPgf(ZTGeometric(math.exp(-mid_eta)), inner)
                )
        return self._decomp

    def _conj(self, u):
        return self._decomposition()._conj(u)

    def conj_inverse(self, u):
        return self._decomposition().conj_inverse(u)

    def mean(self):
        return self._decomposition().mean()


class _SandwichClosedMember(Pgf):
    """Shared machinery for the two negative-binomial-flavoured sandwich families."""

    def _decomposition(self) -> Pgf:
        if getattr(self, "_decomp", None) is None:
            mid_eta = self.eta - self.alpha
            inner = self._n1()
            outer = self._n2()
            if mid_eta <= ETA_TOL:
                self._decomp = ComposedPgf(outer, inner)
            else:
                self._decomp = ComposedPgf(
                    outer, ComposedPgf(ZTGeometric(math.exp(-mid_eta)), inner)
                )
        return self._decomp

    def compose_series(self, inner):
        return self._decomposition().compose_series(inner)

    def _conj(self, u):
        return self._decomposition()._conj(u)

    def conj_inverse(self, u):
        return self._decomposition().conj_inverse(u)

    def mean(self):
        return self._decomposition().mean()


class NegBinomialEtnbMember(_SandwichClosedMember):
    """Member of the closed family built from a zero-truncated negative binomial
    and an extended truncated negative binomial; shape (alpha, beta), beta >= 1."""

    family_id = "nb_etnb"

    def __init__(self, alpha: float, beta: float, eta: float):
        super().__init__()
        if not alpha > 0.0:
            raise ParameterError("nb_etnb requires alpha > 0")
        if not beta >= 1.0:
            raise ParameterError("nb_etnb requires beta >= 1")
        if eta < alpha - ETA_TOL:
            raise DomainError("nb_etnb requires eta >= alpha")
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.eta = max(float(eta), alpha)
        a, b, e = self.alpha, self.beta, self.eta
        self._c = -math.expm1(-a / b)  # 1 - e^{-alpha/beta}
        self._ka = 1.0 - math.exp(a + e)
        self._kb = math.expm1(e)
        self._kc = math.exp(a) - math.exp(a + e)
        self._kd = math.exp(e) - math.exp(a)

    def params_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "eta": self.eta}

    def _w(self, t):
        return 1.0 - self._c * t

    def _AB(self, t):
        wb = self._w(t) ** self.beta
        A = self._ka * wb + self._kb
        B = self._kc * wb + self._kd
        return A, B

    def _eval(self, t):
        A, B = self._AB(t)
        return (1.0 - (A / B) ** (1.0 / self.beta)) / self._c

    def _deriv(self, t, order):
        b = self.beta
        w = self._w(t)
        A, B = self._AB(t)
        K = math.exp(self.eta) * math.expm1(self.alpha) ** 2
        d1 = (A / B) ** (1.0 / b - 1.0) * w ** (b - 1.0) * K / B ** 2
        if order == 1:
            return d1
        wp = -self._c
        Ap = self._ka * b * w ** (b - 1.0) * wp
        Bp = self._kc * b * w ** (b - 1.0) * wp
        logd = (1.0 / b - 1.0) * (Ap / A - Bp / B) + (b - 1.0) * wp / w - 2.0 * Bp / B
        return d1 * logd

    def inverse(self, u):
        u, scalar = _unit(u, "u")
        rho = (1.0 - u * self._c) ** self.beta
        wb = (rho * self._kd - self._kb) / (self._ka - rho * self._kc)
        t = (1.0 - wb ** (1.0 / self.beta)) / self._c
        return _ret(np.clip(t, 0.0, 1.0), scalar)

    def _n1(self) -> Pgf:
        # zero-truncated negative binomial(alpha*beta, beta)
        return ETNB(self._c, self.beta)

    def _n2(self) -> Pgf:
        # extended truncated negative binomial(alpha, -1/beta)
        return ETNB(-math.expm1(-self.alpha), -1.0 / self.beta)


class BinomialNegBinomialMember(_SandwichClosedMember):
    """Member of the closed family built from a zero-truncated binomial and a
    zero-truncated negative binomial; shape (alpha, n), integer n >= 1."""

    family_id = "binom_nb"

    def __init__(self, alpha: float, n: int, eta: float):
        super().__init__()
        if not alpha > 0.0:
            raise ParameterError("binom_nb requires alpha > 0")
        if int(n) != n or n < 1:
            raise ParameterError("binom_nb requires integer n >= 1")
        if eta < alpha - ETA_TOL:
            raise DomainError("binom_nb requires eta >= alpha")
        self.alpha = float(alpha)
        self.n = int(n)
        self.eta = max(float(eta), alpha)
        a, n_, e = self.alpha, self.n, self.eta
        self._c = math.expm1(a / n_)  # e^{alpha/n} - 1
        self._ka = math.expm1(e)
        self._kb = 1.0 - math.exp(a + e)
        self._kc = math.exp(e) - math.exp(a)
        self._kd = math.exp(a) - math.exp(a + e)

    def params_dict(self):
        return {"alpha": self.alpha, "n": self.n, "eta": self.eta}

    def _v(self, t):
        return 1.0 + self._c * t

    def _AB(self, t):
        vn = self._v(t) ** self.n
        A = self._ka * vn + self._kb
        B = self._kc * vn + self._kd
        return A, B

    def _eval(self, t):
        A, B = self._AB(t)
        return ((A / B) ** (-1.0 / self.n) - 1.0) / self._c

    def _deriv(self, t, order):
        n = self.n
        v = self._v(t)
        A, B = self._AB(t)
        K = math.exp(self.eta) * math.expm1(self.alpha) ** 2
        d1 = (A / B) ** (-1.0 / n - 1.0) * v ** (n - 1.0) * K / B ** 2
        if order == 1:
            return d1
        vp = self._c
        Ap = self._ka * n * v ** (n - 1.0) * vp
        Bp = self._kc * n * v ** (n - 1.0) * vp
        logd = (-1.0 / n - 1.0) * (Ap / A - Bp / B) + (n - 1.0) * vp / v - 2.0 * Bp / B
        return d1 * logd

    def inverse(self, u):
        u, scalar = _unit(u, "u")
        rho = (1.0 + u * self._c) ** (-self.n)
        vn = (rho * self._kd - self._kb) / (self._ka - rho * self._kc)
        t = (vn ** (1.0 / self.n) - 1.0) / self._c
        return _ret(np.clip(t, 0.0, 1.0), scalar)

    def _n1(self) -> Pgf:
        # zero-truncated binomial(n, 1 - e^{-alpha/n})
        return ZTBinomial(self.n, -math.expm1(-self.alpha / self.n))

    def _n2(self) -> Pgf:
        # zero-truncated negative binomial(alpha, 1/n)
        return ETNB(-math.expm1(-self.alpha), 1.0 / self.n)


# ----- family construction ----------------------------------------------------


FAMILY_IDS = (
    "degenerate",
    "zt_geometric",
    "zt_poisson",
    "logarithmic",
    "sibuya",
    "zt_binomial",
    "etnb",
    "pois_log",
    "nb_etnb",
    "binom_nb",
    "sibuya_geometric",
)


def make_family(family_id: str, **shape) -> StoppingFamily:
    """Build a catalog stopping family; shape parameters are fixed across eta."""
    if family_id == "degenerate":
        return StoppingFamily("degenerate", {}, 0.0, True, True, True,
                              _member_degenerate)
    if family_id == "zt_geometric":
        return StoppingFamily("zt_geometric", {}, 0.0, True, True, True,
                              _member_geometric, reversal_partner_id="zt_geometric")
    if family_id == "zt_poisson":
        return StoppingFamily("zt_poisson", {}, 0.0, False, False, True,
                              _member_zt_poisson, reversal_partner_id="logarithmic")
    if family_id == "logarithmic":
        return StoppingFamily("logarithmic", {}, 0.0, False, False, True,
                              _member_logarithmic, reversal_partner_id="zt_poisson")
    if family_id == "sibuya":
        return StoppingFamily("sibuya", {}, 0.0, True, False, True, _member_sibuya)
    if family_id == "zt_binomial":
        n = int(shape["n"])
        return StoppingFamily("zt_binomial", {"n": n}, 0.0, False, False, True,
                              _member_zt_binomial(n), reversal_partner_id="etnb")
    if family_id == "etnb":
        r = float(shape["r"])
        if not r > -1.0:
            raise ParameterError("etnb requires r > -1")
        return StoppingFamily("etnb", {"r": r}, 0.0, False, False, True,
                              _member_etnb(r), reversal_partner_id="etnb")
    if family_id == "pois_log":
        alpha = float(shape["alpha"])
        if not alpha > 0.0:
            raise ParameterError("pois_log requires alpha > 0")
        return StoppingFamily(
            "pois_log", {"alpha": alpha}, alpha, True, True, False,
            lambda eta: PoissonLogMember(alpha, eta),
            reversal_partner_id="pois_log",
        )
    if family_id == "nb_etnb":
        alpha, beta = float(shape["alpha"]), float(shape["beta"])
        return StoppingFamily(
            "nb_etnb", {"alpha": alpha, "beta": beta}, alpha, True, False, False,
            lambda eta: NegBinomialEtnbMember(alpha, beta, eta),
            reversal_partner_id="binom_nb",
        )
    if family_id == "binom_nb":
        alpha, n = float(shape["alpha"]), int(shape["n"])
        return StoppingFamily(
            "binom_nb", {"alpha": alpha, "n": n}, alpha, True, False, False,
            lambda eta: BinomialNegBinomialMember(alpha, n, eta),
            reversal_partner_id="nb_etnb",
        )
    if family_id == "sibuya_geometric":
        alpha = float(shape["alpha"])
        if not (0.0 < alpha < 1.0):
            raise ParameterError("sibuya_geometric requires alpha in (0, 1)")
        return StoppingFamily("sibuya_geometric", {"alpha": alpha}, 0.0, True, False,
                              True, _member_sibuya_geometric(alpha))
    raise ParameterError(f"unknown stopping family '{family_id}'")


# ----- reversal partners --------------------------------------------------------


def _partner_of_pgf(n: Pgf) -> Optional[Pgf]:
    if isinstance(n, Deterministic):
        return Sibuya(1.0 / n.m) if n.m > 1 else Deterministic(1)
    if isinstance(n, ZTGeometric):
        return ZTGeometric(n.p)
    if isinstance(n, Sibuya):
        m = 1.0 / n.b
        if abs(m - round(m)) < 1e-9:
            return Deterministic(int(round(m)))
        return None
    if isinstance(n, ZTPoisson):
        return Logarithmic(-math.expm1(-n.alpha))
    if isinstance(n, Logarithmic):
        return ZTPoisson(-math.log1p(-n.p))
    if isinstance(n, ETNB):
        p, r = n.p, n.r
        if r == 0.0:
            return ZTPoisson(-math.log1p(-p))
        if r > 0.0:
            return ETNB(-math.expm1(r * math.log1p(-p)), 1.0 / r)
        m = -1.0 / r
        if abs(m - round(m)) < 1e-9:
            m = int(round(m))
            return ZTBinomial(m, -math.expm1(math.log1p(-p) / m))
        return None
    if isinstance(n, ZTBinomial):
        return ETNB(-math.expm1(n.n * math.log1p(-n.p)), -1.0 / n.n)
    if isinstance(n, PoissonLogMember):
        return PoissonLogMember(n.alpha, n.eta)
    if isinstance(n, BinomialNegBinomialMember):
        return NegBinomialEtnbMember(n.alpha, float(n.n), n.eta)
    if isinstance(n, NegBinomialEtnbMember):
        if abs(n.beta - round(n.beta)) < 1e-9:
            return BinomialNegBinomialMember(n.alpha, int(round(n.beta)), n.eta)
        return None
    return None


def reversal_partner(obj):
    """N* with h_{N*} = conj(h_N)^{-1}, when a catalog partner exists.

    Accepts a StoppingFamily (returns the partner family) or a Pgf (returns the
    partner pgf).  Auto-reversible inputs return themselves; absence of a
    partner returns None.
    """
    if isinstance(obj, StoppingFamily):
        pid = obj.reversal_partner_id
        if pid is None:
            return None
        if pid == obj.family_id and obj.family_id in ("zt_geometric", "pois_log"):
            return obj
        if pid == "logarithmic":
            return make_family("logarithmic")
        if pid == "zt_poisson":
            return make_family("zt_poisson")
        if pid == "binom_nb":
            beta = obj.shape["beta"]
            if abs(beta - round(beta)) < 1e-9:
                return make_family("binom_nb", alpha=obj.shape["alpha"],
                                   n=int(round(beta)))
            return None
        if pid == "nb_etnb":
            return make_family("nb_etnb", alpha=obj.shape["alpha"],
                               beta=float(obj.shape["n"]))
        if pid == "etnb":
            if obj.family_id == "zt_binomial":
                return None  # partner depends on the member's p, not just the shape
            r = obj.shape["r"]
            if r > 0.0:
                return make_family("etnb", r=1.0 / r)
            return None
        return None
    return _partner_of_pgf(obj)


# ----- combinators ---------------------------------------------------------------


def _grid_equal(f, g, tol=1e-10, n=201):
    t = np.linspace(0.0, 1.0, n)
    return float(np.max(np.abs(np.asarray(f(t)) - np.asarray(g(t))))) <= tol


def sandwich_family(base: StoppingFamily, n1: Pgf, n2: Pgf, alpha: float,
                    family_id: str | None = None) -> StoppingFamily:
    """Closed family with members h_{n2} o h_{base, eta-alpha} o h_{n1}.

    Requires the base family closed under composition and the validated
    precondition that compose(n1, n2) coincides with base.member(alpha).
    """
    if not base.closed_under_composition:
        raise PairingError("sandwich_family needs a base closed under composition")
    target = base.member(alpha)
    comp = ComposedPgf(n1, n2)
    if not _grid_equal(comp.eval, target.eval):
        raise PairingError(
            "sandwich_family precondition failed: compose(n1, n2) does not match "
            f"the base member at eta = {alpha:g}"
        )

    def member(eta: float) -> Pgf:
        mid = base.member(eta - alpha)
        return ComposedPgf(n2, ComposedPgf(mid, n1))

    return StoppingFamily(
        family_id or f"sandwich[{base.family_id}]",
        {"alpha": float(alpha)},
        alpha + base.eta0,
        True,
        False,
        False,
        member,
    )


def dilation_family(base: StoppingFamily, k: int) -> StoppingFamily:
    """Closed family with members (h_{base, k*eta}(t^k))^{1/k}; eta0 scales by 1/k."""
    if not base.closed_under_composition:
        raise PairingError("dilation_family needs a base closed under composition")
    if int(k) != k or k < 1:
        raise ParameterError("dilation_family requires integer k >= 1")
    k = int(k)
    if k == 1:
        return base

    def member(eta: float) -> Pgf:
        return DilatedPgf(base.member(k * eta), k)

    return StoppingFamily(
        f"dilated[{base.family_id},k={k}]",
        dict(base.shape, k=k),
        base.eta0 / k,
        True,
        False,
        base.contains_identity,
        member,
    )


def auto_reversible_from_pair(n: Pgf, n_star: Pgf):
    """Composites h_n o h_{n*} and h_{n*} o h_n, both extreme auto-reversible.

    The pair must itself be extreme reversible (h_{n*} o conj(h_n) = identity),
    which is validated on a grid before composing.
    """
    t = np.linspace(0.0, 1.0, 201)
    resid = np.max(np.abs(np.asarray(n_star.eval(n.conj(t))) - t))
    if resid > 1e-10:
        raise PairingError(
            f"operands are not extreme reversible (sup residual {resid:.3e})"
        )
    a = compose(n, n_star)
    b = compose(n_star, n)
    a.auto_reversible = True
    b.auto_reversible = True
    return a, b
