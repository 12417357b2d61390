"""Truncated power-series kernels used for pmf extraction.

All routines work on 1-D float arrays ``a`` where ``a[k]`` is the coefficient
of ``t**k``.  Everything is truncated to the length of the inputs; no aliasing
checks are done, callers pass freshly allocated arrays.
"""

from __future__ import annotations

import numpy as np


def mul(a: np.ndarray, b: np.ndarray, n: int | None = None) -> np.ndarray:
    """Product of two series, truncated to n coefficients."""
    if n is None:
        n = max(len(a), len(b))
    out = np.convolve(a, b)[:n]
    if len(out) < n:
        out = np.pad(out, (0, n - len(out)))
    return out


def power(a: np.ndarray, m: float, n: int | None = None) -> np.ndarray:
    """a(t)**m for a series with a[0] > 0, via the J.C.P. Miller recurrence.

    b[0] = a[0]**m and  k*a[0]*b[k] = sum_{j=1..k} ((m+1)j - k) a[j] b[k-j].
    """
    if n is None:
        n = len(a)
    a = np.asarray(a, dtype=float)
    a0 = a[0]
    if not a0 > 0.0:
        raise ValueError("power() needs a positive constant term")
    if len(a) < n:
        a = np.pad(a, (0, n - len(a)))
    b = np.zeros(n)
    b[0] = a0 ** m
    for k in range(1, n):
        j = np.arange(1, k + 1)
        w = (m + 1.0) * j - k
        s = np.dot(w * a[1 : k + 1], b[:k][::-1])
        b[k] = s / (k * a0)
    return b


def power_shifted(a: np.ndarray, m: float, n: int | None = None) -> np.ndarray:
    """a(t)**m where a has a zero constant term and lowest degree L.

    Requires L*m to be (numerically) a nonnegative integer; the result is
    t**(L*m) * (a/t**L)**m.
    """
    if n is None:
        n = len(a)
    a = np.asarray(a, dtype=float)
    nz = np.nonzero(a)[0]
    if len(nz) == 0:
        raise ValueError("power_shifted() of the zero series")
    L = int(nz[0])
    if L == 0:
        return power(a, m, n)
    shift = L * m
    if abs(shift - round(shift)) > 1e-9:
        raise ValueError("fractional leading power in power_shifted()")
    shift = int(round(shift))
    core = power(a[L:], m, max(n - shift, 1))
    out = np.zeros(n)
    out[shift : shift + len(core)] = core[: max(n - shift, 0)]
    return out


def exp(a: np.ndarray, n: int | None = None) -> np.ndarray:
    """exp(a(t)) for a series with a[0] == 0."""
    if n is None:
        n = len(a)
    a = np.asarray(a, dtype=float)
    if len(a) < n:
        a = np.pad(a, (0, n - len(a)))
    b = np.zeros(n)
    b[0] = 1.0
    ja = np.arange(n) * a  # j*a_j
    for k in range(1, n):
        b[k] = np.dot(ja[1 : k + 1], b[:k][::-1]) / k
    return b


def log1p(a: np.ndarray, n: int | None = None) -> np.ndarray:
    """log(1 + a(t)) for a series with a[0] == 0."""
    if n is None:
        n = len(a)
    a = np.asarray(a, dtype=float)
    if len(a) < n:
        a = np.pad(a, (0, n - len(a)))
    b = np.zeros(n)
    for k in range(1, n):
        if k == 1:
            b[1] = a[1]
            continue
        j = np.arange(1, k)
        s = np.dot(j * b[1:k], a[1:k][::-1])
        b[k] = a[k] - s / k
    return b


def geometric_fraction(h: np.ndarray, q: float, n: int | None = None) -> np.ndarray:
    """Series of q*h / (1 - (1-q)*h) for a series h with h[0] == 0."""
    if n is None:
        n = len(h)
    h = np.asarray(h, dtype=float)
    if len(h) < n:
        h = np.pad(h, (0, n - len(h)))
    c = np.zeros(n)
    r = 1.0 - q
    for k in range(1, n):
        s = np.dot(c[1:k], h[1:k][::-1]) if k > 1 else 0.0
        c[k] = q * h[k] + r * s
    return c


def compose(outer: np.ndarray, inner: np.ndarray, n: int | None = None) -> np.ndarray:
    """Polynomial composition outer(inner(t)); inner[0] must be 0.

    O(n^3) Horner fallback; structural per-family composition should be
    preferred when available.
    """
    if n is None:
        n = max(len(outer), len(inner))
    inner = np.asarray(inner, dtype=float)
    if inner[0] != 0.0:
        raise ValueError("compose() needs inner[0] == 0")
    out = np.zeros(n)
    for c in np.asarray(outer, dtype=float)[::-1]:
        out = mul(out, inner, n)
        out[0] += c
    return out
