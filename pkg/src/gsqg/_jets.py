"""Truncated Taylor-jet arithmetic through fifth order.

A jet stores the Taylor coefficients ``f(r), f'(r), f''(r)/2!, ...,
f^(5)(r)/5!`` of a scalar function about a point ``r`` in one ndarray whose
leading axis is the coefficient index.  The trailing axes broadcast, so a jet
evaluated on a grid of base points is a ``(6, n)`` array and all operations
stay vectorized.

Arithmetic follows the classical power-series recurrences (Cauchy product,
J.C.P. Miller for powers), so derivatives come out exact to roundoff — no
finite differences anywhere in the package.
"""

from __future__ import annotations

import numpy as np

ORDER = 5

_FACTORIALS = np.array([1.0, 1.0, 2.0, 6.0, 24.0, 120.0])


def jet_var(r) -> np.ndarray:
    """Jet of the identity function at base points ``r``."""
    r = np.asarray(r, dtype=float)
    out = np.zeros((ORDER + 1,) + r.shape)
    out[0] = r
    out[1] = 1.0
    return out


def jet_const(c: float, r) -> np.ndarray:
    """Jet of a constant, shaped to match base points ``r``."""
    r = np.asarray(r, dtype=float)
    out = np.zeros((ORDER + 1,) + r.shape)
    out[0] = c
    return out


def jet_addc(u: np.ndarray, c: float) -> np.ndarray:
    """Jet of ``u + c``."""
    out = u.copy()
    out[0] = out[0] + c
    return out


def jet_add(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u + v


def jet_mul(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Cauchy product of two jets."""
    out = np.zeros(np.broadcast_shapes(u.shape, v.shape))
    for k in range(ORDER + 1):
        for j in range(k + 1):
            out[k] += u[j] * v[k - j]
    return out


def jet_recip(u: np.ndarray) -> np.ndarray:
    """Jet of ``1/u``; requires ``u[0] != 0``."""
    out = np.zeros_like(u)
    out[0] = 1.0 / u[0]
    for k in range(1, ORDER + 1):
        acc = u[k] * out[0]
        for j in range(1, k):
            acc = acc + u[j] * out[k - j]
        out[k] = -acc / u[0]
    return out


def jet_log(u: np.ndarray, head=None) -> np.ndarray:
    """Jet of ``log(u)``; requires ``u[0] > 0``.

    ``head`` optionally supplies a pre-computed, better-conditioned value of
    ``log(u[0])`` (e.g. ``log1p`` forms near cancellation); the derivative
    coefficients are unaffected by the choice.
    """
    out = np.zeros_like(u)
    out[0] = np.log(u[0]) if head is None else head
    for k in range(1, ORDER + 1):
        acc = k * u[k]
        for j in range(1, k):
            acc = acc - j * out[j] * u[k - j]
        out[k] = acc / (k * u[0])
    return out


def jet_pow(u: np.ndarray, beta: float) -> np.ndarray:
    """Jet of ``u ** beta``; requires ``u[0] > 0``.

    Non-negative integer exponents go through repeated squaring with exact
    Cauchy products.  The Miller recurrence divides by ``u[0]`` at every
    order, and for integer ``beta`` its terms must cancel across the scale
    ``u[0] ** (beta - k)`` that a generic power would have — catastrophic
    when ``u[0]`` is tiny (triple-log heads near zero lose every digit by
    fifth order).  Fractional powers keep that generic scale, so Miller's
    recurrence is dominated by single terms and stays at roundoff.
    """
    if beta == round(beta) and beta >= 0:
        n = int(round(beta))
        out = jet_const(1.0, u[0])
        base = u
        while n:
            if n & 1:
                out = jet_mul(out, base)
            n >>= 1
            if n:
                base = jet_mul(base, base)
        return out
    out = np.zeros_like(u)
    out[0] = u[0] ** beta
    for k in range(1, ORDER + 1):
        acc = np.zeros_like(u[0])
        for j in range(1, k + 1):
            acc = acc + ((beta + 1.0) * j - k) * u[j] * out[k - j]
        out[k] = acc / (k * u[0])
    return out


def jet_derivatives(u: np.ndarray) -> np.ndarray:
    """Convert Taylor coefficients to plain derivatives f, f', ..., f^(5)."""
    shape = (ORDER + 1,) + (1,) * (u.ndim - 1)
    return u * _FACTORIALS.reshape(shape)
