"""Sine and cosine integrals and the F1/F2 auxiliaries used by the rate formulas.

Power series below ``SERIES_MAX``; above it the continued fraction for
E1(ix) (modified Lentz), which is accurate to a few ulp for every x > 2.
"""
import math

import numpy as np

from ._accel import njit
from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
SERIES_MAX = 4.0

_EPS = 1e-16
_FPMIN = 1e-300
_MAXIT = 10_000


@njit(cache=True)
def _cisi_series(x):
    x2 = x * x
    # Si
    term = x
    si = x
    k = 0
    while True:
        k += 1
        term *= -x2 / ((2 * k) * (2 * k + 1))
        add = term / (2 * k + 1)
        si += add
        if abs(add) < _EPS * abs(si):
            break
    # Ci - gamma - ln x
    term = 1.0
    acc = 0.0
    k = 0
    while True:
        k += 1
        term *= -x2 / ((2 * k - 1) * (2 * k))
        add = term / (2 * k)
        acc += add
        if abs(add) < _EPS * max(abs(acc), 1e-300) or k > 200:
            break
    ci = EULER_GAMMA + math.log(x) + acc
    return ci, si


@njit(cache=True)
def _cisi_cf(x):
    b = complex(1.0, x)
    c = complex(1.0 / _FPMIN, 0.0)
    d = 1.0 / b
    h = d
    for i in range(2, _MAXIT):
        a = -float((i - 1) * (i - 1))
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        de = c * d
        h *= de
        if abs(de.real - 1.0) + abs(de.imag) < _EPS:
            break
    h *= complex(math.cos(x), -math.sin(x))
    return -h.real, 0.5 * math.pi + h.imag


@njit(cache=True)
def cisi_scalar(x):
    """(Ci(x), Si(x)) for finite x > 0."""
    if x <= SERIES_MAX:
        return _cisi_series(x)
    return _cisi_cf(x)


@njit(cache=True)
def _cisi_array(xs, ci_out, si_out):
    for i in range(xs.size):
        ci, si = cisi_scalar(xs[i])
        ci_out[i] = ci
        si_out[i] = si


@njit(cache=True)
def f1f2_scalar(x):
    ci, si = cisi_scalar(x)
    s = math.sin(x)
    c = math.cos(x)
    return s * ci - c * si, -s * si - c * ci


def _as_checked(x, positive):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite", value=x)
    if positive and np.any(arr <= 0):
        raise DomainError("argument must be > 0", value=x)
    return arr


def _dispatch(arr, which):
    flat = np.ascontiguousarray(arr.ravel())
    ci = np.empty_like(flat)
    si = np.empty_like(flat)
    pos = flat > 0
    if np.any(pos):
        sub_ci = np.empty(int(pos.sum()))
        sub_si = np.empty_like(sub_ci)
        _cisi_array(np.ascontiguousarray(flat[pos]), sub_ci, sub_si)
        ci[pos] = sub_ci
        si[pos] = sub_si
    si[flat == 0] = 0.0
    ci[flat == 0] = -np.inf
    out = si if which == "si" else ci
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def sin_integral(x):
    """Si(x) = integral of sin(t)/t from 0 to x.

    Accepts scalars or arrays. Negative arguments use Si(-x) = -Si(x).
    """
    arr = _as_checked(x, positive=False)
    sign = np.sign(arr)
    val = _dispatch(np.abs(arr), "si")
    return val * sign if isinstance(val, np.ndarray) else float(val * sign)


def cos_integral(x):
    """Ci(x) = gamma_E + ln x + integral of (cos t - 1)/t from 0 to x, x > 0."""
    arr = _as_checked(x, positive=True)
    return _dispatch(arr, "ci")


def f1(x):
    """F1(x) = sin(x) Ci(x) - cos(x) Si(x)."""
    arr = _as_checked(x, positive=True)
    return np.sin(arr) * cos_integral(arr) - np.cos(arr) * sin_integral(arr)


def f2(x):
    """F2(x) = -sin(x) Si(x) - cos(x) Ci(x)."""
    arr = _as_checked(x, positive=True)
    return -np.sin(arr) * sin_integral(arr) - np.cos(arr) * cos_integral(arr)
