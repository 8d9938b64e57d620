"""Hot loops: linear ODE stepping, correlation propagation, windowed Fourier sums.

Each kernel is written once as a plain function. ``*_nb`` is its numba
compilation, ``*_py`` the same source run by the interpreter, and the public
name picks one according to the ``SIM_DISABLE_NUMBA`` flag.
"""
import math
import types

import numpy as np

from ._accel import HAS_NUMBA

if HAS_NUMBA:
    from numba import njit as _jit
else:  # pragma: no cover
    _jit = None

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_MAX_STEPS = 2


def _hermitize(y, dim):
    for a in range(dim):
        for b in range(a, dim):
            u = y[a * dim + b]
            v = y[b * dim + a]
            m = 0.5 * (u + v.conjugate())
            y[a * dim + b] = m
            y[b * dim + a] = m.conjugate()


def _err_norm(err, y, ynew, rtol, atol):
    acc = 0.0
    for k in range(y.size):
        sc = atol + rtol * max(abs(y[k]), abs(ynew[k]))
        q = abs(err[k]) / sc
        acc += q * q
    return math.sqrt(acc / y.size)


def _dopri_linear(M, y0, t_out, rtol, atol, h0, hmax, max_steps, dim):
    """Adaptive DOPRI5 for dy/dt = M y, reporting y at every t_out.

    ``dim`` > 0 symmetrises y as a dim x dim Hermitian matrix after each
    accepted step (pass 0 for non-Hermitian arguments).
    """
    n = y0.size
    n_out = t_out.size
    Y = np.empty((n_out, n), dtype=np.complex128)
    stats = np.zeros(2, dtype=np.int64)
    y = y0.copy()
    t = t_out[0]
    Y[0, :] = y
    h = h0
    k1 = M @ y
    steps = 0
    for idx in range(1, n_out):
        t_end = t_out[idx]
        while t < t_end:
            if steps >= max_steps:
                return Y[:idx], stats, STATUS_MAX_STEPS
            last = False
            hs = min(h, hmax)
            if t + hs >= t_end:
                hs = t_end - t
                last = True
            k2 = M @ (y + hs * (A21 * k1))
            k3 = M @ (y + hs * (A31 * k1 + A32 * k2))
            k4 = M @ (y + hs * (A41 * k1 + A42 * k2 + A43 * k3))
            k5 = M @ (y + hs * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
            k6 = M @ (y + hs * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))
            ynew = y + hs * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
            k7 = M @ ynew
            err = hs * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
            en = _err_norm(err, y, ynew, rtol, atol)
            steps += 1
            if en <= 1.0:
                t = t_end if last else t + hs
                y = ynew
                if dim > 0:
                    _hermitize(y, dim)
                k1 = k7
                stats[0] += 1
                fac = 5.0 if en == 0.0 else min(5.0, max(0.2, 0.9 * en ** -0.2))
                if not last or fac < 1.0:
                    h = hs * fac
            else:
                stats[1] += 1
                h = hs * max(0.2, 0.9 * en ** -0.2)
                if h < 1e-14 * max(1.0, abs(t)):
                    return Y[:idx], stats, STATUS_STEP_UNDERFLOW
        Y[idx, :] = y
    return Y, stats, STATUS_OK


def _rk4_linear(M, y0, t_out, h):
    """Classical RK4 with the largest step <= h that tiles each output interval."""
    n = y0.size
    Y = np.empty((t_out.size, n), dtype=np.complex128)
    y = y0.copy()
    Y[0, :] = y
    for idx in range(1, t_out.size):
        span = t_out[idx] - t_out[idx - 1]
        m = max(1, int(math.ceil(span / h - 1e-12)))
        hs = span / m
        for _ in range(m):
            k1 = M @ y
            k2 = M @ (y + 0.5 * hs * k1)
            k3 = M @ (y + 0.5 * hs * k2)
            k4 = M @ (y + hs * k3)
            y = y + hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        Y[idx, :] = y
    return Y


def _propagate_observe(P, x0, O, n_steps):
    """out[k, m] = O[k] . (P^m x0) for m = 0 .. n_steps-1."""
    out = np.empty((O.shape[0], n_steps), dtype=np.complex128)
    x = x0.copy()
    for m in range(n_steps):
        for k in range(O.shape[0]):
            acc = 0j
            for q in range(x.size):
                acc += O[k, q] * x[q]
            out[k, m] = acc
        x = P @ x
    return out


def _propagate_observe_numpy(P, x0, O, n_steps):
    out = np.empty((O.shape[0], n_steps), dtype=np.complex128)
    x = x0.copy()
    for m in range(n_steps):
        out[:, m] = O @ x
        x = P @ x
    return out


def quadrature_weights(n, dtau, taper=0.1):
    """Trapezoid weights times a Hann half-window over the last ``taper`` of the range."""
    w = np.full(n, dtau)
    w[0] = w[-1] = 0.5 * dtau
    if taper > 0 and n > 2:
        T = (n - 1) * dtau
        start = (1.0 - taper) * T
        tau = np.arange(n) * dtau
        tail = tau > start
        w[tail] *= 0.5 * (1.0 + np.cos(np.pi * (tau[tail] - start) / (taper * T)))
    return w


_REANCHOR = 256


def _fourier_uniform(f, w, dtau, nu):
    """S[m] = sum_n w[n] f[n] exp(i nu[m] n dtau) with a re-anchored phasor recurrence."""
    out = np.empty(nu.size, dtype=np.complex128)
    n = f.size
    for m in range(nu.size):
        step = complex(math.cos(nu[m] * dtau), math.sin(nu[m] * dtau))
        acc = 0j
        z = 1.0 + 0j
        for k in range(n):
            if k % _REANCHOR == 0:
                ang = nu[m] * k * dtau
                z = complex(math.cos(ang), math.sin(ang))
            acc += w[k] * f[k] * z
            z *= step
        out[m] = acc
    return out


def _fourier_numpy(f, w, dtau, nu, block=1 << 22):
    """Vectorised reference for the same sum (numpy fallback), tiled to ``block`` elements."""
    wf = w * f
    out = np.zeros(nu.size, dtype=complex)
    rows = max(1, min(nu.size, block // max(f.size, 1)))
    cols = max(1, block // rows)
    for s in range(0, nu.size, rows):
        nb = nu[s : s + rows]
        for c in range(0, f.size, cols):
            tau = np.arange(c, min(c + cols, f.size)) * dtau
            out[s : s + rows] += np.exp(1j * np.outer(nb, tau)) @ wf[c : c + cols]
    return out


def _interpreted(fn):
    """Copy of fn bound to a private globals snapshot (keeps the pure-python helpers)."""
    return types.FunctionType(fn.__code__, dict(fn.__globals__), fn.__name__, fn.__defaults__)


dopri_linear_py = _interpreted(_dopri_linear)
rk4_linear_py = _rk4_linear
propagate_observe_py = _propagate_observe_numpy
fourier_py = _fourier_numpy

if HAS_NUMBA:
    _hermitize = _jit(cache=True)(_hermitize)
    _err_norm = _jit(cache=True)(_err_norm)
    dopri_linear_nb = _jit(cache=True)(_dopri_linear)
    rk4_linear_nb = _jit(cache=True)(_rk4_linear)
    propagate_observe_nb = _jit(cache=True)(_propagate_observe)
    fourier_nb = _jit(cache=True)(_fourier_uniform)
    dopri_linear, rk4_linear, propagate_observe, fourier = (
        dopri_linear_nb, rk4_linear_nb, propagate_observe_nb, fourier_nb)
else:  # pragma: no cover
    dopri_linear, rk4_linear, propagate_observe, fourier = (
        dopri_linear_py, rk4_linear_py, propagate_observe_py, fourier_py)
