"""Steady-state incoherent fluorescence spectrum via the quantum regression theorem."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.signal import find_peaks as _scipy_find_peaks
from scipy.signal import peak_widths

from . import _kernels as K
from . import operators as ops
from .errors import AliasingRisk, NotConverged
from .generators import Generator

PEAK_FLOOR = 1e-6
PEAK_PROMINENCE = 1e-3
MAX_TAU_POINTS = 4_000_000


@dataclass(frozen=True)
class Peak:
    location: float
    height: float
    width: float


@dataclass(frozen=True)
class SpectrumResult:
    """Spectrum on a uniform grid of offsets (omega - omega_L)/Gamma.

    ``values`` is normalised to max = 1; ``raw`` keeps the unnormalised S_I.
    """

    offsets: np.ndarray
    values: np.ndarray
    raw: np.ndarray
    peaks: tuple
    meta: dict = field(default_factory=dict)


def dipole_operators(basis: str) -> tuple:
    """(lowering, raising) operator pairs for each atom, in the generator's basis."""
    if basis == "product":
        return (ops.S1M, ops.S2M), (ops.S1P, ops.S2P)
    if basis == "collective":
        lo = tuple(ops.basis_transform(x, "to_collective") for x in (ops.S1M, ops.S2M))
        return lo, tuple(x.conj().T for x in lo)
    if basis == "two_level":
        # each atomic lowering operator projects onto A_gs / sqrt(2) in span{s, g}
        lo = np.array([[0, 0], [1, 0]], dtype=complex) / ops.SQRT2
        return (lo, lo), (lo.conj().T, lo.conj().T)
    raise ValueError(f"unknown basis {basis!r}")


def _uniform_step(tau: np.ndarray) -> float:
    if tau.size < 2:
        raise ValueError("tau grid needs at least two points")
    d = np.diff(tau)
    if tau[0] != 0.0 or np.any(np.abs(d - d[0]) > 1e-9 * max(d[0], 1e-300)):
        raise ValueError("tau grid must be uniform and start at 0")
    return float(d[0])


def two_time_correlation(gen: Generator, rho_ss: np.ndarray, i: int, j: int, tau) -> np.ndarray:
    """g_ij(tau) = Tr[s_j- Phi_tau(rho_ss s_i+)] for a time-independent generator."""
    tau = np.asarray(tau, dtype=float)
    lo, hi = dipole_operators(gen.basis)
    x0 = np.ascontiguousarray((np.asarray(rho_ss) @ hi[i]).reshape(-1))
    obs = np.ascontiguousarray(lo[j].T.reshape(1, -1))
    M = gen.matrix
    if M is None:
        raise ValueError("correlations need a time-independent generator")
    try:
        dt = _uniform_step(tau)
    except ValueError:
        return np.array([obs[0] @ (expm(M * s) @ x0) for s in tau])
    P = np.ascontiguousarray(expm(M * dt))
    return K.propagate_observe(P, x0, obs, tau.size)[0]


def choose_tau_grid(gen: Generator, nu_max: float, *, n_decay: float = 12.0, pts_per_period: int = 20,
                    extra_frequency: float = 0.0) -> np.ndarray:
    """Uniform lag grid covering n_decay slowest relaxation times and the fastest oscillation."""
    lam = np.linalg.eigvals(gen.matrix)
    scale = max(float(np.max(np.abs(lam))), 1e-300)
    rates = -lam.real[np.abs(lam) > 1e-10 * scale]
    rates = rates[rates > 1e-12 * scale]
    if rates.size == 0:
        raise NotConverged("generator has no decaying modes")
    f_max = max(float(np.max(np.abs(lam.imag))), abs(extra_frequency), 1e-12)
    dtau = min(2.0 * math.pi / (pts_per_period * f_max), math.pi / (1.05 * max(nu_max, 1e-300)))
    T = n_decay / float(np.min(rates))
    n = int(math.ceil(T / dtau)) + 1
    if n > MAX_TAU_POINTS:
        raise NotConverged("lag grid too long for the slowest decay", points=n)
    return np.arange(n) * dtau


def incoherent_spectrum(gen: Generator, rho_ss: np.ndarray, weights, offsets, *, gamma: float,
                        tau=None, n_decay: float = 12.0, pts_per_period: int = 20,
                        extra_frequency: float = 0.0, meta: dict | None = None) -> SpectrumResult:
    """S_I(nu) = Re sum_ij w_ij int_0^inf dtau e^{i nu tau} [g_ij(tau) - <s_i+><s_j->].

    ``offsets`` are (omega - omega_L)/Gamma; ``weights`` is the 2x2 matrix of
    decay weights Omega-_{ij omega0}. The generator must be the rotating-frame one.
    """
    offsets = np.asarray(offsets, dtype=float)
    d = np.diff(offsets)
    if offsets.ndim != 1 or offsets.size < 3 or np.any(np.abs(d - d[0]) > 1e-9 * abs(d[0])):
        raise ValueError("offset grid must be uniform")
    nu = offsets * gamma
    nu_max = float(np.max(np.abs(nu)))
    if tau is None:
        tau = choose_tau_grid(gen, nu_max, n_decay=n_decay, pts_per_period=pts_per_period,
                              extra_frequency=extra_frequency)
    tau = np.asarray(tau, dtype=float)
    dtau = _uniform_step(tau)
    if math.pi / dtau < nu_max:
        raise AliasingRisk("lag step too coarse for the requested frequency range",
                           nyquist=math.pi / dtau, nu_max=nu_max)
    w = np.asarray(weights, dtype=complex)
    lo, hi = dipole_operators(gen.basis)
    rho_ss = np.asarray(rho_ss, dtype=complex)
    P = np.ascontiguousarray(expm(gen.matrix * dtau))
    obs = np.ascontiguousarray(np.stack([lo[0].T.reshape(-1), lo[1].T.reshape(-1)]))
    f = np.zeros(tau.size, dtype=complex)
    for i in range(2):
        x0 = np.ascontiguousarray((rho_ss @ hi[i]).reshape(-1))
        g = K.propagate_observe(P, x0, obs, tau.size)
        for j in range(2):
            if w[i, j] == 0:
                continue
            coherent = np.trace(rho_ss @ hi[i]) * np.trace(rho_ss @ lo[j])
            f += w[i, j] * (g[j] - coherent)
    qw = K.quadrature_weights(tau.size, dtau)
    full = K.fourier(np.ascontiguousarray(f), qw, dtau, np.ascontiguousarray(nu))
    raw = full.real
    peak_val = float(np.max(raw)) if raw.size else 0.0
    values = raw / peak_val if peak_val > 0 else np.zeros_like(raw)
    peaks = find_peaks(offsets, values)
    info = dict(meta or {})
    info.update(tau_points=int(tau.size), dtau=dtau, tau_max=float(tau[-1]), tail=float(abs(f[-1])),
                raw_max=peak_val)
    for arr in (offsets, values, raw):
        arr.setflags(write=False)
    return SpectrumResult(offsets, values, raw, tuple(peaks), info)


def find_peaks(x, y, *, floor: float = PEAK_FLOOR, prominence: float = PEAK_PROMINENCE) -> list:
    """Local maxima above floor*max with a relative prominence cut, refined parabolically.

    Returns Peak(location, height, width) sorted by decreasing height; width is
    the full width at half prominence in the units of ``x``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.size < 3 or not np.any(y > 0):
        return []
    top = float(np.max(y))
    idx, _ = _scipy_find_peaks(y, height=floor * top, prominence=prominence * top)
    if idx.size == 0:
        return []
    widths = peak_widths(y, idx, rel_height=0.5)[0]
    step = x[1] - x[0]
    out = []
    for k, wd in zip(idx, widths):
        loc, h = float(x[k]), float(y[k])
        if 0 < k < y.size - 1:
            a, b, c = y[k - 1], y[k], y[k + 1]
            if min(a, b, c) > 0:
                # a parabola through 1/y is exact for a Lorentzian line
                ra, rb, rc = 1.0 / a, 1.0 / b, 1.0 / c
                den = ra - 2 * rb + rc
                if den != 0:
                    shift = 0.5 * (ra - rc) / den
                    inv = rb - 0.25 * (ra - rc) * shift
                    if abs(shift) <= 1 and inv > 0:
                        loc = float(x[k] + shift * step)
                        h = float(1.0 / inv)
            else:
                den = a - 2 * b + c
                if den != 0:
                    shift = 0.5 * (a - c) / den
                    if abs(shift) <= 1:
                        loc = float(x[k] + shift * step)
                        h = float(b - 0.25 * (a - c) * shift)
        out.append(Peak(loc, h, float(wd * step)))
    out.sort(key=lambda p: -p.height)
    return out
