"""Time evolution, collective populations and steady states."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from . import operators as ops
from .errors import NonUniqueSteadyState, NotConverged, StiffFailure
from .generators import Generator


@dataclass(frozen=True)
class EvolveOptions:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float = math.inf
    first_step: float = 1e-2
    max_steps: int = 5_000_000
    fixed_step: float | None = None  # RK4 step when set


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution. ``t`` is in units of 1/omega0, ``gamma_t`` in units of 1/Gamma."""

    t: np.ndarray
    rho: np.ndarray
    basis: str
    gamma: float
    populations: dict
    trace_drift: float
    hermiticity_drift: float
    min_eigenvalue: float
    n_accepted: int
    n_rejected: int
    warnings: tuple = field(default_factory=tuple)

    @property
    def gamma_t(self) -> np.ndarray:
        return self.t * self.gamma

    def final(self) -> np.ndarray:
        return self.rho[-1]


def _collective_populations(rho: np.ndarray, basis: str) -> dict:
    if basis == "collective":
        diag = np.einsum("nii->ni", rho).real
    elif basis == "product":
        V = ops.V_COLLECTIVE
        diag = np.einsum("ia,nij,ja->na", V.conj(), rho, V).real
    else:
        return {"s": rho[:, 0, 0].real, "g": rho[:, 1, 1].real}
    return {k: diag[:, i].copy() for i, k in enumerate(ops.COLLECTIVE_LABELS)}


def populations_collective(traj: Trajectory) -> dict:
    """rho_eps, rho_s, rho_a, rho_g versus time (rho_s, rho_g for the two-level model)."""
    return dict(traj.populations)


def _dopri_callable(gen: Generator, y0, t_out, opts: EvolveOptions, dim: int):
    """Python DOPRI5 with the kernel's tableau for time-dependent right-hand sides."""
    f = lambda t, y: gen(t, y.reshape(dim, dim)).reshape(-1)  # noqa: E731
    Y = np.empty((t_out.size, y0.size), dtype=complex)
    Y[0] = y0
    y, t, h = y0.copy(), float(t_out[0]), opts.first_step
    k1 = f(t, y)
    acc = rej = 0
    for idx in range(1, t_out.size):
        t_end = float(t_out[idx])
        while t < t_end:
            if acc + rej >= opts.max_steps:
                raise StiffFailure("step budget exhausted", t=t, steps=acc + rej)
            hs = min(h, opts.max_step)
            last = t + hs >= t_end
            if last:
                hs = t_end - t
            k2 = f(t + K.C2 * hs, y + hs * K.A21 * k1)
            k3 = f(t + K.C3 * hs, y + hs * (K.A31 * k1 + K.A32 * k2))
            k4 = f(t + K.C4 * hs, y + hs * (K.A41 * k1 + K.A42 * k2 + K.A43 * k3))
            k5 = f(t + K.C5 * hs, y + hs * (K.A51 * k1 + K.A52 * k2 + K.A53 * k3 + K.A54 * k4))
            k6 = f(t + hs, y + hs * (K.A61 * k1 + K.A62 * k2 + K.A63 * k3 + K.A64 * k4 + K.A65 * k5))
            ynew = y + hs * (K.B1 * k1 + K.B3 * k3 + K.B4 * k4 + K.B5 * k5 + K.B6 * k6)
            k7 = f(t + hs, ynew)
            err = hs * (K.E1 * k1 + K.E3 * k3 + K.E4 * k4 + K.E5 * k5 + K.E6 * k6 + K.E7 * k7)
            sc = opts.abs_tol + opts.rel_tol * np.maximum(np.abs(y), np.abs(ynew))
            en = float(np.sqrt(np.mean((np.abs(err) / sc) ** 2)))
            if en <= 1.0:
                t = t_end if last else t + hs
                m = ynew.reshape(dim, dim)
                y = (0.5 * (m + m.conj().T)).reshape(-1)
                k1 = k7
                acc += 1
                fac = 5.0 if en == 0 else min(5.0, max(0.2, 0.9 * en**-0.2))
                if not last or fac < 1.0:
                    h = hs * fac
            else:
                rej += 1
                h = hs * max(0.2, 0.9 * en**-0.2)
                if h < 1e-14 * max(1.0, abs(t)):
                    raise StiffFailure("step size underflow", t=t, step=h)
        Y[idx] = y
    return Y, acc, rej


def evolve(gen: Generator, rho0: np.ndarray, times, opts: EvolveOptions | None = None,
           gamma: float = 1.0) -> Trajectory:
    """Integrate drho/dt = L(t, rho) and sample at ``times`` (units of 1/omega0).

    ``gamma`` only sets the reported Gamma t axis. Hermiticity is restored
    after every accepted step; the trace is never renormalised.
    """
    opts = opts or EvolveOptions()
    t_out = np.ascontiguousarray(times, dtype=float)
    if t_out.ndim != 1 or t_out.size < 1 or np.any(np.diff(t_out) <= 0):
        raise ValueError("time grid must be one-dimensional and strictly increasing")
    rho0 = np.asarray(rho0, dtype=complex)
    dim = gen.dim
    y0 = np.ascontiguousarray(rho0.reshape(-1))
    acc = rej = 0
    if gen.time_independent:
        M = np.ascontiguousarray(gen.matrix)
        if opts.fixed_step is not None:
            Y = K.rk4_linear(M, y0, t_out, float(opts.fixed_step))
            Y = 0.5 * (Y + Y.reshape(-1, dim, dim).conj().transpose(0, 2, 1).reshape(Y.shape))
        else:
            Y, stats, status = K.dopri_linear(M, y0, t_out, opts.rel_tol, opts.abs_tol, opts.first_step,
                                              opts.max_step, opts.max_steps, dim)
            acc, rej = int(stats[0]), int(stats[1])
            if status != K.STATUS_OK:
                reached = float(t_out[Y.shape[0] - 1]) if Y.shape[0] else float(t_out[0])
                raise StiffFailure("integration stopped early",
                                   reason="step_underflow" if status == K.STATUS_STEP_UNDERFLOW else "max_steps",
                                   t_reached=reached, accepted=acc, rejected=rej)
    else:
        Y, acc, rej = _dopri_callable(gen, y0, t_out, opts, dim)
    rho = Y.reshape(-1, dim, dim)
    rho.setflags(write=False)
    tr = np.einsum("nii->n", rho)
    trace_drift = float(np.max(np.abs(tr - np.trace(rho0))))
    herm = float(np.max(np.abs(rho - rho.conj().transpose(0, 2, 1))))
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().transpose(0, 2, 1)))))
    notes = []
    if trace_drift > 1e-6:
        notes.append(f"trace drift {trace_drift:.3e} exceeds 1e-6")
        warnings.warn(notes[-1], stacklevel=2)
    pops = _collective_populations(rho, gen.basis)
    for v in pops.values():
        v.setflags(write=False)
    t_out.setflags(write=False)
    return Trajectory(t_out, rho, gen.basis, gamma, pops, trace_drift, herm, min_eig, acc, rej, tuple(notes))


def _normalise(v: np.ndarray, dim: int) -> np.ndarray:
    rho = v.reshape(dim, dim)
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)


def steady_state(gen: Generator, *, gamma: float = 1.0, rho0: np.ndarray | None = None,
                 allow_fallback: bool = True, null_tol: float = 1e-9, residual_tol: float = 1e-8,
                 max_chunks: int = 40) -> np.ndarray:
    """Stationary density matrix of a generator.

    Time-independent generators use the null vector of the superoperator. A
    degenerate null space is resolved by integrating ``rho0`` (default the
    maximally mixed state) to 50/Gamma and projecting onto the null space;
    with ``allow_fallback=False`` it raises NonUniqueSteadyState instead.
    Time-dependent generators are integrated in 50/Gamma chunks, at most
    ``max_chunks`` of them, until the residual falls below tolerance. The
    residual is ||L rho|| relative to the operator norm of L.
    """
    dim = gen.dim
    start = np.eye(dim, dtype=complex) / dim if rho0 is None else np.asarray(rho0, dtype=complex)
    if gen.time_independent:
        M = gen.matrix
        _, s, vh = np.linalg.svd(M)
        scale = max(float(s[0]), 1e-300)
        null = vh[s < null_tol * scale].conj().T
        if null.shape[1] == 1:
            rho = _normalise(null[:, 0], dim)
        elif null.shape[1] == 0:
            raise NotConverged("no null vector found", smallest_singular_value=float(s[-1]) / scale)
        else:
            if not allow_fallback:
                raise NonUniqueSteadyState("degenerate stationary subspace", dimension=int(null.shape[1]))
            traj = evolve(gen, start, [0.0, 50.0 / gamma], gamma=gamma)
            v = traj.final().reshape(-1)
            rho = _normalise(null @ (null.conj().T @ v), dim)
        residual = float(np.linalg.norm(M @ rho.reshape(-1))) / scale
    else:
        # integrate in 50/Gamma chunks (slow subradiant decay) until the residual settles
        t0, rho = 0.0, start
        for _ in range(max_chunks):
            traj = evolve(gen, rho, [t0, t0 + 50.0 / gamma], gamma=gamma)
            t0 = float(traj.t[-1])
            rho = _normalise(traj.final().reshape(-1), dim)
            Lt = gen.superoperator(t0)
            residual = float(np.linalg.norm(Lt @ rho.reshape(-1)) / np.linalg.norm(Lt, 2))
            if residual <= residual_tol:
                break
    if residual > residual_tol:
        raise NotConverged("steady-state residual too large", residual=residual)
    return rho
