"""Physical parameters of the two-qubit system and the derived spectral quantities.

Units: hbar = 1 and every frequency or rate is measured in units of the mean
transition frequency omega0, so ``omega1 = omega2 = 1`` for identical atoms.
"""
from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

LAMB_SHIFT_MODES = ("full", "zeroed")


@dataclass(frozen=True)
class SystemParams:
    omega1: float = 1.0
    omega2: float = 1.0
    J: float = 0.0
    r12_over_lambda: float = 0.2
    theta_dipole: float = math.pi / 2
    gamma_single: float = 0.05
    omega_cutoff: float = 100.0
    lamb_shift_mode: str = "full"

    def __post_init__(self):
        for name in ("omega1", "omega2", "gamma_single", "omega_cutoff", "r12_over_lambda"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be finite and > 0", **{name: v})
        if not (math.isfinite(self.J) and self.J >= 0):
            raise ConfigError("J must be finite and >= 0", J=self.J)
        if not 0.0 <= self.theta_dipole <= math.pi:
            raise ConfigError("theta_dipole must lie in [0, pi]", theta_dipole=self.theta_dipole)
        if self.lamb_shift_mode not in LAMB_SHIFT_MODES:
            raise ConfigError("lamb_shift_mode must be 'full' or 'zeroed'", lamb_shift_mode=self.lamb_shift_mode)
        if self.gamma_single / self.omega0 > 0.2:
            warnings.warn(
                f"gamma_single/omega0 = {self.gamma_single / self.omega0:.3g} > 0.2: "
                "weak-coupling (Born-Markov) assumptions are strained",
                stacklevel=3,
            )

    @property
    def omega0(self) -> float:
        return 0.5 * (self.omega1 + self.omega2)

    @property
    def identical(self) -> bool:
        return self.omega1 == self.omega2

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class DerivedParams:
    """Delta, alpha, beta, gamma, delta of the XY-coupled pair.

    ``degenerate`` is set when J = 0 and omega1 = omega2, where gamma and
    delta take their continuous identical-atom value 1/2.
    """

    delta_big: float
    alpha: float
    beta: float
    gamma_coef: float
    delta_coef: float
    omega0: float
    J: float
    r12_over_lambda: float
    degenerate: bool = False
    _coupling_ratio: float = field(default=0.0, repr=False)

    @property
    def coupling_ratio(self) -> float:
        """J / Delta (1/2 in the degenerate identical-atom limit)."""
        return self._coupling_ratio

    def chi(self, mu: float) -> float:
        """Signed retardation argument mu r12 / c = 2 pi (mu/omega0) r12/lambda."""
        return 2.0 * math.pi * (mu / self.omega0) * self.r12_over_lambda

    def theta1(self, t):
        t = np.asarray(t, dtype=float)
        return self.delta_coef * np.exp(-1j * self.beta * t) + self.gamma_coef * np.exp(1j * self.alpha * t)

    def theta2(self, t):
        t = np.asarray(t, dtype=float)
        # exp(-i beta t) keeps the pair (theta1, theta2) unit-norm
        return self.coupling_ratio * (np.exp(1j * self.alpha * t) - np.exp(-1j * self.beta * t))

    def phi1(self, t):
        t = np.asarray(t, dtype=float)
        return self.gamma_coef * np.exp(-1j * self.beta * t) + self.delta_coef * np.exp(1j * self.alpha * t)


def derive(params: SystemParams) -> DerivedParams:
    w1, w2, J = params.omega1, params.omega2, params.J
    big = math.sqrt(4.0 * J * J + (w1 - w2) ** 2)
    alpha = 0.5 * (big + w1 + w2)
    beta = 0.5 * (big - w1 - w2)
    if big == 0.0:
        gam = dlt = 0.5
        ratio = 0.5
        degenerate = True
    else:
        # (D + w1 - w2) / 2D written so that identical atoms give exactly 1/2
        gam = 0.5 + (w1 - w2) / (2.0 * big)
        dlt = 0.5 - (w1 - w2) / (2.0 * big)
        ratio = J / big
        degenerate = False
    return DerivedParams(
        delta_big=big,
        alpha=alpha,
        beta=beta,
        gamma_coef=gam,
        delta_coef=dlt,
        omega0=params.omega0,
        J=J,
        r12_over_lambda=params.r12_over_lambda,
        degenerate=degenerate,
        _coupling_ratio=ratio,
    )


def theta1(derived: DerivedParams, t):
    return derived.theta1(t)


def theta2(derived: DerivedParams, t):
    return derived.theta2(t)


def phi1(derived: DerivedParams, t):
    return derived.phi1(t)
