"""Reservoir-induced decay rates and Lamb shifts for two parallel dipoles in vacuum.

Conventions. For a (signed) frequency mu:

* ``omega(mu, '-')`` is the decay rate of a transition at +mu and vanishes for
  mu < 0; ``omega(mu, '+')`` is its mirror, non-zero only for mu < 0.
* ``lam(mu, '-')`` is PV int dw h(w) / (mu - w) and ``lam(mu, '+')`` is
  PV int dw h(w) / (mu + w) = -lam(-mu, '-').

All rates are returned in units of omega0, i.e. gamma_single sets the scale.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields

from .errors import BeyondRWA, ContactDivergence, DomainError
from .model import DerivedParams, SystemParams, derive
from .specfun import f1f2_scalar

_TWO_OVER_PI = 2.0 / math.pi


def gamma_mu(mu: float, params: SystemParams) -> float:
    """Single-atom decay scale Gamma |mu/omega0|^3."""
    return params.gamma_single * abs(mu / params.omega0) ** 3


def chi_of(mu: float, params: SystemParams) -> float:
    return 2.0 * math.pi * (mu / params.omega0) * params.r12_over_lambda


def dipole_bracket(chi: float, theta: float) -> float:
    """sin^2(T) sin(x)/x + (1 - 3 cos^2 T)(cos x/x^2 - sin x/x^3); even in x, -> 2/3 at 0."""
    s2 = math.sin(theta) ** 2
    a = 1.0 - 3.0 * math.cos(theta) ** 2
    x = abs(chi)
    if x < 0.1:
        x2 = x * x
        sinc = 1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2**3 / 5040.0 + x2**4 / 362880.0
        near = -1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0 + x2**3 / 45360.0 - x2**4 / 3991680.0
        return s2 * sinc + a * near
    return s2 * math.sin(x) / x + a * (math.cos(x) / x**2 - math.sin(x) / x**3)


def _check_sign(sign: str) -> None:
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")


def omega_collective(mu: float, sign: str, params: SystemParams) -> float:
    """Collective decay-type rate Omega^{sign}_{12 mu}.

    At chi = 0 the bracket takes its Dicke limit 2/3, returning gamma_mu.
    """
    _check_sign(sign)
    if (sign == "-" and mu <= 0) or (sign == "+" and mu >= 0):
        return 0.0
    return 1.5 * gamma_mu(mu, params) * dipole_bracket(chi_of(mu, params), params.theta_dipole)


def omega_individual(mu: float, sign: str, params: SystemParams) -> float:
    _check_sign(sign)
    if (sign == "-" and mu <= 0) or (sign == "+" and mu >= 0):
        return 0.0
    return gamma_mu(mu, params)


def _shift_resonant(x: float, theta: float) -> float:
    """Dimensionless PV shift for a resonant transition, in units of gamma_mu."""
    s2 = math.sin(theta) ** 2
    a = 1.0 - 3.0 * math.cos(theta) ** 2
    F1, F2 = f1f2_scalar(x)
    sx, cx = math.sin(x), math.cos(x)
    x2, x3 = x * x, x * x * x
    angular = a * ((sx / x2 + cx / x3) - _TWO_OVER_PI * (F2 / x2 + F1 / x3))
    transverse = s2 * (cx / x + _TWO_OVER_PI * (1.0 / x2 - F1 / x))
    return 0.375 * (angular - transverse)


def _shift_nonresonant(x: float, theta: float) -> float:
    """PV int h(w)/(mu + w) for mu > 0 (no pole), in units of gamma_mu."""
    s2 = math.sin(theta) ** 2
    a = 1.0 - 3.0 * math.cos(theta) ** 2
    F1, F2 = f1f2_scalar(x)
    sx, cx = math.sin(x), math.cos(x)
    x2, x3 = x * x, x * x * x
    angular = -a * ((sx / x2 + cx / x3) + _TWO_OVER_PI * (F2 / x2 + F1 / x3))
    transverse = s2 * (cx / x - _TWO_OVER_PI * (1.0 / x2 - F1 / x))
    return 0.375 * (angular + transverse)


def lambda_collective(mu: float, sign: str, params: SystemParams) -> float:
    """Collective shift-type rate Lambda^{sign}_{12 mu}.

    Raises ContactDivergence at chi = 0, where the shift diverges as 1/chi^3.
    """
    _check_sign(sign)
    chi = chi_of(mu, params)
    if chi == 0.0:
        raise ContactDivergence("collective Lamb shift diverges at zero separation", mu=mu)
    g = gamma_mu(mu, params)
    x = abs(chi)
    theta = params.theta_dipole
    if sign == "-":
        return g * (_shift_resonant(x, theta) if mu > 0 else -_shift_nonresonant(x, theta))
    return g * (-_shift_resonant(x, theta) if mu < 0 else _shift_nonresonant(x, theta))


def lambda_individual(mu: float, params: SystemParams) -> float:
    """Cutoff-regularised single-atom shift (1/2pi) Gamma (mu/omega0)^3 ln|...|.

    Odd in mu, so the beta-frequency term enters with the sign of beta^3.
    Returns 0 in ``zeroed`` Lamb-shift mode.
    """
    if params.lamb_shift_mode == "zeroed":
        return 0.0
    wc = params.omega_cutoff
    amu = abs(mu)
    if amu == 0.0 or wc == amu:
        raise DomainError("logarithmic singularity: omega_cutoff equals |mu|", mu=mu, omega_cutoff=wc)
    if wc < amu:
        warnings.warn(f"omega_cutoff={wc} below |mu|={amu}", stacklevel=2)
    ratio = wc / amu
    scale = params.gamma_single * (mu / params.omega0) ** 3
    return scale / (2.0 * math.pi) * math.log(abs(ratio - 1.0) * (ratio + 1.0))


@dataclass(frozen=True)
class RatePair:
    omega_minus: float
    omega_plus: float
    lambda_minus: float
    lambda_plus: float


def rate_pair(mu: float, params: SystemParams, collective: bool = True) -> RatePair:
    """All four reservoir integrals at one frequency."""
    if collective:
        return RatePair(
            omega_minus=omega_collective(mu, "-", params),
            omega_plus=omega_collective(mu, "+", params),
            lambda_minus=lambda_collective(mu, "-", params),
            lambda_plus=lambda_collective(mu, "+", params),
        )
    shift = lambda_individual(mu, params)
    return RatePair(
        omega_minus=omega_individual(mu, "-", params),
        omega_plus=omega_individual(mu, "+", params),
        lambda_minus=shift,
        lambda_plus=-lambda_individual(-mu, params),
    )


@dataclass(frozen=True)
class ReservoirRates:
    """Every rate the generators need, at alpha, beta, omega0 and omega_{1,2}.

    Names: ``o``/``l`` = decay/shift, ``m``/``p`` = superscript -/+, ``i`` =
    single atom, ``c`` = collective (12).
    """

    alpha: float
    beta: float
    # resonant single-atom values
    o_i_alpha: float  # Omega^-_{i alpha}
    o_i_beta: float  # Omega^+_{i beta}
    l_i_alpha: float  # Lambda^-_{i alpha}
    l_i_beta: float  # Lambda^+_{i beta}
    # resonant collective values
    o_c_alpha: float
    o_c_beta: float
    l_c_alpha: float
    l_c_beta: float
    # phenomenological inputs (ME1/ME2)
    o_w1: float
    o_w2: float
    l_w1: float
    l_w2: float
    o_c_w0: float
    l_c_w0: float

    # composites
    @property
    def Lp(self):
        return self.l_i_alpha + self.l_i_beta

    @property
    def Lm(self):
        return self.l_i_alpha - self.l_i_beta

    @property
    def Op(self):
        return 0.5 * (self.o_i_alpha + self.o_i_beta)

    @property
    def Om(self):
        return 0.5 * (self.o_i_alpha - self.o_i_beta)

    @property
    def Lp12(self):
        return self.l_c_alpha + self.l_c_beta

    @property
    def Lm12(self):
        return self.l_c_alpha - self.l_c_beta

    @property
    def Op12(self):
        return 0.5 * (self.o_c_alpha + self.o_c_beta)

    @property
    def Om12(self):
        return 0.5 * (self.o_c_alpha - self.o_c_beta)

    # Phi blocks: Phi^{+-}_{alpha} = O/2 +- i L at alpha; same at beta
    def phi(self, which: str, mu: str, sign: str) -> complex:
        o = getattr(self, f"o_{which}_{mu}")
        l = getattr(self, f"l_{which}_{mu}")
        return 0.5 * o + (1j * l if sign == "+" else -1j * l)

    def as_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        for name in ("Lp", "Lm", "Op", "Om", "Lp12", "Lm12", "Op12", "Om12"):
            out[name] = getattr(self, name)
        return out


def composite_rates(params: SystemParams, derived: DerivedParams | None = None) -> ReservoirRates:
    d = derived if derived is not None else derive(params)
    if d.beta >= 0:
        raise BeyondRWA(
            "beta >= 0 (J >= omega0): excitation-conserving system-reservoir coupling no longer applies",
            J=params.J,
            beta=d.beta,
        )
    a, b = d.alpha, d.beta
    return ReservoirRates(
        alpha=a,
        beta=b,
        o_i_alpha=omega_individual(a, "-", params),
        o_i_beta=omega_individual(b, "+", params),
        l_i_alpha=lambda_individual(a, params),
        l_i_beta=lambda_individual(b, params),
        o_c_alpha=omega_collective(a, "-", params),
        o_c_beta=omega_collective(b, "+", params),
        l_c_alpha=lambda_collective(a, "-", params),
        l_c_beta=lambda_collective(b, "+", params),
        o_w1=omega_individual(params.omega1, "-", params),
        o_w2=omega_individual(params.omega2, "-", params),
        l_w1=lambda_individual(params.omega1, params),
        l_w2=lambda_individual(params.omega2, params),
        o_c_w0=omega_collective(params.omega0, "-", params),
        l_c_w0=lambda_collective(params.omega0, "-", params),
    )


def rates_table(params: SystemParams) -> dict:
    return composite_rates(params).as_dict()


__all__ = [
    "RatePair",
    "ReservoirRates",
    "chi_of",
    "composite_rates",
    "dipole_bracket",
    "gamma_mu",
    "lambda_collective",
    "lambda_individual",
    "omega_collective",
    "omega_individual",
    "rate_pair",
    "rates_table",
]
