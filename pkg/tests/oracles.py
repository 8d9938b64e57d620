"""Independent reference computations used only by the tests.

Nothing here imports the closed forms under test.
"""
import math

import mpmath as mp
import numpy as np
from scipy import integrate

EULER = mp.euler


def si_series(x, terms=80):
    mp.mp.dps = 50
    x = mp.mpf(x)
    return float(mp.nsum(lambda k: (-1) ** k * x ** (2 * k + 1) / ((2 * k + 1) * mp.factorial(2 * k + 1)), [0, terms]))


def ci_series(x, terms=80):
    mp.mp.dps = 50
    x = mp.mpf(x)
    s = mp.nsum(lambda k: (-1) ** k * x ** (2 * k) / (2 * k * mp.factorial(2 * k)), [1, terms])
    return float(EULER + mp.log(x) + s)


def si_asymptotic(x, n=6):
    """pi/2 - f(x) cos x - g(x) sin x with truncated asymptotic f, g."""
    f = sum((-1) ** k * math.factorial(2 * k) / x ** (2 * k + 1) for k in range(n))
    g = sum((-1) ** k * math.factorial(2 * k + 1) / x ** (2 * k + 2) for k in range(n))
    return math.pi / 2 - f * math.cos(x) - g * math.sin(x)


def ci_asymptotic(x, n=6):
    f = sum((-1) ** k * math.factorial(2 * k) / x ** (2 * k + 1) for k in range(n))
    g = sum((-1) ** k * math.factorial(2 * k + 1) / x ** (2 * k + 2) for k in range(n))
    return f * math.sin(x) - g * math.cos(x)


def dicke_bracket_taylor(chi, theta):
    """Bracket to O(chi^2): 2/3 + chi^2 [-sin^2/6 + (1-3cos^2)/30]."""
    s2 = math.sin(theta) ** 2
    a = 1 - 3 * math.cos(theta) ** 2
    return 2.0 / 3.0 + chi**2 * (-s2 / 6.0 + a / 30.0)


def angular_bracket(chi, theta, n=400):
    """(3/(8 pi)) * integral over k-directions of (1 - (k.d)^2) exp(i chi k.r), times 2/3 normalisation.

    Computed by 2-D Gauss-Legendre quadrature; returns the value that equals
    the dipole bracket (which is 2/3 at chi=0).
    """
    # r along z, dipole in the x-z plane at angle theta from z
    d = np.array([math.sin(theta), 0.0, math.cos(theta)])
    u, wu = np.polynomial.legendre.leggauss(n)  # cos(polar)
    ph = np.linspace(0.0, 2 * math.pi, 2 * n, endpoint=False)
    wph = 2 * math.pi / (2 * n)
    U, P = np.meshgrid(u, ph, indexing="ij")
    S = np.sqrt(1 - U**2)
    kx, ky, kz = S * np.cos(P), S * np.sin(P), U
    kd = kx * d[0] + ky * d[1] + kz * d[2]
    integrand = (1 - kd**2) * np.cos(chi * kz)
    total = np.sum(integrand * wu[:, None]) * wph
    return (3.0 / (8.0 * math.pi)) * total * (2.0 / 3.0)


def _pv_sin_cos(c, which, L=400.0):
    """PV int_0^inf trig(x)/(x - c) dx with QAWC on [0, L] and QAWF on the tail."""
    f = np.sin if which == "sin" else np.cos
    near, _ = integrate.quad(f, 0.0, L, weight="cauchy", wvar=c, limit=2000, epsabs=1e-13, epsrel=1e-13)
    # tail: trig(x)/(x-c) with x = L + u
    if which == "sin":
        # sin(L+u) = sin L cos u + cos L sin u
        t1, _ = integrate.quad(lambda u: 1.0 / (L + u - c), 0, np.inf, weight="cos", wvar=1.0)
        t2, _ = integrate.quad(lambda u: 1.0 / (L + u - c), 0, np.inf, weight="sin", wvar=1.0)
        tail = math.sin(L) * t1 + math.cos(L) * t2
    else:
        t1, _ = integrate.quad(lambda u: 1.0 / (L + u - c), 0, np.inf, weight="cos", wvar=1.0)
        t2, _ = integrate.quad(lambda u: 1.0 / (L + u - c), 0, np.inf, weight="sin", wvar=1.0)
        tail = math.cos(L) * t1 - math.sin(L) * t2
    return near + tail


def pv_collective_shift(mu_over_w0, r12_over_lambda, theta, gamma=1.0):
    """Lambda^-_{12 mu} = PV int_0^inf dw gamma_12(w) / (2 pi (mu - w)) for mu > 0.

    gamma_12(w) = (3/2) Gamma (w/w0)^3 bracket(w r/c). In x = w r/c the
    numerator is x^3 * bracket = s2 x^2 sin x + a (x cos x - sin x). Polynomial
    growth is divided out and the remaining Abel-regularised moments
    (int sin = 1, int cos = 0, int x sin = 0) are exact.
    """
    s2 = math.sin(theta) ** 2
    a = 1 - 3 * math.cos(theta) ** 2
    c = 2 * math.pi * mu_over_w0 * r12_over_lambda
    Qs = _pv_sin_cos(c, "sin")
    Qc = _pv_sin_cos(c, "cos")
    # int N/(x - c)
    int_n = s2 * (c + c * c * Qs) + a * (c * Qc - Qs)
    K = -int_n  # int N/(c - x)
    gam_mu = gamma * mu_over_w0**3
    return 1.5 / (2 * math.pi) * gam_mu / c**3 * K


def pv_collective_shift_nonresonant(mu_over_w0, r12_over_lambda, theta, gamma=1.0):
    """PV int dw gamma_12(w) / (2 pi (mu + w)), mu > 0: ordinary integral."""
    s2 = math.sin(theta) ** 2
    a = 1 - 3 * math.cos(theta) ** 2
    c = 2 * math.pi * mu_over_w0 * r12_over_lambda
    Qs = _pv_sin_cos(-c, "sin")
    Qc = _pv_sin_cos(-c, "cos")
    int_n = s2 * (-c + c * c * Qs) + a * (-c * Qc - Qs)
    gam_mu = gamma * mu_over_w0**3
    return 1.5 / (2 * math.pi) * gam_mu / c**3 * int_n


def mollow_strong_drive(nu, gamma, rabi):
    """Resonant incoherent spectrum for rabi >> gamma: three Lorentzians.

    Centre: weight 1/2, half-width gamma/2. Sidebands at +-rabi: weight 1/4,
    half-width 3 gamma/4. Returns an unnormalised curve.
    """
    nu = np.asarray(nu, dtype=float)
    lor = lambda x, hw: hw / (x * x + hw * hw) / math.pi  # noqa: E731
    return 0.5 * lor(nu, gamma / 2) + 0.25 * (lor(nu - rabi, 0.75 * gamma) + lor(nu + rabi, 0.75 * gamma))


def resolvent_spectrum(L, rho_ss, lowering, raising, weights, nu):
    """Re sum_ij w_ij Tr[s_j- (-(L + i nu)^{-1}) (rho s_i+ - <s_i+> rho)] by dense solves.

    The source is traceless, so subtracting |rho><1| from L leaves the solution
    unchanged and removes the zero eigenvalue at nu = 0.
    """
    d = rho_ss.shape[0]
    out = np.zeros(len(nu))
    eye = np.eye(d * d)
    L = L - np.outer(rho_ss.reshape(-1), np.eye(d).reshape(-1))
    for i in range(2):
        x = rho_ss @ raising[i]
        y = (x - np.trace(x) * rho_ss).reshape(-1)
        for k, v in enumerate(nu):
            z = np.linalg.solve(L + 1j * v * eye, -y).reshape(d, d)
            for j in range(2):
                out[k] += (weights[i][j] * np.trace(lowering[j] @ z)).real
    return out
