"""Hamiltonians and master-equation generators for the XY-coupled qubit pair.

Every generator maps (t, rho) -> drho/dt on 4x4 density matrices. Time
independent ones also carry their 16x16 row-major superoperator.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm

from . import operators as ops
from .errors import NonIdenticalAtoms
from .model import DerivedParams, SystemParams, derive
from .reservoir import ReservoirRates, composite_rates

S1P, S2P, S1M, S2M, S1Z, S2Z = ops.S1P, ops.S2P, ops.S1M, ops.S2M, ops.S1Z, ops.S2Z
SP = (S1P, S2P)
SM = (S1M, S2M)
SZ = (S1Z, S2Z)
HOP = S1P @ S2M + S1M @ S2P  # sigma1+ sigma2- + h.c.
NUMBER = 0.5 * (S1Z + S2Z)  # excitation number minus one


@dataclass(frozen=True)
class Generator:
    """Linear map (t, rho) -> drho/dt.

    ``matrix`` is the constant 16x16 superoperator when ``time_independent``;
    otherwise ``rhs`` is evaluated afresh at every t.
    """

    name: str
    basis: str
    dim: int = 4
    matrix: np.ndarray | None = None
    rhs: Callable[[float, np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    meta: dict = field(default_factory=dict, repr=False)

    @property
    def time_independent(self) -> bool:
        return self.matrix is not None

    def __call__(self, t: float, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if self.matrix is not None:
            return (self.matrix @ rho.reshape(-1)).reshape(self.dim, self.dim)
        return self.rhs(t, rho)

    def superoperator(self, t: float = 0.0) -> np.ndarray:
        """16x16 matrix at time t (assembled column by column if time dependent)."""
        if self.matrix is not None:
            return self.matrix
        n = self.dim * self.dim
        out = np.empty((n, n), dtype=complex)
        for k in range(n):
            e = np.zeros(n, dtype=complex)
            e[k] = 1.0
            out[:, k] = self.rhs(t, e.reshape(self.dim, self.dim)).reshape(-1)
        return out

    def in_basis(self, V: np.ndarray, basis: str, name: str | None = None) -> "Generator":
        """Same equation for rho' = V^+ rho V."""
        if self.matrix is None:
            raise ValueError("basis change only for time-independent generators")
        return Generator(name or self.name, basis, self.dim, ops.transform_super(self.matrix, V), meta=self.meta)


def _constant(name: str, basis: str, matrix: np.ndarray, **meta) -> Generator:
    m = np.ascontiguousarray(matrix, dtype=complex)
    m.setflags(write=False)
    return Generator(name=name, basis=basis, dim=int(round(math.sqrt(m.shape[0]))), matrix=m, meta=meta)


def _rates(params: SystemParams, rates: ReservoirRates | None) -> ReservoirRates:
    return rates if rates is not None else composite_rates(params)


def _lindblad_pair(a: np.ndarray, b: np.ndarray, rate: complex) -> np.ndarray:
    """rate/2 * (2 a X b^+ - {b^+ a, X}): the cross dissipator."""
    bd = b.conj().T
    return 0.5 * rate * (2.0 * ops.sandwich(a, bd) - ops.left(bd @ a) - ops.right(bd @ a))


# ---------------------------------------------------------------- Hamiltonians


def hamiltonian_xy(params: SystemParams) -> np.ndarray:
    """H_S = (w1/2) s1z + (w2/2) s2z - J (s1+ s2- + s1- s2+) in the product basis."""
    return 0.5 * params.omega1 * S1Z + 0.5 * params.omega2 * S2Z - params.J * HOP


def frequency_components(derived: DerivedParams) -> dict:
    """Lowering operators split by Bohr frequency: {(atom, 'alpha'|'beta'): L}.

    [H_S, L_j(w)] = -w L_j(w) with w = alpha or |beta|.
    """
    g, d, c = derived.gamma_coef, derived.delta_coef, derived.coupling_ratio
    return {
        (0, "alpha"): g * S1M + c * S1Z @ S2M,
        (0, "beta"): d * S1M - c * S1Z @ S2M,
        (1, "alpha"): d * S2M + c * S1M @ S2Z,
        (1, "beta"): g * S2M - c * S1M @ S2Z,
    }


# ------------------------------------------------------------ phenomenological


def build_me1(params: SystemParams, rates: ReservoirRates | None = None) -> Generator:
    """Independent decay of each atom plus the bare XY coupling."""
    r = _rates(params, rates)
    h = 0.5 * (params.omega1 + r.l_w1) * S1Z + 0.5 * (params.omega2 + r.l_w2) * S2Z - params.J * HOP
    L = ops.commutator_super(h) + ops.dissipator(S1M, r.o_w1) + ops.dissipator(S2M, r.o_w2)
    return _constant("me1", "product", L, hamiltonian=h)


def build_me2(params: SystemParams, rates: ReservoirRates | None = None) -> Generator:
    """ME1 plus collective decay and the dipole-dipole shift at omega0."""
    if abs(params.omega1 - params.omega2) > 0.1 * params.omega0:
        warnings.warn("ME2 assumes |omega1 - omega2| << omega0", stacklevel=2)
    r = _rates(params, rates)
    h = (
        0.5 * (params.omega1 + r.l_w1) * S1Z
        + 0.5 * (params.omega2 + r.l_w2) * S2Z
        - (params.J - r.l_c_w0) * HOP
    )
    L = ops.commutator_super(h) + ops.dissipator(S1M, r.o_w1) + ops.dissipator(S2M, r.o_w2)
    L = L + _lindblad_pair(S1M, S2M, r.o_c_w0) + _lindblad_pair(S2M, S1M, r.o_c_w0)
    return _constant("me2", "product", L, hamiltonian=h)


# ------------------------------------------------------------ microscopic, general


@dataclass(frozen=True)
class GeneralCoefficients:
    """Coefficients of the general microscopic equation at time t.

    ``A``..``F`` are 2x2 complex arrays indexed [i, j] (atoms 0, 1). ``G``
    holds the auxiliary functions G_1..G_6 and ``phi`` the Phi blocks; the
    theta/phi1 values are recorded for reference.
    """

    t: float
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: tuple
    phi: dict
    theta1: complex
    theta2: complex
    phi1: complex


def _phi_blocks(r: ReservoirRates) -> dict:
    """Phi^{+-} at alpha and beta, single-atom ('i') and collective ('12')."""
    return {
        ("i", "alpha", "+"): r.phi("i", "alpha", "+"),
        ("i", "alpha", "-"): r.phi("i", "alpha", "-"),
        ("i", "beta", "+"): r.phi("i", "beta", "+"),
        ("i", "beta", "-"): r.phi("i", "beta", "-"),
        ("12", "alpha", "+"): r.phi("c", "alpha", "+"),
        ("12", "alpha", "-"): r.phi("c", "alpha", "-"),
        ("12", "beta", "+"): r.phi("c", "beta", "+"),
        ("12", "beta", "-"): r.phi("c", "beta", "-"),
    }


def _spectral_weights(r: ReservoirRates) -> np.ndarray:
    """G[i, j, k]: one-sided reservoir transform at frequency k (0: alpha, 1: |beta|)."""
    ph = _phi_blocks(r)
    w = np.empty((2, 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            kind = "i" if i == j else "12"
            w[i, j, 0] = ph[(kind, "alpha", "+")]
            w[i, j, 1] = ph[(kind, "beta", "-")]
    return w


def _auxiliary(t: float, d: DerivedParams, ph: dict) -> tuple:
    """G_1..G_6 as displayed, with the single-atom blocks shared by both atoms."""
    g, dl, c = d.gamma_coef, d.delta_coef, d.coupling_ratio
    th1, th2, p1 = complex(d.theta1(t)), complex(d.theta2(t)), complex(d.phi1(t))
    ea, eb = np.exp(-1j * d.alpha * t), np.exp(1j * d.beta * t)
    P = lambda k, m, s: ph[(k, m, s)]  # noqa: E731
    G1 = (
        th2 * (g * eb * P("i", "beta", "-") + dl * ea * P("i", "alpha", "+"))
        - th1 * (g * eb * P("12", "beta", "-") + dl * ea * P("12", "alpha", "+"))
        + c * (th1 * (ea * P("i", "alpha", "+") - eb * P("i", "beta", "-"))
               - th2 * (ea * P("12", "alpha", "-") - eb * P("12", "beta", "+")))
    )
    G2 = -th1 * c * (ea * P("12", "alpha", "+") - eb * P("12", "beta", "-")) - th2 * (
        dl * eb * P("12", "beta", "+") + g * ea * P("12", "alpha", "-")
    )
    G3 = -p1 * c * (ea * P("12", "alpha", "-") - eb * P("12", "beta", "+")) - th2 * (
        g * eb * P("12", "beta", "-") + dl * ea * P("12", "alpha", "+")
    )
    G4 = (
        th2 * (dl * eb * P("i", "beta", "-") + g * ea * P("i", "alpha", "+"))
        - p1 * (dl * eb * P("12", "beta", "+") + g * ea * P("12", "alpha", "-"))
        + c * (p1 * (ea * P("i", "alpha", "+") - eb * P("i", "beta", "-"))
               - th2 * (ea * P("12", "alpha", "+") - eb * P("12", "beta", "-")))
    )
    G5 = -th1 * (dl * eb * P("i", "beta", "-") + g * ea * P("i", "alpha", "+")) - th2 * c * (
        ea * P("i", "alpha", "+") - eb * P("i", "beta", "-")
    )
    G6 = -p1 * (g * eb * P("i", "beta", "-") + dl * ea * P("i", "alpha", "+")) - th2 * c * (
        ea * P("i", "alpha", "+") - eb * P("i", "beta", "-")
    )
    return (G1, G2, G3, G4, G5, G6), (th1, th2, p1)


def general_coefficients(
    t: float, derived: DerivedParams, rates: ReservoirRates
) -> GeneralCoefficients:
    """Coefficient table of the general equation in the Schroedinger picture.

    With m_ij = sum_w G_ij(w) L_j(w) = a_ij s_j- + b_ij (s_z s_-)_j the table is
    A_ij = a_ji + a_ij*, B_ii = -a_ii, B_12 = b_11 - a_12, B_21 = b_22 - a_21,
    C_12 = b_11, C_21 = b_22, D_12 = b_21, D_21 = b_12, E_12 = -b_12,
    E_21 = -b_21, F = 0. None of these depend on t.
    """
    g, dl, c = derived.gamma_coef, derived.delta_coef, derived.coupling_ratio
    w = _spectral_weights(rates)
    a = np.empty((2, 2), dtype=complex)
    b = np.empty((2, 2), dtype=complex)
    for i in range(2):
        # column j=0 uses (gamma, delta), j=1 uses (delta, gamma)
        a[i, 0] = g * w[i, 0, 0] + dl * w[i, 0, 1]
        a[i, 1] = dl * w[i, 1, 0] + g * w[i, 1, 1]
        for j in range(2):
            b[i, j] = c * (w[i, j, 0] - w[i, j, 1])
    Acoef = a.T + a.conj()
    B = np.array([[-a[0, 0], b[0, 0] - a[0, 1]], [b[1, 1] - a[1, 0], -a[1, 1]]])
    C = np.array([[0, b[0, 0]], [b[1, 1], 0]], dtype=complex)
    D = np.array([[0, b[1, 0]], [b[0, 1], 0]], dtype=complex)
    E = np.array([[0, -b[0, 1]], [-b[1, 0], 0]], dtype=complex)
    F = np.zeros((2, 2), dtype=complex)
    ph = _phi_blocks(rates)
    aux, (th1, th2, p1) = _auxiliary(t, derived, ph)
    return GeneralCoefficients(float(t), Acoef, B, C, D, E, F, aux, ph, th1, th2, p1)


def general_superoperator(coef: GeneralCoefficients, h: np.ndarray) -> np.ndarray:
    """Assemble the (A..F) operator form around the Hamiltonian h."""
    L = ops.commutator_super(h)
    for i in range(2):
        for j in range(2):
            L = L + coef.A[i, j] * ops.sandwich(SM[i], SP[j])
            op = SP[i] @ SM[j]
            # h.c. partner of B_ij s_i+ s_j- rho is B_ij* rho s_j+ s_i-
            L = L + coef.B[i, j] * ops.left(op) + np.conj(coef.B[i, j]) * ops.right(op.conj().T)
    for i, j in ((0, 1), (1, 0)):
        terms = (
            (coef.C[i, j], SZ[i] @ SM[j], SP[i], "sandwich"),
            (coef.D[i, j], SZ[i] @ SM[j], SP[j], "sandwich"),
            (coef.E[i, j], SP[i] @ SM[i] @ SZ[j], None, "left"),
            (coef.F[i, j], SM[i] @ SP[i] @ SZ[j], None, "left"),
        )
        for k, x, y, kind in terms:
            if k == 0:
                continue
            if kind == "sandwich":
                L = L + k * ops.sandwich(x, y) + np.conj(k) * ops.sandwich(y.conj().T, x.conj().T)
            else:
                L = L + k * ops.left(x) + np.conj(k) * ops.right(x.conj().T)
    return L


def build_general_table(params: SystemParams, derived: DerivedParams | None = None,
                        rates: ReservoirRates | None = None) -> Generator:
    """Constant-coefficient form of the general microscopic equation."""
    d = derived if derived is not None else derive(params)
    r = _rates(params, rates)
    coef = general_coefficients(0.0, d, r)
    h = hamiltonian_xy(params)
    return _constant("general_table", "product", general_superoperator(coef, h), coefficients=coef, hamiltonian=h)


def build_general(params: SystemParams, derived: DerivedParams | None = None,
                  rates: ReservoirRates | None = None) -> Generator:
    """General microscopic equation built from the interaction-picture operators.

    At each t the dissipator is assembled from s~_i-(t) (theta1, theta2, phi1)
    and k~_ij(t) = sum_w G_ij(w) L_j(w) e^{-iwt}, then carried back to the
    Schroedinger picture with exp(-i H_S t).
    """
    d = derived if derived is not None else derive(params)
    r = _rates(params, rates)
    h = hamiltonian_xy(params)
    comps = frequency_components(d)
    w = _spectral_weights(r)
    evals, evecs = np.linalg.eigh(h)
    freqs = (d.alpha, -d.beta)
    base_m = [S1M, S1Z @ S2M]
    base_m2 = [S2M, S1M @ S2Z]

    def rhs(t: float, rho: np.ndarray) -> np.ndarray:
        th1, th2, p1 = complex(d.theta1(t)), complex(d.theta2(t)), complex(d.phi1(t))
        sm = (np.conj(th1) * base_m[0] + np.conj(th2) * base_m[1],
              np.conj(p1) * base_m2[0] + np.conj(th2) * base_m2[1])
        sp = (sm[0].conj().T, sm[1].conj().T)
        u = (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T
        x = u.conj().T @ rho @ u
        out = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                k = sum(w[i, j, n] * comps[(j, tag)] * np.exp(-1j * freqs[n] * t)
                        for n, tag in enumerate(("alpha", "beta")))
                kd = k.conj().T
                # h.c. written out so the map stays linear for non-Hermitian x
                out += k @ x @ sp[i] - sp[i] @ k @ x + sm[i] @ x @ kd - x @ kd @ sm[i]
        return -1j * (h @ rho - rho @ h) + u @ out @ u.conj().T

    return Generator("general", "product", 4, None, rhs, meta={"derived": d})


# ------------------------------------------------------------ identical atoms


def _require_identical(params: SystemParams) -> None:
    if not params.identical:
        raise NonIdenticalAtoms("identical-atom equation requested for omega1 != omega2; use build_general",
                                omega1=params.omega1, omega2=params.omega2)


def me4_terms(params: SystemParams, rates: ReservoirRates | None = None) -> dict:
    """ME4 split into named superoperator groups (summed over both i != j orderings)."""
    _require_identical(params)
    r = _rates(params, rates)
    w0 = params.omega0
    h3 = 0.5 * (w0 + 0.5 * r.Lm) * (S1Z + S2Z) - (params.J + 0.5 * (r.Lp - r.Lm12)) * HOP
    terms = {"hamiltonian": ops.commutator_super(h3)}
    terms["local"] = sum(ops.dissipator(SM[i], r.Op) for i in range(2))
    cross = np.zeros((16, 16), dtype=complex)
    om12 = np.zeros_like(cross)
    lp12 = np.zeros_like(cross)
    om = np.zeros_like(cross)
    lp = np.zeros_like(cross)
    for i, j in ((0, 1), (1, 0)):
        si_p, si_m, sj_p, sj_m, zi, zj = SP[i], SM[i], SP[j], SM[j], SZ[i], SZ[j]
        S, Lf, R = ops.sandwich, ops.left, ops.right
        cross += _lindblad_pair(sj_m, si_m, r.Op12 - r.Om)
        nij = si_p @ si_m @ zj
        om12 += 0.5 * r.Om12 * (S(zi @ sj_m, sj_p) + S(si_m, si_p @ zj) - Lf(nij) - R(nij))
        lp12 += 0.5j * r.Lp12 * (S(zi @ sj_m, sj_p) - S(sj_m, zi @ sj_p) - Lf(nij) + R(nij))
        om += 0.5 * r.Om * (S(zi @ sj_m, si_p) + S(si_m, zi @ sj_p) + 2.0 * S(si_m, sj_p))
        lp += 0.5j * r.Lp * (S(zi @ sj_m, si_p) - S(si_m, zi @ sj_p))
    terms.update(cross=cross, omega_minus_12=om12, lambda_plus_12=lp12, omega_minus=om, lambda_plus=lp)
    return terms


def build_me4(params: SystemParams, rates: ReservoirRates | None = None) -> Generator:
    """Identical-atom microscopic equation in the product basis."""
    terms = me4_terms(params, rates)
    return _constant("me4", "product", sum(terms.values()), terms=tuple(terms),
                     hamiltonian=hamiltonian_xy(params))


def dressed_parameters(params: SystemParams, rates: ReservoirRates | None = None) -> dict:
    """omega', J(+), J(-) and the effective detuning delta' = omega' - J(+)."""
    r = _rates(params, rates)
    w_p = params.omega0 + 0.5 * (r.Lm + r.Lp12)
    jp = params.J + 0.5 * (r.Lp - r.Lm12 + 2.0 * r.Lp12)
    jm = params.J + 0.5 * (r.Lp - r.Lm12 - 2.0 * r.Lp12)
    return {"omega_prime": w_p, "J_plus": jp, "J_minus": jm, "delta_prime": w_p - jp}


def build_me5(params: SystemParams, rates: ReservoirRates | None = None) -> Generator:
    """ME4 written directly in the collective basis (eps, s, a, g)."""
    _require_identical(params)
    r = _rates(params, rates)
    dp = dressed_parameters(params, r)
    A = ops.A
    S, Lf, R = ops.sandwich, ops.left, ops.right
    h4 = dp["omega_prime"] * (A("eps", "eps") - A("g", "g")) + dp["J_minus"] * A("a", "a") - dp["J_plus"] * A("s", "s")
    L = ops.commutator_super(h4)

    def anti(x):
        return Lf(x) + R(x)

    # antisymmetric channel
    jump_a = A("a", "eps") - A("g", "a")
    L = L - 0.5 * (r.Op - r.Op12) * (anti(A("a", "a") + A("eps", "eps")) - 2.0 * S(jump_a, jump_a.conj().T))
    L = L - 0.5 * (r.Om - r.Om12) * (
        anti(A("a", "a") - A("eps", "eps")) - 2.0 * (S(A("g", "a"), A("a", "g")) - S(A("a", "eps"), A("eps", "a")))
    )
    L = L + 1j * (r.Lp - r.Lp12) * (S(A("a", "eps"), A("a", "g")) - S(A("g", "a"), A("eps", "a")))
    # symmetric channel
    jump_s = A("s", "eps") + A("g", "s")
    L = L - 0.5 * (r.Op + r.Op12) * (anti(A("s", "s") + A("eps", "eps")) - 2.0 * S(jump_s, jump_s.conj().T))
    L = L - 0.5 * (r.Om + r.Om12) * (
        anti(A("eps", "eps") - A("s", "s")) - 2.0 * (S(A("s", "eps"), A("eps", "s")) - S(A("g", "s"), A("s", "g")))
    )
    L = L + 1j * (r.Lp + r.Lp12) * (S(A("s", "eps"), A("s", "g")) - S(A("g", "s"), A("eps", "s")))
    return _constant("me5", "collective", L, hamiltonian=h4, **dp)


# ------------------------------------------------------------ driving


def driving_hamiltonian(t: float, rabi: float, omega_L: float, rabi2: float | None = None,
                        basis: str = "product") -> np.ndarray:
    """Lab-frame laser term (i/2sqrt2) sum_i [W_i s_i- e^{i wL t} - h.c.].

    ``rabi2`` is the Rabi frequency at atom 2 (defaults to ``rabi``, equal
    illumination).
    """
    if rabi < 0 or (rabi2 is not None and rabi2 < 0):
        raise ValueError("Rabi frequencies must be >= 0")
    w2 = rabi if rabi2 is None else rabi2
    x = (rabi * S1M + w2 * S2M) * np.exp(1j * omega_L * t)
    h = 1j / (2.0 * ops.SQRT2) * (x - x.conj().T)
    return ops.basis_transform(h, "to_collective") if basis == "collective" else h


def secular_mask(L: np.ndarray, energies: np.ndarray, tol: float) -> np.ndarray:
    """Keep only superoperator elements that couple equal Bohr frequencies.

    Element ((a,b),(c,d)) survives when |(E_a - E_b) - (E_c - E_d)| <= tol, with
    E the diagonal energies of the basis in which L is written.
    """
    bohr = (energies[:, None] - energies[None, :]).reshape(-1)
    keep = np.abs(bohr[:, None] - bohr[None, :]) <= tol
    return np.where(keep, L, 0.0)


def build_driven(base: Generator, rabi: float, omega_L: float, rabi2: float | None = None,
                 secular: bool = False) -> Generator:
    """Driven version of a time-independent generator in the frame rotating at omega_L.

    All dissipators here commute with the excitation-number rotation, so the
    rotating frame is exact and stays time independent. With ``secular`` the
    dissipative part is reduced to its Bohr-frequency-diagonal blocks with
    respect to the rotating-frame system Hamiltonian.
    """
    if not base.time_independent:
        raise ValueError("driving is supported for time-independent generators")
    number = NUMBER if base.basis == "product" else ops.basis_transform(NUMBER, "to_collective")
    h_drive = driving_hamiltonian(0.0, rabi, 0.0, rabi2, basis=base.basis)
    L = base.matrix
    h_sys = base.meta.get("hamiltonian")
    if secular:
        if h_sys is None:
            raise ValueError("secular option needs the system Hamiltonian")
        h_rot = h_sys - omega_L * number
        diss = L - ops.commutator_super(h_sys)
        evals, evecs = np.linalg.eigh(h_rot)
        d_eig = ops.transform_super(diss, evecs)
        width = 1e-9 * max(1.0, float(np.max(np.abs(evals))))
        d_sec = secular_mask(d_eig, evals, width)
        diss = ops.transform_super(d_sec, evecs.conj().T)
        L = ops.commutator_super(h_sys) + diss
    L = L + ops.commutator_super(-omega_L * number + h_drive)
    meta = dict(base.meta, omega_L=omega_L, rabi=rabi, rabi2=rabi2, secular=secular, frame="rotating")
    if h_sys is not None:
        meta["hamiltonian"] = h_sys - omega_L * number + h_drive
    return _constant(base.name + "+drive", base.basis, L, **meta)


def rotating_frame(base: Generator, omega: float) -> Generator:
    """Same equation seen in the frame rotating at ``omega`` about the excitation number.

    Populations are unchanged; the fast optical phase of the coherences is removed.
    """
    return build_driven(base, 0.0, omega)


def build_model(name: str, params: SystemParams, rates: ReservoirRates | None = None) -> Generator:
    """Dispatch by model name: me1, me2, general, me4, me5."""
    builders = {"me1": build_me1, "me2": build_me2, "me4": build_me4, "me5": build_me5,
                "general": build_general_table}
    if name not in builders:
        raise ValueError(f"unknown model {name!r}")
    return builders[name](params, rates=rates) if name != "general" else build_general_table(params, rates=rates)


def effective_two_level(params: SystemParams, rates: ReservoirRates | None = None, *, omega_L: float,
                        rabi: float) -> Generator:
    """Driven two-level model on span{|s>, |g>} in the frame rotating at omega_L.

    Basis order (s, g). Detuning delta' - omega_L, Rabi frequency ``rabi`` and
    decay s -> g at (Omega+ + Omega+_12) - (Omega- + Omega-_12).
    """
    r = _rates(params, rates)
    dp = dressed_parameters(params, r)
    if abs(omega_L - dp["delta_prime"]) > 0.2 * abs(dp["J_plus"]):
        warnings.warn("drive far from the s-g resonance: effective two-level model unreliable", stacklevel=2)
    detuning = dp["delta_prime"] - omega_L
    a_sg = np.array([[0, 1], [0, 0]], dtype=complex)
    a_gs = a_sg.T.copy()
    h = 0.5 * detuning * np.diag([1.0, -1.0]).astype(complex) + 0.5j * rabi * (a_gs - a_sg)
    decay = (r.Op + r.Op12) - (r.Om + r.Om12)
    L = ops.commutator_super(h) + ops.dissipator(a_gs, decay)
    return _constant("two_level", "two_level", L, hamiltonian=h, decay=decay, detuning=detuning)


def trace_audit(gen: Generator, n: int = 100, seed: int = 0, t: float = 0.0) -> float:
    """max |Tr L(rho)| over random density matrices (plus per-term audit in meta)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        rho = ops.random_density_matrix(rng, gen.dim)
        worst = max(worst, abs(np.trace(gen(t, rho))))
    return worst


def term_trace_audit(params: SystemParams, rates: ReservoirRates | None = None) -> dict:
    """Trace leakage of each ME4 group: norm of the row functional Tr o term."""
    trace_row = np.eye(4).reshape(-1)
    return {k: float(np.linalg.norm(trace_row @ v)) for k, v in me4_terms(params, rates).items()}


def propagator(gen: Generator, t: float) -> np.ndarray:
    """exp(L t) for a time-independent generator (reference and tests)."""
    return expm(gen.matrix * t)
