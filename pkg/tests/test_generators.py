import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from xyqubits import generators as G
from xyqubits import operators as ops
from xyqubits.errors import NonIdenticalAtoms
from xyqubits.model import SystemParams, derive
from xyqubits.reservoir import composite_rates

RNG = np.random.default_rng(20240501)


def random_states(n, dim=4):
    return [ops.random_density_matrix(RNG, dim) for _ in range(n)]


# ------------------------------------------------------------------ Hamiltonian


def test_xy_eigenvectors_identical_atoms():
    J = 0.37
    h = G.hamiltonian_xy(SystemParams(J=J))
    for label, energy in (("ee", 1.0), ("gg", -1.0), ("s", -J), ("a", J)):
        v = ops.ket(label)
        assert np.allclose(h @ v, energy * v, atol=1e-15)
    assert np.allclose(np.sort(np.linalg.eigvalsh(h)), sorted([1.0, -1.0, J, -J]))


def test_xy_diagonal_when_decoupled():
    h = G.hamiltonian_xy(SystemParams(omega1=1.1, omega2=0.9))
    assert np.allclose(h, np.diag(np.diag(h)))


@pytest.mark.parametrize("kw", [dict(J=0.3), dict(omega1=1.05, omega2=0.95, J=0.2), dict(omega1=1.05, omega2=0.95)])
def test_frequency_components(kw):
    p = SystemParams(**kw)
    d = derive(p)
    h = G.hamiltonian_xy(p)
    comps = G.frequency_components(d)
    for (atom, tag), L in comps.items():
        w = d.alpha if tag == "alpha" else -d.beta
        assert np.allclose(h @ L - L @ h, -w * L, atol=1e-14)
    assert np.allclose(comps[(0, "alpha")] + comps[(0, "beta")], ops.S1M)
    assert np.allclose(comps[(1, "alpha")] + comps[(1, "beta")], ops.S2M)


# ------------------------------------------------------------------ structure


ALL = ["me1", "me2", "me4", "me5", "general"]


def constant(name, p):
    if name == "me5":
        return G.build_me5(p)
    return G.build_model(name, p)


@pytest.mark.parametrize("name", ALL)
def test_linearity_and_hermiticity(name):
    g = constant(name, SystemParams(J=0.4))
    r1, r2 = random_states(2)
    a, b = 0.3 - 0.2j, 1.7
    lhs = g(0.0, a * r1 + b * r2)
    assert np.allclose(lhs, a * g(0.0, r1) + b * g(0.0, r2), atol=1e-12)
    out = g(0.0, r1)
    assert np.allclose(out, out.conj().T, atol=1e-14)


@pytest.mark.parametrize("name", ALL)
def test_trace_preservation(name):
    g = constant(name, SystemParams(J=0.4))
    assert G.trace_audit(g) < 1e-10 * 0.05


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 0.9), st.floats(0.05, 12.0), st.floats(0.0, math.pi))
def test_me1_me2_traceless_on_hermitian(J, r, th):
    p = SystemParams(J=J, r12_over_lambda=r, theta_dipole=th)
    for g in (G.build_me1(p), G.build_me2(p)):
        x = ops.random_hermitian(RNG)
        assert abs(np.trace(g(0.0, x))) < 1e-13


def test_me1_me2_are_lindblad():
    # Choi matrix of the dissipative part is positive semidefinite on the traceless complement
    p = SystemParams(J=0.2)
    for g in (G.build_me1(p), G.build_me2(p)):
        L = g.matrix - ops.commutator_super(g.meta["hamiltonian"])
        choi = L.reshape(4, 4, 4, 4).transpose(0, 2, 1, 3).reshape(16, 16)
        # project out the identity direction
        w = np.eye(4).reshape(-1) / 2.0
        Q = np.eye(16) - np.outer(w, w)
        assert np.min(np.linalg.eigvalsh(Q @ choi @ Q)) > -1e-14


# ------------------------------------------------------------------ reductions


def test_me1_single_atom_decay():
    p = SystemParams(J=0.0)
    g = G.build_me1(p)
    t = 13.0
    rho = (expm(g.matrix * t) @ ops.projector("ee").reshape(-1)).reshape(4, 4)
    assert rho[0, 0].real == pytest.approx(math.exp(-2 * p.gamma_single * t), rel=1e-12)


def test_me1_no_symmetric_antisymmetric_difference():
    p = SystemParams(J=0.6)
    g = G.build_me1(p).in_basis(ops.V_COLLECTIVE, "collective")
    for t in (1.0, 10.0, 60.0):
        rho = (expm(g.matrix * t) @ ops.A("eps", "eps").reshape(-1)).reshape(4, 4)
        assert abs(rho[1, 1] - rho[2, 2]) < 1e-12


def test_me2_approaches_me1_far_apart():
    p = SystemParams(r12_over_lambda=10.0)
    d = np.linalg.norm(G.build_me2(p).matrix - G.build_me1(p).matrix, 2)
    assert d < 0.05 * p.gamma_single


def test_me2_dicke_rates():
    p = SystemParams(r12_over_lambda=1e-6, lamb_shift_mode="zeroed")
    r = composite_rates(p)
    # drop the hopping term (diverges at contact) and keep the dissipator
    L = G.build_me2(p, r).matrix - ops.commutator_super(G.build_me2(p, r).meta["hamiltonian"])
    Lc = ops.transform_super(L, ops.V_COLLECTIVE)
    idx = lambda a, b: 4 * a + b  # noqa: E731
    # population outflow of |s> and |a>
    s_rate = -Lc[idx(1, 1), idx(1, 1)].real
    a_rate = -Lc[idx(2, 2), idx(2, 2)].real
    assert s_rate == pytest.approx(2 * p.gamma_single, rel=1e-8)
    assert a_rate == pytest.approx(0.0, abs=1e-8)


def test_me4_reduces_to_me2_linearly_in_J():
    p3, p6 = SystemParams(J=1e-3), SystemParams(J=1e-6)
    d3 = np.linalg.norm(G.build_me4(p3).matrix - G.build_me2(p3).matrix, 2)
    d6 = np.linalg.norm(G.build_me4(p6).matrix - G.build_me2(p6).matrix, 2)
    # first-order difference from evaluating the rates at omega0 +- J
    assert d6 / d3 == pytest.approx(1e-3, rel=1e-2)
    assert d6 < 1e-3 * p6.gamma_single


def test_general_routes_agree():
    for kw in (dict(J=0.3), dict(omega1=1.05, omega2=0.95, J=0.2), dict(omega1=1.03, omega2=0.97)):
        p = SystemParams(**kw)
        a, b = G.build_general(p), G.build_general_table(p)
        for t in RNG.uniform(0, 300, 5):
            assert np.max(np.abs(a.superoperator(t) - b.matrix)) < 1e-12


def test_general_matches_me4_random_pairs():
    p = SystemParams(J=0.6)
    gen, me4 = G.build_general(p), G.build_me4(p)
    for t, rho in zip(RNG.uniform(0, 500, 100), random_states(100)):
        ref = me4(t, rho)
        assert np.max(np.abs(gen(t, rho) - ref)) <= 1e-9 * np.max(np.abs(ref))


def test_general_at_zero_coupling_matches_me2():
    # identical atoms: same equation; the individual shift enters both as Lambda_{omega0}
    p = SystemParams(J=0.0)
    assert np.max(np.abs(G.build_general_table(p).matrix - G.build_me2(p).matrix)) < 1e-9


def test_me5_basis_equivalence():
    p = SystemParams(J=0.6)
    m4, m5 = G.build_me4(p), G.build_me5(p)
    V = ops.V_COLLECTIVE
    for rho in random_states(100):
        lhs = V.conj().T @ m4(0.0, rho) @ V
        rhs = m5(0.0, V.conj().T @ rho @ V)
        assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_identical_only():
    p = SystemParams(omega1=1.05, omega2=0.95, J=0.2)
    with pytest.raises(NonIdenticalAtoms):
        G.build_me4(p)
    with pytest.raises(NonIdenticalAtoms):
        G.build_me5(p)


def test_me4_symmetric_channel_dominates():
    p = SystemParams(J=0.6)
    g = G.build_me4(p).in_basis(ops.V_COLLECTIVE, "collective")
    x = ops.A("eps", "eps").reshape(-1)
    for t in np.linspace(0.5, 200, 40):
        rho = (expm(g.matrix * t) @ x).reshape(4, 4)
        assert rho[1, 1].real >= rho[2, 2].real


def test_me4_term_audit():
    audit = G.term_trace_audit(SystemParams(J=0.4))
    assert set(audit) == {"hamiltonian", "local", "cross", "omega_minus_12", "lambda_plus_12", "omega_minus",
                          "lambda_plus"}
    assert all(v < 1e-14 for v in audit.values())


# ------------------------------------------------------------------ coefficient table


def test_coefficients_vanish_when_decoupled():
    p = SystemParams(omega1=1.05, omega2=0.95, J=0.0)
    c = G.general_coefficients(0.7, derive(p), composite_rates(p))
    assert np.allclose(c.C, 0) and np.allclose(c.D, 0)
    assert np.allclose(c.E, 0) and np.allclose(c.F, 0)


def test_coefficient_entries_against_table():
    p = SystemParams(omega1=1.04, omega2=0.96, J=0.25)
    d, r = derive(p), composite_rates(p)
    c = G.general_coefficients(3.0, d, r)
    g, dl, k = d.gamma_coef, d.delta_coef, d.coupling_ratio
    assert c.A[0, 0] == pytest.approx(g * r.o_i_alpha + dl * r.o_i_beta)
    assert c.A[1, 1] == pytest.approx(dl * r.o_i_alpha + g * r.o_i_beta)
    assert c.A[0, 1] == pytest.approx(r.Op12 + 1j * (p.omega1 - p.omega2) / d.delta_big * r.Lp12)
    assert c.A[1, 0] == pytest.approx(np.conj(c.A[0, 1]))
    assert c.C[0, 1] == pytest.approx(k * (r.Om + 1j * r.Lp))
    assert c.D[0, 1] == pytest.approx(k * (r.Om12 + 1j * r.Lp12))
    b12 = 1j * (g * r.l_c_beta - dl * r.l_c_alpha) - 0.5 * (dl * r.o_c_alpha + g * r.o_c_beta) + k * (r.Om + 1j * r.Lp)
    assert c.B[0, 1] == pytest.approx(b12)


def test_identical_atoms_A12_real_and_time_independent():
    p = SystemParams(J=0.4)
    d, r = derive(p), composite_rates(p)
    c1, c2 = G.general_coefficients(1.0, d, r), G.general_coefficients(77.0, d, r)
    assert abs(c1.A[0, 1].imag) < 1e-15
    for f in "ABCDEF":
        assert np.allclose(getattr(c1, f), getattr(c2, f), atol=1e-15)
    assert len(c1.G) == 6 and len(c1.phi) == 8


# ------------------------------------------------------------------ collective form


def test_dressed_coupling_difference():
    p = SystemParams(J=0.1)
    r = composite_rates(p)
    dp = G.dressed_parameters(p, r)
    assert dp["J_plus"] - dp["J_minus"] == pytest.approx(2 * r.Lp12, abs=1e-15)
    assert dp["delta_prime"] == pytest.approx(dp["omega_prime"] - dp["J_plus"])


def test_channel_rates_in_me5():
    p = SystemParams(J=0.3, r12_over_lambda=0.05)
    r = composite_rates(p)
    L = G.build_me5(p, r).matrix
    idx = lambda a, b: 4 * a + b  # noqa: E731
    # |s> -> |g| and |a> -> |g> feeding rates
    s_to_g = L[idx(3, 3), idx(1, 1)].real
    a_to_g = L[idx(3, 3), idx(2, 2)].real
    assert s_to_g == pytest.approx((r.Op + r.Op12) - (r.Om + r.Om12), rel=1e-12)
    # |a> lies at +J, so it decays at alpha = omega0 + J
    assert a_to_g == pytest.approx((r.Op - r.Op12) + (r.Om - r.Om12), rel=1e-12)
    assert a_to_g < 0.05 * r.o_i_alpha


def test_basis_transform():
    assert np.allclose(ops.basis_transform(ops.projector("ee")), ops.A("eps", "eps"))
    sp = ops.basis_transform(ops.S1P)
    expected = (ops.A("eps", "s") - ops.A("eps", "a") + ops.A("s", "g") + ops.A("a", "g")) / math.sqrt(2)
    assert np.allclose(sp, expected, atol=1e-15)
    x = ops.random_hermitian(RNG)
    assert np.allclose(ops.basis_transform(ops.basis_transform(x), "to_product"), x, atol=1e-14)
    with pytest.raises(ValueError):
        ops.basis_transform(x, "sideways")


# ------------------------------------------------------------------ driving


def test_equal_illumination_decouples_antisymmetric():
    for t in (0.0, 0.3, 5.1):
        h = G.driving_hamiltonian(t, 2.0, 1.3, basis="collective")
        a, e, g = 2, 0, 3
        assert abs(h[a, e]) < 1e-15 and abs(h[g, a]) < 1e-15


def test_unequal_illumination_amplitude():
    h = G.driving_hamiltonian(0.0, 1.0, 1.0, rabi2=2.0, basis="collective")
    # antisymmetric element (i/4)(W2 - W1) for A_{a eps}
    assert h[2, 0] == pytest.approx(0.25j)
    h2 = G.driving_hamiltonian(0.0, 3.0, 1.0, rabi2=6.0, basis="collective")
    assert h2[2, 0] == pytest.approx(3 * h[2, 0])


def test_interaction_picture_phases():
    p = SystemParams(J=0.1)
    dp = G.dressed_parameters(p)
    h4 = G.build_me5(p).meta["hamiltonian"]
    wl = dp["delta_prime"]
    for t in (0.7, 3.3):
        u = expm(1j * h4 * t)
        ht = u @ G.driving_hamiltonian(t, 2.0, wl, basis="collective") @ u.conj().T
        # A_gs term static, A_s eps term rotating at omega' + J(+) - omega_L
        assert ht[3, 1] == pytest.approx(0.5j * 2.0 * 1.0, abs=1e-12)
        phase = np.exp(-1j * (dp["omega_prime"] + dp["J_plus"] - wl) * t)
        assert ht[1, 0] == pytest.approx(0.5j * 2.0 * phase, abs=1e-12)


def test_drive_hamiltonian_hermitian_and_rejects_negative():
    h = G.driving_hamiltonian(1.2, 0.5, 1.0, rabi2=0.2)
    assert np.allclose(h, h.conj().T)
    with pytest.raises(ValueError):
        G.driving_hamiltonian(0.0, -1.0, 1.0)


def test_phase_covariance_makes_frame_exact():
    p = SystemParams(J=0.3)
    phi = 0.83
    u = expm(1j * phi * G.NUMBER)
    for name in ("me1", "me2", "me4"):
        g = G.build_model(name, p)
        for rho in random_states(3):
            lhs = g(0.0, u @ rho @ u.conj().T)
            rhs = u @ g(0.0, rho) @ u.conj().T
            assert np.allclose(lhs, rhs, atol=1e-14)


def test_driven_hamiltonian_part_avoids_antisymmetric_state():
    p = SystemParams(J=0.1)
    g = G.build_driven(G.build_me5(p), 3.0, 1.0)
    h = g.meta["hamiltonian"]
    assert np.allclose(h[2, [0, 1, 3]], 0) and np.allclose(h[[0, 1, 3], 2], 0)


def test_secular_flag_changes_only_nonsecular_blocks():
    p = SystemParams(J=0.1)
    base = G.build_me4(p)
    full = G.build_driven(base, 0.0, 1.0)
    sec = G.build_driven(base, 0.0, 1.0, secular=True)
    # undriven: the rotating-frame Bohr structure keeps every population-transfer term
    rho = ops.projector("ee")
    assert np.allclose(np.diag(full(0.0, rho)), np.diag(sec(0.0, rho)), atol=1e-14)
    assert G.trace_audit(sec) < 1e-14


def test_effective_two_level_rabi_period():
    p = SystemParams(J=0.1)
    dp = G.dressed_parameters(p)
    rabi = 0.4
    g = G.effective_two_level(p, omega_L=dp["delta_prime"], rabi=rabi)
    M = g.matrix - ops.dissipator(np.array([[0, 0], [1, 0]], dtype=complex), g.meta["decay"])
    rho0 = np.diag([0.0, 1.0]).astype(complex).reshape(-1)
    T = 2 * math.pi / rabi
    r_half = (expm(M * T / 2) @ rho0).reshape(2, 2)
    r_full = (expm(M * T) @ rho0).reshape(2, 2)
    assert r_half[0, 0].real == pytest.approx(1.0, abs=1e-12)
    assert r_full[0, 0].real == pytest.approx(0.0, abs=1e-12)


def test_effective_two_level_warns_off_resonance():
    p = SystemParams(J=0.1)
    dp = G.dressed_parameters(p)
    with pytest.warns(UserWarning):
        G.effective_two_level(p, omega_L=dp["omega_prime"] + dp["J_plus"], rabi=1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        G.effective_two_level(p, omega_L=dp["delta_prime"], rabi=1.0)


def test_build_model_unknown():
    with pytest.raises(ValueError):
        G.build_model("me3", SystemParams())


def test_generator_immutable():
    g = G.build_me1(SystemParams())
    with pytest.raises(ValueError):
        g.matrix[0, 0] = 1.0
