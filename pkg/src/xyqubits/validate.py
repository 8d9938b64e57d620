"""Quick invariant suite behind ``sim validate``."""
from __future__ import annotations

import numpy as np

from . import generators as G
from . import operators as ops
from .model import SystemParams
from .reservoir import composite_rates, gamma_mu, omega_collective
from .scenarios import superoperator_distance
from .specfun import cos_integral, sin_integral


def quick_suite() -> list:
    """[(name, passed, detail)] for the cheap structural checks."""
    out = []
    gamma = 0.05
    p = SystemParams(J=1e-6)
    r = composite_rates(p)
    d = superoperator_distance(G.build_me4(p, r).matrix, G.build_me2(p, r).matrix) / gamma
    out.append(("me4_to_me2_J1e-6", d < 1e-8, f"distance/gamma={d:.3e} threshold=1e-08"))
    p = SystemParams(J=0.0, r12_over_lambda=10.0)
    r = composite_rates(p)
    d = superoperator_distance(G.build_me2(p, r).matrix, G.build_me1(p, r).matrix) / gamma
    out.append(("me2_to_me1_r10", d < 0.05, f"distance/gamma={d:.3e} threshold=0.05"))
    p = SystemParams(J=0.6)
    r = composite_rates(p)
    d = superoperator_distance(G.build_general_table(p, rates=r).matrix, G.build_me4(p, r).matrix)
    out.append(("general_to_me4", d < 1e-9, f"distance={d:.3e} threshold=1e-09"))
    m5 = G.build_me5(p, r).matrix
    m4c = G.build_me4(p, r).in_basis(ops.V_COLLECTIVE, "collective").matrix
    d = float(np.max(np.abs(m5 - m4c)))
    out.append(("me5_basis_equivalence", d < 1e-10, f"max_abs={d:.3e} threshold=1e-10"))
    leak = G.trace_audit(G.build_me4(p, r)) / gamma
    out.append(("me4_trace_audit", leak < 1e-10, f"max|Tr L rho|/gamma={leak:.3e} threshold=1e-10"))
    dicke = abs(omega_collective(1.0, "-", SystemParams(r12_over_lambda=1e-9)) - gamma_mu(1.0, SystemParams()))
    out.append(("dicke_limit", dicke < 1e-8, f"abs_err={dicke:.3e} threshold=1e-08"))
    e_si = abs(sin_integral(1.0) - 0.946083070367183)
    e_ci = abs(cos_integral(1.0) - 0.3374039229009681)
    out.append(("si_ci_spot", max(e_si, e_ci) < 1e-12, f"si_err={e_si:.1e} ci_err={e_ci:.1e} threshold=1e-12"))
    return out
