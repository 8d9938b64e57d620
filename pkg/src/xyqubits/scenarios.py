"""Named parameter presets (population, drive and spectrum scenarios, reduction-chain table)."""
from __future__ import annotations

import dataclasses
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import dynamics as D
from . import generators as G
from . import operators as ops
from . import spectrum as S
from .errors import ConfigError, SimError, UnknownPreset
from .model import SystemParams
from .reservoir import composite_rates

SCHEMA_VERSION = 1
MODELS = ("me1", "me2", "me4", "general")
INITIAL_STATES = ("excited_ee", "ground_gg", "symmetric_s")
DRIVE_RULES = ("minus", "plus", "explicit")
FIXED_STEP = 0.02  # RK4 step in units of 1/omega0 for reproducible output


@dataclass(frozen=True)
class Drive:
    rabi: float = 10.0
    rule: str = "minus"
    omega_L: float | None = None

    def __post_init__(self):
        if self.rule not in DRIVE_RULES:
            raise ConfigError(f"drive rule must be one of {DRIVE_RULES}", rule=self.rule)
        if not (math.isfinite(self.rabi) and self.rabi >= 0):
            raise ConfigError("drive rabi must be finite and >= 0", rabi=self.rabi)
        if self.rule == "explicit" and self.omega_L is None:
            raise ConfigError("explicit drive rule needs omega_L")

    def frequency(self, params: SystemParams) -> float:
        """Laser frequency from the rule, using the identical-atom dressed parameters."""
        if self.rule == "explicit":
            return float(self.omega_L)
        dp = G.dressed_parameters(params.replace(omega1=params.omega0, omega2=params.omega0))
        sign = -1.0 if self.rule == "minus" else 1.0
        return dp["omega_prime"] + sign * dp["J_plus"]


@dataclass(frozen=True)
class Scenario:
    name: str
    params: SystemParams = field(default_factory=SystemParams)
    models: tuple = ("me4",)
    initial_state: str = "excited_ee"
    drive: Drive | None = None
    outputs: tuple = ("populations",)
    t_max_gamma: float = 10.0
    n_t: int = 1000
    spectrum_points: int = 2000
    spectrum_span: float = 3.0
    j_values: tuple = ()
    r_values: tuple = ()
    version: int = SCHEMA_VERSION

    def __post_init__(self):
        for m in self.models:
            if m not in MODELS:
                raise ConfigError(f"unknown model {m!r}", available=",".join(MODELS))
        if self.initial_state not in INITIAL_STATES:
            raise ConfigError(f"unknown initial state {self.initial_state!r}")
        if any(m in ("me4",) for m in self.models) and not self.params.identical:
            raise ConfigError("me4 requires identical atoms", omega1=self.params.omega1, omega2=self.params.omega2)
        if self.n_t < 2 or self.t_max_gamma <= 0:
            raise ConfigError("time grid needs n_t >= 2 and t_max_gamma > 0")
        if "spectrum" in self.outputs and self.drive is None:
            raise ConfigError("spectrum output needs a drive")

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["models"] = list(self.models)
        d["outputs"] = list(self.outputs)
        d["j_values"] = list(self.j_values)
        d["r_values"] = list(self.r_values)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        d = dict(d)
        d["params"] = SystemParams(**d["params"])
        d["drive"] = Drive(**d["drive"]) if d.get("drive") is not None else None
        for k in ("models", "outputs", "j_values", "r_values"):
            d[k] = tuple(d.get(k, ()))
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))


def _presets() -> dict:
    fig_drive = SystemParams(J=0.1, r12_over_lambda=0.2)
    return {
        "fig2_populations": Scenario(
            "fig2_populations", SystemParams(J=0.6, r12_over_lambda=0.2), ("me1", "me2", "me4"),
            "excited_ee", None, ("populations",), 10.0, 1000),
        "fig4_drive_minus": Scenario(
            "fig4_drive_minus", fig_drive, ("me4",), "ground_gg", Drive(10.0, "minus"), ("populations",), 20.0, 1000),
        "fig5_drive_plus": Scenario(
            "fig5_drive_plus", fig_drive, ("me4",), "excited_ee", Drive(10.0, "plus"), ("populations",), 20.0, 1000),
        "fig6_spectrum_sweep": Scenario(
            "fig6_spectrum_sweep", fig_drive, ("me1", "me2", "me4"), "ground_gg", Drive(10.0, "minus"),
            ("spectrum",), 20.0, 1000, 2000, 3.0, j_values=(0.0, 0.05, 0.1)),
        "reduction_chain": Scenario(
            "reduction_chain", SystemParams(J=0.6, r12_over_lambda=0.2), ("me1", "me2", "me4", "general"),
            "excited_ee", None, ("distances",), j_values=(1e-6, 1e-3, 0.1), r_values=(0.2, 10.0)),
    }


def preset_names() -> list:
    return sorted(_presets())


def preset(name: str) -> Scenario:
    table = _presets()
    if name not in table:
        raise UnknownPreset(f"unknown preset {name!r}", available=",".join(sorted(table)))
    return table[name]


# ----------------------------------------------------------------------------- overrides

_SYSTEM_KEYS = {
    "system.j_over_omega0": "J",
    "system.r12_over_lambda": "r12_over_lambda",
    "system.theta_dipole": "theta_dipole",
    "system.gamma_over_omega0": "gamma_single",
    "system.omega_cutoff": "omega_cutoff",
    "system.omega1": "omega1",
    "system.omega2": "omega2",
    "system.lamb_shift_mode": "lamb_shift_mode",
}
_SCENARIO_KEYS = {
    "grid.t_max_gamma": ("t_max_gamma", float),
    "grid.n_t": ("n_t", int),
    "spectrum.n_points": ("spectrum_points", int),
    "spectrum.span": ("spectrum_span", float),
    "initial_state": ("initial_state", str),
}


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip())


def apply_overrides(scn: Scenario, overrides: dict) -> Scenario:
    """Apply dotted key=value overrides (values as strings or numbers)."""
    sys_changes, scn_changes, drive_changes = {}, {}, {}
    for key, raw in overrides.items():
        val = str(raw).strip()
        try:
            if key in _SYSTEM_KEYS:
                name = _SYSTEM_KEYS[key]
                sys_changes[name] = val if name == "lamb_shift_mode" else float(val)
            elif key in _SCENARIO_KEYS:
                name, conv = _SCENARIO_KEYS[key]
                scn_changes[name] = conv(val)
            elif key == "models":
                scn_changes["models"] = tuple(x.strip() for x in val.split(",") if x.strip())
            elif key == "sweep.j_values":
                scn_changes["j_values"] = _floats(val)
            elif key == "sweep.r_values":
                scn_changes["r_values"] = _floats(val)
            elif key == "drive.rabi_over_omega0":
                drive_changes["rabi"] = float(val)
            elif key == "drive.rule":
                drive_changes["rule"] = val
            elif key == "drive.omega_l":
                drive_changes["omega_L"] = float(val)
                drive_changes.setdefault("rule", "explicit")
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except ValueError as exc:
            if isinstance(exc, SimError):
                raise
            raise ConfigError(f"bad value for {key}: {raw!r}") from None
    params = scn.params.replace(**sys_changes) if sys_changes else scn.params
    if drive_changes:
        base = scn.drive or Drive()
        scn_changes["drive"] = dataclasses.replace(base, **drive_changes)
    return scn.replace(params=params, **scn_changes)


def parse_config(text: str) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


# ----------------------------------------------------------------------------- running


@dataclass
class RunResult:
    scenario: Scenario
    populations: dict = field(default_factory=dict)
    spectra: dict = field(default_factory=dict)
    distances: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


def initial_density(tag: str) -> np.ndarray:
    label = {"excited_ee": "ee", "ground_gg": "gg", "symmetric_s": "s"}[tag]
    return ops.projector(label)


def _generator(model: str, params: SystemParams, drive: Drive | None, secular: bool):
    rates = composite_rates(params)
    base = G.build_model(model, params, rates)
    if drive is None:
        return G.rotating_frame(base, params.omega0), rates
    return G.build_driven(base, drive.rabi, drive.frequency(params), secular=secular), rates


def _population_task(args):
    scn, model, fixed_step, secular = args
    p = scn.params
    gen, _ = _generator(model, p, scn.drive, secular)
    gamma = p.gamma_single
    times = np.linspace(0.0, scn.t_max_gamma / gamma, scn.n_t)
    opts = D.EvolveOptions(fixed_step=FIXED_STEP if fixed_step else None)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        traj = D.evolve(gen, initial_density(scn.initial_state), times, opts, gamma=gamma)
    rho = np.asarray(traj.rho)
    herm = 0.5 * (rho + rho.conj().transpose(0, 2, 1))
    table = {
        "gamma_t": traj.gamma_t,
        "rho_e": traj.populations["eps"],
        "rho_s": traj.populations["s"],
        "rho_a": traj.populations["a"],
        "rho_g": traj.populations["g"],
        "trace": np.einsum("nii->n", rho).real,
        "min_eig": np.linalg.eigvalsh(herm)[:, 0],
    }
    diag = {
        "trace_drift": traj.trace_drift,
        "hermiticity_drift": traj.hermiticity_drift,
        "min_eigenvalue": traj.min_eigenvalue,
        "accepted_steps": traj.n_accepted,
        "rejected_steps": traj.n_rejected,
        "warnings": [str(w.message) for w in caught],
    }
    return model, table, diag


def spectrum_weights(rates) -> np.ndarray:
    return np.array([[rates.o_w1, rates.o_c_w0], [rates.o_c_w0, rates.o_w2]], dtype=float)


def _spectrum_task(args):
    scn, model, J, secular = args
    p = scn.params.replace(J=J)
    drive = scn.drive
    w_l = drive.frequency(p)
    gen, rates = _generator(model, p, drive, secular)
    gamma = p.gamma_single
    dp = G.dressed_parameters(p)
    big_omega = math.hypot(dp["delta_prime"] - w_l, drive.rabi) / gamma
    offsets = np.linspace(-scn.spectrum_span * big_omega, scn.spectrum_span * big_omega, scn.spectrum_points)
    rho_ss = D.steady_state(gen, gamma=gamma)
    res = S.incoherent_spectrum(gen, rho_ss, spectrum_weights(rates), offsets, gamma=gamma,
                                extra_frequency=drive.rabi,
                                meta={"model": model, "J": J, "omega_L": w_l, "generalized_rabi": big_omega})
    return (model, J), res


def superoperator_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Operator 2-norm of the difference of two superoperators."""
    return float(np.linalg.norm(a - b, 2))


def reduction_table(scn: Scenario) -> list:
    """Distances along the chain general -> me4 -> me2 -> me1, in units of Gamma."""
    rows = []
    base = scn.params
    gamma = base.gamma_single
    for J in scn.j_values:
        p = base.replace(J=J)
        r = composite_rates(p)
        m4 = G.build_me4(p, r).matrix
        rows.append({"check": "me4_vs_me2", "J": J, "r12_over_lambda": p.r12_over_lambda,
                     "distance_over_gamma": superoperator_distance(m4, G.build_me2(p, r).matrix) / gamma})
        rows.append({"check": "general_vs_me4", "J": J, "r12_over_lambda": p.r12_over_lambda,
                     "distance_over_gamma": superoperator_distance(G.build_general_table(p, rates=r).matrix, m4) / gamma})
    for r12 in scn.r_values:
        p = base.replace(r12_over_lambda=r12)
        r = composite_rates(p)
        rows.append({"check": "me2_vs_me1", "J": p.J, "r12_over_lambda": r12,
                     "distance_over_gamma": superoperator_distance(G.build_me2(p, r).matrix,
                                                                   G.build_me1(p, r).matrix) / gamma})
    return rows


def _map(fn, tasks, jobs):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def run(scn: Scenario, *, fixed_step: bool = False, secular: bool = False, jobs: int = 1) -> RunResult:
    """Execute every requested output of a scenario; results are ordered deterministically."""
    result = RunResult(scn)
    try:
        if "populations" in scn.outputs:
            for model, table, diag in _map(_population_task, [(scn, m, fixed_step, secular) for m in scn.models], jobs):
                result.populations[model] = table
                result.diagnostics[f"populations_{model}"] = diag
        if "spectrum" in scn.outputs:
            js = scn.j_values or (scn.params.J,)
            tasks = [(scn, m, J, secular) for J in js for m in scn.models]
            for key, res in _map(_spectrum_task, tasks, jobs):
                result.spectra[key] = res
                result.diagnostics[f"spectrum_{key[0]}_J{key[1]:g}"] = {
                    k: v for k, v in res.meta.items() if isinstance(v, (int, float, str))}
        if "distances" in scn.outputs:
            result.distances = reduction_table(scn)
    except SimError as exc:
        exc.context.setdefault("scenario", scn.name)
        raise
    return result
