"""``sim`` command-line entry point."""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from ._accel import backend
from .errors import ConfigError, SimError
from .scenarios import RunResult, apply_overrides, parse_config, preset, preset_names, run

log = logging.getLogger("xyqubits")

POPULATION_COLUMNS = ("gamma_t", "rho_e", "rho_s", "rho_a", "rho_g", "trace", "min_eig")
SPECTRUM_COLUMNS = ("omega_offset_over_gamma", "s_i_normalized")
DISTANCE_COLUMNS = ("check", "J", "r12_over_lambda", "distance_over_gamma")
CSV_SCHEMA = 1


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _csv_text(columns, rows) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def write_outputs(result: RunResult, out: Path) -> list:
    """Write every CSV of a run; returns [(name, sha256, bytes)]."""
    out.mkdir(parents=True, exist_ok=True)
    files = []

    def emit(name: str, text: str):
        data = text.encode("utf-8")
        _atomic_write(out / name, data)
        files.append({"file": name, "sha256": _sha256(data), "bytes": len(data)})

    for model, table in result.populations.items():
        rows = zip(*(table[c] for c in POPULATION_COLUMNS))
        emit(f"populations_{model}.csv", _csv_text(POPULATION_COLUMNS, rows))
    for (model, J), spec in result.spectra.items():
        emit(f"spectrum_{model}_J{J:g}.csv", _csv_text(SPECTRUM_COLUMNS, zip(spec.offsets, spec.values)))
    if result.distances:
        rows = ([r[c] for c in DISTANCE_COLUMNS] for r in result.distances)
        emit("distances.csv", _csv_text(DISTANCE_COLUMNS, rows))
    return files


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    if isinstance(x, np.integer):
        return int(x)
    return x


def build_manifest(result: RunResult, files: list, argv: list, overrides: dict, flags: dict) -> dict:
    scn = result.scenario
    return {
        "tool": "sim",
        "version": __version__,
        "csv_schema": CSV_SCHEMA,
        "backend": backend(),
        "argv": list(argv),
        "scenario": scn.to_dict(),
        "overrides": overrides,
        "flags": flags,
        "resolved_parameters": scn.params.to_dict(),
        "diagnostics": _jsonable(result.diagnostics),
        "outputs": files,
    }


def _configure_logging() -> None:
    level = os.environ.get("SIM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sim", description="XY-coupled qubit pair in a common vacuum reservoir")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a preset or configured scenario")
    r.add_argument("--preset", default=None, help="preset name (see list-presets)")
    r.add_argument("--config", default=None, help="key = value file with dotted keys")
    r.add_argument("--out", default="out", help="output directory")
    r.add_argument("--jobs", type=int, default=1, help="parallel workers for models/sweep points")
    r.add_argument("--fixed-step", action="store_true", help="fixed-step RK4 (byte-reproducible output)")
    r.add_argument("--secular", action="store_true", help="secular approximation of the driven dissipator")
    r.add_argument("--lamb-shifts", choices=("full", "zeroed"), default=None)
    sub.add_parser("validate", help="run the quick invariant suite")
    sub.add_parser("list-presets", help="list preset names")
    return p


def _cmd_run(args, argv) -> int:
    overrides = {}
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}", path=args.config) from None
        overrides.update(parse_config(text))
    name = args.preset or overrides.pop("preset", None)
    if name is None:
        raise ConfigError("no scenario: pass --preset or set preset = ... in the config")
    if args.lamb_shifts:
        overrides["system.lamb_shift_mode"] = args.lamb_shifts
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1", jobs=args.jobs)
    scn = apply_overrides(preset(name), overrides)
    log.info("running %s with %d override(s)", scn.name, len(overrides))
    out = Path(args.out)
    flags = {"fixed_step": args.fixed_step, "secular": args.secular, "jobs": args.jobs}
    try:
        result = run(scn, fixed_step=args.fixed_step, secular=args.secular, jobs=args.jobs)
    except SimError as exc:
        if isinstance(exc, ConfigError):
            raise
        out.mkdir(parents=True, exist_ok=True)
        diag = {"error": exc.code, "message": str(exc), "context": _jsonable(exc.context), "scenario": scn.to_dict()}
        _atomic_write(out / "diagnostics.json", json.dumps(diag, indent=2, sort_keys=True).encode() + b"\n")
        raise
    files = write_outputs(result, out)
    manifest = build_manifest(result, files, argv, overrides, flags)
    _atomic_write(out / "manifest.json", (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode("utf-8"))
    for f in files:
        print(f"wrote {out / f['file']}")
    return 0


def _cmd_validate() -> int:
    from .validate import quick_suite

    ok = True
    for name, passed, detail in quick_suite():
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} {name} {detail}")
    return 0 if ok else 1


def main(argv: list | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    _configure_logging()
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "list-presets":
            for n in preset_names():
                print(n)
            return 0
        if args.command == "validate":
            return _cmd_validate()
        return _cmd_run(args, argv)
    except ConfigError as exc:
        print(exc.one_line(), file=sys.stderr)
        return 2
    except SimError as exc:
        print(exc.one_line(), file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
