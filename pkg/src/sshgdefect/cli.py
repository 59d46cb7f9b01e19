"""Command-line entry point: verification suites, simulations and delay fits.

Configuration is a JSON tree (``--config``) overridden by flags.  Each
command writes ``<report_dir>/<command>.json`` and exits with 0 when every
check passes, 1 when a check fails and 2 on a configuration error.

Report schema (version 1)::

    {"schema_version": 1, "check": <command>, "max_residual": float,
     "tolerance": float, "pass": bool, "seed": int,
     "checks": [{"name", "max_residual", "tolerance", "control", "pass"}, ...],
     "outputs": {...}, "values": {...}}

The top-level ``max_residual``/``tolerance`` are those of the check with the
largest residual-to-tolerance ratio among the non-control checks.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import checks, sim
from .defect import DefectParams
from .soliton import SolitonParams, delay_z

SCHEMA_VERSION = 1
REPORT_ENV = "SSHGDEFECT_REPORT_DIR"

VERIFY = {
    "verify-algebra": ("algebra", "superfield"),
    "verify-backlund": ("backlund",),
    "verify-defect": ("defect", "limits"),
    "verify-pb": ("pb",),
    "verify-fusing": ("fusing",),
    "verify-laxpair": ("laxpair",),
    "verify-soliton": ("soliton",),
}
COMMANDS = tuple(VERIFY) + ("simulate", "delay")


class ConfigError(ValueError):
    """Schema violation; ``path`` names the offending field (e.g. ``model.m``)."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# section -> field -> (type tag, default); ``REQUIRED`` marks mandatory fields
REQUIRED = object()
SCHEMA: dict[str, dict[str, tuple[str, Any]]] = {
    "model": {"m": ("real", REQUIRED), "omega1": ("complex", None), "omega2": ("complex", None),
              "sigma": ("complex", None), "tau": ("complex", None)},
    "soliton": {"theta": ("real", 0.7), "eta1": ("complex", 0.3), "eta2": ("complex", -0.2),
                "R1": ("complex", 0.5j), "s1": ("complex", 1.0), "zeta": ("complex", None)},
    "grid": {"L": ("real", 20.0), "dx": ("real", 0.02), "cfl": ("real", 0.5),
             "stencil": ("str", "upwind5"), "t0": ("real", -10.0), "t1": ("real", 10.0),
             "every": ("int", 10)},
    "check": {"seed": ("int", 0), "samples": ("int", None), "tolerance": ("real", None),
              "evolve": ("bool", False)},
    "output": {"report_dir": ("str", None), "csv": ("str", None), "checkpoint": ("str", None)},
}
DEFAULT_TREE = {"model": {"m": 1.0}}


@dataclass
class RunConfig:
    command: str
    model: dict = field(default_factory=dict)
    soliton: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    check: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    @property
    def report_dir(self) -> Path:
        return Path(self.output["report_dir"] or os.environ.get(REPORT_ENV, "reports"))

    def defect_params(self) -> Optional[DefectParams]:
        """Model parameters given explicitly, or ``None`` (suites then sample them)."""
        md = self.model
        if md["omega1"] is not None:
            return DefectParams(m=md["m"], omega1=md["omega1"], omega2=md["omega2"])
        if md["sigma"] is not None:
            return DefectParams.fused(md["sigma"], md["tau"], md["m"])
        return None

    def soliton_params(self) -> SolitonParams:
        so, md = self.soliton, self.model
        kw = dict(R1=so["R1"], s1=so["s1"], theta=so["theta"], m=md["m"])
        if md["omega1"] is not None:
            return SolitonParams.from_omegas(md["omega1"], md["omega2"], **kw)
        return SolitonParams(eta1=so["eta1"], eta2=so["eta2"], **kw)


def _coerce(path: str, tag: str, value):
    if value is None:
        return None
    try:
        if tag == "real":
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if tag == "int":
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise TypeError
            return int(value)
        if tag == "bool":
            if not isinstance(value, bool):
                raise TypeError
            return value
        if tag == "str":
            if not isinstance(value, str):
                raise TypeError
            return value
        if tag == "complex":
            if isinstance(value, (list, tuple)):
                if len(value) != 2:
                    raise TypeError
                return complex(float(value[0]), float(value[1]))
            if isinstance(value, bool):
                raise TypeError
            if isinstance(value, str):
                return complex(value.replace(" ", ""))
            return complex(value)
    except (TypeError, ValueError):
        raise ConfigError(path, f"expected {tag}, got {value!r}") from None
    raise AssertionError(tag)


def build_config(command: str, tree: Optional[dict], overrides: dict) -> RunConfig:
    """Validate a config tree, apply flag overrides (``section.field`` keys) and fill defaults."""
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}")
    tree = DEFAULT_TREE if tree is None else tree
    if not isinstance(tree, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    merged: dict[str, dict] = {}
    for section, value in tree.items():
        if section not in SCHEMA:
            raise ConfigError(section, "unknown section")
        if not isinstance(value, dict):
            raise ConfigError(section, "section must be an object")
        for key in value:
            if key not in SCHEMA[section]:
                raise ConfigError(f"{section}.{key}", "unknown field")
        merged[section] = dict(value)
    for dotted, value in overrides.items():
        section, key = dotted.split(".")
        merged.setdefault(section, {})[key] = value

    cfg = RunConfig(command)
    for section, spec in SCHEMA.items():
        given = merged.get(section, {})
        out = {}
        for key, (tag, default) in spec.items():
            path = f"{section}.{key}"
            if key in given:
                out[key] = _coerce(path, tag, given[key])
            elif default is REQUIRED:
                raise ConfigError(path, "required field missing")
            else:
                out[key] = default
        setattr(cfg, section, out)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    md, gr, ck = cfg.model, cfg.grid, cfg.check
    if md["m"] == 0:
        raise ConfigError("model.m", "mass must be nonzero")
    omega = md["omega1"] is not None or md["omega2"] is not None
    fused = md["sigma"] is not None or md["tau"] is not None
    if omega and fused:
        raise ConfigError("model", "give either omega1/omega2 or sigma/tau, not both")
    if omega and (md["omega1"] is None or md["omega2"] is None):
        raise ConfigError("model.omega2" if md["omega1"] is not None else "model.omega1",
                          "omega1 and omega2 must be given together")
    if omega and 0 in (md["omega1"], md["omega2"]):
        raise ConfigError("model.omega1", "omegas must be nonzero")
    if fused and (md["sigma"] is None or md["tau"] is None):
        raise ConfigError("model.tau" if md["sigma"] is not None else "model.sigma",
                          "sigma and tau must be given together")
    if fused and md["sigma"] == 0:
        raise ConfigError("model.sigma", "sigma must be nonzero")
    if fused and cfg.command in ("simulate", "delay", "verify-soliton"):
        raise ConfigError("model.sigma", f"{cfg.command} uses the omega form")
    if gr["dx"] <= 0:
        raise ConfigError("grid.dx", "must be positive")
    if gr["L"] <= 0:
        raise ConfigError("grid.L", "must be positive")
    if not 0 < gr["cfl"] <= 1:
        raise ConfigError("grid.cfl", "must lie in (0, 1]")
    if gr["stencil"] not in sim.STENCILS:
        raise ConfigError("grid.stencil", f"must be one of {sim.STENCILS}")
    if gr["t1"] <= gr["t0"]:
        raise ConfigError("grid.t1", "must exceed grid.t0")
    if gr["every"] < 1:
        raise ConfigError("grid.every", "must be at least 1")
    if ck["samples"] is not None and ck["samples"] < 1:
        raise ConfigError("check.samples", "must be at least 1")
    if ck["tolerance"] is not None and ck["tolerance"] <= 0:
        raise ConfigError("check.tolerance", "must be positive")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------
def _suite_kwargs(cfg: RunConfig, name: str) -> dict:
    kw: dict[str, Any] = {"seed": cfg.check["seed"]}
    if cfg.check["samples"] is not None:
        kw["samples"] = cfg.check["samples"]
    if name == "soliton":
        kw["params"] = cfg.soliton_params()
    elif name != "algebra":
        kw["m"] = cfg.model["m"]
    if name in ("pb", "defect") and cfg.defect_params() is not None:
        kw["params"] = cfg.defect_params()
    if cfg.check["tolerance"] is not None:
        kw["tol"] = cfg.check["tolerance"]
    return kw


def _run_verify(cfg: RunConfig):
    results = []
    for name in VERIFY[cfg.command]:
        for r in checks.SUITES[name](**_suite_kwargs(cfg, name)):
            results.append(checks.CheckResult(f"{name}.{r.name}", r.max_residual,
                                              r.tolerance, r.control))
    return results, {}, {}


def _sim_setup(cfg: RunConfig):
    sp = cfg.soliton_params()
    z = delay_z(sp.theta, sp.eta1, sp.eta2)[0]
    zeta = z if cfg.soliton["zeta"] is None else cfg.soliton["zeta"]
    gr = cfg.grid
    params = sim.SimParams(m=sp.m, defect=sim.soliton_defect_params(sp), cfl=gr["cfl"],
                           stencil=gr["stencil"])
    return sp, z, zeta, params


def _evolve(cfg: RunConfig, sp, z, zeta, params) -> sim.SimResult:
    gr = cfg.grid
    state = sim.soliton_state(sp, z, zeta, gr["t0"], params, L=gr["L"], dx=gr["dx"])
    return sim.run(state, params, gr["t1"], every=gr["every"])


def _run_simulate(cfg: RunConfig):
    sp, z, zeta, params = _sim_setup(cfg)
    res = _evolve(cfg, sp, z, zeta, params)
    tol = cfg.check["tolerance"] or 1e-4
    results = [checks.CheckResult(f"drift_{k}_tot", sim.relative_drift(res.series, f"{k}_tot", k), tol)
               for k in sim.CHARGES]
    results.append(checks.CheckResult("junction_residual", res.max_junction_residual, 1e-9))
    d = cfg.report_dir
    csv_path = Path(cfg.output["csv"] or d / "simulate.csv")
    ckpt = Path(cfg.output["checkpoint"] or d / "simulate_checkpoint.json")
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    ckpt.parent.mkdir(parents=True, exist_ok=True)
    sim.write_series(res.series, csv_path)
    sim.save_checkpoint(res.state, ckpt)
    values = {"bulk_energy_drift": sim.relative_drift(res.series, "E", "E")}
    return results, {"csv": str(csv_path), "checkpoint": str(ckpt)}, values


def _run_delay(cfg: RunConfig):
    sp, z, zeta, params = _sim_setup(cfg)
    print(f"z1 = {z.real:.15g}{z.imag:+.15g}j")
    gr = cfg.grid
    playback = sim.soliton_state(sp, z, zeta, gr["t1"], params, L=gr["L"], dx=gr["dx"])
    z_play = sim.measure_delay(playback, sp)
    results = [checks.CheckResult("playback_fit", abs(z_play - z) / abs(z), 1e-10)]
    values = {"z1": [z.real, z.imag], "z_playback": [z_play.real, z_play.imag]}
    if cfg.check["evolve"]:
        res = _evolve(cfg, sp, z, zeta, params)
        z_fit = sim.measure_delay(res.state, sp)
        print(f"z_fit = {z_fit.real:.15g}{z_fit.imag:+.15g}j")
        results.append(checks.CheckResult("evolved_fit", abs(z_fit - z) / abs(z),
                                          cfg.check["tolerance"] or 1e-2))
        values["z_fit"] = [z_fit.real, z_fit.imag]
    return results, {}, values


def report(cfg: RunConfig, results, outputs=None, values=None, error: Optional[str] = None) -> dict:
    regular = [r for r in results if not r.control] or results
    worst = max(regular, key=lambda r: r.max_residual / r.tolerance, default=None)
    ok = error is None and bool(results) and checks.all_passed(results)
    rep = {
        "schema_version": SCHEMA_VERSION,
        "check": cfg.command,
        "max_residual": None if worst is None else worst.max_residual,
        "tolerance": None if worst is None else worst.tolerance,
        "pass": ok,
        "seed": cfg.check["seed"],
        "checks": [r.as_dict() for r in results],
        "outputs": outputs or {},
        "values": values or {},
    }
    if error is not None:
        rep["error"] = error
    return rep


def run(cfg: RunConfig) -> int:
    """Execute one command, write its report and return the exit code."""
    handler = {"simulate": _run_simulate, "delay": _run_delay}.get(cfg.command, _run_verify)
    error = None
    try:
        results, outputs, values = handler(cfg)
    except (sim.SimulationError, sim.FitError, ArithmeticError) as exc:
        results, outputs, values, error = [], {}, {}, f"{type(exc).__name__}: {exc}"
    rep = report(cfg, results, outputs, values, error)
    d = cfg.report_dir
    d.mkdir(parents=True, exist_ok=True)
    with open(d / f"{cfg.command}.json", "w") as fh:
        json.dump(rep, fh, indent=2, default=_json_default)
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        kind = " (negative control)" if r.control else ""
        print(f"{tag} {r.name}: {r.max_residual:.3e} tol {r.tolerance:g}{kind}")
    if error:
        print(f"ERROR {error}", file=sys.stderr)
    return 0 if rep["pass"] else 1


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(type(x).__name__)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------
FLAGS = {  # flag -> (config path, argparse type)
    "m": ("model.m", str), "omega1": ("model.omega1", str), "omega2": ("model.omega2", str),
    "sigma": ("model.sigma", str), "tau": ("model.tau", str),
    "theta": ("soliton.theta", str), "eta1": ("soliton.eta1", str), "eta2": ("soliton.eta2", str),
    "R1": ("soliton.R1", str), "s1": ("soliton.s1", str), "zeta": ("soliton.zeta", str),
    "L": ("grid.L", str), "dx": ("grid.dx", str), "cfl": ("grid.cfl", str),
    "stencil": ("grid.stencil", str), "t0": ("grid.t0", str), "t1": ("grid.t1", str),
    "every": ("grid.every", str), "seed": ("check.seed", str), "samples": ("check.samples", str),
    "tolerance": ("check.tolerance", str), "report-dir": ("output.report_dir", str),
    "csv": ("output.csv", str), "checkpoint": ("output.checkpoint", str),
}
NUMERIC = {"real": float, "int": int}


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sshgdefect", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON config tree; flags override its values")
    p.add_argument("--evolve", action="store_true", default=None,
                   help="delay: also fit an evolved run")
    for flag, (_, typ) in FLAGS.items():
        p.add_argument(f"--{flag}", type=typ, default=None, dest=flag.replace("-", "_"))
    return p


def _flag_value(path: str, raw: str):
    section, key = path.split(".")
    tag = SCHEMA[section][key][0]
    if tag in NUMERIC:
        try:
            return NUMERIC[tag](raw)
        except ValueError:
            raise ConfigError(path, f"expected {tag}, got {raw!r}") from None
    return raw


def main(argv: Optional[list[str]] = None) -> int:
    args = parser().parse_args(argv)
    try:
        tree = None
        if args.config:
            try:
                with open(args.config) as fh:
                    tree = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError("--config", str(exc)) from None
        overrides = {}
        for flag, (path, _) in FLAGS.items():
            raw = getattr(args, flag.replace("-", "_"))
            if raw is not None:
                overrides[path] = _flag_value(path, raw)
        if args.evolve:
            overrides["check.evolve"] = True
        cfg = build_config(args.command, tree, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
