"""Command-line front end.

Every subcommand reads model parameters from an optional TOML file and from
flags (flags win), writes deterministic CSV/JSON, and exits with 0 on
success, 2 on configuration errors and 3 on numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import dos as dosmod
from .dynamics import Scheme, integrate
from .errors import ConfigError, GenDickeError, GridTooLarge, InvalidParameters, NonConvergence
from .fixed_points import enumerate_fixed_points
from .model import ModelParams, PhaseSpacePoint, surface_energy
from .phases import AXIS_NAMES, Link, sweep
from .quantum import QuantumModel, full_spectrum, ground_state as quantum_ground_state
from .validation import FAULTS, run_validation

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NONCONVERGENCE = 0, 1, 2, 3

PARAM_KEYS = ("omega", "omega0", "gamma", "xi", "eta_x", "eta_y", "eta_z")
COMMON_KEYS = ("out", "seed", "threads")


def fmt(x: float) -> str:
    """Locale-free float with 17 significant digits."""
    return format(float(x), ".17g")


# --------------------------------------------------------------------------
# Option parsing
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Range:
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


def parse_range(text: str) -> Range:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"range {text!r} must look like start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"range {text!r} has non-numeric fields") from None
    if count < 1:
        raise ConfigError(f"range {text!r} needs count >= 1")
    return Range(start, stop, count)


def parse_axis(text: str) -> tuple[str, Range]:
    name, sep, rng = str(text).partition("=")
    name = name.strip()
    if not sep or name not in AXIS_NAMES:
        raise ConfigError(f"axis {text!r} must look like NAME=start:stop:count with NAME in {AXIS_NAMES}")
    return name, parse_range(rng)


def parse_link(text: str) -> Link:
    target, sep, expr = str(text).partition("=")
    if not sep:
        raise ConfigError(f"link {text!r} must look like target=source+offset")
    expr = expr.replace(" ", "")
    for i in range(1, len(expr)):
        if expr[i] in "+-":
            source, off = expr[:i], expr[i:]
            break
    else:
        source, off = expr, "0"
    try:
        offset = float(off)
    except ValueError:
        raise ConfigError(f"link offset in {text!r} is not a number") from None
    if target.strip() not in AXIS_NAMES or source not in AXIS_NAMES:
        raise ConfigError(f"link {text!r} names an unknown axis")
    return Link(target.strip(), source, offset)


def parse_point(text: str) -> PhaseSpacePoint:
    try:
        vals = [float(v) for v in str(text).split(",")]
    except ValueError:
        raise ConfigError(f"point {text!r} must be q,p,jz,phi") from None
    if len(vals) != 4:
        raise ConfigError(f"point {text!r} must be q,p,jz,phi")
    return PhaseSpacePoint(*vals)


@dataclass(frozen=True)
class Opt:
    key: str
    kind: Callable[[Any], Any]
    default: Any
    help: str


def _bool(v: Any) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).lower()
    if s in ("1", "true", "yes"):
        return True
    if s in ("0", "false", "no"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


COMMANDS: dict[str, list[Opt]] = {
    "fixed-points": [Opt("n_ring", int, 64, "samples on a continuum ring")],
    "phase-diagram": [
        Opt("axis1", parse_axis, "gamma=0:3:31", "first axis NAME=start:stop:count"),
        Opt("axis2", parse_axis, "delta_zx=-2:2:41", "second axis NAME=start:stop:count"),
        Opt("link", lambda v: [parse_link(x) for x in (v if isinstance(v, list) else [v])], [],
            "derived axis target=source+offset (repeatable)"),
        Opt("json", _bool, False, "also write a JSON mirror next to the CSV"),
    ],
    "dos": [Opt("energies", parse_range, "-2:2:81", "energy grid start:stop:count")],
    "spectrum": [
        Opt("j", float, 0.5, "pseudospin length (half-integer)"),
        Opt("n_max", int, 0, "boson cutoff"),
        Opt("k", int, 0, "number of lowest levels; 0 for the full spectrum"),
        Opt("auto_truncate", _bool, False, "grow the cutoff until the ground state settles"),
    ],
    "surface": [
        Opt("u", parse_range, f"{-math.pi}:{math.pi}:101", "u grid start:stop:count"),
        Opt("v", parse_range, f"{-math.pi}:{math.pi}:101", "v grid start:stop:count"),
    ],
    "trajectory": [
        Opt("x0", parse_point, "0.1,0,-0.5,0", "initial point q,p,jz,phi"),
        Opt("t_end", float, 10.0, "final time"),
        Opt("dt", float, 1e-3, "time step"),
        Opt("scheme", lambda v: Scheme(str(v)), "rk4", "rk4 or implicit_midpoint"),
        Opt("sample_every", int, 100, "keep every n-th step"),
    ],
    "validate": [
        Opt("mc_samples", int, 200_000, "Monte Carlo samples for the DoS suite"),
        Opt("inject_fault", str, "", argparse.SUPPRESS),
    ],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gendicke", description="Generalized Dicke model analysis tools.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, opts in COMMANDS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="TOML file with flat key = value entries")
        sp.add_argument("--out", help="output path (stdout when omitted)")
        sp.add_argument("--seed", type=int, help="random seed (default 0)")
        sp.add_argument("--threads", type=int, help="worker threads (computations are serial)")
        for key in PARAM_KEYS:
            sp.add_argument("--" + key.replace("_", "-"), dest=key, type=float)
        for o in opts:
            flag = "--" + o.key.replace("_", "-")
            if o.key == "link":
                sp.add_argument(flag, dest=o.key, action="append", help=o.help)
            else:
                sp.add_argument(flag, dest=o.key, help=o.help)
    return parser


def resolve_config(command: str, ns: argparse.Namespace) -> dict[str, Any]:
    """Merge defaults, the config file and flags; reject unknown keys."""
    opts = {o.key: o for o in COMMANDS[command]}
    allowed = set(PARAM_KEYS) | set(COMMON_KEYS) | set(opts)
    raw: dict[str, Any] = {}
    if ns.config:
        try:
            with open(ns.config, "rb") as fh:
                data = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"bad TOML in {ns.config}: {exc}") from None
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {', '.join(unknown)}")
        raw.update(data)
    for key in allowed:
        v = getattr(ns, key, None)
        if v is not None:
            raw[key] = v
    cfg: dict[str, Any] = {}
    try:
        cfg["params"] = ModelParams(**{k: raw[k] for k in PARAM_KEYS if k in raw})
    except (InvalidParameters, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    cfg["out"] = raw.get("out")
    cfg["seed"] = int(raw.get("seed", 0))
    cfg["threads"] = int(raw.get("threads", 1))
    if cfg["threads"] < 1:
        raise ConfigError("threads must be at least 1")
    for key, o in opts.items():
        try:
            cfg[key] = o.kind(raw.get(key, o.default))
        except ConfigError:
            raise
        except (ValueError, TypeError, InvalidParameters) as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None
    return cfg


# --------------------------------------------------------------------------
# Output helpers
# --------------------------------------------------------------------------

def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="")


def _csv(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _sidecar(out: str | None, suffix: str) -> str | None:
    return None if out is None else str(Path(out).with_suffix("")) + suffix


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def cmd_fixed_points(cfg: dict) -> int:
    fps = enumerate_fixed_points(cfg["params"], n_ring=cfg["n_ring"])
    _write(cfg["out"], _json({"params": cfg["params"].as_dict(), "fixed_points": [fp.record() for fp in fps]}))
    return EXIT_OK


def cmd_phase_diagram(cfg: dict) -> int:
    (n1, r1), (n2, r2) = cfg["axis1"], cfg["axis2"]
    records = sweep(cfg["params"], (n1, r1.values()), (n2, r2.values()), cfg["link"])
    rows = [[r.param1, r.param2, r.phase.value, r.dominant.value, r.epsilon, r.n_fixed_points] for r in records]
    _write(cfg["out"], _csv(["param1", "param2", "phase", "dominant", "epsilon", "n_fixed_points"], rows))
    if cfg["json"]:
        mirror = {
            "axis1": n1, "axis2": n2,
            "rows": [{"param1": r.param1, "param2": r.param2, "phase": r.phase.value, "dominant": r.dominant.value,
                      "epsilon": r.epsilon, "n_fixed_points": r.n_fixed_points, "border": r.border} for r in records],
        }
        target = _sidecar(cfg["out"], ".json")
        if target is None:
            sys.stdout.write(_json(mirror))
        else:
            _write(target, _json(mirror))
    return EXIT_OK


def cmd_dos(cfg: dict) -> int:
    p = cfg["params"]
    rows = []
    for e in cfg["energies"].values():
        r = dosmod.dos(p, float(e))
        rows.append([r.epsilon, r.nu_scaled, r.domain.value, r.quadrature_error])
    _write(cfg["out"], _csv(["epsilon", "nu_scaled", "domain", "quad_error"], rows))
    domains, crit = dosmod.energy_domains(p)
    side = {
        "critical_energies": [c.record() for c in crit],
        "domains": [{"lower": d.lower, "upper": None if math.isinf(d.upper) else d.upper, "kind": d.kind.value}
                    for d in domains],
    }
    target = _sidecar(cfg["out"], ".critical.json")
    if target is not None:
        _write(target, _json(side))
    return EXIT_OK


def cmd_spectrum(cfg: dict) -> int:
    model = QuantumModel(cfg["params"], cfg["j"], cfg["n_max"])
    if cfg["k"] > 0 or cfg["auto_truncate"]:
        res = quantum_ground_state(model, k=max(1, cfg["k"]), auto_truncate=cfg["auto_truncate"])
        ev, meta = res.eigenvalues_per_j, {"n_max_used": res.n_max_used, "converged": res.converged,
                                           "gs_epsilon": res.gs_epsilon}
    else:
        ev = full_spectrum(model)
        meta = {"n_max_used": model.n_max, "converged": False, "gs_epsilon": float(ev[0])}
    meta.update({"j": model.j, "dimension": model.with_n_max(meta["n_max_used"]).dim, "levels": int(ev.size)})
    _write(cfg["out"], _csv(["index", "epsilon"], [[i, float(v)] for i, v in enumerate(ev)]))
    target = _sidecar(cfg["out"], ".meta.json")
    if target is not None:
        _write(target, _json(meta))
    return EXIT_OK


def cmd_surface(cfg: dict) -> int:
    us, vs = cfg["u"].values(), cfg["v"].values()
    U, V = np.meshgrid(us, vs, indexing="ij")
    E = surface_energy(cfg["params"], U, V)
    rows = [[float(u), float(v), float(e)] for u, v, e in zip(U.ravel(), V.ravel(), np.ravel(E))]
    _write(cfg["out"], _csv(["u", "v", "epsilon"], rows))
    return EXIT_OK


def cmd_trajectory(cfg: dict) -> int:
    tr = integrate(cfg["params"], cfg["x0"], cfg["t_end"], cfg["dt"], cfg["scheme"], cfg["sample_every"])
    rows = [[float(t), *map(float, s), float(e)] for t, s, e in zip(tr.times, tr.states, tr.energies)]
    _write(cfg["out"], _csv(["t", "q", "p", "jz", "phi", "epsilon"], rows))
    return EXIT_OK


def cmd_validate(cfg: dict) -> int:
    fault = cfg["inject_fault"] or None
    if fault is not None and fault not in FAULTS:
        raise ConfigError(f"unknown fault {fault!r}")
    results = run_validation(cfg["params"], seed=cfg["seed"], mc_samples=cfg["mc_samples"], inject=fault)
    lines = [r.line() for r in results]
    n_ok = sum(r.passed for r in results)
    lines.append(f"{n_ok}/{len(results)} suites passed")
    _write(cfg["out"], "\n".join(lines) + "\n")
    return EXIT_OK if n_ok == len(results) else EXIT_FAIL


HANDLERS = {
    "fixed-points": cmd_fixed_points,
    "phase-diagram": cmd_phase_diagram,
    "dos": cmd_dos,
    "spectrum": cmd_spectrum,
    "surface": cmd_surface,
    "trajectory": cmd_trajectory,
    "validate": cmd_validate,
}


def _glue_values(argv: list[str]) -> list[str]:
    """Join ``--flag value`` into ``--flag=value`` so ranges may start with '-'."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a.startswith("--") and "=" not in a and a not in ("--help",) and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ns = parser.parse_args(_glue_values(argv))
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = resolve_config(ns.command, ns)
        return HANDLERS[ns.command](cfg)
    except (ConfigError, InvalidParameters, GridTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except GenDickeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
