"""Command-line front end.

    projflow simulate <config.json> [flags]   time evolution -> CSV
    projflow field    <config.json> [flags]   field scan over a grid -> CSV
    projflow check    <config.json> [flags]   equivalence diagnostics -> JSON
    projflow validate <config.json> [flags]   geometry self-tests -> JSON

The config is a single JSON document; --t-end, --dt, --output, --seed and
--no-projection override its entries.  Numbers are serialised with 17
significant digits so doubles round-trip exactly, making output files
byte-identical for identical configs.  Exit codes: 0 success, 1 invariant
failure (validate), 2 configuration error, 3 runtime truncation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constraints import algebraic_constraint, gram_covariance_check, observable_constraint
from .dynamics import constrained_field, integrate
from .equivalence import equivalence_report
from .errors import ChartDomainError, ConfigError, DegenerateGeometryError, SingularGramError
from .geometry import ChartPoint, geometry_at, nijenhuis_residual
from .systems import (
    SystemDefinition,
    from_angular,
    product_surface_sample,
    pushforward_to_angular,
    sample_interior_point,
    system_from_name,
)

COMMANDS = ("simulate", "field", "check", "validate")
# Singular fixed points of the conserved-sigma_x example in (q, p); grids and
# sampled check points keep clear of these.
SPIN_SINGULAR_POINTS = ((0.0, 0.5), (math.pi, 0.5), (2.0 * math.pi, 0.5))
VALIDATE_TOL = 1e-8
VALIDATE_NIJENHUIS_TOL = 1e-4


def _fmt(x: float) -> str:
    return "%.17g" % x


def _json_dump(obj, indent=0) -> str:
    """Serialise with fixed 17-significant-digit floats for determinism."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            '%s  %s: %s' % (pad, json.dumps(str(k)), _json_dump(v, indent + 1))
            for k, v in obj.items()
        )
        return "{\n%s\n%s}" % (items, pad)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join("%s  %s" % (pad, _json_dump(v, indent + 1)) for v in obj)
        return "[\n%s\n%s]" % (items, pad)
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    return json.dumps(str(obj))


@dataclass
class RunConfig:
    command: str
    system: SystemDefinition
    constraints_active: bool = True
    initial_point: Optional[ChartPoint] = None
    grid: Optional[dict] = None
    points: Optional[list] = None
    num_points: int = 50
    t_end: float = 1.0
    dt: float = 1e-3
    projection: bool = True
    output_path: Optional[str] = None
    seed: int = 0
    extra: dict = field(default_factory=dict)


def _build_constraint(spec, n: int):
    kind = spec.get("kind")
    if kind == "observable":
        return observable_constraint(np.asarray(spec["matrix"], dtype=float), spec.get("name", "observable"))
    if kind == "population":
        index = int(spec["index"])
        if not 1 <= index <= n - 1:
            raise ConfigError("population index out of range")
        grad = np.zeros(2 * (n - 1))
        grad[(n - 1) + index - 1] = 1.0
        return algebraic_constraint(
            spec.get("name", "p%d" % index),
            lambda pt, i=index - 1: float(pt.p[i]),
            lambda pt, g=grad: g,
        )
    raise ConfigError("unknown constraint kind %r" % kind)


def load_config(path: str, command: str, overrides: argparse.Namespace) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("cannot read config: %s" % exc)
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if "command" in raw and raw["command"] != command:
        raise ConfigError("config command %r does not match %r" % (raw["command"], command))

    sysspec = raw.get("system")
    if not isinstance(sysspec, dict) or "name" not in sysspec:
        raise ConfigError("config needs a system object with a name")
    name = sysspec["name"]
    n = sysspec.get("n")
    try:
        extra_constraints = tuple(
            _build_constraint(c, int(n) if n else 2) for c in sysspec.get("constraints", [])
        )
        system = system_from_name(
            name,
            energies=sysspec.get("energies"),
            n=n,
            constraints=extra_constraints,
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc))

    cfg = RunConfig(command=command, system=system)
    cfg.constraints_active = raw.get("constraints", "default") != "none"
    if raw.get("initial_point") is not None:
        ip = raw["initial_point"]
        try:
            cfg.initial_point = ChartPoint(np.asarray(ip["q"], float), np.asarray(ip["p"], float))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("bad initial_point: %s" % exc)
    cfg.grid = raw.get("grid")
    cfg.points = raw.get("points")
    cfg.num_points = int(raw.get("num_points", 50))
    cfg.t_end = float(raw.get("t_end", 1.0))
    cfg.dt = float(raw.get("dt", 1e-3))
    cfg.projection = bool(raw.get("projection", True))
    cfg.output_path = raw.get("output_path")
    cfg.seed = int(raw.get("seed", 0))

    if overrides.t_end is not None:
        cfg.t_end = overrides.t_end
    if overrides.dt is not None:
        cfg.dt = overrides.dt
    if overrides.output is not None:
        cfg.output_path = overrides.output
    if overrides.seed is not None:
        cfg.seed = overrides.seed
    if overrides.no_projection:
        cfg.projection = False

    if cfg.dt <= 0.0:
        raise ConfigError("dt must be positive")
    if cfg.t_end < 0.0:
        raise ConfigError("t_end must be nonnegative")
    return cfg


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_simulate(cfg: RunConfig) -> int:
    if cfg.initial_point is None:
        raise ConfigError("simulate needs an initial_point")
    if cfg.output_path is None:
        raise ConfigError("simulate needs an output_path")
    system = cfg.system
    cons = system.constraints if cfg.constraints_active else ()
    try:
        traj = integrate(
            system, cfg.initial_point, cfg.t_end, cfg.dt,
            constraints=cons, projection=cfg.projection and bool(cons),
        )
    except (ChartDomainError, ValueError) as exc:
        raise ConfigError(str(exc))

    m = cfg.initial_point.m
    header = (
        ["t"]
        + ["q_%d" % (i + 1) for i in range(m)]
        + ["p_%d" % (i + 1) for i in range(m)]
        + ["phi_%d" % (i + 1) for i in range(len(cons))]
        + ["H", "exit_flag"]
    )
    lines = [",".join(header)]
    last = len(traj) - 1
    for i in range(len(traj)):
        flag = traj.exit_flag if (i == last and traj.exit_flag != "completed") else "ok"
        row = (
            [_fmt(traj.times[i])]
            + [_fmt(v) for v in np.mod(traj.qs[i], 2.0 * math.pi)]
            + [_fmt(v) for v in traj.ps[i]]
            + [_fmt(v) for v in traj.constraint_values[i]]
            + [_fmt(traj.energies[i]), flag]
        )
        lines.append(",".join(row))
    _write_text(cfg.output_path, "\n".join(lines) + "\n")
    if traj.exit_flag != "completed":
        print("truncated (%s) after %d samples -> %s" % (traj.exit_flag, len(traj), cfg.output_path))
        return 3
    print("wrote %d samples -> %s" % (len(traj), cfg.output_path))
    return 0


def _grid_axis(spec, name, lo, hi):
    try:
        start = float(spec["%s_min" % name])
        stop = float(spec["%s_max" % name])
        count = int(spec["%s_count" % name])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("bad grid axis %r: %s" % (name, exc))
    if count < 1 or not (lo <= start <= stop <= hi):
        raise ConfigError("grid axis %r outside its chart range" % name)
    return np.linspace(start, stop, count) if count > 1 else np.array([start])


def cmd_field(cfg: RunConfig) -> int:
    if cfg.grid is None:
        raise ConfigError("field needs a grid")
    if cfg.output_path is None:
        raise ConfigError("field needs an output_path")
    system = cfg.system
    if system.n != 2:
        raise ConfigError("field scans are defined for two-level systems")
    kind = cfg.grid.get("kind", "angular")
    lines = []
    if kind == "angular":
        thetas = _grid_axis(cfg.grid, "theta", 1e-12, math.pi - 1e-12)
        phis = _grid_axis(cfg.grid, "phi", 0.0, 2.0 * math.pi)
        lines.append("theta,phi,theta_dot,phi_dot,flag")
        for theta in thetas:
            for phi in phis:
                try:
                    point = from_angular(_angular(theta, phi))
                    vel = constrained_field(point, system)
                    tdot, pdot = pushforward_to_angular(point, vel)
                    lines.append(",".join([_fmt(theta), _fmt(phi), _fmt(tdot), _fmt(pdot), "ok"]))
                except (SingularGramError, ChartDomainError):
                    lines.append(",".join([_fmt(theta), _fmt(phi), "nan", "nan", "singular"]))
    elif kind == "chart":
        qs = _grid_axis(cfg.grid, "q", -2.0 * math.pi, 2.0 * math.pi)
        ps = _grid_axis(cfg.grid, "p", 1e-12, 1.0 - 1e-12)
        lines.append("q,p,q_dot,p_dot,flag")
        for q in qs:
            for p in ps:
                try:
                    point = ChartPoint([q], [p])
                    vel = constrained_field(point, system)
                    lines.append(",".join([_fmt(q), _fmt(p), _fmt(vel[0]), _fmt(vel[1]), "ok"]))
                except (SingularGramError, ChartDomainError):
                    lines.append(",".join([_fmt(q), _fmt(p), "nan", "nan", "singular"]))
    else:
        raise ConfigError("unknown grid kind %r" % kind)
    _write_text(cfg.output_path, "\n".join(lines) + "\n")
    print("wrote %d field rows -> %s" % (len(lines) - 1, cfg.output_path))
    return 0


def _angular(theta, phi):
    from .systems import AngularPoint

    return AngularPoint(theta, phi)


def _check_points(cfg: RunConfig) -> list:
    if cfg.points:
        try:
            return [
                ChartPoint(np.asarray(p["q"], float), np.asarray(p["p"], float))
                for p in cfg.points
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("bad points entry: %s" % exc)
    system = cfg.system
    rng = np.random.default_rng(cfg.seed)
    points = []
    if system.name == "two-qubit-product":
        # Equivalence holds on the constraint surface; sample there.
        for i in range(cfg.num_points):
            points.append(product_surface_sample(cfg.seed + i))
        return points
    pairs = system.n - 1
    while len(points) < cfg.num_points:
        pt = sample_interior_point(rng, pairs)
        if system.name == "spin-half-sx":
            q, p = float(pt.q[0]), float(pt.p[0])
            if min(math.hypot(q - sq, p - sp) for sq, sp in SPIN_SINGULAR_POINTS) < 1e-2:
                continue
        points.append(pt)
    return points


def cmd_check(cfg: RunConfig) -> int:
    system = cfg.system
    if not system.constraints:
        raise ConfigError("check needs a system with constraints")
    reports = []
    singular = 0
    verdicts = []
    for pt in _check_points(cfg):
        entry = {"q": list(pt.q), "p": list(pt.p)}
        try:
            rep = equivalence_report(pt, system)
            entry.update(rep.to_dict())
            verdicts.append(rep.verdict)
        except SingularGramError:
            entry["status"] = "singular"
            singular += 1
        reports.append(entry)
    aggregate = {
        "verdict": "equivalent" if verdicts and all(v == "equivalent" for v in verdicts) else "not_equivalent",
        "points_checked": len(verdicts),
        "singular_excluded": singular,
        "max_j_invariance_residual": max(
            (r["j_invariance_residual"] for r in reports if "j_invariance_residual" in r), default=0.0
        ),
        "max_right_annihilation_residual": max(
            (r["right_annihilation_residual"] for r in reports if "right_annihilation_residual" in r), default=0.0
        ),
    }
    payload = {"system": system.name, "seed": cfg.seed, "points": reports, "aggregate": aggregate}
    text = _json_dump(payload) + "\n"
    if cfg.output_path:
        _write_text(cfg.output_path, text)
        print("verdict: %s -> %s" % (aggregate["verdict"], cfg.output_path))
    else:
        sys.stdout.write(text)
    return 0


def _probe_observables(n: int):
    ham = np.diag(np.arange(1.0, n + 1.0))
    flip = np.zeros((n, n))
    flip[0, 1] = flip[1, 0] = 1.0
    return [observable_constraint(ham, "probe-diag"), observable_constraint(flip, "probe-flip")]


def cmd_validate(cfg: RunConfig) -> int:
    system = cfg.system
    rng = np.random.default_rng(cfg.seed)
    pairs = system.n - 1
    dim = 2 * pairs
    eye = np.eye(dim)
    canonical = np.zeros((dim, dim))
    canonical[:pairs, pairs:] = np.eye(pairs)
    canonical[pairs:, :pairs] = -np.eye(pairs)
    probes = _probe_observables(system.n)

    residuals = {
        "j_squared": 0.0,
        "hermitian_metric": 0.0,
        "two_form_inverse": 0.0,
        "canonical_symplectic": 0.0,
        "nijenhuis": 0.0,
        "gram_covariance": 0.0,
    }
    for _ in range(cfg.num_points):
        pt = sample_interior_point(rng, pairs)
        geom = geometry_at(pt)
        residuals["j_squared"] = max(residuals["j_squared"], float(np.abs(geom.j @ geom.j + eye).max()))
        residuals["hermitian_metric"] = max(
            residuals["hermitian_metric"], float(np.abs(geom.j.T @ geom.g @ geom.j - geom.g).max())
        )
        residuals["two_form_inverse"] = max(
            residuals["two_form_inverse"], float(np.abs(geom.big_omega_inv @ geom.big_omega.T - eye).max())
        )
        residuals["canonical_symplectic"] = max(
            residuals["canonical_symplectic"], float(np.abs(geom.omega - canonical).max())
        )
        residuals["nijenhuis"] = max(residuals["nijenhuis"], nijenhuis_residual(pt))
        residuals["gram_covariance"] = max(residuals["gram_covariance"], gram_covariance_check(probes, pt))

    tolerances = {name: VALIDATE_TOL for name in residuals}
    tolerances["nijenhuis"] = VALIDATE_NIJENHUIS_TOL
    checks = [
        {
            "name": name,
            "max_residual": residuals[name],
            "tolerance": tolerances[name],
            "pass": residuals[name] < tolerances[name],
        }
        for name in residuals
    ]
    all_pass = all(c["pass"] for c in checks)
    payload = {
        "system": system.name,
        "seed": cfg.seed,
        "num_points": cfg.num_points,
        "checks": checks,
        "pass": all_pass,
    }
    text = _json_dump(payload) + "\n"
    if cfg.output_path:
        _write_text(cfg.output_path, text)
        print("validate: %s -> %s" % ("pass" if all_pass else "FAIL", cfg.output_path))
    else:
        sys.stdout.write(text)
    return 0 if all_pass else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="projflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("config", help="path to a JSON run configuration")
        cmd.add_argument("--t-end", type=float, default=None, dest="t_end")
        cmd.add_argument("--dt", type=float, default=None)
        cmd.add_argument("--output", default=None)
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--no-projection", action="store_true", dest="no_projection")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.command, args)
        handler = {
            "simulate": cmd_simulate,
            "field": cmd_field,
            "check": cmd_check,
            "validate": cmd_validate,
        }[args.command]
        return handler(cfg)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
