"""Command line interface: ``twocenters <subcommand> [options]``.

Every subcommand writes a table as CSV (default) or JSON. CSV output starts with
the effective configuration as ``# key=value`` lines, then the header row.
Settings come from built-in defaults, then the config file section named after
the subcommand (``--config`` or $TWOCENTERS_CONFIG), then explicit flags.
"""
from __future__ import annotations

import argparse
import configparser
import contextlib
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import dynamics, momentmap, potential, regularization, toric
from .errors import TwoCentersError
from .potential import MassParams

COMMANDS = ("critical-points", "summary", "hill", "profile", "classify",
            "euler-periods", "scan", "simulate", "verify")

DEFAULTS = {
    "m1": "1", "m2": "0.5", "eps": "0", "c": None, "component": "e",
    "samples": None, "grid": "200", "format": "csv", "out": None, "workers": "1",
    "tol": "", "system": "mu", "kappa": None, "periods": "100", "mask": None,
}

# tolerance name -> (module, attribute) pairs it overrides; None means a classify tolerance
TOLERANCES = {
    "grad_tol": [(potential, "GRAD_TOL")],
    "deg_tol": [(potential, "DEG_TOL")],
    "collision_tol": [(potential, "COLLISION_TOL"), (regularization, "COLLISION_TOL")],
    "drift_tol": [(dynamics, "DRIFT_TOL")],
    "harmonic_switch": [(momentmap, "HARMONIC_SWITCH")],
    "tau_rtol": [(momentmap, "TAU_RTOL")],
    "mono_tol": None,
    "curv_tol": None,
    "lin_tol": None,
}


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twocenters", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--m1")
        p.add_argument("--m2")
        p.add_argument("--eps")
        p.add_argument("--c")
        p.add_argument("--component", choices=["e", "m"])
        p.add_argument("--samples", type=int)
        p.add_argument("--grid", type=int)
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--out")
        p.add_argument("--config")
        p.add_argument("--workers", type=int)
        p.add_argument("--tol", action="append", metavar="NAME=VALUE")
        if name in ("euler-periods", "simulate"):
            p.add_argument("--system", choices=["mu", "nu"])
        if name == "simulate":
            p.add_argument("--kappa")
            p.add_argument("--periods")
        if name == "hill":
            p.add_argument("--mask", help="write the component labels to this .npy file")
    return ap


def _load_config(path, section):
    path = path or os.environ.get("TWOCENTERS_CONFIG")
    if not path:
        return {}
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise UsageError(f"cannot read config file {path}")
    if cp.has_section(section):
        return dict(cp.items(section))
    return dict(cp.defaults())


def effective_config(args) -> dict:
    cfg = dict(DEFAULTS)
    cfg.update(_load_config(args.config, args.command))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is None:
            continue
        if key == "tol":
            val = ",".join(val)
        cfg[key] = str(val)
    cfg["command"] = args.command
    return cfg


def _float(cfg, key, required=True):
    raw = cfg.get(key)
    if raw is None or raw == "":
        if required:
            raise UsageError(f"--{key} is required")
        return None
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"--{key} expects a number, got {raw!r}") from None


def _int(cfg, key, default):
    raw = cfg.get(key)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"--{key} expects an integer, got {raw!r}") from None


def _values(raw: str, key: str) -> list:
    """A number, a comma list, or lo:hi:n (inclusive, n points)."""
    try:
        if ":" in raw:
            lo, hi, n = raw.split(":")
            return [float(v) for v in np.linspace(float(lo), float(hi), int(n))]
        return [float(v) for v in raw.split(",")]
    except ValueError:
        raise UsageError(f"--{key} expects a number, list or lo:hi:n, got {raw!r}") from None


def _tolerances(cfg) -> dict:
    out = {}
    for item in filter(None, (t.strip() for t in cfg.get("tol", "").split(","))):
        name, sep, value = item.partition("=")
        if not sep or name not in TOLERANCES:
            raise UsageError(f"unknown tolerance {item!r}; known: {', '.join(TOLERANCES)}")
        try:
            out[name] = float(value)
        except ValueError:
            raise UsageError(f"tolerance {name} expects a number") from None
    return out


@contextlib.contextmanager
def _overridden(tols: dict):
    """Apply module-level tolerance overrides for the duration of one command."""
    saved = []
    try:
        for name, value in tols.items():
            for module, attr in TOLERANCES[name] or ():
                saved.append((module, attr, getattr(module, attr)))
                setattr(module, attr, value)
        yield
    finally:
        for module, attr, old in reversed(saved):
            setattr(module, attr, old)


def _params(cfg) -> MassParams:
    return MassParams(_float(cfg, "m1"), _float(cfg, "m2"), _float(cfg, "eps"))


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.floating):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def write_table(columns, rows, cfg, stream):
    shown = {k: v for k, v in sorted(cfg.items()) if v not in (None, "")}
    if cfg.get("format") == "json":
        doc = {"config": shown,
               "rows": [{k: _jsonable(r[k]) for k in columns} for r in rows]}
        stream.write(json.dumps(doc, indent=2) + "\n")
        return
    lines = [f"# {k}={v}" for k, v in shown.items()]
    lines.append(",".join(columns))
    lines += [",".join(_fmt(r[k]) for k in columns) for r in rows]
    stream.write("\n".join(lines) + "\n")


def cmd_critical_points(cfg):
    pts = potential.find_critical_points(_params(cfg))
    cols = ["label", "q1", "q2", "value", "kind", "hessian_det", "hessian_trace"]
    rows = [dict(label=p.label, q1=p.location.q1, q2=p.location.q2, value=p.value,
                 kind=p.kind.value, hessian_det=p.hessian_det, hessian_trace=p.hessian_trace)
            for p in pts]
    return cols, rows


def cmd_summary(cfg):
    p = _params(cfg)
    s = potential.critical_summary(p)
    row = dict(m1=p.m1, m2=p.m2, eps=p.eps, c0=s.c0, c_crit=s.c_crit, holds=s.holds,
               ordering="<".join(s.ordering))
    row.update(s.condition_flags)
    return list(row), [row]


def cmd_hill(cfg):
    p = _params(cfg)
    rep = potential.hill_regions(p, _float(cfg, "c"), n=_int(cfg, "grid", 200))
    if cfg.get("mask"):
        np.save(cfg["mask"], rep.labels)
    sizes = np.bincount(rep.labels.ravel(), minlength=rep.component_count + 1)
    cols = ["component", "cells", "bounded", "contains_e", "contains_m", "grid", "component_count"]
    rows = [dict(component=i + 1, cells=int(sizes[i + 1]), bounded=rep.bounded[i],
                 contains_e=rep.contains_e[i], contains_m=rep.contains_m[i], grid=rep.n,
                 component_count=rep.component_count)
            for i in range(rep.component_count)]
    return cols, rows


def _profile(cfg, default_samples=64):
    return momentmap.profile(_float(cfg, "c"), _params(cfg), cfg["component"],
                             n=_int(cfg, "samples", default_samples),
                             workers=_int(cfg, "workers", 1))


def cmd_profile(cfg):
    prof = _profile(cfg)
    cols = ["kappa", "tau1", "tau2", "T1", "T2", "fprime", "fsecond"]
    return cols, [{k: getattr(s, k) for k in cols} for s in prof.samples]


def cmd_classify(cfg):
    tols = {k: v for k, v in _tolerances(cfg).items() if TOLERANCES[k] is None}
    rep = toric.classify(_profile(cfg), tol=tols)
    row = dict(monotone=rep.monotone, convexity=rep.convexity.value,
               dynamically_convex=rep.dynamically_convex, volume=rep.volume,
               max_abs_curvature=rep.max_abs_curvature)
    return list(row), [row]


def cmd_euler_periods(cfg):
    p = _params(cfg)
    if p.eps != 0:
        raise UsageError("euler-periods needs --eps 0")
    c = _float(cfg, "c")
    comp = cfg["component"]
    which = "mu_system" if cfg["system"] == "mu" else "nu_system"
    M = p.M1 if which == "mu_system" else p.M2
    sys_ = regularization.SeparatedSystem(which, c, p, comp)
    win = regularization.kappa_window(comp, p)
    n = _int(cfg, "samples", 9)
    rows = []
    for kappa in np.linspace(win.lo, win.hi, n + 2)[1:-1]:
        t_ell = momentmap.tau(sys_, kappa)
        t_z = momentmap.tau_euler_z(M, c, kappa)
        _, t_ode = dynamics.integrate_periods(sys_, kappa, periods=10, refine=False)
        vals = (t_ell, t_z, t_ode)
        dis = (max(vals) - min(vals)) / t_ell
        rows.append(dict(kappa=float(kappa), tau_elliptic=t_ell, tau_z=t_z, ode_period=t_ode,
                         max_rel_disagreement=dis))
    return ["kappa", "tau_elliptic", "tau_z", "ode_period", "max_rel_disagreement"], rows


def cmd_scan(cfg):
    rows = potential.scan_conjecture(_values(cfg["m1"], "m1"), _values(cfg["m2"], "m2"),
                                     _values(cfg["eps"], "eps"), workers=_int(cfg, "workers", 1))
    for r in rows:
        if r.error:
            print(f"row ({r.m1}, {r.m2}, {r.eps}): {r.error}", file=sys.stderr)
        elif r.counterexample:
            print(f"counterexample: m1={r.m1} m2={r.m2} eps={r.eps} c0={r.c0} c_crit={r.c_crit}",
                  file=sys.stderr)
    cols = ["m1", "m2", "eps", "c0", "c_crit", "holds"]
    return cols, [{k: getattr(r, k) for k in cols} for r in rows]


def cmd_simulate(cfg):
    p = _params(cfg)
    c = _float(cfg, "c")
    comp = cfg["component"]
    which = "mu_system" if cfg["system"] == "mu" else "nu_system"
    sys_ = regularization.SeparatedSystem(which, c, p, comp)
    win = regularization.kappa_window(comp, p)
    kappa = _float(cfg, "kappa", required=False)
    if kappa is None:
        kappa = 0.5 * (win.lo + win.hi)
    traj, period = dynamics.integrate_periods(sys_, kappa, periods=_float(cfg, "periods"))
    row = dict(system=which, kappa=kappa, dt=traj.dt, n_steps=(len(traj.states) - 1) * traj.stride,
               period=period, tau=momentmap.tau(sys_, kappa), drift=traj.drift["K"])
    return list(row), [row]


def cmd_verify(cfg):
    from .acceptance import run_all
    results = run_all()
    for r in results:
        print(r.line(), file=sys.stderr)
    cols = ["criterion", "passed", "seconds"]
    rows = [dict(criterion=r.number, passed=r.passed, seconds=r.seconds) for r in results]
    return cols, rows, all(r.passed for r in results)


HANDLERS = {
    "critical-points": cmd_critical_points, "summary": cmd_summary, "hill": cmd_hill,
    "profile": cmd_profile, "classify": cmd_classify, "euler-periods": cmd_euler_periods,
    "scan": cmd_scan, "simulate": cmd_simulate, "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = effective_config(args)
        if cfg["format"] not in ("csv", "json"):
            raise UsageError(f"unknown format {cfg['format']!r}")
        tols = _tolerances(cfg)
        with _overridden(tols), warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                out = HANDLERS[args.command](cfg)
            finally:
                for w in caught:
                    print(f"warning: {w.category.__name__}: {w.message}", file=sys.stderr)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"twocenters: error: {exc}", file=sys.stderr)
        return 2
    except TwoCentersError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"twocenters: error: {exc}", file=sys.stderr)
        return 2
    status = 0
    if len(out) == 3:
        cols, rows, passed = out
        status = 0 if passed else 1
    else:
        cols, rows = out
    if cfg.get("out"):
        with open(cfg["out"], "w", newline="\n") as fh:
            write_table(cols, rows, cfg, fh)
    else:
        write_table(cols, rows, cfg, sys.stdout)
    return status


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
