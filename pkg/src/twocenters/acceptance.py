"""Acceptance checks shared by the test suite and ``twocenters verify``.

Each check returns a CriterionResult; nothing here asserts, so one failing
criterion never hides the others.
"""
from __future__ import annotations

import io
import json
import math
import time
import warnings
from contextlib import redirect_stdout
from dataclasses import dataclass

import numpy as np

from . import dynamics, momentmap, potential, regularization, toric
from .errors import ConditionWarning, TwoCentersError
from .potential import MassParams

TAU_Z_TOL = 1e-8
TAU_ODE_TOL = 1e-4


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.title}: {self.detail} ({self.seconds:.2f}s)"


class _Profiles:
    """Profiles are shared by several criteria; each is computed once and timed."""

    def __init__(self):
        self.cache = {}
        self.seconds = {}

    def get(self, c, params, component, n):
        key = (c, params, component, n)
        if key not in self.cache:
            t0 = time.perf_counter()
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", ConditionWarning)
                    self.cache[key] = momentmap.profile(c, params, component, n)
            except TwoCentersError as exc:
                self.cache[key] = exc
            self.seconds[key] = time.perf_counter() - t0
        return self.cache[key]


EULER_CONVEXITY_CASES = [(m2, "concave_toric") for m2 in (0.25, 0.5, 0.75)] + [
    (m2, "convex_toric") for m2 in (-0.1, -0.25, -0.4)
]
LAGRANGE_CASES = [(1.0, 0.5, 1.0), (2.0, 1.0, 1.0), (1.0, 1.0, 1.0), (3.0, 1.0, 2.0)]
PROFILE_SAMPLES = 64
LAGRANGE_SAMPLES = 32


def _lagrange_energy(params: MassParams) -> float:
    return potential.critical_summary(params).c0 - 0.5


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        if res.seconds == 0.0:
            res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def criterion_1() -> CriterionResult:
    from . import cli
    buf = io.StringIO()
    t0 = time.perf_counter()
    with redirect_stdout(buf):
        status = cli.main(["summary", "--m1", "80", "--m2", "0", "--eps", "8", "--format", "json"])
    elapsed = time.perf_counter() - t0
    row = json.loads(buf.getvalue())["rows"][0]
    ok = (status == 0 and abs(row["c0"] + 65) < 1e-9 and row["c_crit"] == -81.0
          and row["holds"] is False and elapsed < 1.0)
    return CriterionResult(1, "counterexample (80, 0, 8)", ok,
                           f"c0={row['c0']!r} c_crit={row['c_crit']!r} holds={row['holds']} "
                           f"runtime={elapsed:.3f}s", elapsed)


@_timed
def criterion_2() -> CriterionResult:
    t0 = time.perf_counter()
    worst_q = worst_v = 0.0
    ok = True
    for m in (0.5, 1.0, 2.0, 5.0):
        for eps in (0.0, 0.5 * m, m, 2 * m):
            s = potential.critical_summary(MassParams(m, m, eps))
            inner = [p for p in s.points if p.label == "l1"]
            if len(inner) != 1:
                ok = False
                continue
            p = inner[0]
            worst_q = max(worst_q, math.hypot(*p.location))
            worst_v = max(worst_v, abs(p.value + 4 * m))
            ok &= s.holds
    elapsed = time.perf_counter() - t0
    ok = ok and worst_q < 1e-10 and worst_v < 1e-10 and elapsed < 1.0
    return CriterionResult(2, "equal masses", ok,
                           f"max|q|={worst_q:.2e} max|V+4m|={worst_v:.2e} runtime={elapsed:.3f}s",
                           elapsed)


@_timed
def criterion_3() -> CriterionResult:
    worst_x = worst_v = 0.0
    statement_err = 0.0
    for m1 in np.linspace(0.5, 5.0, 10):
        for r in (-0.9, -0.7, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 0.9):
            params = MassParams(float(m1), float(r * m1), 0.0)
            pts = potential.find_critical_points(params)
            (num,) = pts
            loc, val = potential.euler_critical_closed_form(params)
            worst_x = max(worst_x, abs(num.location.q1 - loc.q1) + abs(num.location.q2))
            worst_v = max(worst_v, abs(num.value - val))
            if r < 0:
                alt, _ = potential.euler_critical_closed_form(params, branch="statement")
                statement_err = max(statement_err, abs(num.location.q1 - alt.q1))
    ok = worst_x < 1e-10 and worst_v < 1e-10
    return CriterionResult(3, "Euler closed forms", ok,
                           f"max abscissa err={worst_x:.2e} max value err={worst_v:.2e}; "
                           f"1/2+1/s abscissa misses by up to {statement_err:.2f}, "
                           f"1/2+1/(s-1) is the validated branch")


def _collinear_values(params):
    return {p.label: p.value for p in potential.find_critical_points(params) if p.collinear}


@_timed
def criterion_4() -> CriterionResult:
    rng = np.random.default_rng(4)
    fwd = rev = 0
    for _ in range(50):
        eps = rng.uniform(0.1, 3.0)
        m2 = rng.uniform(3 * eps / 8, 3 * eps / 8 + 4.0)
        m1 = rng.uniform(max(m2, eps / 2), max(m2, eps / 2) + 4.0)
        v = _collinear_values(MassParams(m1, m2, eps))
        fwd += v["l1"] < v["l3"] < v["l2"]
    for _ in range(50):
        eps = rng.uniform(0.1, 3.0)
        m1 = rng.uniform(0.01, 3 * eps / 8)
        m2 = rng.uniform(0.001, min(m1, 5 * eps / 24))
        v = _collinear_values(MassParams(m1, m2, eps))
        rev += len(v) == 3 and v["l3"] < v["l2"] < v["l1"]
    return CriterionResult(4, "collinear value ordering", fwd == 50 and rev == 50,
                           f"ordering held {fwd}/50, reversed ordering held {rev}/50")


@_timed
def criterion_5() -> CriterionResult:
    # masses and eps in [1, 2] keep the two circles intersecting; outside that
    # the off-axis pair can disappear (see the census test)
    rng = np.random.default_rng(5)
    good = degenerate = 0
    for _ in range(50):
        m1, m2, eps = rng.uniform(1.0, 2.0, 3)
        pts = potential.find_critical_points(MassParams(m1, m2, eps))
        if any(p.kind == potential.Kind.DEGENERATE for p in pts):
            degenerate += 1
            continue
        axis = [p for p in pts if p.collinear]
        off = [p for p in pts if not p.collinear]
        good += (len(pts) == 5 and all(p.kind == potential.Kind.SADDLE for p in axis)
                 and len(off) == 2 and all(p.kind == potential.Kind.MAXIMUM for p in off))
    ok = good + degenerate == 50
    return CriterionResult(5, "five critical points", ok,
                           f"{good}/50 with 3 saddles + 2 maxima, {degenerate} degenerate")


# (m1, m2, c) with c below both -M1 and c0, so the whole e-window carries tori
PERIOD_CASES = [(1.0, 0.0, -3.0), (1.0, 0.5, -3.0), (2.0, 1.0, -6.5),
                (1.0, -0.25, -2.0), (0.8, 0.3, -2.5)]


@_timed
def criterion_6() -> CriterionResult:
    t0 = time.perf_counter()
    worst_z = worst_ode = 0.0
    for m1, m2, c in PERIOD_CASES:
        params = MassParams(m1, m2, 0.0)
        win = regularization.kappa_window("e", params)
        for kappa in np.linspace(win.lo, win.hi, 11)[1:-1]:
            for which, M in (("mu_system", params.M1), ("nu_system", params.M2)):
                sys = regularization.SeparatedSystem(which, c, params, "e")
                t_ell = momentmap.tau(sys, kappa)
                t_z = momentmap.tau_euler_z(M, c, kappa)
                worst_z = max(worst_z, abs(t_ell - t_z) / t_ell)
                _, t_ode = dynamics.integrate_periods(sys, kappa, periods=10, refine=False)
                worst_ode = max(worst_ode, abs(t_ell - t_ode) / t_ell)
    elapsed = time.perf_counter() - t0
    ok = worst_z < TAU_Z_TOL and worst_ode < TAU_ODE_TOL and elapsed < 30
    return CriterionResult(6, "period oracles agree", ok,
                           f"max rel |elliptic-z|={worst_z:.2e} max rel |quad-ODE|={worst_ode:.2e} "
                           f"runtime={elapsed:.1f}s", elapsed)


@_timed
def criterion_7() -> CriterionResult:
    worst = 0.0
    for params, c in ((MassParams(1, 0.5, 0), -3.0), (MassParams(1, 0, 0), -2.0),
                      (MassParams(1, 0.5, 1), -3.5), (MassParams(2, 1, 1.5), -6.5)):
        sys = regularization.SeparatedSystem("mu_system", c, params)
        kappa = params.M1 / 2 - 1e-6
        f1 = -0.5 * (params.eps / 8 + c + params.M1)
        worst = max(worst, abs(momentmap.tau(sys, kappa) * math.sqrt(f1) / (2 * math.pi) - 1))
    return CriterionResult(7, "harmonic limit at window top", worst < 1e-3,
                           f"max rel deviation={worst:.2e}")


def _profile_cases():
    cases = [(-3.0, MassParams(1.0, m2, 0.0), "e", PROFILE_SAMPLES) for m2, _ in EULER_CONVEXITY_CASES]
    for trip in LAGRANGE_CASES:
        params = MassParams(*trip)
        c = _lagrange_energy(params)
        cases += [(c, params, comp, LAGRANGE_SAMPLES) for comp in ("e", "m")]
    return cases


@_timed
def criterion_8(profiles: _Profiles) -> CriterionResult:
    worst_slope = -math.inf
    computed = 0
    for case in _profile_cases():
        prof = profiles.get(*case)
        if isinstance(prof, Exception):
            continue
        computed += 1
        worst_slope = max(worst_slope, float(prof.column("fprime")[1:-1].max()))
    kepler = profiles.get(-3.0, MassParams(1.0, 0.0, 0.0), "e", PROFILE_SAMPLES)
    dev = float(np.max(np.abs(kepler.column("fprime") + 1)))
    ok = worst_slope < -1e-9 and dev < 1e-8
    return CriterionResult(8, "strictly decreasing boundary", ok,
                           f"max interior f'={worst_slope:.4f} over {computed} profiles; "
                           f"m2=0: max|f'+1|={dev:.1e}")


@_timed
def criterion_9(profiles: _Profiles) -> CriterionResult:
    parts = []
    ok = True
    seconds = 0.0
    for m2, expected in EULER_CONVEXITY_CASES:
        key = (-3.0, MassParams(1.0, m2, 0.0), "e", PROFILE_SAMPLES)
        prof = profiles.get(*key)
        seconds += profiles.seconds[key]
        if isinstance(prof, Exception):
            ok = False
            parts.append(f"m2={m2}: {type(prof).__name__}")
            continue
        got = toric.classify(prof).convexity.value
        ok &= got == expected
        parts.append(f"m2={m2}: {got}")
    ok &= seconds < 60
    return CriterionResult(9, "Euler convexity signs", ok,
                           "; ".join(parts) + f"; profile time={seconds:.1f}s", seconds)


@_timed
def criterion_10(profiles: _Profiles) -> CriterionResult:
    parts = []
    ok = True
    for trip in LAGRANGE_CASES:
        params = MassParams(*trip)
        c = _lagrange_energy(params)
        for comp in ("e", "m"):
            prof = profiles.get(c, params, comp, LAGRANGE_SAMPLES)
            if isinstance(prof, Exception):
                ok = False
                parts.append(f"{trip}/{comp}: {type(prof).__name__}")
                continue
            rep = toric.classify(prof)
            ok &= rep.monotone
            parts.append(f"{trip}/{comp}: monotone={rep.monotone} f''-sign={rep.convexity.value}")
    return CriterionResult(10, "Lagrange profiles", ok, "; ".join(parts))


@_timed
def criterion_11() -> CriterionResult:
    rng = np.random.default_rng(11)
    worst_rel = 0.0
    smallest = math.inf
    for _ in range(20):
        M = rng.uniform(0.5, 3.0)
        c = -rng.uniform(0.5, 3.0)
        kappa = rng.uniform(-0.49, 0.49) * M
        A, B, C = momentmap.abc(M, c, kappa)
        s = momentmap.S_check(A, B, C, c, rtol=1e-10)
        d = momentmap.tau_derivatives(A, B, C, c)
        s1 = d["dB"] * d["dA"] - d["dAdB"] * d["tau"]
        worst_rel = max(worst_rel, abs(s - s1) / abs(s1))
        smallest = min(smallest, s)
    ok = smallest > 0 and worst_rel < 1e-8
    return CriterionResult(11, "S positivity", ok,
                           f"min S={smallest:.3e}, 2-D vs 1-D rel diff={worst_rel:.1e}")


def _random_states(rng, n, mu_range=(-2.0, 2.0), min_factor=1e-3):
    out = []
    while len(out) < n:
        mu = rng.uniform(*mu_range)
        nu = rng.uniform(0.0, 2 * math.pi)
        if regularization.conformal_factor(mu, nu) < min_factor:
            continue
        out.append(regularization.EllipticState(mu, nu, rng.normal(), rng.normal()))
    return out


def euler_vs_K2(n: int = 100, seed: int = 12):
    """Largest |E - K2| and |E - 2 K2| over random lifted states, with c set to H."""
    rng = np.random.default_rng(seed)
    worst_1 = worst_2 = 0.0
    for params in (MassParams(1.0, 0.5, 0.0), MassParams(1.0, -0.25, 0.0), MassParams(2.0, 0.0, 0.0)):
        for st in _random_states(rng, n):
            q, p = regularization.cotangent_lift(st)
            H = 0.5 * (p[0] ** 2 + p[1] ** 2) + potential.eval_V(q, params)
            _, _, k2 = regularization.eval_K(H, params, st)
            E = dynamics.euler_integral(q, p, params)
            scale = 1 + abs(E)
            worst_1 = max(worst_1, abs(E - k2) / scale)
            worst_2 = max(worst_2, abs(E - 2 * k2) / scale)
    return worst_1, worst_2


CONSERVATION_CASES = [
    (MassParams(1.0, 0.5, 0.0), -3.0, 0.3),
    (MassParams(1.0, -0.25, 0.0), -3.0, 0.2),
    (MassParams(1.0, 0.5, 1.0), -3.5, 0.2),
]


def conservation_drifts():
    """Largest K-level drift over 100 periods and largest E spread on lifted Euler trajectories."""
    worst_k = 0.0
    for params, c, kappa in CONSERVATION_CASES:
        for which in ("mu_system", "nu_system"):
            sys = regularization.SeparatedSystem(which, c, params, "e")
            traj, _ = dynamics.integrate_periods(sys, kappa, periods=100)
            worst_k = max(worst_k, traj.drift["K"])
    worst_e = 0.0
    for params, c, kappa in CONSERVATION_CASES:
        if params.eps == 0:
            _, d = dynamics.euler_integral_along(params, c, kappa)
            worst_e = max(worst_e, d["E"])
    return worst_k, worst_e


@_timed
def criterion_12() -> CriterionResult:
    worst_k, worst_e = conservation_drifts()
    e_k2, e_2k2 = euler_vs_K2()
    ok = worst_k < 1e-8 and worst_e < 1e-8 and e_k2 < 1e-10
    return CriterionResult(
        12, "conservation and E = K2", ok,
        f"K drift={worst_k:.1e}, E spread={worst_e:.1e}, max|E-K2|={e_k2:.2e} "
        f"(E = 2 K2 holds to {e_2k2:.1e})")


@_timed
def criterion_13() -> CriterionResult:
    rng = np.random.default_rng(13)
    worst = 0.0
    regimes = [MassParams(1.0, 0.5, 1.0), MassParams(1.0, -0.25, 0.0),
               MassParams(2.0, 0.0, 0.5), MassParams(1.0, 1.0, 0.0)]
    for i, st in enumerate(_random_states(rng, 1000)):
        params = regimes[i % len(regimes)]
        c = rng.uniform(-5.0, 0.0)
        q, p = regularization.cotangent_lift(st)
        H = 0.5 * (p[0] ** 2 + p[1] ** 2) + potential.eval_V(q, params)
        K, _, _ = regularization.eval_K(c, params, st)
        R = regularization.conformal_factor(st.mu, st.nu) / 4
        worst = max(worst, abs(K - R * (H - c)) / (1 + abs(K)))
    return CriterionResult(13, "pullback identity", worst < 1e-12, f"max scaled residual={worst:.2e}")


HILL_CASES = [
    (MassParams(0.5, 0.5, 1.0), -2.2, 3, None),
    (MassParams(1.0, 0.5, 1.0), None, 3, None),
    (MassParams(2.0, 1.0, 1.5), None, 3, None),
    (MassParams(1.0, -0.25, 0.0), -2.3, 1, "e"),
]


@_timed
def criterion_14() -> CriterionResult:
    parts = []
    ok = True
    for params, c, expected, only in HILL_CASES:
        if c is None:
            c = potential.critical_summary(params).c0 - 0.3
        rep = potential.hill_regions(params, c, n=200)
        counts = list(rep.counts_by_resolution.values())
        good = rep.component_count == expected and len(set(counts[-2:])) == 1
        if only == "e":
            good &= rep.bounded == [True] and rep.contains_e == [True]
        else:
            good &= sum(rep.bounded) == 2 and any(rep.contains_e) and any(rep.contains_m)
        ok &= good
        parts.append(f"({params.m1},{params.m2},{params.eps}) c={c:.3f}: {counts}")
    return CriterionResult(14, "Hill region components", ok, "; ".join(parts))


def _determinism() -> bool:
    from . import cli
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        with redirect_stdout(buf):
            cli.main(["profile", "--m1", "1", "--m2", "0.5", "--eps", "0", "--c", "-3",
                      "--samples", "16"])
        outs.append(buf.getvalue())
    return outs[0] == outs[1]


def run_all(include=None):
    """Run the criteria in order; criterion 15 times the rest and checks byte-identical output."""
    profiles = _Profiles()
    t0 = time.perf_counter()
    results = []
    checks = {
        1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
        6: criterion_6, 7: criterion_7, 8: lambda: criterion_8(profiles),
        9: lambda: criterion_9(profiles), 10: lambda: criterion_10(profiles),
        11: criterion_11, 12: criterion_12, 13: criterion_13, 14: criterion_14,
    }
    for number, check in checks.items():
        if include is not None and number not in include:
            continue
        try:
            results.append(check())
        except Exception as exc:  # report, keep going
            results.append(CriterionResult(number, "error", False, f"{type(exc).__name__}: {exc}"))
    if include is None or 15 in include:
        same = _determinism()
        total = time.perf_counter() - t0
        results.append(CriterionResult(15, "verify runtime and determinism",
                                       total < 180 and same,
                                       f"suite took {total:.1f}s, repeated output identical={same}",
                                       total))
    return results
