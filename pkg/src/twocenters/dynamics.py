"""Direct integration of the separated 1-DOF systems, used as an independent check on periods and integrals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _leapfrog
from .errors import (
    CenterCollision,
    LevelInadmissible,
    NoCrossing,
    RegimeUnsupported,
    TwoCentersError,
)
from .potential import MassParams, PlanePoint
from .regularization import (
    EllipticState,
    SeparatedSystem,
    Which,
    conformal_factor,
    cotangent_lift,
    turning_points,
)

MAX_STORED = 1_000_000
DRIFT_TOL = 1e-8


@dataclass(frozen=True)
class PolynomialWell:
    """Potential W(theta) = poly(s(theta)) with its minimum at ``bottom_angle``."""
    kind: int
    coef: np.ndarray
    bottom_angle: float
    bottom_value: float
    curvature: float


def harmonic_well(omega: float) -> PolynomialWell:
    return PolynomialWell(_leapfrog.KIND_PLAIN, np.array([0.0, 0.0, 0.5 * omega * omega]),
                          0.0, 0.0, omega * omega)


def well_of(sys: SeparatedSystem) -> PolynomialWell:
    w = sys.well()
    kind = _leapfrog.KIND_COSH if sys.which is Which.MU else _leapfrog.KIND_COS
    return PolynomialWell(kind, np.asarray(sys.poly.coef, dtype=float), w.bottom_angle,
                          w.bottom_value, w.curvature)


@dataclass(frozen=True)
class Trajectory:
    dt: float
    stride: int
    level: float
    states: np.ndarray = field(repr=False)
    drift: dict

    @property
    def sample_spacing(self) -> float:
        return self.dt * self.stride

    @property
    def times(self) -> np.ndarray:
        return self.sample_spacing * np.arange(len(self.states))


def _resolve(sys, kappa_level):
    """Well and absolute energy level for a separated system or a bare test well."""
    if isinstance(sys, PolynomialWell):
        return sys, float(kappa_level)
    try:
        turning_points(sys, kappa_level)
    except TwoCentersError as exc:
        raise LevelInadmissible(f"{type(exc).__name__}: {exc}") from exc
    return well_of(sys), sys.level_sign * kappa_level


def integrate_1dof(sys, kappa_level: float, dt: float, n_steps: int,
                   initial=None) -> Trajectory:
    """Kick-drift-kick integration from the well bottom with positive momentum.

    ``sys`` is a SeparatedSystem (level -kappa for mu, +kappa for nu) or a
    PolynomialWell whose level is ``kappa_level`` itself. ``initial`` overrides
    the starting (angle, momentum).
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    well, level = _resolve(sys, kappa_level)
    if initial is None:
        gap = level - well.bottom_value
        th0, p0 = well.bottom_angle, math.sqrt(max(gap, 0.0) * 2.0)
    else:
        th0, p0 = initial
    stride = max(1, -(-n_steps // MAX_STORED))
    th, p, err = _leapfrog.run(well.kind, well.coef, float(th0), float(p0), float(dt),
                               int(n_steps), stride)
    scale = max(abs(level), level - well.bottom_value)
    if scale == 0:
        scale = 1.0
    return Trajectory(dt, stride, level, np.column_stack([th, p]), {"K": err / scale})


def measure_period(traj: Trajectory) -> float:
    """Mean spacing of downward momentum zero crossings, located by linear interpolation."""
    p = traj.states[:, 1]
    idx = np.nonzero((p[:-1] > 0) & (p[1:] <= 0))[0]
    if len(idx) < 2:
        raise NoCrossing(f"only {len(idx)} section crossings recorded")
    frac = p[idx] / (p[idx] - p[idx + 1])
    t = traj.sample_spacing * (idx + frac)
    return float((t[-1] - t[0]) / (len(t) - 1))


def harmonic_period(sys) -> float:
    well = sys if isinstance(sys, PolynomialWell) else well_of(sys)
    return 2.0 * math.pi / math.sqrt(well.curvature)


def probe_period(sys, kappa_level: float, per_period: int = 2048):
    """Step dt = T_est / per_period (harmonic T_est) and the period measured on a short run."""
    dt = harmonic_period(sys) / per_period
    # the true period can be far from the harmonic one near a separatrix
    n = 4 * per_period
    while True:
        probe = integrate_1dof(sys, kappa_level, dt, n)
        try:
            return dt, measure_period(probe)
        except NoCrossing:
            n *= 2
            if n > 1 << 26:
                raise


def integrate_periods(sys, kappa_level: float, periods: float = 100, per_period: int = 2048,
                      drift_tol: float = None, refine: bool = True):
    """Integrate about ``periods`` oscillations with dt = T_est / per_period.

    T_est is the harmonic estimate. If the measured drift exceeds ``drift_tol``
    (default: the module-level DRIFT_TOL)
    the step is shrunk once, using drift ~ dt^2 to pick the new step.
    Returns (trajectory, period).
    """
    if drift_tol is None:
        drift_tol = DRIFT_TOL
    dt, T = probe_period(sys, kappa_level, per_period)
    for attempt in range(2):
        n_steps = int(math.ceil(periods * T / dt)) + 1
        traj = integrate_1dof(sys, kappa_level, dt, n_steps)
        if not refine or traj.drift["K"] <= drift_tol or attempt == 1:
            break
        dt *= 0.9 * math.sqrt(drift_tol / traj.drift["K"])
    return traj, measure_period(traj)


@dataclass(frozen=True)
class KeplerOrbitElements:
    a: float
    e: float
    omega: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("semi-major axis must be positive")
        if not 0 <= self.e <= 1:
            raise ValueError("eccentricity must lie in [0, 1]")

    @classmethod
    def from_energy(cls, M: float, c: float, e: float, omega: float) -> "KeplerOrbitElements":
        return cls(M / (2 * abs(c)), e, omega)


def euler_integral_from_elements(el: KeplerOrbitElements, M: float) -> float:
    return M * (el.a * (1 - el.e**2) - el.e * math.sin(el.omega))


def euler_integral(q: PlanePoint, p, params: MassParams) -> float:
    """Second integral of the two-center problem, in the frame with e at the origin.

    E = L^2 - (L p2 - m1 q1'/|q'| + m2 (q1' - 1)/|q' - e1|) where q' = q + (1/2, 0).
    """
    if params.eps != 0:
        raise RegimeUnsupported("the Euler integral needs eps = 0")
    x, y = q[0] + 0.5, q[1]
    r1 = math.hypot(x, y)
    r2 = math.hypot(x - 1.0, y)
    if r1 < 1e-12 or (params.m2 != 0 and r2 < 1e-12):
        raise CenterCollision("state sits on a center")
    L = x * p[1] - y * p[0]
    lenz = L * p[1] - params.m1 * x / r1
    if params.m2 != 0:
        lenz += params.m2 * (x - 1.0) / r2
    return L * L - lenz


def euler_integral_along(params: MassParams, c: float, kappa: float, component="e",
                         periods: float = 20, per_period: int = 2048,
                         drift_tol: float = 1e-9, skip_factor: float = 1e-4):
    """Evaluate E on the Cartesian lift of a jointly integrated regularized trajectory.

    The mu-system runs at K1 = -kappa and the nu-system at K2 = kappa with one
    common step, so the lifted state lies on H = c. Samples with the conformal
    factor below ``skip_factor`` (next to a collision) are skipped.
    Returns the E values and the drifts of K1, K2 and E (E relative to max(|E|, M1)).
    """
    if params.eps != 0:
        raise RegimeUnsupported("the Euler integral needs eps = 0")
    s1 = SeparatedSystem(Which.MU, c, params, component)
    s2 = SeparatedSystem(Which.NU, c, params, component)
    dt1, T1 = probe_period(s1, kappa, per_period)
    dt2, T2 = probe_period(s2, kappa, per_period)
    dt = min(dt1, dt2)
    total = periods * max(T1, T2)
    for attempt in range(2):
        n = int(math.ceil(total / dt))
        a = integrate_1dof(s1, kappa, dt, n)
        b = integrate_1dof(s2, kappa, dt, n)
        worst = max(a.drift["K"], b.drift["K"])
        if worst <= drift_tol or attempt == 1:
            break
        dt *= 0.9 * math.sqrt(drift_tol / worst)
    values = []
    step = max(1, len(a.states) // 20000)
    for (mu, pmu), (nu, pnu) in zip(a.states[::step], b.states[::step]):
        if conformal_factor(mu, nu) < skip_factor:
            continue
        q, p = cotangent_lift(EllipticState(mu, nu, pmu, pnu))
        values.append(euler_integral(q, p, params))
    values = np.array(values)
    # E ranges over [-M2, M1] on the window, so M1 sets the scale when E is near zero
    scale = max(abs(float(values.mean())), abs(params.M1))
    spread = float(values.max() - values.min()) / scale
    return values, {"K1": a.drift["K"], "K2": b.drift["K"], "E": spread}
