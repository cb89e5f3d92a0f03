"""Potential of two fixed centers plus an elastic force, its critical points and Hill regions.

Centers sit at e = (-1/2, 0) (mass m1) and m = (1/2, 0) (mass m2). Throughout,
``U`` is the force function m1/r1 + m2/r2 + eps/2 |q|^2 and ``V = -U`` is the
potential energy, so a critical point value is ``V(l) = H(L)``.
"""
from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import ndimage
from scipy.optimize import brentq

from .errors import (
    CenterCollision,
    GridTooCoarse,
    RegimeUnsupported,
    RootBracketFailure,
    TwoCentersError,
)

GRAD_TOL = 1e-10
DEG_TOL = 1e-9
COLLISION_TOL = 1e-12
EPS_FLOOR = 1e-12

E_CENTER = (-0.5, 0.0)
M_CENTER = (0.5, 0.0)


@dataclass(frozen=True)
class MassParams:
    m1: float
    m2: float
    eps: float = 0.0

    def __post_init__(self):
        for name in ("m1", "m2", "eps"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.m1 <= 0:
            raise RegimeUnsupported(f"m1 must be positive, got {self.m1}")
        if self.eps < 0:
            raise RegimeUnsupported(f"eps must be non-negative, got {self.eps}")

    @property
    def M1(self) -> float:
        return self.m1 + self.m2

    @property
    def M2(self) -> float:
        return self.m1 - self.m2

    @property
    def is_euler(self) -> bool:
        return self.eps == 0.0

    def swapped(self) -> "MassParams":
        """Exchange the roles of the two masses (only valid when m2 > 0)."""
        return MassParams(self.m2, self.m1, self.eps)


class PlanePoint(NamedTuple):
    q1: float
    q2: float


class Kind(str, enum.Enum):
    SADDLE = "saddle"
    MAXIMUM = "maximum"
    MINIMUM = "minimum"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class CriticalPoint:
    location: PlanePoint
    value: float
    kind: Kind
    hessian_det: float
    hessian_trace: float
    label: str

    @property
    def collinear(self) -> bool:
        return self.label in ("l1", "l2", "l3")


@dataclass(frozen=True)
class CriticalSummary:
    params: MassParams
    points: list
    c0: float
    c_crit: float
    ordering: tuple
    condition_flags: dict

    @property
    def holds(self) -> bool:
        """Whether c0 < c_crit (false when c0 is undefined)."""
        return bool(self.c0 < self.c_crit)


def _distances(q1, q2):
    r1 = np.hypot(q1 + 0.5, q2)
    r2 = np.hypot(q1 - 0.5, q2)
    return r1, r2


def _check_collision(q: PlanePoint, params: MassParams):
    r1, r2 = _distances(q[0], q[1])
    if r1 < COLLISION_TOL or (params.m2 != 0 and r2 < COLLISION_TOL):
        raise CenterCollision(f"point {tuple(q)} coincides with a center")
    return float(r1), float(r2)


def eval_potential(q: PlanePoint, params: MassParams) -> float:
    """Force function U(q) = m1/r1 + m2/r2 + (eps/2)|q|^2."""
    r1, r2 = _check_collision(q, params)
    u = params.m1 / r1 + 0.5 * params.eps * (q[0] ** 2 + q[1] ** 2)
    if params.m2 != 0:
        u += params.m2 / r2
    return u


def eval_V(q: PlanePoint, params: MassParams) -> float:
    return -eval_potential(q, params)


def potential_grid(q1, q2, params: MassParams):
    """Vectorised V = -U; returns -inf exactly at a center with nonzero mass."""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    r1, r2 = _distances(q1, q2)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = -params.m1 / r1 - 0.5 * params.eps * (q1 * q1 + q2 * q2)
        if params.m2 != 0:
            v = v - params.m2 / r2
    return v


def eval_grad(q: PlanePoint, params: MassParams) -> np.ndarray:
    """Gradient (dV/dq1, dV/dq2) of V = -U."""
    r1, r2 = _check_collision(q, params)
    q1, q2 = q
    a = params.m1 / r1**3
    b = params.m2 / r2**3 if params.m2 != 0 else 0.0
    return np.array(
        [
            a * (q1 + 0.5) + b * (q1 - 0.5) - params.eps * q1,
            a * q2 + b * q2 - params.eps * q2,
        ]
    )


def eval_hessian(q: PlanePoint, params: MassParams) -> np.ndarray:
    r1, r2 = _check_collision(q, params)
    q1, q2 = q
    m1, m2, eps = params.m1, params.m2, params.eps
    d1, d2 = q1 + 0.5, q1 - 0.5
    h = np.empty((2, 2))
    s1 = m1 / r1**3
    t1 = 3.0 * m1 / r1**5
    if m2 != 0:
        s2 = m2 / r2**3
        t2 = 3.0 * m2 / r2**5
    else:
        s2 = t2 = 0.0
    h[0, 0] = s1 - t1 * d1 * d1 + s2 - t2 * d2 * d2 - eps
    h[1, 1] = s1 - t1 * q2 * q2 + s2 - t2 * q2 * q2 - eps
    h[0, 1] = h[1, 0] = -t1 * d1 * q2 - t2 * d2 * q2
    return h


def _axis_slope(t: float, params: MassParams) -> float:
    """dV/dq1 restricted to the q1-axis."""
    d1, d2 = t + 0.5, t - 0.5
    g = params.m1 * d1 / abs(d1) ** 3 - params.eps * t
    if params.m2 != 0:
        g += params.m2 * d2 / abs(d2) ** 3
    return g


def _axis_intervals(params: MassParams):
    if params.m2 != 0:
        return [(-math.inf, -0.5), (-0.5, 0.5), (0.5, math.inf)]
    return [(-math.inf, -0.5), (-0.5, math.inf)]


def _log_mesh(a: float, b: float, n: int = 120) -> np.ndarray:
    """Mesh on (a, b) clustered logarithmically toward finite ends, reaching far out on infinite ones."""
    steps = np.logspace(-10, 6, n)
    pts = []
    if math.isfinite(a) and math.isfinite(b):
        w = b - a
        s = steps[steps < w / 2]
        pts = np.concatenate([a + s, [0.5 * (a + b)], (b - s)[::-1]])
    elif math.isfinite(a):
        pts = a + steps
    elif math.isfinite(b):
        pts = (b - steps)[::-1]
    return np.asarray(pts)


def _collinear_roots(params: MassParams) -> list:
    roots = []
    for a, b in _axis_intervals(params):
        mesh = _log_mesh(a, b)
        vals = np.array([_axis_slope(t, params) for t in mesh])
        for i in range(len(mesh) - 1):
            if vals[i] == 0.0:
                roots.append(float(mesh[i]))
            elif vals[i] * vals[i + 1] < 0:
                try:
                    r = brentq(
                        _axis_slope, mesh[i], mesh[i + 1], args=(params,),
                        xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500,
                    )
                except (RuntimeError, ValueError) as exc:
                    raise RootBracketFailure(str(exc), interval=(a, b)) from exc
                roots.append(float(r))
    return roots


def offaxis_abscissa(params: MassParams) -> dict:
    """Abscissa of the off-axis critical points: derived from the two circles, and as printed.

    The two circles r1 = (2 m1/eps)^(1/3), r2 = (2 m2/eps)^(1/3) intersect at
    q1 = (m1^(2/3) - m2^(2/3)) / (2^(1/3) eps^(2/3)); the printed constant uses 2^(1/2).
    """
    m1, m2, eps = params.m1, params.m2, params.eps
    num = m1 ** (2 / 3) - m2 ** (2 / 3)
    return {
        "derived": num / (2 ** (1 / 3) * eps ** (2 / 3)),
        "printed": num / (2 ** 0.5 * eps ** (2 / 3)),
    }


def _offaxis_points(params: MassParams) -> list:
    m1, m2, eps = params.m1, params.m2, params.eps
    if eps <= 0 or m2 <= 0:
        return []
    r1 = (2 * m1 / eps) ** (1 / 3)
    r2 = (2 * m2 / eps) ** (1 / 3)
    q1 = 0.5 * (r1 * r1 - r2 * r2)
    h2 = r1 * r1 - (q1 + 0.5) ** 2
    if h2 <= 0:
        return []
    q2 = math.sqrt(h2)
    pts = []
    for sign in (1.0, -1.0):
        x = np.array([q1, sign * q2])
        # one Newton polish on the full gradient
        step = np.linalg.solve(eval_hessian(x, params), eval_grad(x, params))
        pts.append(PlanePoint(float(x[0] - step[0]), float(x[1] - step[1])))
    return pts


def _classify(h: np.ndarray):
    det = float(np.linalg.det(h))
    tr = float(np.trace(h))
    if abs(det) < DEG_TOL:
        kind = Kind.DEGENERATE
    elif det < 0:
        kind = Kind.SADDLE
    elif tr < 0:
        kind = Kind.MAXIMUM
    else:
        kind = Kind.MINIMUM
    return kind, det, tr


def _axis_label(t: float) -> str:
    if t < -0.5:
        return "l3"
    if t < 0.5:
        return "l1"
    return "l2"


def check_regime(params: MassParams) -> str:
    """Name of the supported regime for ``params``; raises otherwise."""
    if 0 < params.eps < EPS_FLOOR:
        # outer critical points sit near (2 m / eps)^(1/3) and their Hessians overflow
        raise RegimeUnsupported(f"eps={params.eps} is below {EPS_FLOOR}; use eps = 0")
    if params.eps > 0:
        if params.m2 > 0:
            return "lagrange"
        if params.m2 == 0:
            return "lagrange_m2_zero"
        raise RegimeUnsupported("negative m2 with eps > 0 is not supported")
    if abs(params.m2) <= params.m1:
        return "euler"
    raise RegimeUnsupported("Euler regime needs |m2| <= m1")


def find_critical_points(params: MassParams) -> list:
    check_regime(params)
    pts = []
    for t in _collinear_roots(params):
        pts.append((PlanePoint(t, 0.0), _axis_label(t)))
    off = _offaxis_points(params)
    for p in off:
        pts.append((p, "l4" if p.q2 > 0 else "l5"))

    out = []
    for loc, label in pts:
        g = eval_grad(loc, params)
        if np.hypot(*g) >= GRAD_TOL:
            raise RootBracketFailure(
                f"critical point {label} at {tuple(loc)} has |grad|={np.hypot(*g):.3e}"
            )
        kind, det, tr = _classify(eval_hessian(loc, params))
        out.append(CriticalPoint(loc, eval_V(loc, params), kind, det, tr, label))
    return out


def condition_flags(params: MassParams) -> dict:
    m1, m2, eps = params.m1, params.m2, params.eps
    positive = m1 > 0 and m2 > 0 and eps > 0
    return {
        "ordered_region": positive and m1 >= m2 and m1 >= eps / 2 and m2 >= 3 * eps / 8,
        "reversed_order_region": positive and m1 >= m2 and m1 < 3 * eps / 8 and m2 <= 5 * eps / 24,
        "equal_mass_region": positive and m1 == m2 and m1 >= eps / 2,
        "lagrange_region": positive and m2 <= m1 <= 9 * m2 and m1 >= eps / 2 and m2 >= 3 * eps / 8,
    }


def c_crit(params: MassParams) -> float:
    return -params.eps / 8 - params.M1


def critical_summary(params: MassParams) -> CriticalSummary:
    points = find_critical_points(params)
    collinear = [p for p in points if p.collinear]
    c0 = min((p.value for p in collinear), default=math.nan)
    ranked = sorted((p for p in collinear if p.kind != Kind.DEGENERATE), key=lambda p: p.value)
    return CriticalSummary(
        params=params,
        points=points,
        c0=c0,
        c_crit=c_crit(params),
        ordering=tuple(p.label for p in ranked),
        condition_flags=condition_flags(params),
    )


def euler_critical_closed_form(params: MassParams, branch: str = "proof"):
    """Closed-form collinear critical point and value of the Euler problem (eps = 0).

    For m2 > 0 the point lies between the centers at 1/2 - 1/(s + 1), s = sqrt(m1/m2),
    with value -(sqrt m1 + sqrt m2)^2. For m2 < 0 it lies right of m at
    1/2 + 1/(s - 1), s = sqrt(-m1/m2), and the value is -(sqrt m1 - sqrt(-m2))^2.
    ``branch="statement"`` returns the alternative abscissa 1/2 + 1/s, kept only
    for comparison; it does not solve the critical point equation.
    """
    m1, m2 = params.m1, params.m2
    if params.eps != 0:
        raise RegimeUnsupported("closed form only for eps = 0")
    if m2 > 0:
        s = math.sqrt(m1 / m2)
        iota = 0.5 - 1.0 / (s + 1.0)
        value = -((math.sqrt(m1) + math.sqrt(m2)) ** 2)
    elif m2 < 0 and m1 > -m2:
        s = math.sqrt(-m1 / m2)
        if branch == "statement":
            iota = 0.5 + 1.0 / s
        else:
            iota = 0.5 + 1.0 / (s - 1.0)
        value = -((math.sqrt(m1) - math.sqrt(-m2)) ** 2)
    else:
        raise RegimeUnsupported("closed form needs m2 > 0, or m2 < 0 with m1 > |m2|")
    return PlanePoint(iota, 0.0), value


@dataclass
class HillReport:
    c: float
    n: int
    extent: float
    component_count: int
    labels: np.ndarray = field(repr=False)
    bounded: list
    contains_e: list
    contains_m: list
    counts_by_resolution: dict

    def component_with_e(self):
        hits = [i for i, flag in enumerate(self.contains_e) if flag]
        return hits[0] if hits else None


def _hill_extent(params: MassParams, c: float) -> float:
    if params.eps == 0 and c < 0:
        # V >= -(m1 + m2^+)/(R - 1/2) outside the disc of radius R
        mass = params.m1 + max(params.m2, 0.0)
        return 0.5 + 1.25 * mass / abs(c) + 0.25
    try:
        pts = find_critical_points(params)
        reach = max((max(abs(p.location.q1), abs(p.location.q2)) for p in pts), default=1.0)
    except TwoCentersError:
        reach = 1.0
    R = max(2.0, 1.5 * reach + 1.0)
    if params.eps > 0 and c < 0:
        # make sure the outer region where -eps/2 |q|^2 <= c is inside the box
        R = max(R, math.sqrt(2 * abs(c) / params.eps) + 1.0)
    return R


def _label_grid(params: MassParams, c: float, n: int, R: float):
    h = 2 * R / n
    centers = -R + h * (np.arange(n) + 0.5)
    Q1, Q2 = np.meshgrid(centers, centers, indexing="ij")
    mask = potential_grid(Q1, Q2, params) <= c
    labels, count = ndimage.label(mask)
    return labels, count, h


def hill_regions(params: MassParams, c: float, n: int = 200, extent: float = None,
                 max_doublings: int = 4) -> HillReport:
    """Label the connected components of {V <= c} on a square grid.

    The grid is doubled until the component count agrees on three consecutive
    resolutions; the report describes the finest grid used.
    """
    R = extent if extent is not None else _hill_extent(params, c)
    counts = {}
    res = n
    history = []
    for _ in range(max_doublings + 1):
        labels, count, h = _label_grid(params, c, res, R)
        counts[res] = count
        history.append(count)
        if len(history) >= 3 and history[-1] == history[-2] == history[-3]:
            break
        res *= 2
    else:
        raise GridTooCoarse(f"component counts did not stabilise: {counts}")

    def cell_of(pt):
        i = int(math.floor((pt[0] + R) / h))
        j = int(math.floor((pt[1] + R) / h))
        if 0 <= i < res and 0 <= j < res:
            return labels[i, j]
        return 0

    edge = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])))
    le, lm = cell_of(E_CENTER), cell_of(M_CENTER)
    ids = range(1, count + 1)
    return HillReport(
        c=c,
        n=res,
        extent=R,
        component_count=count,
        labels=labels,
        bounded=[bool(k not in edge) for k in ids],
        contains_e=[bool(k == le) for k in ids],
        contains_m=[bool(k == lm) for k in ids],
        counts_by_resolution=counts,
    )


@dataclass(frozen=True)
class ScanRow:
    m1: float
    m2: float
    eps: float
    c0: float
    c_crit: float
    holds: bool
    error: str = ""

    @property
    def counterexample(self) -> bool:
        return not self.error and not self.holds and self.m2 != 0


def _scan_one(triple) -> ScanRow:
    m1, m2, eps = triple
    try:
        s = critical_summary(MassParams(m1, m2, eps))
    except (TwoCentersError, ValueError) as exc:
        return ScanRow(m1, m2, eps, math.nan, math.nan, False, type(exc).__name__)
    return ScanRow(m1, m2, eps, s.c0, s.c_crit, s.holds)


def scan_conjecture(m1_values: Sequence[float], m2_values: Sequence[float],
                    eps_values: Sequence[float], workers: int = 1) -> list:
    """Evaluate c0 < c_crit over the product grid, in (m1, m2, eps) row-major order."""
    grid = list(itertools.product(m1_values, m2_values, eps_values))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_scan_one, grid, chunksize=max(1, len(grid) // (4 * workers))))
    return [_scan_one(t) for t in grid]
