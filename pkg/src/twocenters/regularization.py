"""Elliptic coordinates, the regularized Hamiltonian and its two separated wells.

With q1 = cosh(mu) cos(nu) / 2, q2 = sinh(mu) sin(nu) / 2 the shifted and
time-rescaled Hamiltonian K = (cosh^2 mu - cos^2 nu)/4 * (H - c) splits as
K1(mu, pmu) + K2(nu, pnu), each a 1-DOF system 1/2 p^2 + W(angle). Both W are
polynomials in x = cosh(mu) or y = cos(nu).

Level convention: on a torus K1 = -kappa and K2 = +kappa. Every function here
takes kappa and applies the sign itself.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from .errors import (
    ChartSingular,
    CollisionFiber,
    NoTurningPoint,
    RegimeUnsupported,
    WindowViolation,
)
from .potential import MassParams, PlanePoint

COLLISION_TOL = 1e-12
TWO_PI = 2.0 * math.pi


class Which(str, enum.Enum):
    MU = "mu_system"
    NU = "nu_system"


class Component(str, enum.Enum):
    E = "e"
    M = "m"


def _wrap_nu(nu: float) -> float:
    """Reduce to [0, 2pi) via the centred remainder, which keeps small angles exact."""
    r = math.remainder(nu, TWO_PI)
    return r + TWO_PI if r < 0 else r


@dataclass(frozen=True)
class EllipticState:
    mu: float
    nu: float
    pmu: float = 0.0
    pnu: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "nu", _wrap_nu(self.nu))


@dataclass(frozen=True)
class KappaWindow:
    component: Component
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, kappa: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= kappa <= self.hi + slack


def kappa_window(component, params: MassParams) -> KappaWindow:
    """Admissible kappa range for the torus family around e or m."""
    comp = Component(component)
    if params.M2 < 0:
        raise RegimeUnsupported("kappa windows need m1 >= m2")
    if comp is Component.E:
        return KappaWindow(comp, -params.M2 / 2, params.M1 / 2)
    if params.m2 <= 0:
        raise RegimeUnsupported("no torus family around m when m2 <= 0")
    return KappaWindow(comp, params.M2 / 2, params.M1 / 2)


def torus_condition(c: float, params: MassParams) -> bool:
    return params.eps / 8 + c + params.M1 < 0


@dataclass(frozen=True)
class SeparatedSystem:
    which: Which
    c: float
    params: MassParams
    component: Component = Component.E

    def __post_init__(self):
        object.__setattr__(self, "which", Which(self.which))
        object.__setattr__(self, "component", Component(self.component))

    @property
    def level_sign(self) -> float:
        return -1.0 if self.which is Which.MU else 1.0

    @cached_property
    def poly(self) -> Polynomial:
        """W as a polynomial in x = cosh(mu) or y = cos(nu)."""
        eps, c = self.params.eps, self.c
        if self.which is Which.MU:
            return Polynomial([c / 4, -self.params.M1 / 2, eps / 32 - c / 4, 0.0, -eps / 32])
        return Polynomial([-c / 4, self.params.M2 / 2, c / 4 - eps / 32, 0.0, eps / 32])

    @property
    def cubic(self) -> Polynomial:
        """dW/dx = f(x) for the mu-system, dW/dy = g(y) for the nu-system."""
        return self.poly.deriv()

    def well(self) -> "Well":
        return _make_well(self)


def eval_W(sys: SeparatedSystem, angle: float) -> float:
    if sys.which is Which.MU:
        s = math.cosh(angle)
    else:
        s = math.cos(_wrap_nu(angle))
    return float(sys.poly(s))


def elliptic_to_cartesian(mu: float, nu: float) -> PlanePoint:
    nu = _wrap_nu(nu)
    return PlanePoint(0.5 * math.cosh(mu) * math.cos(nu), 0.5 * math.sinh(mu) * math.sin(nu))


def conformal_factor(mu: float, nu: float) -> float:
    """cosh^2 mu - cos^2 nu, which equals sinh^2 mu + sin^2 nu."""
    return math.sinh(mu) ** 2 + math.sin(nu) ** 2


def cotangent_lift(state: EllipticState):
    """Cartesian (q, p) of an elliptic state; p = D^{-T} (pmu, pnu)."""
    mu, nu = state.mu, state.nu
    d = conformal_factor(mu, nu)
    if d < COLLISION_TOL:
        raise CollisionFiber(f"state (mu={mu}, nu={nu}) lies over a center")
    a = math.sinh(mu) * math.cos(nu)
    b = math.cosh(mu) * math.sin(nu)
    k = 2.0 / d
    p = (k * (a * state.pmu - b * state.pnu), k * (b * state.pmu + a * state.pnu))
    return elliptic_to_cartesian(mu, nu), p


def eval_K(c: float, params: MassParams, state: EllipticState):
    """Return (K, K1, K2); defined everywhere, including over the centers."""
    k1 = 0.5 * state.pmu**2 + eval_W(SeparatedSystem(Which.MU, c, params), state.mu)
    k2 = 0.5 * state.pnu**2 + eval_W(SeparatedSystem(Which.NU, c, params), state.nu)
    return k1 + k2, k1, k2


def to_xy_chart(state: EllipticState):
    """(x, y, px, py) with x = cosh mu, y = cos nu, pmu = sinh(mu) px, pnu = -sin(nu) py."""
    sh, sn = math.sinh(state.mu), math.sin(state.nu)
    if abs(sh) < COLLISION_TOL or abs(sn) < COLLISION_TOL:
        raise ChartSingular("x-y chart is singular on the q1-axis")
    return math.cosh(state.mu), math.cos(state.nu), state.pmu / sh, -state.pnu / sn


def chart_K(c: float, params: MassParams, x: float, y: float, px: float, py: float):
    """(K1, K2) written in the x-y chart."""
    k1 = 0.5 * (x * x - 1) * px * px + float(SeparatedSystem(Which.MU, c, params).poly(x))
    k2 = 0.5 * (1 - y * y) * py * py + float(SeparatedSystem(Which.NU, c, params).poly(y))
    return k1, k2


@dataclass(frozen=True)
class Well:
    """A separated well in the offset variable delta >= 0 measured from the bottom.

    ``s = bottom + direction * delta`` maps delta back to x or y, and ``dW``
    is W(s) - W(bottom) as a polynomial in delta with zero constant term.
    """
    system: SeparatedSystem
    bottom: float
    direction: float
    bottom_value: float
    dW: Polynomial
    barrier: float
    domain_end: float

    @property
    def curvature(self) -> float:
        """Second derivative of W in the angle at the bottom."""
        return float(self.dW.coef[1]) if len(self.dW.coef) > 1 else 0.0

    def other_factor(self, delta):
        # x + 1 for the mu-well, 1 - |y| away from the bottom for the nu-wells
        if self.system.which is Which.MU:
            return 2.0 + delta
        return 2.0 - delta

    def angle(self, delta: float) -> float:
        half = math.sqrt(max(delta, 0.0) / 2)
        if self.system.which is Which.MU:
            return 2.0 * math.asinh(half)
        h = math.asin(min(1.0, half))
        if self.bottom < 0:
            return math.pi - 2.0 * h
        return 2.0 * h

    @property
    def bottom_angle(self) -> float:
        if self.system.which is Which.NU and self.bottom < 0:
            return math.pi
        return 0.0

    @property
    def barrier_height(self) -> float:
        if math.isinf(self.barrier):
            return math.inf
        return float(self.dW(self.barrier))

    def offset(self, kappa: float) -> float:
        """level - W(bottom), formed so that window endpoints give exact zeros."""
        p = self.system.params
        sys = self.system
        if sys.which is Which.MU:
            return p.M1 / 2 - kappa
        if sys.component is Component.E:
            return kappa + p.M2 / 2
        return kappa - p.M2 / 2

    def delta_turn(self, kappa: float) -> float:
        L = self.offset(kappa)
        if L < 0:
            raise WindowViolation(f"kappa={kappa} is below the bottom of the well")
        if L == 0:
            return 0.0
        if L > self.barrier_height:
            raise NoTurningPoint(f"level {kappa} clears the barrier of the {self.system.which.value}")
        hi = self.barrier
        if math.isinf(hi):
            hi = 1.0
            while self.dW(hi) <= L:
                hi *= 2.0
                if hi > 1e300:
                    raise NoTurningPoint("well does not close")
        d = brentq(lambda t: float(self.dW(t)) - L, 0.0, hi, xtol=1e-300,
                   rtol=4 * np.finfo(float).eps, maxiter=500)
        slope = float(self.dW.deriv()(d))
        if slope > 0:
            d -= (float(self.dW(d)) - L) / slope
        return min(max(d, 0.0), hi)


def _first_barrier(dW: Polynomial, end: float) -> float:
    """First delta > 0 where dW stops increasing, or ``end`` if it never does."""
    deriv = dW.deriv()
    best = end
    # a negligible leading coefficient would overflow the companion matrix
    scale = np.max(np.abs(deriv.coef))
    trimmed = deriv.trim(1e-14 * scale) if scale > 0 else deriv
    for r in trimmed.roots():
        if abs(r.imag) <= 1e-12 * max(1.0, abs(r.real)) and 0 < r.real < best:
            x = r.real
            # polish; keep the root only if the derivative changes sign there
            d2 = deriv.deriv()(x)
            if d2 != 0:
                x -= deriv(x) / d2
            lo, hi = x * (1 - 1e-7), x * (1 + 1e-7)
            if deriv(lo) > 0 and deriv(hi) < 0:
                best = x
    return best


def _make_well(sys: SeparatedSystem) -> Well:
    p = sys.params
    if sys.which is Which.MU:
        bottom, direction, bottom_value, end = 1.0, 1.0, -p.M1 / 2, math.inf
    elif sys.component is Component.E:
        bottom, direction, bottom_value, end = -1.0, 1.0, -p.M2 / 2, 2.0
    else:
        bottom, direction, bottom_value, end = 1.0, -1.0, p.M2 / 2, 2.0
    shifted = sys.poly(Polynomial([bottom, direction]))
    coef = shifted.coef.copy()
    coef[0] = 0.0
    dW = Polynomial(coef)
    if len(coef) < 2 or coef[1] <= 0:
        raise NoTurningPoint(
            f"{sys.which.value} has no well at s={bottom} for c={sys.c}; torus condition fails"
        )
    return Well(sys, bottom, direction, bottom_value, dW, _first_barrier(dW, end), end)


@dataclass(frozen=True)
class TurningPoint:
    angle: float
    s: float
    delta: float
    level: float
    barrier_s: float


def turning_points(sys: SeparatedSystem, kappa_level: float) -> TurningPoint:
    """Turning point of the separated well at K1 = -kappa (mu) or K2 = kappa (nu)."""
    win = kappa_window(sys.component, sys.params)
    if not win.contains(kappa_level):
        raise WindowViolation(f"kappa={kappa_level} outside [{win.lo}, {win.hi}]")
    well = sys.well()
    d = well.delta_turn(kappa_level)
    return TurningPoint(
        angle=well.angle(d),
        s=well.bottom + well.direction * d,
        delta=d,
        level=sys.level_sign * kappa_level,
        barrier_s=float(well.bottom + well.direction * well.barrier),
    )
