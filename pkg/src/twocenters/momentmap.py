"""Periods of the separated wells, their primitives and the sampled moment-map image.

A period is 4 * int dx / sqrt(2 (x^2 - 1)(level - W)). Writing delta = delta_t sin^2(theta)
removes both inverse square-root endpoints at once; after dividing the level gap by
(delta - delta_t) the integrand is smooth and periodic in theta, so nested
trapezoid rules converge geometrically.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import quad

from ._quad import periodic_trapezoid, tensor_trapezoid
from .errors import (
    ConditionWarning,
    EnergyNonnegative,
    LevelInadmissible,
    RadicandNonpositive,
    TwoCentersError,
    WindowViolation,
)
from .potential import MassParams, critical_summary
from .regularization import (
    Component,
    SeparatedSystem,
    Which,
    kappa_window,
    torus_condition,
)

HARMONIC_SWITCH = 1e-8
TAU_RTOL = 1e-13


@dataclass(frozen=True)
class PeriodSample:
    kappa: float
    tau1: float
    tau2: float
    T1: float
    T2: float
    fprime: float
    fsecond: float


@dataclass(frozen=True)
class ToricProfile:
    component: Component
    c: float
    params: MassParams
    samples: list = field(repr=False)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples])

    def rescaled(self, factor: float) -> "ToricProfile":
        """Scale both moment-map axes by ``factor``; slopes are unchanged, curvature scales by 1/factor."""
        samples = [
            replace(s, T1=s.T1 * factor, T2=s.T2 * factor, fsecond=s.fsecond / factor)
            for s in self.samples
        ]
        return replace(self, samples=samples)


def _reduced_gap(well, L: float, d_t: float) -> Polynomial:
    """r(delta) with L - dW(delta) = (delta - d_t) r(delta), by synthetic division."""
    p = -well.dW.coef.copy()
    p[0] = L
    n = len(p) - 1
    r = np.zeros(n)
    r[n - 1] = p[n]
    for k in range(n - 1, 0, -1):
        r[k - 1] = p[k] + d_t * r[k]
    return Polynomial(r)


def tau(sys: SeparatedSystem, kappa: float) -> float:
    """Period of the separated well at K1 = -kappa (mu-system) or K2 = kappa (nu-system)."""
    if not torus_condition(sys.c, sys.params):
        raise LevelInadmissible(f"c={sys.c} violates the torus condition")
    win = kappa_window(sys.component, sys.params)
    if not win.contains(kappa):
        raise WindowViolation(f"kappa={kappa} outside [{win.lo}, {win.hi}]")
    well = sys.well()
    d_t = well.delta_turn(kappa)
    if d_t < HARMONIC_SWITCH:
        return 2.0 * math.pi / math.sqrt(well.curvature)
    r = _reduced_gap(well, well.offset(kappa), d_t)

    def integrand(theta):
        d = d_t * np.sin(theta) ** 2
        return 1.0 / np.sqrt(well.other_factor(d) * np.abs(r(d)))

    return 4.0 * math.sqrt(2.0) * periodic_trapezoid(integrand, 0.0, 0.5 * math.pi, rtol=TAU_RTOL)


def _z_quadratic(M: float, c: float, kappa: float):
    return M * M, 8.0 * c * kappa, 4.0 * c * c


def _check_radicand(a: float, b: float, cc: float):
    """Raise unless a z^2 + b z + cc stays positive on [0, 2]."""
    vals = [cc, 4 * a + 2 * b + cc]
    if a > 0:
        zs = -b / (2 * a)
        if 0 < zs < 2:
            vals.append(cc - b * b / (4 * a))
    if min(vals) <= 0:
        raise RadicandNonpositive(f"quadratic {a} z^2 + {b} z + {cc} vanishes on [0, 2]")


def tau_euler_z(M: float, c: float, kappa: float) -> float:
    """Kepler-form period 4 sqrt(-2c) int_0^2 dz / sqrt(z (2 - z) Q(z)), Q = M^2 z^2 + 8 c kappa z + 4 c^2.

    kappa is the K-level; the integral runs over z = 1 - cos(xi), xi in [0, pi].
    """
    if c >= 0:
        raise EnergyNonnegative(f"c={c} must be negative")
    a, b, cc = _z_quadratic(M, c, kappa)
    return _tau_abc(a, -b / 2, cc, c)


def _tau_abc(A: float, B: float, C: float, c: float) -> float:
    """Period as a function of Q(z) = A z^2 - 2 B z + C."""
    _check_radicand(A, -2 * B, C)

    def integrand(xi):
        z = 1.0 - np.cos(xi)
        return 1.0 / np.sqrt(A * z * z - 2 * B * z + C)

    return 4.0 * math.sqrt(-2.0 * c) * periodic_trapezoid(integrand, 0.0, math.pi, rtol=TAU_RTOL)


def abc(M: float, c: float, kappa: float):
    """(A, B, C) = (M^2, -4 c kappa, 4 c^2), so that Q = A z^2 - 2 B z + C."""
    return M * M, -4.0 * c * kappa, 4.0 * c * c


def T_primitive(sys: SeparatedSystem, component, kappa: float) -> float:
    """Moment-map coordinate of the torus at kappa.

    mu-system: int_{-M1/2}^{-kappa} tau1(lam) dlam, which vanishes at the top of the window.
    nu-system: int_{lo}^{kappa} tau2(lam) dlam with lo = -M2/2 (e) or M2/2 (m).
    """
    sys = replace(sys, component=Component(component))
    win = kappa_window(sys.component, sys.params)
    if not win.contains(kappa):
        raise WindowViolation(f"kappa={kappa} outside [{win.lo}, {win.hi}]")
    if sys.which is Which.MU:
        return _integrate_tau(sys, kappa, win.hi)
    return _integrate_tau(sys, win.lo, kappa)


def _integrate_tau(sys: SeparatedSystem, a: float, b: float) -> float:
    if a == b:
        return 0.0
    val, _ = quad(lambda k: tau(sys, k), a, b, epsabs=0.0, epsrel=1e-11, limit=200)
    return val


def W_ratio(M1: float, M2: float, c: float, kappa: float, params: MassParams = None,
            component="e") -> float:
    """tau2(kappa) / tau1(-kappa).

    Without ``params`` this is the Kepler-form ratio (eps = 0); with ``params``
    the general well periods are used.
    """
    if params is None:
        return tau_euler_z(M2, c, kappa) / tau_euler_z(M1, c, kappa)
    s1 = SeparatedSystem(Which.MU, c, params, component)
    s2 = SeparatedSystem(Which.NU, c, params, component)
    return tau(s2, kappa) / tau(s1, kappa)


def _ratio_derivative(s1, s2, kappa: float, h: float, lo: float, hi: float) -> float:
    """d/dkappa of tau2/tau1, central where possible, one-sided near the ends, one Richardson step."""
    def W(k):
        return tau(s2, k) / tau(s1, k)

    def diff(step):
        if kappa - step >= lo and kappa + step <= hi:
            return (W(kappa + step) - W(kappa - step)) / (2 * step)
        sgn = 1.0 if kappa - step < lo else -1.0
        f0, f1, f2 = W(kappa), W(kappa + sgn * step), W(kappa + 2 * sgn * step)
        return sgn * (-3 * f0 + 4 * f1 - f2) / (2 * step)

    d1, d2 = diff(h), diff(h / 2)
    return (4 * d2 - d1) / 3


def _sample_nodes(lo: float, hi: float, n: int) -> np.ndarray:
    """Chebyshev-Lobatto nodes ordered by decreasing kappa."""
    j = np.arange(n)
    k = 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(np.pi * j / (n - 1))
    k[0], k[-1] = hi, lo
    return k


def _point_data(args):
    s1, s2, kappa, h, lo, hi = args
    t1 = tau(s1, kappa)
    t2 = tau(s2, kappa)
    dW = _ratio_derivative(s1, s2, kappa, h, lo, hi)
    return t1, t2, dW


def _segment(args):
    sys, a, b = args
    return _integrate_tau(sys, min(a, b), max(a, b))


def profile(c: float, params: MassParams, component="e", n: int = 64,
            workers: int = 1) -> ToricProfile:
    """Sample the boundary of the moment-map image on a Chebyshev grid over the kappa-window."""
    component = Component(component)
    if not torus_condition(c, params):
        raise LevelInadmissible(f"c={c} violates the torus condition")
    try:
        c0 = critical_summary(params).c0
    except TwoCentersError:
        c0 = math.nan
    if math.isfinite(c0) and c >= c0:
        warnings.warn(f"c={c} is not below c0={c0}; the toric picture is not guaranteed",
                      ConditionWarning, stacklevel=2)
    win = kappa_window(component, params)
    s1 = SeparatedSystem(Which.MU, c, params, component)
    s2 = SeparatedSystem(Which.NU, c, params, component)
    kappas = _sample_nodes(win.lo, win.hi, n)
    h = 1e-5 * win.width
    point_jobs = [(s1, s2, float(k), h, win.lo, win.hi) for k in kappas]
    seg1 = [(s1, float(kappas[i + 1]), float(kappas[i])) for i in range(n - 1)]
    seg2 = [(s2, float(kappas[i + 1]), float(kappas[i])) for i in range(n - 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            pts = list(pool.map(_point_data, point_jobs))
            p1 = list(pool.map(_segment, seg1))
            p2 = list(pool.map(_segment, seg2))
    else:
        pts = [_point_data(j) for j in point_jobs]
        p1 = [_segment(j) for j in seg1]
        p2 = [_segment(j) for j in seg2]

    # T1 grows as kappa decreases from the top; T2 shrinks toward the bottom
    T1 = np.concatenate([[0.0], np.cumsum(p1)])
    T2 = np.concatenate([[0.0], np.cumsum(p2[::-1])])[::-1]
    samples = []
    for k, (t1, t2, dW), a, b in zip(kappas, pts, T1, T2):
        samples.append(PeriodSample(float(k), t1, t2, float(a), float(b), -t2 / t1, dW / t1))
    return ToricProfile(component, c, params, samples)


def eta(A: float, B: float, C: float, c: float, rel_step: float = 1e-4) -> float:
    """Logarithmic derivative d(log tau)/dB by central differences."""
    _check_abc(A, B, C, c)
    h = rel_step * math.sqrt(A * C)
    dB = (_tau_abc(A, B + h, C, c) - _tau_abc(A, B - h, C, c)) / (2 * h)
    return dB / _tau_abc(A, B, C, c)


def _check_abc(A: float, B: float, C: float, c: float):
    if c >= 0:
        raise EnergyNonnegative(f"c={c} must be negative")
    if not math.isclose(C, 4 * c * c, rel_tol=1e-12):
        raise ValueError("C must equal 4 c^2")
    _check_radicand(A, -2 * B, C)


def S_check(A: float, B: float, C: float, c: float, rtol: float = 1e-12) -> float:
    """Numerator dB tau * dA tau - dA dB tau * tau, evaluated as one double integral.

    With p dz = d(xi) and Q = A z^2 - 2 B z + C it reads
    (k^2 / 2) int int [3 x^3 Q(x)^(-5/2) Q(y)^(-1/2) - x Q(x)^(-3/2) y^2 Q(y)^(-3/2)],
    where k = 4 sqrt(-2c) is the period prefactor.
    """
    _check_abc(A, B, C, c)
    k2 = 32.0 * (-c)

    def kernel(xi, eta_):
        x = 1.0 - np.cos(xi)
        y = 1.0 - np.cos(eta_)
        qx = A * x * x - 2 * B * x + C
        qy = A * y * y - 2 * B * y + C
        return 3 * x**3 * qx**-2.5 * qy**-0.5 - x * qx**-1.5 * y * y * qy**-1.5

    return 0.5 * k2 * tensor_trapezoid(kernel, 0.0, math.pi, rtol=rtol)


def tau_derivatives(A: float, B: float, C: float, c: float) -> dict:
    """tau and its A-, B- and mixed derivatives from 1-D integrals (differentiated under the integral)."""
    _check_abc(A, B, C, c)
    k = 4.0 * math.sqrt(-2.0 * c)

    def moment(power, exponent):
        def f(xi):
            z = 1.0 - np.cos(xi)
            return z**power * (A * z * z - 2 * B * z + C) ** exponent
        return k * periodic_trapezoid(f, 0.0, math.pi, rtol=TAU_RTOL)

    return {
        "tau": moment(0, -0.5),
        "dA": -0.5 * moment(2, -1.5),
        "dB": moment(1, -1.5),
        "dAdB": -1.5 * moment(3, -2.5),
    }
