"""Nested trapezoid rules for smooth periodic integrands.

After a squared-sine substitution the period integrands are even and periodic in
the angle, so the plain trapezoid rule converges geometrically and the
difference between successive halvings is a reliable error estimate.
"""
from __future__ import annotations

import numpy as np

from .errors import QuadratureStall

DEFAULT_RTOL = 1e-13


def periodic_trapezoid(func, a: float, b: float, rtol: float = DEFAULT_RTOL,
                       n0: int = 8, max_level: int = 16) -> float:
    """Integrate a vectorised ``func`` over [a, b], doubling nodes until converged.

    Raises QuadratureStall when ``2**max_level * n0`` intervals are not enough.
    """
    n = n0
    h = (b - a) / n
    x = a + h * np.arange(n + 1)
    fx = func(x)
    s = fx.sum() - 0.5 * (fx[0] + fx[-1])
    prev = h * s
    for _ in range(max_level):
        h *= 0.5
        mid = a + h * (2 * np.arange(n) + 1)
        s += func(mid).sum()
        n *= 2
        cur = h * s
        if abs(cur - prev) <= rtol * abs(cur):
            return float(cur)
        prev = cur
    raise QuadratureStall(f"trapezoid did not reach rtol={rtol} with {n} intervals")


def tensor_trapezoid(kernel, a: float, b: float, rtol: float = DEFAULT_RTOL,
                     n0: int = 8, max_level: int = 8) -> float:
    """Integrate ``kernel(X, Y)`` over [a, b]^2 on a tensor grid, doubling until converged."""
    n = n0
    prev = None
    for _ in range(max_level + 1):
        x = np.linspace(a, b, n + 1)
        w = np.full(n + 1, (b - a) / n)
        w[0] *= 0.5
        w[-1] *= 0.5
        X, Y = np.meshgrid(x, x, indexing="ij")
        cur = float(w @ kernel(X, Y) @ w)
        if prev is not None and abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
        n *= 2
    raise QuadratureStall(f"tensor trapezoid did not reach rtol={rtol} with {n // 2} intervals")
