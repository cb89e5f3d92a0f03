"""Compiled kick-drift-kick stepping for 1/2 p^2 + W(theta) with W polynomial in s(theta)."""
import math

import numpy as np
from numba import njit

# how the angle enters the polynomial
KIND_COSH = 0
KIND_COS = 1
KIND_PLAIN = 2


@njit(cache=True)
def _s_and_ds(kind, th):
    if kind == KIND_COSH:
        return math.cosh(th), math.sinh(th)
    if kind == KIND_COS:
        return math.cos(th), -math.sin(th)
    return th, 1.0


@njit(cache=True)
def potential(kind, coef, th):
    s, _ = _s_and_ds(kind, th)
    v = 0.0
    for i in range(coef.shape[0] - 1, -1, -1):
        v = v * s + coef[i]
    return v


@njit(cache=True)
def force(kind, coef, th):
    """-dW/dtheta."""
    s, ds = _s_and_ds(kind, th)
    d = 0.0
    for i in range(coef.shape[0] - 1, 0, -1):
        d = d * s + i * coef[i]
    return -d * ds


@njit(cache=True)
def run(kind, coef, th0, p0, dt, n_steps, stride):
    """Integrate n_steps; store every ``stride``-th state and track the largest energy error."""
    n_out = n_steps // stride + 1
    th_out = np.empty(n_out)
    p_out = np.empty(n_out)
    th, p = th0, p0
    e0 = 0.5 * p * p + potential(kind, coef, th)
    max_err = 0.0
    th_out[0] = th
    p_out[0] = p
    a = force(kind, coef, th)
    j = 1
    for k in range(1, n_steps + 1):
        p += 0.5 * dt * a
        th += dt * p
        a = force(kind, coef, th)
        p += 0.5 * dt * a
        err = abs(0.5 * p * p + potential(kind, coef, th) - e0)
        if err > max_err:
            max_err = err
        if k % stride == 0:
            th_out[j] = th
            p_out[j] = p
            j += 1
    return th_out, p_out, max_err
