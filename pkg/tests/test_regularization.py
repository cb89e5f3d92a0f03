import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from twocenters.errors import (
    ChartSingular,
    CollisionFiber,
    NoTurningPoint,
    RegimeUnsupported,
    WindowViolation,
)
from twocenters.potential import MassParams, eval_V
from twocenters.regularization import (
    Component,
    EllipticState,
    SeparatedSystem,
    Which,
    chart_K,
    conformal_factor,
    cotangent_lift,
    elliptic_to_cartesian,
    eval_K,
    eval_W,
    kappa_window,
    to_xy_chart,
    torus_condition,
    turning_points,
)

from oracles import PERIOD_ORACLE

angles = st.floats(0.05, 2.0)
nus = st.floats(0.05, 2 * math.pi - 0.05)
momenta = st.floats(-3.0, 3.0)


def test_foci_map_to_centers():
    e = elliptic_to_cartesian(0.0, math.pi)
    m = elliptic_to_cartesian(0.0, 0.0)
    assert e == pytest.approx((-0.5, 0.0), abs=1e-16)
    assert m == pytest.approx((0.5, 0.0), abs=1e-16)


def test_nu_is_wrapped():
    s = EllipticState(0.5, -0.25)
    assert 0 <= s.nu < 2 * math.pi
    assert s.nu == pytest.approx(2 * math.pi - 0.25, abs=1e-15)
    assert EllipticState(0.5, 1e-17).nu == 1e-17


@given(angles, nus)
def test_conformal_factor_two_forms(mu, nu):
    alt = math.cosh(mu) ** 2 - math.cos(nu) ** 2
    assert conformal_factor(mu, nu) == pytest.approx(alt, rel=1e-9, abs=1e-12)


@given(angles, nus)
def test_distances_to_centers(mu, nu):
    # r_e = (cosh mu + cos nu)/2 and r_m = (cosh mu - cos nu)/2
    x, y = elliptic_to_cartesian(mu, nu)
    assert math.hypot(x + 0.5, y) == pytest.approx((math.cosh(mu) + math.cos(nu)) / 2, rel=1e-12)
    assert math.hypot(x - 0.5, y) == pytest.approx((math.cosh(mu) - math.cos(nu)) / 2, rel=1e-12)


@given(angles, nus, momenta, momenta, st.floats(0.0, 2.0), st.floats(-6.0, -1.0))
def test_K_is_rescaled_hamiltonian(mu, nu, pmu, pnu, eps, c):
    params = MassParams(1.0, 0.4, eps)
    state = EllipticState(mu, nu, pmu, pnu)
    q, p = cotangent_lift(state)
    H = 0.5 * (p[0] ** 2 + p[1] ** 2) + eval_V(q, params)
    K, K1, K2 = eval_K(c, params, state)
    assert K == pytest.approx(K1 + K2, abs=1e-12)
    expected = conformal_factor(mu, nu) * (H - c) / 4
    assert K == pytest.approx(expected, rel=1e-9, abs=1e-9 * (1 + abs(H) + abs(c)))


def test_K_is_finite_over_the_centers():
    params = MassParams(1.0, 0.5, 0.3)
    K, K1, K2 = eval_K(-3.0, params, EllipticState(0.0, math.pi, 0.7, 0.2))
    assert math.isfinite(K)
    with pytest.raises(CollisionFiber):
        cotangent_lift(EllipticState(0.0, math.pi, 0.7, 0.2))


@given(angles, nus, momenta, momenta)
def test_xy_chart_agrees(mu, nu, pmu, pnu):
    assume(abs(math.sin(nu)) > 1e-3)
    params = MassParams(1.0, 0.5, 0.8)
    state = EllipticState(mu, nu, pmu, pnu)
    _, K1, K2 = eval_K(-3.0, params, state)
    k1, k2 = chart_K(-3.0, params, *to_xy_chart(state))
    scale = 1 + abs(K1) + abs(K2)
    assert k1 == pytest.approx(K1, abs=1e-9 * scale)
    assert k2 == pytest.approx(K2, abs=1e-9 * scale)


def test_xy_chart_singular_on_axis():
    with pytest.raises(ChartSingular):
        to_xy_chart(EllipticState(0.4, 0.0))


def test_W_at_well_bottoms():
    params = MassParams(1.3, 0.6, 0.9)
    c = -5.0
    mu = SeparatedSystem(Which.MU, c, params)
    nu = SeparatedSystem(Which.NU, c, params)
    assert eval_W(mu, 0.0) == pytest.approx(-params.M1 / 2, abs=1e-15)
    assert eval_W(nu, math.pi) == pytest.approx(-params.M2 / 2, abs=1e-15)
    assert eval_W(nu, 0.0) == pytest.approx(params.M2 / 2, abs=1e-15)


def test_windows():
    params = MassParams(1.0, 0.5, 0.2)
    e = kappa_window("e", params)
    m = kappa_window(Component.M, params)
    assert (e.lo, e.hi) == (-0.25, 0.75)
    assert (m.lo, m.hi) == (0.25, 0.75)
    assert e.width == 1.0
    assert e.contains(0.75) and not e.contains(0.76)
    assert e.contains(0.76, slack=0.02)


def test_window_when_second_mass_vanishes():
    w = kappa_window("e", MassParams(1.0, 0.0, 0.0))
    assert (w.lo, w.hi) == (-0.5, 0.5)
    with pytest.raises(RegimeUnsupported):
        kappa_window("m", MassParams(1.0, 0.0, 0.0))


def test_torus_condition():
    params = MassParams(1.0, 0.5, 8.0)
    assert torus_condition(-2.6, params)
    assert not torus_condition(-2.5, params)


@pytest.mark.parametrize("masses,c,kappa,comp,tau1,tau2", PERIOD_ORACLE)
def test_turning_points_are_level_crossings(masses, c, kappa, comp, tau1, tau2):
    params = MassParams(*masses)
    for which, sign in ((Which.MU, -1.0), (Which.NU, 1.0)):
        sys = SeparatedSystem(which, c, params, comp)
        tp = turning_points(sys, kappa)
        assert tp.level == sign * kappa
        assert eval_W(sys, tp.angle) == pytest.approx(tp.level, abs=1e-12)
        assert abs(tp.s - sys.well().bottom) < abs(tp.barrier_s - sys.well().bottom)


def test_turning_point_at_window_edge_is_bottom():
    params = MassParams(1.0, 0.5, 0.4)
    sys = SeparatedSystem(Which.MU, -4.0, params)
    tp = turning_points(sys, 0.75)
    assert tp.delta == 0.0 and tp.angle == 0.0


def test_turning_points_outside_window():
    params = MassParams(1.0, 0.5, 0.4)
    sys = SeparatedSystem(Which.NU, -4.0, params)
    with pytest.raises(WindowViolation):
        turning_points(sys, 0.8)


def test_level_above_barrier():
    # c above the energy of the collinear point between the centers
    params = MassParams(1.0, 0.75, 0.0)
    sys = SeparatedSystem(Which.NU, -3.0, params)
    assert sys.well().barrier_height < 1.0
    turning_points(sys, 0.7)
    with pytest.raises(NoTurningPoint):
        turning_points(sys, 0.875)


def test_no_well_when_torus_condition_fails():
    params = MassParams(1.0, 0.5, 8.0)
    with pytest.raises(NoTurningPoint):
        SeparatedSystem(Which.MU, -1.0, params).well()


@given(st.floats(0.2, 3.0), st.floats(0.0, 1.0), st.floats(0.0, 3.0))
def test_well_curvature_matches_second_difference(m1, frac, eps):
    params = MassParams(m1, m1 * frac, eps)
    c = -(eps / 8 + params.M1) - 1.0
    sys = SeparatedSystem(Which.MU, c, params)
    w = sys.well()
    h = 1e-4
    fd = (eval_W(sys, h) - 2 * eval_W(sys, 0.0) + eval_W(sys, -h)) / h**2
    assert w.curvature == pytest.approx(fd, rel=1e-5)
    assert np.isinf(w.barrier) or w.barrier > 0
