import numpy as np
import pytest

from twocenters.errors import NonMonotoneAbscissa, ProfileTooSparse
from twocenters.momentmap import PeriodSample, ToricProfile, profile
from twocenters.potential import MassParams, critical_summary
from twocenters.regularization import Component
from twocenters.toric import Convexity, classify, volume


def synthetic(n=20, fsecond=1.0, fprime=None):
    """Straight segment from (0, 1) to (1, 0) with prescribed slope and curvature columns."""
    t = np.linspace(0.0, 1.0, n)
    fp = -np.ones(n) if fprime is None else np.asarray(fprime, float)
    fs = np.broadcast_to(np.asarray(fsecond, float), (n,))
    samples = [PeriodSample(float(-k), 1.0, 1.0, float(a), float(1 - a), float(p), float(s))
               for k, a, p, s in zip(t, t, fp, fs)]
    return ToricProfile(Component.E, -1.0, MassParams(1.0, 0.0, 0.0), samples)


def test_sign_of_curvature_decides():
    assert classify(synthetic(fsecond=0.3)).convexity is Convexity.CONCAVE
    assert classify(synthetic(fsecond=-0.3)).convexity is Convexity.CONVEX
    assert classify(synthetic(fsecond=0.0)).convexity is Convexity.LINEAR


def test_mixed_curvature_reports_witnesses():
    fs = np.linspace(-1.0, 1.0, 20)
    r = classify(synthetic(fsecond=fs))
    assert r.convexity is Convexity.MIXED
    assert r.witnesses["positive_curvature"] and r.witnesses["negative_curvature"]


def test_endpoints_do_not_vote():
    fs = np.full(20, 0.5)
    fs[0] = fs[-1] = -5.0
    assert classify(synthetic(fsecond=fs)).convexity is Convexity.CONCAVE


def test_monotonicity():
    fp = -np.ones(20)
    fp[5] = 0.0
    r = classify(synthetic(fprime=fp))
    assert not r.monotone and not r.dynamically_convex
    assert r.witnesses["non_monotone"] == [-5 / 19]
    assert r.near_flat == [-5 / 19]


def test_tolerance_override():
    r = classify(synthetic(fsecond=1e-8), tol={"lin_tol": 1e-7})
    assert r.convexity is Convexity.LINEAR
    assert r.tolerances["lin_tol"] == 1e-7 and r.tolerances["mono_tol"] == 1e-9


def test_volume_of_triangle():
    assert volume(synthetic()) == pytest.approx(0.5, rel=1e-15)


def test_too_sparse():
    with pytest.raises(ProfileTooSparse):
        classify(synthetic(n=10))


def test_non_monotone_abscissa():
    pr = synthetic()
    samples = list(pr.samples)
    samples[3], samples[4] = samples[4], samples[3]
    with pytest.raises(NonMonotoneAbscissa):
        volume(ToricProfile(pr.component, pr.c, pr.params, samples))


@pytest.mark.parametrize("masses,c,expected", [
    ((1.0, 0.5, 0.0), -3.5, Convexity.CONCAVE),
    ((1.0, -0.25, 0.0), -2.3, Convexity.CONVEX),
    ((1.0, 0.0, 0.0), -1.5, Convexity.LINEAR),
    ((1.0, 0.5, 1.0), None, Convexity.CONCAVE),
])
def test_computed_profiles(masses, c, expected):
    params = MassParams(*masses)
    if c is None:
        c = critical_summary(params).c0 - 0.5
    r = classify(profile(c, params, n=24))
    assert r.monotone
    assert r.convexity is expected


def test_single_center_volume_is_half_square():
    pr = profile(-1.5, MassParams(1.0, 0.0, 0.0), n=24)
    L = pr.column("T1")[-1]
    assert volume(pr) == pytest.approx(L * L / 2, rel=1e-10)


def test_classification_is_scale_free():
    pr = profile(-3.5, MassParams(1.0, 0.5, 0.0), n=24)
    a, b = classify(pr), classify(pr.rescaled(7.0))
    assert a.convexity is b.convexity
    assert b.volume == pytest.approx(49 * a.volume, rel=1e-12)
    assert b.max_abs_curvature == pytest.approx(a.max_abs_curvature, rel=1e-12)
