"""Classification of a sampled moment-map image: monotonicity, convexity and volume."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import NonMonotoneAbscissa, ProfileTooSparse
from .momentmap import ToricProfile

MIN_SAMPLES = 16
DEFAULT_TOLS = {"mono_tol": 1e-9, "curv_tol": 1e-7, "lin_tol": 1e-9}


class Convexity(str, enum.Enum):
    CONVEX = "convex_toric"
    CONCAVE = "concave_toric"
    LINEAR = "linear"
    MIXED = "mixed"


@dataclass(frozen=True)
class ClassificationReport:
    monotone: bool
    convexity: Convexity
    dynamically_convex: bool
    volume: float
    tolerances: dict
    witnesses: dict = field(default_factory=dict)
    max_abs_curvature: float = 0.0
    near_flat: list = field(default_factory=list)


def _columns(profile: ToricProfile):
    if len(profile.samples) < MIN_SAMPLES:
        raise ProfileTooSparse(f"{len(profile.samples)} samples, need at least {MIN_SAMPLES}")
    T1 = profile.column("T1")
    T2 = profile.column("T2")
    if np.any(np.diff(T1) <= 0):
        raise NonMonotoneAbscissa("T1 must increase strictly along the samples")
    return T1, T2


def volume(profile: ToricProfile) -> float:
    """Area under the sampled boundary, trapezoid rule on (T1, T2)."""
    T1, T2 = _columns(profile)
    return float(np.trapezoid(T2, T1))


def classify(profile: ToricProfile, tol: dict = None) -> ClassificationReport:
    """Decide monotonicity and convexity from the sampled slopes and curvatures.

    Samples are normalised to the unit box first. The two endpoints, where the
    image meets the axes, do not vote.
    """
    tols = dict(DEFAULT_TOLS)
    tols.update(tol or {})
    T1, T2 = _columns(profile)
    Lx = T1[-1] - T1[0]
    Ly = T2.max() - T2.min()
    if Lx <= 0 or Ly <= 0:
        raise ProfileTooSparse("profile spans a degenerate box")
    fp = profile.column("fprime")[1:-1] * (Lx / Ly)
    fs = profile.column("fsecond")[1:-1] * (Lx * Lx / Ly)
    kappas = profile.column("kappa")[1:-1]

    monotone = bool(np.all(fp < -tols["mono_tol"]))
    witnesses = {}
    if not monotone:
        witnesses["non_monotone"] = kappas[fp >= -tols["mono_tol"]].tolist()
    near_flat = kappas[np.abs(fp) < 10 * tols["mono_tol"]].tolist()

    max_abs = float(np.max(np.abs(fs)))
    if max_abs < tols["lin_tol"]:
        convexity = Convexity.LINEAR
    elif np.all(fs < -tols["curv_tol"]):
        convexity = Convexity.CONVEX
    elif np.all(fs > tols["curv_tol"]):
        convexity = Convexity.CONCAVE
    else:
        convexity = Convexity.MIXED
        witnesses["positive_curvature"] = kappas[fs > tols["curv_tol"]].tolist()
        witnesses["negative_curvature"] = kappas[fs < -tols["curv_tol"]].tolist()
        witnesses["flat"] = kappas[np.abs(fs) <= tols["curv_tol"]].tolist()

    return ClassificationReport(
        monotone=monotone,
        convexity=convexity,
        dynamically_convex=monotone,
        volume=float(np.trapezoid(T2, T1)),
        tolerances=tols,
        witnesses=witnesses,
        max_abs_curvature=max_abs,
        near_flat=near_flat,
    )
