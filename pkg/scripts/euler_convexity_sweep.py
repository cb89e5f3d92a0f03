"""Classify the moment-map image of the Euler problem across the mass ratio m2/m1.

Each profile is sampled half a unit below the lower of c0 (the lowest critical
value) and -M1 (the torus bound), since for m2 < 0 the latter is lower.
Example: python3 scripts/euler_convexity_sweep.py --ratios=-0.5:0.5:5 --samples 24
"""
import argparse
import time

import numpy as np

from twocenters.momentmap import profile
from twocenters.potential import MassParams, critical_summary
from twocenters.toric import classify


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m1", type=float, default=1.0)
    ap.add_argument("--ratios", default="-0.9:0.9:19", help="lo:hi:n values of m2/m1")
    ap.add_argument("--samples", type=int, default=48)
    ap.add_argument("--below", type=float, default=0.5)
    args = ap.parse_args()
    lo, hi, n = args.ratios.split(":")
    print("m2/m1,c,convexity,monotone,max_abs_curvature,seconds")
    for ratio in np.linspace(float(lo), float(hi), int(n)):
        params = MassParams(args.m1, args.m1 * ratio, 0.0)
        c0 = critical_summary(params).c0
        c = min(-params.M1, c0) if np.isfinite(c0) else -params.M1
        c -= args.below
        t0 = time.perf_counter()
        rep = classify(profile(c, params, n=args.samples))
        print(f"{ratio:.3f},{c:.6f},{rep.convexity.value},{rep.monotone},"
              f"{rep.max_abs_curvature:.3e},{time.perf_counter() - t0:.2f}")


if __name__ == "__main__":
    main()
