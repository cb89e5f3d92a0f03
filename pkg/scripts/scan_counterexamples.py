"""Scan (m1, m2, eps) for parameters where c0 exceeds the critical energy bound.

Example: python3 scripts/scan_counterexamples.py --m1 1:100:12 --m2 0:1:5 --eps 0:10:11
"""
import argparse

import numpy as np

from twocenters.potential import scan_conjecture


def grid(spec: str):
    lo, hi, n = spec.split(":")
    return list(np.linspace(float(lo), float(hi), int(n)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m1", default="1:100:12")
    ap.add_argument("--m2", default="0:1:5")
    ap.add_argument("--eps", default="0:10:11")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    rows = scan_conjecture(grid(args.m1), grid(args.m2), grid(args.eps), workers=args.workers)
    failed = [r for r in rows if not r.error and not r.holds]
    errors = [r for r in rows if r.error]
    print(f"{len(rows)} parameter sets, {len(failed)} with c0 > c_crit, {len(errors)} errors")
    for r in failed:
        if np.isnan(r.c0):
            tag = "no critical point"
        else:
            tag = "counterexample" if r.counterexample else "single center"
        print(f"  {tag}: m1={r.m1:g} m2={r.m2:g} eps={r.eps:g} c0={r.c0:.6g} c_crit={r.c_crit:.6g}")
    for r in errors[:10]:
        print(f"  error: m1={r.m1:g} m2={r.m2:g} eps={r.eps:g}: {r.error}")


if __name__ == "__main__":
    main()
