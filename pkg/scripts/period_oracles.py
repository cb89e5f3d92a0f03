"""Recompute the frozen period oracle used by the tests.

The period of a separated well is evaluated on its original x- or y-integral
with QUADPACK's endpoint-weighted rule (QAWS, weight (s-a)^(-1/2) (b-s)^(-1/2)).
The level gap is divided exactly by (s - s_turn) with polynomial division, so no
cancellation occurs next to the turning point. The output is compared to tau().
"""
import math

from numpy.polynomial import Polynomial
from scipy.integrate import quad

from twocenters.momentmap import tau
from twocenters.potential import MassParams
from twocenters.regularization import SeparatedSystem, Which, turning_points

CASES = [
    ((1, 0.5, 0), -3, 0.1, "e"),
    ((1, 0.5, 1), -4, 0.2, "e"),
    ((2, 1, 0.5), -7, -0.3, "e"),
    ((1, -0.25, 0), -2, 0.3, "e"),
    ((2, 1, 0.5), -7, 0.7, "m"),
]


def weighted_period(sys: SeparatedSystem, kappa: float) -> float:
    st = turning_points(sys, kappa).s
    gap = sys.level_sign * kappa - sys.poly
    r, _ = divmod(gap, Polynomial([-st, 1.0]))
    if sys.which is Which.MU:
        lo, hi = 1.0, st
        f = lambda x: 1.0 / math.sqrt(2.0 * (x + 1.0) * -r(x))
    elif sys.well().bottom < 0:
        lo, hi = -1.0, st
        f = lambda y: 1.0 / math.sqrt(2.0 * (1.0 - y) * -r(y))
    else:
        lo, hi = st, 1.0
        f = lambda y: 1.0 / math.sqrt(2.0 * (1.0 + y) * r(y))
    val, _ = quad(f, lo, hi, weight="alg", wvar=(-0.5, -0.5), epsabs=0.0, epsrel=1e-13)
    return 4.0 * val


def main():
    print("masses,c,kappa,component,tau1,tau2,rel_diff_tau1,rel_diff_tau2")
    for masses, c, kappa, comp in CASES:
        params = MassParams(*masses)
        out = []
        for which in (Which.MU, Which.NU):
            sys = SeparatedSystem(which, c, params, comp)
            ref = weighted_period(sys, kappa)
            out.append((ref, abs(tau(sys, kappa) - ref) / ref))
        (t1, d1), (t2, d2) = out
        print(f"{masses},{c},{kappa},{comp},{t1!r},{t2!r},{d1:.1e},{d2:.1e}")


if __name__ == "__main__":
    main()
