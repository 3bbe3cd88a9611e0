"""Closed-form checks on the circle system.

The upper field is a unit circle about (0, 1) with radial contraction, so the
grazing cycle, its period and its Floquet quantity are all known exactly.
"""

import numpy as np

from z2graze import (circle_system, cycle_offset, fold_offset, grazing_cycle,
                     intrinsic_quantities, predicted_coefficients)


def main():
    sys = circle_system()
    gcd = grazing_cycle(sys)
    q = intrinsic_quantities(gcd, sys, error_estimate=True)
    lam = np.exp(-4 * np.pi)
    print(f"period     {gcd.period:.12f}   exact {2 * np.pi:.12f}")
    print(f"lambda(0)  {q.lambda0:.10e}   exact {lam:.10e}")
    print(f"kappa1, kappa2 = {q.kappa1:.3e}, {q.kappa2:.6f}")

    # the second parameter lifts the whole field, so the cycle offset has a
    # closed form in terms of the fold position
    print("\nshift oracle: delta, computed offset, closed form")
    for delta in (0.0, 1e-3, -2e-3, 5e-2):
        alpha = (0.0, delta)
        xf = fold_offset(sys, alpha)
        want = 1.0 + delta - np.sqrt(1.0 - xf * xf)
        print(f"  {delta:+.0e}  {cycle_offset(sys, alpha):+.15f}  {want:+.15f}")

    print("\npredicted boundary coefficients")
    for k, c in predicted_coefficients(q).items():
        print(f"  {k}: {c:+.10g}")


if __name__ == "__main__":
    main()
