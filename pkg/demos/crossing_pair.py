"""Two crossing cycles inside the figure-eight loop.

Between the double-cycle fold and the first critical-crossing boundary the
displacement map has two zeros. The inner one is repelling and the outer one
attracting; perturbed orbits confirm this under direct integration.
"""

import numpy as np

from z2graze import (PRECISE, beta_to_alpha, classify_portrait, crossing_cycles, displacement,
                     find_theta, flow, predicted_coefficients, thompson_hunt, to_beta_form)
from z2graze.atlas import Unfolding


def main():
    u = Unfolding(thompson_hunt(-1.0, find_theta(-1.0).b), PRECISE)
    p = predicted_coefficients(u.quantities)
    b1 = -3e-3
    beta = (b1, np.sqrt(p["psi1"] * p["psi2"]) * b1 * b1)
    bs = to_beta_form(u.system, beta_to_alpha(u.system, beta, u), u, seed=beta[1])
    print(f"beta = ({bs.beta1:.3e}, {bs.beta2:.3e})")

    xs = np.linspace(bs.x_left * 1.01, 1.3e-2, 9)
    print("\n x          D(x)")
    for x in xs:
        print(f" {x:.5f}  {displacement(bs, x, derivative=False).value:+.3e}")

    for r in crossing_cycles(bs):
        print(f"\nroot x = {r.x:.8f}, D' = {r.derivative:+.3e}, {r.stability}")
        tr = flow(bs.system, (r.x * (1 + 1e-5), 0.0), "upper", 4 * bs.cycle.period, bs.alpha,
                  bs.opts)
        # every second crossing returns to the half-line the orbit started on
        gaps = [abs(h.x - r.x) for h in tr.events_of("BoundaryHit")[1::2]]
        print("  distance from the root on successive returns: "
              + ", ".join(f"{g:.2e}" for g in gaps))

    inv = classify_portrait(bs)
    print("\ninventory:")
    for obj in inv.objects:
        print(f"  {obj.type:10s} {obj.stability:9s} zone={obj.zone:5s} "
              f"certified={obj.certified} closure={obj.closure:.1e}")


if __name__ == "__main__":
    main()
