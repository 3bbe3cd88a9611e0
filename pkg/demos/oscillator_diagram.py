"""Bifurcation diagram of the friction oscillator near its figure-eight loop.

Locates the grazing parameter for a = -1, computes the cycle quantities,
traces the five boundary curves and samples every region. Pass an output
directory to also save a plot of the traced curves (needs matplotlib).
"""

import os
import sys
import time

import numpy as np

from z2graze import PRECISE, build_diagram, find_theta, thompson_hunt
from z2graze.atlas import Unfolding


def main(out=None):
    t0 = time.perf_counter()
    theta = find_theta(-1.0)
    print(f"theta(-1) = {theta.b:.13f}  (offset {theta.offset:.1e})")
    u = Unfolding(thompson_hunt(-1.0, theta.b), PRECISE)
    q = u.quantities
    print(f"lambda(0) = {q.lambda0:.6f}, kappa2 = {q.kappa2:.6f}, period = {q.period:.6f}")

    grid = np.geomspace(1e-3, 1e-2, 8)
    d = build_diagram(u, grid=grid, jobs=os.cpu_count() or 1)
    print("\ncurve  predicted   fitted     rel.err")
    for k, c in d.comparison.items():
        print(f"{k}   {c['predicted']:+.5f}  {c['fitted']:+.5f}  {c['relative_error']:.2%}")
    print("\nregion  objects")
    for r in d.regions:
        names = ", ".join(t + (f" ({s})" if s else "") + (" double" if m == 2 else "")
                          for t, s, m in r.inventory.signature())
        flag = "ok" if r.matches else "MISMATCH"
        print(f"  {r.label:3s} {flag:8s} {names or 'none'}")
    print(f"\nordering violations: {len(d.ordering_violations)}; "
          f"elapsed {time.perf_counter() - t0:.1f}s")

    if out:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 4.5))
        for k, c in d.curves.items():
            ax.plot(c.beta1, c.beta2, "o-", ms=3, label=k)
        for r in d.regions:
            ax.annotate(r.label, r.beta, fontsize=7)
        ax.axhline(0.0, color="k", lw=0.5)
        ax.set_xlabel(r"$\beta_1$")
        ax.set_ylabel(r"$\beta_2$")
        ax.legend()
        os.makedirs(out, exist_ok=True)
        fig.savefig(os.path.join(out, "oscillator_diagram.png"), dpi=150, bbox_inches="tight")
        print(f"plot written to {out}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
