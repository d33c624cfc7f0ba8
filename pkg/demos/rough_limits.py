"""Rough limit sets of a sequence that oscillates inside [-1, 1].

The sequence is scanned over a grid of candidate limits for several
roughness degrees.  Below the minimal degree nothing is accepted; at the
minimal degree the point 0 is accepted, and because the weights are
unbounded it stays the only accepted point for larger r.
"""
from roughideal import ideals, registry, roughlim
from roughideal.grids import BoxGrid


def main():
    x, w = registry.paper_sequence("sec2_example")
    grid = BoxGrid(-2.0, 2.0, 0.01)
    nd = ideals.natural_density()
    print(registry.describe("sec2_example"))
    for r in (0.5, 0.9, 1.0, 1.5):
        est = roughlim.scan_limit_set(grid, r, x, w, nd, horizon=20_000)
        comps = est.clusters()
        span = ", ".join(f"[{grid.label(int(c[0]))}, {grid.label(int(c[-1]))}]" for c in comps)
        print(f"r = {r:4.2f}: {int(est.inner.sum()):4d} accepted grid points {span or '(none)'}")

    deg = roughlim.minimal_degree(x, w, nd, (0.0, 2.0), 0.05, grid, horizon=20_000)
    lo, hi = deg.bracket
    print(f"minimal degree bracket: [{lo:.4f}, {hi:.4f}], witness {deg.witness}")


if __name__ == "__main__":
    main()
