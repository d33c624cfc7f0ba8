"""Rough cluster points in C[0, 1] and through a distance oracle.

First a sequence of block functions whose cluster points g1..g6 are
accepted while their uniform limit 0 is rejected, so the accepted set has
a hole.  Then a sequence known only through distances to two named
points, whose cluster set depends on the roughness degree.
"""
from roughideal import cluster, ideals, registry
from roughideal.grids import CandidateList


def block_functions():
    x, w = registry.paper_sequence("example_4_4", r=0.5)
    grid = registry.example_4_4_candidates(x)
    ideal = ideals.natural_density(tau_in=0.005, tau_out=0.01)
    est = cluster.scan_cluster_set(grid, 0.5, x, w, ideal, horizon=4000)
    print("block functions at r = 0.5")
    print("  accepted:", est.accepted_labels())
    zero = grid.index("0")
    print("  0 rejected at eps =", est.rejecting_eps(zero))
    print("  holes in the accepted set:", cluster.grid_closedness(est)["holes"])


def distance_oracle():
    x, w = registry.paper_sequence("example_4_6")
    grid = CandidateList(["0", "P"], ["0", "P"], x)
    print("distance-oracle sequence")
    for r in (0.5, 1.5):
        est = cluster.scan_cluster_set(grid, r, x, w, ideals.natural_density(),
                                       horizon=20_000)
        print(f"  r = {r}: accepted {est.accepted_labels()}, rejected {est.rejected_labels()}")


if __name__ == "__main__":
    block_functions()
    distance_oracle()
