import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from roughideal import cluster, ideals, registry, roughlim
from roughideal.errors import ArgumentError, PreconditionError
from roughideal.grids import BoxGrid, CandidateList
from roughideal.seqspace import WeightedSeq, constant_weights

EX44_IDEAL = ideals.natural_density(tau_in=0.005, tau_out=0.01)


@pytest.fixture(scope="module")
def ex44():
    x, w = registry.paper_sequence("example_4_4", r=0.5)
    grid = registry.example_4_4_candidates(x)
    est = cluster.scan_cluster_set(grid, 0.5, x, w, EX44_IDEAL)
    return x, w, grid, est


# ---------------------------------------------------------------------------
# spec examples

def test_block_functions_accepted(ex44):
    _, _, grid, est = ex44
    assert est.accepted_labels() == [f"g{j}" for j in range(1, 7)]


def test_block_function_limit_rejected_at_half(ex44):
    _, _, grid, est = ex44
    i = grid.index("0")
    assert est.rejected[i]
    assert est.rejecting_eps(i) == 0.5
    # the near set at eps = 1/2 is empty, not merely thin
    assert est.counts[i, 0] == 0


def test_block_function_cluster_set_not_grid_closed(ex44):
    rep = cluster.grid_closedness(ex44[3])
    assert rep["holes"] == ["0"] and not rep["closed"]


@pytest.mark.parametrize("r", [0.5, 1.0, 5.0, 10.0])
def test_inverse_sequence_with_square_weights_has_no_cluster_points(r):
    x, w = registry.paper_sequence("remark_4_3")
    est = cluster.scan_cluster_set(BoxGrid(-1.0, 2.0, 0.01), r, x, w,
                                   ideals.natural_density(), horizon=20_000)
    assert not est.accepted.any()
    assert est.rejected.all()


def test_distance_oracle_accepts_both_at_three_halves():
    x, w = registry.paper_sequence("example_4_6")
    grid = CandidateList(["0", "P"], ["0", "P"], x)
    est = cluster.scan_cluster_set(grid, 1.5, x, w, ideals.natural_density(),
                                   horizon=100_000)
    assert est.accepted_labels() == ["0", "P"]


def test_distance_oracle_rejects_zero_at_half():
    x, w = registry.paper_sequence("example_4_6")
    grid = CandidateList(["0", "P"], ["0", "P"], x)
    est = cluster.scan_cluster_set(grid, 0.5, x, w, ideals.natural_density(),
                                   horizon=100_000)
    assert est.rejected_labels() == ["0"]
    assert est.accepted_labels() == ["P"]


def test_alternating_cluster_points_at_degree_zero():
    x, w = registry.paper_sequence("alternating")
    grid = BoxGrid(-2.0, 2.0, 0.01)
    est = cluster.scan_cluster_set(grid, 0.0, x, w, ideals.natural_density())
    clusters = [grid.points[c, 0] for c in est.clusters()]
    assert len(clusters) == 2
    for comp, centre in zip(clusters, (-1.0, 1.0)):
        assert comp.min() >= centre - 0.05 - 1e-9 and comp.max() <= centre + 0.05 + 1e-9
        assert np.any(np.isclose(comp, centre))


def test_cluster_point_verdict_polarity():
    x, w = registry.paper_sequence("alternating")
    v = cluster.is_cluster_point([1.0], 0.0, x, w, ideals.natural_density())
    assert v.not_in_ideal  # the near sets are large, so 1 is accepted
    v = cluster.is_cluster_point([0.0], 0.0, x, w, ideals.natural_density())
    assert v.in_ideal


def test_empty_grid_rejected():
    x, _ = registry.paper_sequence("const_zero")
    with pytest.raises(ArgumentError):
        CandidateList([], [], x)


# ---------------------------------------------------------------------------
# closed-set representation

def test_representation_of_single_point():
    grid = BoxGrid(-1.0, 1.0, 0.05)
    x, rep = cluster.closed_set_representation([0.0], grid, [0.5, 0.2, 0.1])
    assert rep["holds"], rep
    pts = x.points(np.arange(1, 50))
    assert np.all(pts == 0.0)


def test_representation_of_two_points():
    grid = BoxGrid(-1.0, 2.0, 0.05)
    _, rep = cluster.closed_set_representation([0.0, 1.0], grid, [0.5, 0.2, 0.1, 0.05],
                                               eps_grid=(0.1, 0.05))
    assert rep["holds"], rep
    assert any(p["outer_checked"] for p in rep["per_r"])


def test_representation_of_dyadic_rationals():
    grid = BoxGrid(-0.5, 1.5, 0.05)
    F = [k / 8 for k in range(9)]
    _, rep = cluster.closed_set_representation(F, grid, [0.2, 0.1, 0.05], blocks=9,
                                               eps_grid=(0.1, 0.05),
                                               tau_in=0.02, tau_out=0.1)
    assert rep["holds"], rep
    assert all(not p["inner_missed"] for p in rep["per_r"])


def test_representation_needs_bounded_weights():
    w = WeightedSeq(lambda t: t.astype(float), 0.99, "omega=t")
    with pytest.raises(PreconditionError):
        cluster.closed_set_representation([0.0], BoxGrid(-1, 1, 0.1), [0.5], omega=w)


def test_representation_rejects_thin_blocks():
    # twelve points on dyadic blocks: the twelfth block has density 2^-12
    F = np.linspace(0, 1, 12)
    with pytest.raises(PreconditionError):
        cluster.closed_set_representation(F, BoxGrid(-1, 2, 0.1), [0.5])


# ---------------------------------------------------------------------------
# LIM strictly inside Gamma

@pytest.mark.parametrize("r, d", [(1.0, 1), (0.5, 1), (1.0, 2)])
def test_lim_gamma_gap(r, d):
    x, rep = cluster.lim_gamma_gap(r=r, d=d)
    assert rep["cluster_verdict"] == "accepted"
    assert rep["limit_verdict"] == "rejected"
    assert rep["holds"]
    assert x.points([1]).shape == (1, d)


def test_lim_gamma_gap_needs_two_large_sides():
    with pytest.raises(PreconditionError):
        cluster.lim_gamma_gap(in_set=lambda t: np.sqrt(t) % 1 == 0)


# ---------------------------------------------------------------------------
# properties

@pytest.mark.parametrize("name, r, ideal", [
    ("alternating", 0.5, ideals.natural_density()),
    ("const_zero", 1.0, ideals.fin()),
    ("thm_4_10", 0.25, ideals.natural_density()),
    ("thm_4_9", 1.0, ideals.natural_density()),
])
def test_bounded_weights_give_grid_closed_sets(name, r, ideal):
    x, w = registry.paper_sequence(name)
    est = cluster.scan_cluster_set(BoxGrid(-2.0, 2.0, 0.01), r, x, w, ideal, horizon=4000)
    assert est.accepted.any()
    assert cluster.grid_closedness(est)["closed"]


@pytest.mark.parametrize("name, r", [("const_zero", 0.1), ("alternating", 0.1),
                                     ("thm_4_10", 0.1), ("thm_4_9", 0.5)])
def test_non_emptiness_for_bounded_sequences(name, r):
    x, w = registry.paper_sequence(name)
    est = cluster.scan_cluster_set(BoxGrid(-2.0, 2.0, 0.01), r, x, w,
                                   ideals.natural_density(), horizon=4000)
    assert est.accepted.any()


def test_non_emptiness_truncated_sup():
    d = 2000
    x, w = registry.paper_sequence("example_2_12", d=d)
    grid = CandidateList(["0", "e1"], [np.zeros(d), registry.basis_vector(1, d)], x)
    est = cluster.scan_cluster_set(grid, 2.5, x, w, ideals.natural_density(), horizon=d)
    assert est.accepted.any()


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 1.5), st.floats(0.0, 1.5))
def test_accepted_grows_with_degree(r1, r2):
    x, w = registry.paper_sequence("thm_4_10")
    grid = BoxGrid(-1.0, 2.0, 0.05)
    ests = [cluster.scan_cluster_set(grid, r, x, w, ideals.natural_density(), horizon=2000)
            for r in (r1, r2)]
    assert roughlim.check_monotone(ests) == []
    for e in ests:
        assert not np.any(e.accepted & e.rejected)


@pytest.mark.parametrize("name, r", [("alternating", 1.0), ("thm_4_10", 0.5),
                                     ("const_zero", 0.5), ("thm_4_9", 1.0)])
def test_lim_inside_gamma(name, r):
    x, w = registry.paper_sequence(name)
    grid = BoxGrid(-2.0, 2.0, 0.01)
    lim = roughlim.scan_limit_set(grid, r, x, w, ideals.natural_density(), horizon=4000)
    gam = cluster.scan_cluster_set(grid, r, x, w, ideals.natural_density(), horizon=4000)
    assert cluster.check_lim_in_gamma(lim, gam)["holds"]


@pytest.mark.parametrize("j", range(1, 7))
def test_closure_windows_below_every_eps(j):
    # degree r0 = 0.01 sits below the smallest eps, so every window must dip below it
    x, w = registry.paper_sequence("example_4_4", r=0.01)
    grid = registry.example_4_4_candidates(x)
    g = registry.monomial(j)
    assert cluster.is_cluster_point(g, 0.01, x, w, EX44_IDEAL, horizon=4000).not_in_ideal
    rep = cluster.closure_window_check(g, 0.01, x, w, EX44_IDEAL, grid.items, horizon=4000)
    assert rep["windows"] > 1
    assert rep["below_every_eps"], rep


@pytest.mark.parametrize("j", range(1, 7))
def test_closure_windows_reach_r_prime(j):
    x, w = registry.paper_sequence("example_4_4", r=0.5)
    grid = registry.example_4_4_candidates(x)
    g = registry.monomial(j)
    rep = cluster.closure_window_check(g, 0.5, x, w, EX44_IDEAL, grid.items,
                                       horizon=4000, r_prime=0.55)
    assert rep["reaches_r_prime"], rep


def test_closure_extra_small_must_be_small():
    x, w = registry.paper_sequence("alternating")
    with pytest.raises(ArgumentError):
        cluster.closure_window_check([1.0], 0.0, x, w, ideals.natural_density(),
                                     extra_small=[ideals.evens()])


def test_cluster_threads_invariant():
    x, w = registry.paper_sequence("thm_4_10")
    grid = BoxGrid(-1.0, 2.0, 0.01)
    a = cluster.scan_cluster_set(grid, 0.3, x, w, ideals.natural_density(), threads=1)
    b = cluster.scan_cluster_set(grid, 0.3, x, w, ideals.natural_density(), threads=4)
    assert np.array_equal(a.codes, b.codes) and np.array_equal(a.counts, b.counts)
