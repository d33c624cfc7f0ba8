import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from roughideal import ideals, registry, roughlim
from roughideal.errors import ArgumentError, InconclusiveError
from roughideal.grids import BoxGrid, CandidateList
from roughideal.ideals import Verdict
from roughideal.seqspace import EuclideanD, PointSeq, constant_weights

FINE_EPS = (0.1, 0.05, 0.02, 0.01, 0.005)
SEC2_GRID = BoxGrid(-2.0, 2.0, 0.01)


@pytest.fixture(scope="module")
def sec2():
    return registry.paper_sequence("sec2_example")


# ---------------------------------------------------------------------------
# single candidates

def test_oscillating_zero_accepted_at_one(sec2):
    x, w = sec2
    v = roughlim.is_rough_limit([0.0], 1.0, x, w, ideals.natural_density(), horizon=100_000)
    assert v.verdict is Verdict.IN_IDEAL


def test_oscillating_zero_rejected_below_one(sec2):
    x, w = sec2
    v = roughlim.is_rough_limit([0.0], 0.9, x, w, ideals.natural_density(), horizon=100_000)
    assert v.verdict is Verdict.NOT_IN_IDEAL


def test_unit_vectors_basis_vector_accepted_at_beta():
    x, w = registry.paper_sequence("note_2_5", beta=1.0, d=2000)
    v = roughlim.is_rough_limit(registry.basis_vector(1, 2000), 1.0, x, w,
                                ideals.natural_density(), horizon=2000)
    assert v.in_ideal


def test_aggregate_keeps_per_eps_components(sec2):
    x, w = sec2
    v = roughlim.is_rough_limit([0.0], 1.0, x, w, ideals.natural_density())
    assert len(v.components) == len(roughlim.DEFAULT_EPS)


@pytest.mark.parametrize("eps", [(), (0.1, 0.2), (0.1, -0.05), (0.1, 0.1)])
def test_bad_eps_grid_rejected(sec2, eps):
    x, w = sec2
    with pytest.raises(ArgumentError):
        roughlim.is_rough_limit([0.0], 1.0, x, w, ideals.natural_density(), eps)


def test_default_eps_grid_scaling():
    assert roughlim.default_eps_grid(1.0, 1.0) == (1.0, 0.4, 0.2, 0.1)


# ---------------------------------------------------------------------------
# scans

def test_oscillating_scan_at_one_is_single_cluster_at_zero(sec2):
    x, w = sec2
    est = roughlim.scan_limit_set(SEC2_GRID, 1.0, x, w, ideals.natural_density(),
                                  horizon=100_000)
    assert len(est.clusters()) == 1
    assert np.allclose(est.inner_labels(), [0.0], atol=0.01 + 1e-12)


def test_oscillating_scan_at_half_is_empty(sec2):
    x, w = sec2
    est = roughlim.scan_limit_set(SEC2_GRID, 0.5, x, w, ideals.natural_density())
    assert est.status() == "empty"


def test_const_zero_scan_is_interval():
    x, w = registry.paper_sequence("const_zero")
    est = roughlim.scan_limit_set(SEC2_GRID, 1.0, x, w, ideals.fin(), FINE_EPS, 1000)
    lab = est.inner_labels()
    assert lab[0] == pytest.approx(-1.0) and lab[-1] == pytest.approx(1.0)
    assert len(est.clusters()) == 1


def test_scan_estimate_invariants(sec2):
    x, w = sec2
    est = roughlim.scan_limit_set(SEC2_GRID, 1.5, x, w, ideals.natural_density())
    assert not np.any(est.inner & ~est.outer)
    assert not np.any(est.inner & est.undecided)


def test_threads_do_not_change_results():
    x, w = registry.paper_sequence("example_3_1")
    grid = CandidateList([f"ramp{k}" for k in range(1, 9)],
                         [registry.ramp_function(k) for k in range(1, 9)], x)
    a = roughlim.scan_limit_set(grid, 0.1, x, w, ideals.natural_density(), FINE_EPS, 4000,
                                threads=1)
    grid2 = CandidateList(grid.names, grid.items, x)
    b = roughlim.scan_limit_set(grid2, 0.1, x, w, ideals.natural_density(), FINE_EPS, 4000,
                                threads=4)
    assert np.array_equal(a.codes, b.codes)
    assert np.array_equal(a.tails, b.tails) and np.array_equal(a.lowers, b.lowers)


# ---------------------------------------------------------------------------
# minimal degree

def test_oscillating_minimal_degree_brackets_one(sec2):
    x, w = sec2
    d = roughlim.minimal_degree(x, w, ideals.natural_density(), (0.0, 2.0), 0.05, SEC2_GRID,
                                horizon=20_000)
    assert d.contains(1.0)
    assert d.width <= 0.05 + 1e-12
    assert d.path and all(p[2] in ("empty", "nonempty") for p in d.path)


def test_const_zero_minimal_degree_pinned_at_zero():
    x, w = registry.paper_sequence("const_zero")
    d = roughlim.minimal_degree(x, w, ideals.fin(), (0.0, 2.0), 0.05, SEC2_GRID)
    assert d.pinned
    assert d.bracket[0] == 0.0 and d.bracket[1] <= 0.05


def test_ramps_degree_zero_without_limit():
    x, w = registry.paper_sequence("example_3_1")
    K = 40
    grid = CandidateList([f"ramp{k}" for k in range(1, K + 1)],
                         [registry.ramp_function(k) for k in range(1, K + 1)], x)
    nd = ideals.natural_density()
    assert roughlim.scan_limit_set(grid, 0.0, x, w, nd, FINE_EPS).status() == "empty"
    d = roughlim.minimal_degree(x, w, nd, (0.0, 0.2), 0.05, grid, FINE_EPS)
    # the best ramp on the list sits at degree 1/(2K) above zero
    assert d.bracket[0] <= 1 / (2 * K)
    assert d.bracket[1] <= 0.1
    k = math.ceil(1 / d.r_scan_hi) + 1
    assert roughlim.is_rough_limit(registry.ramp_function(k), d.r_scan_hi, x, w, nd,
                                   FINE_EPS).in_ideal


def test_minimal_degree_needs_grid(sec2):
    x, w = sec2
    with pytest.raises(ArgumentError):
        roughlim.minimal_degree(x, w, ideals.natural_density())


def test_undecided_scans_raise_inconclusive():
    # exceedance set {t : 3 | t} has density 1/3: with thresholds (0.2, 0.3)
    # the tail and the lower bound both pass, so every verdict is Undecided
    x = PointSeq(EuclideanD(1), lambda t: np.where(t % 3 == 0, 1.0, 0.0), "thirds")
    w = constant_weights(1.0)
    ideal = ideals.natural_density(tau_in=0.2, tau_out=0.3)
    grid = BoxGrid(0.0, 0.0, 0.1)
    with pytest.raises(InconclusiveError) as info:
        roughlim.minimal_degree(x, w, ideal, (0.0, 0.5), 0.05, grid, horizon=3000)
    assert len(info.value.scans) == 2


# ---------------------------------------------------------------------------
# structural properties

def test_structural_report_oscillating(sec2):
    x, w = sec2
    est = roughlim.scan_limit_set(SEC2_GRID, 1.0, x, w, ideals.natural_density())
    rep = roughlim.structural_report(est)
    assert rep["diameter"]["diameter"] == 0.0 and rep["diameter"]["holds"]


def test_structural_report_const_zero_attains_bound():
    x, w = registry.paper_sequence("const_zero")
    est = roughlim.scan_limit_set(SEC2_GRID, 1.0, x, w, ideals.fin(), FINE_EPS, 1000)
    rep = roughlim.structural_report(est)
    assert rep["diameter"]["diameter"] == pytest.approx(2.0)
    assert rep["diameter"]["bound"] == pytest.approx(2.0)
    assert rep["diameter"]["holds"] and rep["midpoint"]["holds"] and rep["ball"]["holds"]
    assert rep["degree_drop"]["all_below_r"]


def test_structural_report_weighted_unit_vectors():
    d = 2000
    x, w = registry.paper_sequence("example_2_12", d=d)
    grid = CandidateList(["e1", "e2"], [registry.basis_vector(1, d),
                                        registry.basis_vector(2, d)], x)
    est = roughlim.scan_limit_set(grid, 2.0, x, w, ideals.natural_density(), horizon=d)
    assert est.inner.all()
    rep = roughlim.structural_report(est)
    assert rep["diameter"]["diameter"] == 1.0
    assert rep["diameter"]["bound"] == pytest.approx(2.0)
    assert rep["diameter"]["holds"]
    assert rep["ball"].get("skipped")


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 2.0), st.floats(0.0, 2.0))
def test_monotone_in_degree(r1, r2):
    x, w = registry.paper_sequence("alternating")
    grid = BoxGrid(-2.0, 2.0, 0.05)
    ests = [roughlim.scan_limit_set(grid, r, x, w, ideals.natural_density(), horizon=2000)
            for r in (r1, r2)]
    assert roughlim.check_monotone(ests) == []


@pytest.mark.parametrize("name, r, ideal", [
    ("alternating", 1.0, ideals.natural_density()),
    ("const_zero", 0.5, ideals.fin()),
    ("thm_4_10", 0.5, ideals.natural_density()),
])
def test_intersection_identity(name, r, ideal):
    x, w = registry.paper_sequence(name)
    rep = roughlim.check_intersection_identity(BoxGrid(-1.0, 2.0, 0.01), r, x, w, ideal,
                                               horizon=2000)
    assert rep["holds"], rep


@pytest.mark.parametrize("name", ["sec2_example", "remark_4_3"])
@pytest.mark.parametrize("r", [0.5, 1.0, 2.0, 5.0])
def test_uniqueness_under_unbounded_weights(name, r):
    x, w = registry.paper_sequence(name)
    est = roughlim.scan_limit_set(BoxGrid(-1.0, 2.0, 0.01), r, x, w,
                                  ideals.natural_density(), horizon=20_000)
    assert len(est.clusters()) <= 1
    assert est.inner.sum() <= 1


@pytest.mark.parametrize("r", [0.25, 0.5, 1.0])
def test_interior_dichotomy_const_zero(r):
    x, w = registry.paper_sequence("const_zero")
    grid = BoxGrid(-2.0, 2.0, 0.01)
    above = roughlim.scan_limit_set(grid, r, x, w, ideals.fin(), FINE_EPS, 1000)
    assert grid.largest_ball(above.inner) >= r / 2
    at = roughlim.scan_limit_set(grid, 0.0, x, w, ideals.fin(), FINE_EPS, 1000)
    assert grid.largest_ball(at.inner) < 2 * grid.step


@pytest.mark.parametrize("name, ideal, r_min", [
    ("const_zero", ideals.fin(), 0.0),
    ("alternating", ideals.natural_density(), 1.0),
    ("thm_4_10", ideals.natural_density(), 0.5),
])
def test_singleton_iff_minimal_degree(name, ideal, r_min):
    x, w = registry.paper_sequence(name)
    grid = BoxGrid(-1.0, 2.0, 0.01)
    tol = FINE_EPS[-1] + grid.step
    d = roughlim.minimal_degree(x, w, ideal, (0.0, 2.0), 0.01, grid, FINE_EPS, 2000)
    assert d.contains(r_min)
    assert len(d.scan_hi.clusters()) == 1
    singletons = []
    for r in np.arange(0.0, 2.0, 0.025):
        est = roughlim.scan_limit_set(grid, float(r), x, w, ideal, FINE_EPS, 2000)
        if est.inner.sum() == 1:
            singletons.append(float(r))
    assert singletons
    assert all(abs(r - r_min) <= tol + 1e-12 for r in singletons), singletons


def test_registry_structural_suite_subset():
    from support import registry_cases, structural_violations
    for case in registry_cases():
        if case.name in ("const_zero", "thm_4_9", "example_4_6", "note_2_5"):
            assert structural_violations(case) == []
