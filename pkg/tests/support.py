"""Shared fixtures: brute-force oracles and the registry structural cases."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from roughideal import cluster, ideals, registry, roughlim
from roughideal.grids import BoxGrid, CandidateList


# ---------------------------------------------------------------------------
# brute-force oracles (plain Python loops, no shared code with the package)

def oracle_partial_sums(weights, N):
    out, s = [], 0.0
    for t in range(1, N + 1):
        s += weights(t)
        out.append(s)
    return out


def oracle_sup_density(members, weights, n):
    """sup over t with theta_t <= n of |A ∩ [1, theta_t]| / theta_t."""
    best, theta, t = 0.0, 0.0, 0
    while True:
        t += 1
        theta += weights(t)
        if theta > n:
            return best
        cut = math.floor(theta * (1 + 1e-12))
        count = sum(1 for a in members if a <= cut)
        best = max(best, count / theta)


def oracle_tail(members, weights, j, n):
    return oracle_sup_density([a for a in members if a > j], weights, n)


def oracle_bernstein(f, t, x):
    """Exact rational summation of the Bernstein polynomial at rational x."""
    xq = Fraction(x)
    total = Fraction(0)
    for k in range(t + 1):
        total += math.comb(t, k) * xq ** k * (1 - xq) ** (t - k) * Fraction(f(Fraction(k, t)))
    return total


# ---------------------------------------------------------------------------
# structural cases over the registry

@dataclass
class StructuralCase:
    name: str
    params: dict
    grid: object
    r_values: tuple
    ideal: object
    eps: tuple = roughlim.DEFAULT_EPS
    horizon: int = 10_000
    unbounded: bool = False
    extra: dict = field(default_factory=dict)


def _box(lo, hi, step):
    return BoxGrid(lo, hi, step)


def registry_cases() -> list[StructuralCase]:
    nd = ideals.natural_density()
    cases = [
        StructuralCase("sec2_example", {}, _box(-2.0, 2.0, 0.01), (0.9, 1.0, 1.5), nd,
                       unbounded=True),
        StructuralCase("const_zero", {}, _box(-2.0, 2.0, 0.01), (0.0, 0.5, 1.0), ideals.fin()),
        StructuralCase("alternating", {}, _box(-2.0, 2.0, 0.01), (0.5, 1.0, 1.5), nd),
        StructuralCase("remark_4_3", {}, _box(-1.0, 2.0, 0.01), (0.5, 1.0, 5.0), nd,
                       unbounded=True),
        StructuralCase("thm_4_9", {}, _box(-2.0, 2.0, 0.01), (0.5, 1.0, 2.0), nd),
        StructuralCase("thm_4_10", {}, _box(-1.0, 2.0, 0.01), (0.25, 0.5, 1.0), nd),
        StructuralCase("example_4_6", {}, None, (0.5, 1.5), nd, horizon=100_000),
        StructuralCase("note_2_5", {"d": 2000}, None, (0.5, 1.0, 1.5), nd, horizon=2000),
        StructuralCase("example_2_12", {"d": 2000}, None, (1.5, 2.0, 2.5), nd,
                       horizon=2000),
        StructuralCase("example_4_4", {}, None, (0.5,), nd.with_thresholds(0.005, 0.01),
                       unbounded=True),
        StructuralCase("example_3_1", {}, None, (0.05, 0.1), nd,
                       eps=(0.1, 0.05, 0.02, 0.01, 0.005)),
    ]
    return cases


def build_case(case: StructuralCase):
    x, omega = registry.paper_sequence(case.name, **case.params)
    grid = case.grid
    if grid is None:
        if case.name == "example_4_6":
            grid = CandidateList(["0", "P"], ["0", "P"], x)
        elif case.name in ("note_2_5", "example_2_12"):
            d = case.params["d"]
            names = ["0", "e1", "e2", "e3", "midpoint"]
            items = [np.zeros(d)] + [registry.basis_vector(k, d) for k in (1, 2, 3)] + \
                [registry.perturbed_midpoint(0.25, d)]
            grid = CandidateList(names, items, x)
        elif case.name == "example_4_4":
            grid = registry.example_4_4_candidates(x)
        elif case.name == "example_3_1":
            ks = range(1, 21)
            grid = CandidateList([f"ramp{k}" for k in ks] + ["0"],
                                 [registry.ramp_function(k) for k in ks] +
                                 [registry.zero_function()], x)
        else:
            raise AssertionError(case.name)
    return x, omega, grid


def structural_violations(case: StructuralCase) -> list[str]:
    """Run every structural check on one case; return violation messages."""
    x, omega, grid = build_case(case)
    bad: list[str] = []
    ests, cls = [], []
    for r in case.r_values:
        est = roughlim.scan_limit_set(grid, r, x, omega, case.ideal, case.eps, case.horizon)
        cl = cluster.scan_cluster_set(grid, r, x, omega, case.ideal, case.eps, case.horizon)
        ests.append(est)
        cls.append(cl)
        rep = roughlim.structural_report(est, omega)
        for key in ("diameter", "midpoint", "ball"):
            if not rep[key]["holds"]:
                bad.append(f"{case.name} r={r}: {key} {rep[key]}")
        inter = roughlim.check_intersection_identity(grid, r, x, omega, case.ideal,
                                                     case.eps, case.horizon)
        if not inter["holds"]:
            bad.append(f"{case.name} r={r}: intersection {inter}")
        lig = cluster.check_lim_in_gamma(est, cl)
        if not lig["holds"]:
            bad.append(f"{case.name} r={r}: LIM not in Gamma {lig}")
        if case.unbounded and len(est.clusters()) > 1:
            bad.append(f"{case.name} r={r}: several limit clusters under unbounded weights")
        if case.unbounded and isinstance(grid, BoxGrid) and est.inner.sum() > 1:
            bad.append(f"{case.name} r={r}: {int(est.inner.sum())} limit nodes "
                       "under unbounded weights")
    for pair in roughlim.check_monotone(ests):
        bad.append(f"{case.name}: limit scans not nested at {pair}")
    for pair in roughlim.check_monotone(cls):
        bad.append(f"{case.name}: cluster scans not nested at {pair}")
    return bad
