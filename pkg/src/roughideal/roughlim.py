"""Rough weighted ideal limit sets on candidate grids.

A candidate ``c`` is a rough limit of degree ``r`` when every exceedance set
``{t : omega_t ||x_t - c|| > r + eps}`` is small.  Each ``eps`` in a finite
decreasing grid gets its own finite-horizon verdict; the per-candidate
aggregate is InIdeal when all are InIdeal and NotInIdeal as soon as one is.

``inner`` holds the accepted candidates, ``outer`` those not refuted at any
``eps``.  Because only finitely many ``eps`` are tried, acceptance at degree
``r`` is evidence for membership at degree ``r + min(eps)``, and a refutation
at ``eps`` rules out every degree below ``r + eps``; :func:`minimal_degree`
turns this into its reported bracket.
"""
from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import ArgumentError, ConfigurationError, InconclusiveError
from .grids import BoxGrid, CandidateList
from .ideals import (IdealHandle, MembershipVerdict, Verdict, batch_verdicts)
from .seqspace import (DistanceOracle, EuclideanD, PointSeq, WeightedSeq,
                       distances)

__all__ = [
    "DEFAULT_EPS", "default_eps_grid", "LimitSetEstimate", "DegreeEstimate",
    "ScanProblem", "is_rough_limit", "scan_limit_set", "minimal_degree",
    "structural_report", "aggregate_limit", "aggregate_cluster",
    "check_monotone", "check_intersection_identity", "scan_status",
]

DEFAULT_EPS = (0.5, 0.2, 0.1, 0.05)
# values within this relative distance of a threshold count as equal to it
TIE_RTOL = 1e-12
# rows (candidate x eps) per verdict batch, times the horizon
_BATCH_BUDGET = 1 << 23
# largest profile table (candidates x horizon) kept on a grid between scans
_PROFILE_CACHE_BUDGET = 1 << 23


def default_eps_grid(r: float, beta: float, base: Sequence[float] = DEFAULT_EPS):
    """The base grid scaled by ``r + beta``."""
    return tuple(e * (r + beta) for e in base)


def _check_eps(eps_grid) -> tuple[float, ...]:
    eps = tuple(float(e) for e in eps_grid)
    if not eps:
        raise ArgumentError("eps grid is empty")
    if any(not e > 0 for e in eps):
        raise ArgumentError("eps values must be positive")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ArgumentError("eps grid must be strictly decreasing")
    return eps


@dataclass(frozen=True, eq=False)
class ScanProblem:
    """Sequence, weights and ideal shared by a family of scans."""

    x: Any
    omega: WeightedSeq
    ideal: IdealHandle

    @property
    def euclidean(self) -> bool:
        return isinstance(self.x, PointSeq) and isinstance(self.x.ambient, EuclideanD)


@functools.lru_cache(maxsize=8)
def _points(x: PointSeq, n: int) -> np.ndarray:
    p = x.points(np.arange(1, n + 1, dtype=np.int64))
    p.setflags(write=False)
    return p


def _profiles(problem: ScanProblem, cands: Sequence, n: int) -> np.ndarray:
    """Weighted distance profiles, one row per candidate."""
    x, w = problem.x, problem.omega.sample(n)
    if problem.euclidean:
        pts = _points(x, n)
        C = np.asarray([np.ravel(np.asarray(c, dtype=np.float64)) for c in cands])
        if C.shape[1] != pts.shape[1]:
            raise ArgumentError("candidate dimension does not match the sequence")
        if pts.shape[1] == 1:
            d = np.abs(pts[:, 0][None, :] - C[:, 0][:, None])
        elif x.ambient.norm == "sup":
            d = np.max(np.abs(pts[None, :, :] - C[:, None, :]), axis=2)
        else:
            diff = pts[None, :, :] - C[:, None, :]
            d = np.sqrt(np.einsum("kij,kij->ki", diff, diff))
        return d * w[None, :]
    t = np.arange(1, n + 1, dtype=np.int64)
    return np.stack([distances(x, c, t) for c in cands]) * w[None, :]


def _grid_profiles(problem: ScanProblem, grid, cands: Sequence, n: int):
    """Profiles of all grid candidates, cached on the grid when small.

    Only non-Euclidean problems are cached: their profiles need quadrature
    or oracle calls, while Euclidean ones are cheap to rebuild.
    """
    if problem.euclidean or len(cands) * n > _PROFILE_CACHE_BUDGET:
        return None
    cache = grid.__dict__.setdefault("_profile_cache", {})
    key = (id(problem.x), id(problem.omega), n)
    hit = cache.get(key)
    if hit is not None and hit[0] is problem.x and hit[1] is problem.omega:
        return hit[2]
    prof = _profiles(problem, cands, n)
    prof.setflags(write=False)
    cache.clear()
    cache[key] = (problem.x, problem.omega, prof)
    return prof


def _candidate_chunks(size: int, n_eps: int, horizon: int) -> list[range]:
    per = max(1, _BATCH_BUDGET // max(1, n_eps * horizon))
    return [range(s, min(size, s + per)) for s in range(0, size, per)]


def evaluate(problem: ScanProblem, cands: Sequence, r: float, eps_grid,
             horizon: int, mode: str = "limit", tau_in=None, tau_out=None,
             threads: int = 1, grid=None):
    """Per-candidate, per-eps verdicts.

    ``mode='limit'`` judges exceedance sets ``> r + eps``; ``mode='cluster'``
    judges near sets ``< r + eps``.  Returns ``(codes, tails, lowers,
    counts)``, each of shape ``(len(cands), len(eps_grid))``; ``counts`` holds
    the number of indices in each judged set.  Passing the ``grid`` that
    produced ``cands`` lets repeated scans reuse expensive profiles.
    """
    if r < 0:
        raise ArgumentError("degree of roughness must be non-negative")
    eps = np.asarray(_check_eps(eps_grid))
    n = int(horizon)
    if n < 1:
        raise ArgumentError("horizon must be positive")
    thr = r + eps
    tol = TIE_RTOL * np.maximum(1.0, thr)
    k = len(cands)
    codes = np.zeros((k, eps.size), np.int8)
    tails = np.zeros((k, eps.size))
    lowers = np.zeros((k, eps.size))
    counts = np.zeros((k, eps.size), np.int64)

    full = _grid_profiles(problem, grid, cands, n) if grid is not None else None

    def work(rows: range):
        if full is not None:
            prof = full[rows.start:rows.stop]
        else:
            prof = _profiles(problem, [cands[i] for i in rows], n)
        if mode == "limit":
            masks = prof[:, None, :] > (thr + tol)[None, :, None]
        else:
            masks = prof[:, None, :] < (thr + tol)[None, :, None]
        flat = masks.reshape(-1, n)
        c, tl, lw, sz = batch_verdicts(flat, problem.ideal, tau_in, tau_out,
                                       return_sizes=True)
        shape = (len(rows), eps.size)
        return rows, c.reshape(shape), tl.reshape(shape), lw.reshape(shape), \
            sz.reshape(shape)

    chunks = _candidate_chunks(k, eps.size, n)
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, chunks))
    else:
        results = [work(ch) for ch in chunks]
    for rows, c, tl, lw, ct in results:
        sl = slice(rows.start, rows.stop)
        codes[sl], tails[sl], lowers[sl], counts[sl] = c, tl, lw, ct
    return codes, tails, lowers, counts


def _verdicts_from_row(codes, tails, lowers, horizon, thresholds):
    return tuple(MembershipVerdict(Verdict.from_code(c), float(t), float(l),
                                   horizon, thresholds)
                 for c, t, l in zip(codes, tails, lowers))


def aggregate_limit(parts: Sequence[MembershipVerdict]) -> MembershipVerdict:
    """InIdeal iff all parts are, NotInIdeal iff any part is."""
    codes = [p.verdict for p in parts]
    if any(v is Verdict.NOT_IN_IDEAL for v in codes):
        v = Verdict.NOT_IN_IDEAL
    elif all(v is Verdict.IN_IDEAL for v in codes):
        v = Verdict.IN_IDEAL
    else:
        v = Verdict.UNDECIDED
    return MembershipVerdict(v, max(p.tail_value for p in parts),
                             max(p.lower_bound for p in parts),
                             parts[0].horizon, parts[0].thresholds, tuple(parts))


def aggregate_cluster(parts: Sequence[MembershipVerdict]) -> MembershipVerdict:
    """Near-set aggregate: NotInIdeal (accepted) iff every part is NotInIdeal,
    InIdeal (rejected) iff some part is InIdeal."""
    codes = [p.verdict for p in parts]
    if any(v is Verdict.IN_IDEAL for v in codes):
        v = Verdict.IN_IDEAL
    elif all(v is Verdict.NOT_IN_IDEAL for v in codes):
        v = Verdict.NOT_IN_IDEAL
    else:
        v = Verdict.UNDECIDED
    return MembershipVerdict(v, min(p.tail_value for p in parts),
                             min(p.lower_bound for p in parts),
                             parts[0].horizon, parts[0].thresholds, tuple(parts))


def _problem(x, omega, ideal) -> ScanProblem:
    if not isinstance(ideal, IdealHandle):
        raise ArgumentError("ideal must be an IdealHandle")
    return ScanProblem(x, omega, ideal)


def is_rough_limit(c, r: float, x, omega: WeightedSeq, ideal: IdealHandle,
                   eps_grid=DEFAULT_EPS, horizon: int | None = None,
                   tau_in=None, tau_out=None) -> MembershipVerdict:
    """Aggregated verdict on the exceedance sets of candidate ``c``."""
    n = ideal.horizon_default if horizon is None else int(horizon)
    th = (ideal.tau_in if tau_in is None else tau_in,
          ideal.tau_out if tau_out is None else tau_out)
    codes, tails, lowers, _ = evaluate(_problem(x, omega, ideal), [c], r,
                                       eps_grid, n, "limit", *th)
    return aggregate_limit(_verdicts_from_row(codes[0], tails[0], lowers[0], n, th))


@dataclass(frozen=True, eq=False)
class LimitSetEstimate:
    """Inner/outer approximation of the rough limit set on a grid.

    ``codes[i, k]`` is the verdict code (1 InIdeal, -1 NotInIdeal,
    0 Undecided) of candidate ``i`` at ``eps_grid[k]``.
    """

    r: float
    grid: Any
    inner: np.ndarray
    outer: np.ndarray
    undecided: np.ndarray
    eps_grid: tuple
    horizon: int
    verdict_params: tuple
    codes: np.ndarray = field(repr=False)
    tails: np.ndarray = field(repr=False)
    lowers: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)
    problem: ScanProblem | None = field(default=None, repr=False)

    def inner_labels(self) -> list:
        return [self.grid.label(i) for i in np.flatnonzero(self.inner)]

    def outer_labels(self) -> list:
        return [self.grid.label(i) for i in np.flatnonzero(self.outer)]

    def clusters(self) -> list[np.ndarray]:
        return self.grid.clusters(self.inner)

    def status(self) -> str:
        return scan_status(self)

    def refuting_eps(self, i: int) -> float | None:
        """Largest eps at which candidate ``i`` was refuted."""
        hits = np.flatnonzero(self.codes[i] == -1)
        return None if hits.size == 0 else float(self.eps_grid[hits[0]])

    def verdict(self, i: int) -> MembershipVerdict:
        return aggregate_limit(_verdicts_from_row(
            self.codes[i], self.tails[i], self.lowers[i], self.horizon,
            self.verdict_params))


def scan_status(est) -> str:
    """``nonempty`` (something accepted), ``empty`` (everything refuted) or
    ``undecided``."""
    acc = est.inner if hasattr(est, "inner") else est.accepted
    if np.any(acc):
        return "nonempty"
    out = est.outer if hasattr(est, "outer") else ~est.rejected
    return "empty" if not np.any(out) else "undecided"


def _grid_candidates(grid) -> list:
    return [grid.candidate(i) for i in range(grid.size)]


def scan_limit_set(grid, r: float, x, omega: WeightedSeq, ideal: IdealHandle,
                   eps_grid=DEFAULT_EPS, horizon: int | None = None,
                   tau_in=None, tau_out=None, threads: int = 1) -> LimitSetEstimate:
    """Apply :func:`is_rough_limit` to every grid candidate."""
    if grid.size == 0:
        raise ArgumentError("grid is empty")
    n = ideal.horizon_default if horizon is None else int(horizon)
    th = (ideal.tau_in if tau_in is None else tau_in,
          ideal.tau_out if tau_out is None else tau_out)
    problem = _problem(x, omega, ideal)
    eps = _check_eps(eps_grid)
    codes, tails, lowers, counts = evaluate(problem, _grid_candidates(grid), r,
                                            eps, n, "limit", *th, threads=threads,
                                            grid=grid)
    inner = np.all(codes == 1, axis=1)
    outer = ~np.any(codes == -1, axis=1)
    return LimitSetEstimate(float(r), grid, inner, outer, outer & ~inner, eps,
                            n, th, codes, tails, lowers, counts, problem)


# ---------------------------------------------------------------------------
# minimal degree

@dataclass(frozen=True, eq=False)
class DegreeEstimate:
    """Bracket for the least degree with a non-empty limit set.

    ``bracket`` is the certified interval: refutations at ``r_scan_lo`` rule
    out degrees below ``bracket[0]``, and acceptance at ``r_scan_hi`` is
    evidence for degree ``r_scan_hi + min(eps)``.  ``pinned`` marks runs
    whose scan at degree 0 was already non-empty.  ``path`` lists every scan
    as ``(r, horizon, status, accepted count)``.
    """

    bracket: tuple[float, float]
    witness: Any
    refutation_grid: Any
    tolerance: float
    r_scan_lo: float
    r_scan_hi: float
    pinned: bool
    scan_lo: LimitSetEstimate | None = field(repr=False)
    scan_hi: LimitSetEstimate = field(repr=False)
    iterations: int = 0
    horizon: int = 0
    path: tuple = ()

    @property
    def width(self) -> float:
        return self.bracket[1] - self.bracket[0]

    def contains(self, value: float) -> bool:
        return self.bracket[0] <= value <= self.bracket[1]


def _witness(est: LimitSetEstimate) -> int:
    # centre of the first accepted cluster rather than its edge
    comp = est.clusters()[0]
    return int(comp[len(comp) // 2])


def minimal_degree(x, omega: WeightedSeq, ideal: IdealHandle,
                   bracket0: tuple[float, float] = (0.0, 2.0), tol: float = 0.05,
                   grid=None, eps_grid=DEFAULT_EPS, horizon: int | None = None,
                   max_iter: int = 60, max_widen: int = 8, tau_in=None,
                   tau_out=None, threads: int = 1) -> DegreeEstimate:
    """Bisect on the degree until the scan bracket is narrower than ``tol``."""
    if grid is None:
        raise ArgumentError("a candidate grid is required")
    lo, hi = (float(v) for v in bracket0)
    if not (0 <= lo < hi):
        raise ArgumentError("bracket0 must satisfy 0 <= lo < hi")
    if not tol > 0:
        raise ArgumentError("tol must be positive")
    eps = _check_eps(eps_grid)
    n0 = ideal.horizon_default if horizon is None else int(horizon)
    history: list = []
    path: list = []

    def decided_scan(r):
        n = n0
        for attempt in range(2):
            est = scan_limit_set(grid, r, x, omega, ideal, eps, n, tau_in,
                                 tau_out, threads)
            history.append(est)
            st = scan_status(est)
            path.append((float(r), n, st, int(est.inner.sum())))
            if st != "undecided":
                return est, st
            n *= 2
        raise InconclusiveError(
            f"scan at degree {r:g} undecided at horizons {n0} and {2 * n0}",
            history[-2:])

    est_hi, st = decided_scan(hi)
    widen = 0
    while st == "empty":
        if widen >= max_widen:
            raise InconclusiveError("no non-empty scan found while widening",
                                    history[-2:])
        lo, hi = hi, 2 * hi
        est_lo_candidate = est_hi
        est_hi, st = decided_scan(hi)
        widen += 1
    est_lo = est_lo_candidate if widen else None
    if est_lo is None:
        est_lo, st_lo = decided_scan(lo)
        if st_lo == "nonempty":
            if lo > 0:
                est_hi, hi = est_lo, lo
                lo = 0.0
                est_lo, st_lo = decided_scan(0.0)
            if st_lo == "nonempty":
                w = _witness(est_lo)
                return DegreeEstimate((0.0, lo + eps[-1]), grid.label(w), None,
                                      tol, 0.0, 0.0, True, None, est_lo, 0,
                                      est_lo.horizon, tuple(path))
    it = 0
    while hi - lo > tol:
        if it >= max_iter:
            raise InconclusiveError("iteration cap reached before tolerance",
                                    (est_lo, est_hi))
        mid = 0.5 * (lo + hi)
        est, st = decided_scan(mid)
        if st == "nonempty":
            hi, est_hi = mid, est
        else:
            lo, est_lo = mid, est
        it += 1
    # certified ends: refuted candidates cannot sit below lo + (refuting eps)
    rej = [est_lo.refuting_eps(i) for i in range(grid.size)]
    lower = lo + min(e for e in rej if e is not None)
    upper = hi + eps[-1]
    if not lower < upper:
        lower = lo
    w = _witness(est_hi)
    return DegreeEstimate((lower, upper), grid.label(w), grid, tol, lo, hi,
                          False, est_lo, est_hi, it, est_hi.horizon, tuple(path))


# ---------------------------------------------------------------------------
# structural checks

def _pairs(indices: np.ndarray, limit: int, rng) -> list[tuple[int, int]]:
    idx = [int(i) for i in indices]
    if len(idx) < 2:
        return []
    allp = [(a, b) for k, a in enumerate(idx) for b in idx[k + 1:]]
    if len(allp) <= limit:
        return allp
    keep = {(idx[0], idx[-1])}
    for j in rng.choice(len(allp), size=limit - 1, replace=False):
        keep.add(allp[int(j)])
    return sorted(keep)


def structural_report(estimate: LimitSetEstimate, omega: WeightedSeq | None = None,
                      sigmas: Sequence[float] | None = None, max_pairs: int = 200,
                      max_drop_pairs: int = 4, seed: int = 0) -> dict:
    """Diameter, midpoint, ball-inclusion and degree-drop checks on a scan.

    The diameter check compares against ``2 (r + min eps) / L`` where ``L``
    is the lower-limit surrogate of the weights: accepted candidates are only
    known to lie in the limit set of degree ``r + min(eps)``.
    """
    problem = estimate.problem
    if problem is None:
        raise ArgumentError("estimate carries no problem data")
    omega = omega or problem.omega
    grid = estimate.grid
    r = estimate.r
    eps_min = estimate.eps_grid[-1]
    rng = np.random.default_rng(seed)
    inner_idx = np.flatnonzero(estimate.inner)
    rep: dict = {"r": r, "inner_size": int(inner_idx.size), "notices": []}

    liminf = omega.tail_minimum(estimate.horizon)
    diam = 0.0
    if inner_idx.size > 1:
        if isinstance(grid, BoxGrid) and grid.dim == 1:
            diam = float(grid.points[inner_idx[-1], 0] - grid.points[inner_idx[0], 0])
        else:
            diam = max(grid.distance(a, b) for a, b in
                       _pairs(inner_idx, 10 ** 6, rng))
    bound = 0.0 if math.isinf(liminf) else 2 * r / liminf
    resolved = 0.0 if math.isinf(liminf) else 2 * (r + eps_min) / liminf
    rep["diameter"] = {"diameter": diam, "liminf_weight": liminf,
                       "bound": bound, "resolved_bound": resolved,
                       "holds": bool(diam <= resolved + 1e-9)}

    euclid = isinstance(grid, BoxGrid) and problem.euclidean
    if isinstance(grid, BoxGrid):
        pairs = _pairs(inner_idx, max_pairs, rng)
        bad = [(grid.label(a), grid.label(b)) for a, b in pairs
               if not all(estimate.outer[m] for m in grid.midpoint_indices(a, b))]
        rep["midpoint"] = {"pairs_checked": len(pairs), "violations": bad,
                           "holds": not bad}
    else:
        rep["midpoint"] = {"pairs_checked": 0, "violations": [], "holds": True,
                           "skipped": True}
        rep["notices"].append("midpoint check needs a box grid")

    if not euclid:
        rep["notices"].append("non-Euclidean ambient: ball and degree-drop checks skipped")
        rep["ball"] = {"skipped": True, "holds": True}
        rep["degree_drop"] = {"skipped": True}
        return rep

    mu = omega.mu
    if mu is None or inner_idx.size == 0:
        rep["ball"] = {"skipped": True, "holds": True}
        if mu is None:
            rep["notices"].append("weights carry no boundedness witness: ball check skipped")
    else:
        sig = tuple(sigmas) if sigmas else (grid.step, 5 * grid.step)
        centers = sorted({int(inner_idx[0]), int(inner_idx[inner_idx.size // 2]),
                          int(inner_idx[-1])})
        failures = []
        checked = 0
        for s in sig:
            pts, labels = [], []
            for c in centers:
                for axis in range(grid.dim):
                    for sign in (-1, 1):
                        p = grid.points[c].copy()
                        p[axis] += sign * s
                        if grid.index_of(p) is not None:
                            pts.append(p)
                            labels.append((grid.label(c), axis, sign))
            if not pts:
                continue
            codes, *_ = evaluate(problem, pts, r + s * mu, estimate.eps_grid,
                                 estimate.horizon, "limit", *estimate.verdict_params)
            checked += len(pts)
            for row, lab in zip(codes, labels):
                if np.any(row == -1):
                    failures.append({"center": lab[0], "sigma": s, "axis": lab[1],
                                     "sign": lab[2]})
        rep["ball"] = {"mu": mu, "sigmas": list(sig), "points_checked": checked,
                       "violations": failures, "holds": not failures}

    drops = []
    for a, b in _pairs(inner_idx, max_drop_pairs, rng):
        if grid.distance(a, b) <= 0:
            continue
        mid = 0.5 * (grid.points[a] + grid.points[b])
        drops.append({"pair": [grid.label(a), grid.label(b)],
                      "s": _degree_drop(problem, mid, r, estimate)})
    rep["degree_drop"] = {"pairs": drops,
                          "all_below_r": all(d["s"] is not None and d["s"] < r
                                             for d in drops) if drops else None}
    return rep


def _degree_drop(problem, point, r, estimate, iters: int = 12):
    """Smallest degree in ``[0, r]`` (to bisection resolution) accepting
    ``point``; ``None`` when it is not accepted at ``r``."""
    def accepted(s):
        codes, *_ = evaluate(problem, [point], s, estimate.eps_grid,
                             estimate.horizon, "limit", *estimate.verdict_params)
        return bool(np.all(codes == 1))
    if not accepted(r):
        return None
    if accepted(0.0):
        return 0.0
    lo, hi = 0.0, r
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if accepted(mid):
            hi = mid
        else:
            lo = mid
    return hi


def check_monotone(estimates: Sequence) -> list[tuple[float, float]]:
    """Degree pairs ``(r1, r2)`` with ``r1 < r2`` whose accepted sets are not
    nested (works for limit and cluster estimates)."""
    def acc(e):
        return e.inner if hasattr(e, "inner") else e.accepted
    ests = sorted(estimates, key=lambda e: e.r)
    bad = []
    for a, b in zip(ests, ests[1:]):
        if np.any(acc(a) & ~acc(b)):
            bad.append((a.r, b.r))
        if hasattr(a, "outer") and np.any(a.outer & ~b.outer):
            bad.append((a.r, b.r))
    return bad


def check_intersection_identity(grid, r: float, x, omega, ideal,
                                eps_grid=DEFAULT_EPS, horizon=None, k_max: int = 5,
                                tau_in=None, tau_out=None) -> dict:
    """Finite form of ``LIM^r = intersection over k of LIM^(r + 1/k)``.

    Checks ``inner(r)`` against the intersection of ``inner(r + 1/k)`` for
    ``k <= k_max``, and that no member of the intersection is refuted at
    degree ``r`` with an eps of at least ``1/k_max + min(eps)``: such a
    refutation would contradict acceptance at ``r + 1/k_max``.
    """
    base = scan_limit_set(grid, r, x, omega, ideal, eps_grid, horizon, tau_in, tau_out)
    inter = np.ones(grid.size, dtype=bool)
    for k in range(1, k_max + 1):
        inter &= scan_limit_set(grid, r + 1.0 / k, x, omega, ideal, eps_grid,
                                horizon, tau_in, tau_out).inner
    lower_bad = np.flatnonzero(base.inner & ~inter)
    limit = 1.0 / k_max + base.eps_grid[-1]
    upper_bad = [i for i in np.flatnonzero(inter & ~base.outer)
                 if base.refuting_eps(i) >= limit - 1e-12]
    return {"r": r, "k_max": k_max,
            "inner_not_in_intersection": [grid.label(i) for i in lower_bad],
            "intersection_refuted_beyond_resolution": [grid.label(i) for i in upper_bad],
            "intersection_minus_outer": int(np.sum(inter & ~base.outer)),
            "holds": lower_bad.size == 0 and not upper_bad}
