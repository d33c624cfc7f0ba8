"""Rough weighted ideal cluster points.

A candidate ``g`` is a cluster point of degree ``r`` when every near set
``{t : omega_t ||x_t - g|| < r + eps}`` is large (outside the ideal).  On a
finite eps grid a candidate is *accepted* when all near sets get the verdict
NotInIdeal and *rejected* as soon as one gets InIdeal.

The module also builds the two constructions around cluster sets: a
sequence whose cluster sets recover a prescribed closed set
(:func:`closed_set_representation`) and a sequence whose limit set is
strictly smaller than its cluster set (:func:`lim_gamma_gap`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import ArgumentError, PreconditionError
from .grids import BoxGrid, CandidateList
from .ideals import (IdealHandle, MembershipVerdict, as_intset, batch_verdicts,
                     membership_verdict, natural_density)
from .registry import block_sequence, lim_gamma_sequence
from .roughlim import (DEFAULT_EPS, TIE_RTOL, LimitSetEstimate, ScanProblem,
                       _check_eps, _grid_candidates, _problem, _profiles,
                       _verdicts_from_row, aggregate_cluster, evaluate,
                       is_rough_limit, scan_status)
from .seqspace import WeightedSeq, constant_weights

__all__ = [
    "ClusterSetEstimate", "is_cluster_point", "scan_cluster_set",
    "grid_closedness", "check_lim_in_gamma", "closed_set_representation",
    "lim_gamma_gap", "closure_window_check",
]


@dataclass(frozen=True, eq=False)
class ClusterSetEstimate:
    """Accepted/rejected candidates of a cluster-set scan.

    ``codes[i, k]`` is the near-set verdict code of candidate ``i`` at
    ``eps_grid[k]`` (-1 means the near set is large, i.e. evidence for a
    cluster point).  ``counts`` holds the near-set sizes.
    """

    r: float
    grid: Any
    accepted: np.ndarray
    rejected: np.ndarray
    undecided: np.ndarray
    eps_grid: tuple
    horizon: int
    verdict_params: tuple
    codes: np.ndarray = field(repr=False)
    tails: np.ndarray = field(repr=False)
    lowers: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)
    problem: ScanProblem | None = field(default=None, repr=False)

    def accepted_labels(self) -> list:
        return [self.grid.label(i) for i in np.flatnonzero(self.accepted)]

    def rejected_labels(self) -> list:
        return [self.grid.label(i) for i in np.flatnonzero(self.rejected)]

    def clusters(self) -> list[np.ndarray]:
        return self.grid.clusters(self.accepted)

    def status(self) -> str:
        return scan_status(self)

    def rejecting_eps(self, i: int) -> float | None:
        """Largest eps whose near set was judged small."""
        hits = np.flatnonzero(self.codes[i] == 1)
        return None if hits.size == 0 else float(self.eps_grid[hits[0]])

    def verdict(self, i: int) -> MembershipVerdict:
        return aggregate_cluster(_verdicts_from_row(
            self.codes[i], self.tails[i], self.lowers[i], self.horizon,
            self.verdict_params))


def _thresholds(ideal: IdealHandle, tau_in, tau_out) -> tuple[float, float]:
    return (ideal.tau_in if tau_in is None else tau_in,
            ideal.tau_out if tau_out is None else tau_out)


def is_cluster_point(gamma, r: float, x, omega: WeightedSeq, ideal: IdealHandle,
                     eps_grid=DEFAULT_EPS, horizon: int | None = None,
                     tau_in=None, tau_out=None) -> MembershipVerdict:
    """Aggregated near-set verdict for ``gamma``.

    The answer is about the near sets: ``NOT_IN_IDEAL`` means accepted as a
    cluster point, ``IN_IDEAL`` means rejected.
    """
    n = ideal.horizon_default if horizon is None else int(horizon)
    th = _thresholds(ideal, tau_in, tau_out)
    codes, tails, lowers, _ = evaluate(_problem(x, omega, ideal), [gamma], r,
                                       eps_grid, n, "cluster", *th)
    return aggregate_cluster(_verdicts_from_row(codes[0], tails[0], lowers[0], n, th))


def scan_cluster_set(grid, r: float, x, omega: WeightedSeq, ideal: IdealHandle,
                     eps_grid=DEFAULT_EPS, horizon: int | None = None,
                     tau_in=None, tau_out=None, threads: int = 1) -> ClusterSetEstimate:
    """Apply :func:`is_cluster_point` to every grid candidate."""
    if grid.size == 0:
        raise ArgumentError("grid is empty")
    n = ideal.horizon_default if horizon is None else int(horizon)
    th = _thresholds(ideal, tau_in, tau_out)
    problem = _problem(x, omega, ideal)
    eps = _check_eps(eps_grid)
    codes, tails, lowers, counts = evaluate(problem, _grid_candidates(grid), r,
                                            eps, n, "cluster", *th, threads=threads,
                                            grid=grid)
    accepted = np.all(codes == -1, axis=1)
    rejected = np.any(codes == 1, axis=1)
    return ClusterSetEstimate(float(r), grid, accepted, rejected,
                              ~accepted & ~rejected, eps, n, th, codes, tails,
                              lowers, counts, problem)


# ---------------------------------------------------------------------------
# set-level checks

def grid_closedness(estimate: ClusterSetEstimate) -> dict:
    """Look for holes in the accepted set.

    On a box grid a hole is a candidate that is not accepted although at
    least two grid neighbours exist and all of them are accepted.  On a
    candidate list with declared limit relations a hole is a member that is
    not accepted although every member converging to it is.
    """
    acc = estimate.accepted
    grid = estimate.grid
    holes = []
    if isinstance(grid, CandidateList):
        for name, approx in grid.limits.items():
            i = grid.index(name)
            if not acc[i] and all(acc[grid.index(a)] for a in approx):
                holes.append(name)
    else:
        for i in np.flatnonzero(~acc):
            nb = grid.neighbors(int(i))
            if len(nb) >= 2 and all(acc[k] for k in nb):
                holes.append(grid.label(int(i)))
    return {"r": estimate.r, "holes": holes, "closed": not holes}


def check_lim_in_gamma(limit: LimitSetEstimate, cluster: ClusterSetEstimate) -> dict:
    """Every accepted limit candidate should be an accepted cluster point."""
    if limit.grid is not cluster.grid and limit.grid.size != cluster.grid.size:
        raise ArgumentError("estimates are on different grids")
    bad = np.flatnonzero(limit.inner & ~cluster.accepted)
    return {"r": limit.r, "violations": [limit.grid.label(int(i)) for i in bad],
            "holds": bad.size == 0}


# ---------------------------------------------------------------------------
# closed-set representation

def _block_masks(blocks, k: int, n: int) -> list[np.ndarray]:
    """Membership masks over ``1..n`` of the blocks carrying each point."""
    t = np.arange(1, n + 1, dtype=np.int64)
    if blocks == "dyadic":
        low = t & -t
        j = np.round(np.log2(low.astype(np.float64))).astype(np.int64)
        owner = j % k
    elif isinstance(blocks, (int, np.integer)):
        idx = (t - 1) % int(blocks)
        owner = np.where(idx < k, idx, 0)
    else:
        raise ArgumentError("blocks must be 'dyadic' or a modulus")
    return [owner == i for i in range(k)]


def _distance_to_sample(grid: BoxGrid, F: np.ndarray) -> np.ndarray:
    diff = grid.points[:, None, :] - F[None, :, :]
    if grid.norm == "sup":
        d = np.max(np.abs(diff), axis=2)
    else:
        d = np.sqrt(np.einsum("gkd,gkd->gk", diff, diff))
    return d.min(axis=1)


def closed_set_representation(F, grid: BoxGrid, r_grid: Sequence[float],
                              ideal: IdealHandle | None = None, blocks="dyadic",
                              omega: WeightedSeq | None = None,
                              eps_grid=DEFAULT_EPS, horizon: int | None = None,
                              inner_tol: float | None = None,
                              delta_out: float | None = None, tau_in=None,
                              tau_out=None):
    """Sequence constant on disjoint blocks whose cluster sets recover ``F``.

    ``F`` is a finite sample of the closed set (rows are points).  Point
    ``a_i`` is placed on the blocks of the partition assigned to it (see
    :func:`~roughideal.registry.block_sequence`).  For every ``r`` in
    ``r_grid`` the report records grid nodes within ``inner_tol`` of the
    sample that were not accepted, and, for degrees small enough that the
    check is meaningful, nodes at least ``delta_out`` away that were not
    rejected.  Returns ``(x, report)``.
    """
    ideal = ideal or natural_density()
    omega = omega or constant_weights(1.0)
    if omega.mu is None:
        raise PreconditionError("weights must be bounded with a known level mu")
    pts = np.asarray(F, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[1] != grid.dim:
        raise ArgumentError("sample dimension does not match the grid")
    n = ideal.horizon_default if horizon is None else int(horizon)
    th = _thresholds(ideal, tau_in, tau_out)
    inner_tol = grid.step if inner_tol is None else float(inner_tol)
    delta_out = 3 * grid.step if delta_out is None else float(delta_out)
    eps = _check_eps(eps_grid)

    # each distinct point needs a large union of blocks
    masks = _block_masks(blocks, pts.shape[0], n)
    union = np.sum(masks, axis=0)
    if np.any(union != 1):
        raise PreconditionError("blocks are not a partition of the horizon")
    uniq, inverse = np.unique(pts, axis=0, return_inverse=True)
    carry = np.stack([np.any([m for m, g in zip(masks, inverse.ravel()) if g == u],
                             axis=0) for u in range(uniq.shape[0])])
    codes, tails, lowers = batch_verdicts(carry, ideal, *th)
    if np.any(codes != -1):
        bad = int(np.flatnonzero(codes != -1)[0])
        raise PreconditionError(
            f"blocks carrying point {uniq[bad].tolist()} are not large "
            f"(lower bound {lowers[bad]:.4g})", witness=uniq[bad].tolist())

    x, _ = block_sequence(pts, blocks, omega)
    dist = _distance_to_sample(grid, pts)
    near = dist <= inner_tol + 1e-9 * grid.step
    far = dist >= delta_out - 1e-9 * grid.step
    per_r = []
    ok = True
    for r in sorted((float(v) for v in r_grid), reverse=True):
        est = scan_cluster_set(grid, r, x, omega, ideal, eps, n, *th)
        missed = np.flatnonzero(near & ~est.accepted)
        # far nodes have near sets empty at the smallest eps once
        # beta * delta_out exceeds r + min(eps)
        outer_checked = omega.beta * delta_out > r + eps[-1]
        stray = np.flatnonzero(far & ~est.rejected) if outer_checked else np.array([], int)
        per_r.append({"r": r, "inner_nodes": int(near.sum()),
                      "inner_missed": [grid.label(int(i)) for i in missed],
                      "outer_checked": bool(outer_checked),
                      "outer_nodes": int(far.sum()),
                      "outer_not_rejected": [grid.label(int(i)) for i in stray],
                      "accepted": int(est.accepted.sum())})
        ok &= missed.size == 0 and stray.size == 0
    report = {"points": pts.tolist(), "blocks": blocks if blocks == "dyadic" else int(blocks),
              "inner_tol": inner_tol, "delta_out": delta_out,
              "horizon": n, "thresholds": list(th), "eps_grid": list(eps),
              "per_r": per_r, "holds": bool(ok)}
    return x, report


# ---------------------------------------------------------------------------
# limit set strictly inside the cluster set

def lim_gamma_gap(ideal: IdealHandle | None = None, omega: WeightedSeq | None = None,
                  r: float = 1.0,
                  in_set: Callable[[np.ndarray], np.ndarray] | None = None,
                  d: int = 1, norm: str = "euclidean", eps_grid=DEFAULT_EPS,
                  horizon: int | None = None, tau_in=None, tau_out=None):
    """Sequence with ``0`` a cluster point but not a limit of degree ``r``.

    Uses ``r s_t / omega_t`` on the set and ``t s_t`` off it.  Both the set
    and its complement must be large at the horizon.  Returns ``(x, report)``.
    """
    ideal = ideal or natural_density()
    omega = omega or constant_weights(1.0)
    in_set = in_set or (lambda t: t % 2 == 0)
    n = ideal.horizon_default if horizon is None else int(horizon)
    th = _thresholds(ideal, tau_in, tau_out)
    t = np.arange(1, n + 1, dtype=np.int64)
    A = np.asarray(in_set(t), dtype=bool)
    va = membership_verdict(A, ideal, n, *th)
    vc = membership_verdict(~A, ideal, n, *th)
    if not (va.not_in_ideal and vc.not_in_ideal):
        raise PreconditionError(
            "the set and its complement must both be outside the ideal "
            f"(got {va.verdict.value} and {vc.verdict.value})",
            witness=(va, vc))
    x, omega = lim_gamma_sequence(r, omega, in_set, d, norm)
    origin = np.zeros(d)
    gamma = is_cluster_point(origin, r, x, omega, ideal, eps_grid, n, *th)
    lim = is_rough_limit(origin, r, x, omega, ideal, eps_grid, n, *th)
    report = {"r": r, "d": d, "norm": norm, "horizon": n,
              "set_verdict": va.verdict.value,
              "complement_verdict": vc.verdict.value,
              "cluster_verdict": "accepted" if gamma.not_in_ideal else
              ("rejected" if gamma.in_ideal else "undecided"),
              "limit_verdict": "accepted" if lim.in_ideal else
              ("rejected" if lim.not_in_ideal else "undecided"),
              "holds": bool(gamma.not_in_ideal and lim.not_in_ideal)}
    return x, report


# ---------------------------------------------------------------------------
# windows on co-small sets

def _run_small_sets(problem: ScanProblem, cands, r: float, eps, n: int, th) -> list:
    """Near and exceedance sets of ``cands`` judged InIdeal at the horizon."""
    prof = _profiles(problem, cands, n)
    thr = r + np.asarray(eps)
    tol = TIE_RTOL * np.maximum(1.0, thr)
    sets = []
    for masks in (prof[:, None, :] < (thr + tol)[None, :, None],
                  prof[:, None, :] > (thr + tol)[None, :, None]):
        flat = masks.reshape(-1, n)
        codes, _, _ = batch_verdicts(flat, problem.ideal, *th)
        sets.extend(flat[k] for k in np.flatnonzero(codes == 1))
    return sets


def closure_window_check(gamma, r: float, x, omega: WeightedSeq, ideal: IdealHandle,
                         candidates: Sequence | None = None, eps_grid=DEFAULT_EPS,
                         horizon: int | None = None, r_prime: float | None = None,
                         extra_small: Sequence = (), tau_in=None, tau_out=None) -> dict:
    """Windowed form of the closure characterisation for an accepted ``gamma``.

    Co-small windows are the horizon tail ``(n/2, n]`` minus a set judged
    small: the empty set, ``extra_small`` (each must get the InIdeal
    verdict) and every near or exceedance set of ``candidates`` that the run
    judged InIdeal.  On every window the values ``omega_t ||x_t - gamma||``
    must come below each eps of the grid and, when ``r_prime`` is given, must
    reach ``r_prime`` or less.
    """
    n = ideal.horizon_default if horizon is None else int(horizon)
    th = _thresholds(ideal, tau_in, tau_out)
    eps = _check_eps(eps_grid)
    problem = _problem(x, omega, ideal)
    values = _profiles(problem, [gamma], n)[0]
    small = [np.zeros(n, dtype=bool)]
    for s in extra_small:
        v = membership_verdict(s, ideal, n, *th)
        if not v.in_ideal:
            raise ArgumentError("extra_small sets must receive the InIdeal verdict")
        small.append(s[:n] if isinstance(s, np.ndarray) else as_intset(s).mask(n))
    cands = list(candidates) if candidates is not None else [gamma]
    small.extend(_run_small_sets(problem, cands, r, eps, n, th))
    tail = np.arange(n) >= n // 2
    minima = []
    for S in small:
        window = tail & ~S
        minima.append(float(values[window].min()) if window.any() else np.inf)
    worst = max(minima)
    below_eps = {float(e): bool(worst < e) for e in eps}
    rep = {"r": r, "windows": len(small), "worst_window_minimum": worst,
           "below_every_eps": all(below_eps.values()), "below_eps": below_eps}
    if r_prime is not None:
        rep["r_prime"] = float(r_prime)
        rep["reaches_r_prime"] = bool(worst <= r_prime)
    return rep

