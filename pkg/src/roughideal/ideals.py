"""Submeasures on the positive integers, exhaustive ideals and finite-horizon
membership verdicts.

Sets of positive integers are handled through :class:`IntSet` objects.  An
explicit sorted list, a vectorised predicate (evaluated lazily in chunks) or a
boolean mask over ``[1, n]`` can all be used.  The verdict machinery works on
batches of boolean masks so that thousands of exceedance sets can be judged
with a handful of numpy passes.

Masks follow one convention throughout: ``mask[..., i]`` describes the
integer ``i + 1``.
"""
from __future__ import annotations

import enum
import functools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ArgumentError, ConfigurationError, WeightViolationError
from .seqspace import WeightedSeq, constant_weights

__all__ = [
    "Verdict", "MembershipVerdict", "IntSet", "ExplicitSet", "PredicateSet",
    "MaskSet", "as_intset", "naturals", "evens", "odds", "squares",
    "progression", "dyadic_block", "dyadic_index", "finite_range",
    "Submeasure", "Counting", "SupDensity", "CustomTable", "IdealHandle",
    "fin", "natural_density", "weighted_density", "custom",
    "partial_sums", "theta_cuts", "submeasure_eval", "exh_tail",
    "membership_verdict", "batch_verdicts", "weighted_density_estimate",
    "DensityTrace", "WINDOW_FRACTION",
]

#: share of the horizon used by the trailing lower-bound window
WINDOW_FRACTION = 0.1
_CHUNK = 1 << 16
# relative guard when flooring partial sums that should be integers
_FLOOR_GUARD = 1e-12


class Verdict(enum.Enum):
    IN_IDEAL = "InIdeal"
    NOT_IN_IDEAL = "NotInIdeal"
    UNDECIDED = "Undecided"

    @property
    def code(self) -> int:
        return _CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "Verdict":
        return _FROM_CODE[int(code)]


_CODES = {Verdict.IN_IDEAL: 1, Verdict.NOT_IN_IDEAL: -1, Verdict.UNDECIDED: 0}
_FROM_CODE = {v: k for k, v in _CODES.items()}


@dataclass(frozen=True)
class MembershipVerdict:
    """Three-valued answer to "is this set small?" with its numeric evidence.

    ``tail_value`` is the tail submeasure past half the horizon,
    ``lower_bound`` the smallest truncation value over the trailing window.
    Aggregated verdicts keep their per-threshold parts in ``components``.
    """

    verdict: Verdict
    tail_value: float
    lower_bound: float
    horizon: int
    thresholds: tuple[float, float]
    components: tuple["MembershipVerdict", ...] = field(default=(), repr=False)

    def __post_init__(self):
        tau_in, tau_out = self.thresholds
        if not tau_in < tau_out:
            raise ArgumentError("thresholds must satisfy tau_in < tau_out")
        if self.verdict is Verdict.IN_IDEAL and not self.tail_value <= tau_in:
            raise ArgumentError("InIdeal verdict with tail above tau_in")
        if self.verdict is Verdict.NOT_IN_IDEAL and not self.lower_bound >= tau_out:
            raise ArgumentError("NotInIdeal verdict with lower bound below tau_out")

    @property
    def in_ideal(self) -> bool:
        return self.verdict is Verdict.IN_IDEAL

    @property
    def not_in_ideal(self) -> bool:
        return self.verdict is Verdict.NOT_IN_IDEAL


# ---------------------------------------------------------------------------
# integer sets

class IntSet(ABC):
    """A subset of the positive integers."""

    name: str = "set"

    @abstractmethod
    def counts_at(self, cuts) -> np.ndarray:
        """Return ``|A ∩ [1, c]|`` for every entry ``c`` of ``cuts``."""

    def mask(self, n: int) -> np.ndarray:
        """Boolean membership of ``1..n`` (entry ``i`` stands for ``i + 1``)."""
        counts = self.counts_at(np.arange(0, n + 1))
        return np.diff(counts) > 0

    def elements(self, n: int) -> np.ndarray:
        return np.flatnonzero(self.mask(n)) + 1

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"


class ExplicitSet(IntSet):
    """Set given by a strictly increasing list of positive integers."""

    def __init__(self, elements: Iterable[int], name: str | None = None):
        arr = np.asarray(list(elements) if not isinstance(elements, np.ndarray)
                         else elements)
        if arr.size and not np.issubdtype(arr.dtype, np.integer):
            if not np.all(np.mod(arr, 1) == 0):
                raise ArgumentError("set elements must be integers")
        arr = arr.astype(np.int64).ravel()
        if arr.size and arr[0] < 1:
            raise ArgumentError(f"set elements must be positive, got {arr[0]}")
        if arr.size > 1 and np.any(np.diff(arr) <= 0):
            bad = int(np.flatnonzero(np.diff(arr) <= 0)[0])
            raise ArgumentError(
                f"set elements must be strictly increasing (position {bad + 1})")
        self._elements = arr
        self.name = name or f"explicit[{arr.size}]"

    def counts_at(self, cuts) -> np.ndarray:
        cuts = np.asarray(cuts, dtype=np.int64)
        return np.searchsorted(self._elements, cuts, side="right").astype(np.int64)

    def elements(self, n: int) -> np.ndarray:
        return self._elements[self._elements <= n].copy()


class PredicateSet(IntSet):
    """Set described by a vectorised predicate on int64 index arrays.

    The predicate is only ever called on chunks, so counting up to large
    horizons never holds the whole set.  ``bound`` is the largest integer the
    predicate may be asked about (``None`` for no limit).
    """

    def __init__(self, predicate: Callable[[np.ndarray], np.ndarray],
                 name: str = "predicate", bound: int | None = None):
        self.predicate = predicate
        self.name = name
        self.bound = bound

    def counts_at(self, cuts) -> np.ndarray:
        cuts = np.asarray(cuts, dtype=np.int64)
        out = np.zeros(cuts.shape, dtype=np.int64)
        if cuts.size == 0:
            return out
        flat = cuts.ravel()
        top = int(flat.max())
        if self.bound is not None and top > self.bound:
            raise ConfigurationError(
                f"{self.name}: count requested up to {top}, beyond the "
                f"enumeration bound {self.bound}")
        order = np.argsort(flat, kind="stable")
        sc = flat[order]
        res = np.zeros(sc.shape, dtype=np.int64)
        total = 0
        for start in range(1, top + 1, _CHUNK):
            stop = min(start + _CHUNK - 1, top)
            idx = np.arange(start, stop + 1, dtype=np.int64)
            hits = np.asarray(self.predicate(idx), dtype=bool)
            cum = np.cumsum(hits)
            lo = np.searchsorted(sc, start, side="left")
            hi = np.searchsorted(sc, stop, side="right")
            res[lo:hi] = total + cum[sc[lo:hi] - start]
            total += int(cum[-1])
        res[sc >= top + 1] = total  # only reachable when top < 1
        out_flat = np.empty_like(res)
        out_flat[order] = res
        return out_flat.reshape(cuts.shape)


class MaskSet(IntSet):
    """Set known only on ``[1, len(mask)]``."""

    def __init__(self, mask, name: str = "mask"):
        self._mask = np.asarray(mask, dtype=bool).ravel()
        self._cum = np.concatenate(([0], np.cumsum(self._mask, dtype=np.int64)))
        self.name = name

    def counts_at(self, cuts) -> np.ndarray:
        cuts = np.asarray(cuts, dtype=np.int64)
        if cuts.size and cuts.max() > self._mask.size:
            raise ConfigurationError(
                f"{self.name} is only known up to {self._mask.size}")
        return self._cum[np.clip(cuts, 0, None)]

    def mask(self, n: int) -> np.ndarray:
        if n > self._mask.size:
            raise ConfigurationError(
                f"{self.name} is only known up to {self._mask.size}")
        return self._mask[:n].copy()


def as_intset(A) -> IntSet:
    if isinstance(A, IntSet):
        return A
    if callable(A):
        return PredicateSet(A)
    return ExplicitSet(A)


def naturals() -> PredicateSet:
    return PredicateSet(lambda t: np.ones(t.shape, bool), "naturals")


def evens() -> PredicateSet:
    return PredicateSet(lambda t: t % 2 == 0, "evens")


def odds() -> PredicateSet:
    return PredicateSet(lambda t: t % 2 == 1, "odds")


def _is_square(t: np.ndarray) -> np.ndarray:
    r = np.floor(np.sqrt(t.astype(np.float64))).astype(np.int64)
    # correct the float root by one in either direction
    r = np.where((r + 1) * (r + 1) <= t, r + 1, r)
    r = np.where(r * r > t, r - 1, r)
    return r * r == t


def squares() -> PredicateSet:
    return PredicateSet(_is_square, "squares")


def progression(first: int, step: int) -> PredicateSet:
    """``{first, first + step, ...}``."""
    if first < 1 or step < 1:
        raise ArgumentError("progression needs first >= 1 and step >= 1")
    return PredicateSet(lambda t: (t >= first) & ((t - first) % step == 0),
                        f"progression({first},{step})")


def dyadic_index(t) -> np.ndarray:
    """``1 + v2(t)``: the index ``j`` of the block ``{2^(j-1)(2s-1)}`` holding t."""
    t = np.asarray(t, dtype=np.int64)
    if np.any(t < 1):
        raise ArgumentError("dyadic_index needs positive integers")
    low = t & -t
    return np.round(np.log2(low.astype(np.float64))).astype(np.int64) + 1


def dyadic_block(j: int) -> PredicateSet:
    """The odd multiples of ``2^(j-1)``; for j = 1, 2, ... these partition N."""
    if j < 1:
        raise ArgumentError("dyadic blocks are indexed from 1")
    p = 1 << (j - 1)
    return PredicateSet(lambda t: (t % (2 * p)) == p, f"dyadic_block({j})")


def finite_range(lo: int, hi: int) -> ExplicitSet:
    return ExplicitSet(np.arange(lo, hi + 1), f"[{lo},{hi}]")


# ---------------------------------------------------------------------------
# partial sums

def partial_sums(omega: WeightedSeq, N: int) -> np.ndarray:
    """Return ``theta_1 .. theta_N``, the running sums of the weights."""
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise ArgumentError(f"N must be a positive integer, got {N!r}")
    w = omega.sample(int(N))
    return np.cumsum(w)


@functools.lru_cache(maxsize=64)
def _theta_upto(omega: WeightedSeq, n: int) -> np.ndarray:
    # theta_t grows by more than beta per step, so n / beta terms suffice
    length = max(1, min(int(math.ceil(n / omega.beta)) + 2, 64 * n + 2))
    theta = partial_sums(omega, length)
    theta = theta[theta <= n]
    theta.setflags(write=False)
    return theta


def theta_cuts(omega: WeightedSeq, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Partial sums not exceeding ``n`` and their integer floors."""
    theta = _theta_upto(omega, int(n))
    cuts = np.floor(theta * (1.0 + _FLOOR_GUARD)).astype(np.int64)
    return theta, np.minimum(cuts, n)


# ---------------------------------------------------------------------------
# submeasures

def _as_masks(masks) -> np.ndarray:
    m = np.asarray(masks, dtype=bool)
    if m.ndim == 1:
        m = m[None, :]
    if m.ndim != 2:
        raise ArgumentError("masks must be one- or two-dimensional")
    return m


def _cumcounts(masks: np.ndarray) -> np.ndarray:
    c = np.zeros((masks.shape[0], masks.shape[1] + 1), dtype=np.int64)
    np.cumsum(masks, axis=1, out=c[:, 1:])
    return c


class Submeasure(ABC):
    """Monotone, subadditive set function vanishing on the empty set.

    Subclasses evaluate batches of masks; ``eval`` is the scalar front end.
    The horizon of a batch is the mask length.
    """

    kind: str = "abstract"

    @abstractmethod
    def tail_batch(self, masks: np.ndarray, j: int) -> np.ndarray:
        """Value on ``A minus [1, j]`` for each row of ``masks``."""

    @abstractmethod
    def window_batch(self, masks: np.ndarray) -> np.ndarray:
        """Truncation values over the trailing window, one row per mask."""

    def stats_batch(self, masks: np.ndarray, j: int):
        """``(tail values past j, window minima, set sizes)`` in one call."""
        masks = _as_masks(masks)
        return (self.tail_batch(masks, j), self.window_batch(masks).min(axis=1),
                masks.sum(axis=1))

    def eval(self, A, n: int) -> float:
        return submeasure_eval(self, A, n)

    def describe(self) -> dict:
        return {"kind": self.kind}


class Counting(Submeasure):
    """``min(|A ∩ [1, n]|, ceiling)``; its exhaustive ideal is the finite sets."""

    kind = "Counting"

    def __init__(self, ceiling: float = 1.0):
        if not ceiling > 0:
            raise ArgumentError("ceiling must be positive")
        self.ceiling = float(ceiling)

    def tail_batch(self, masks, j):
        masks = _as_masks(masks)
        j = max(0, min(int(j), masks.shape[1]))
        cnt = masks[:, j:].sum(axis=1)
        return np.minimum(cnt.astype(np.float64), self.ceiling)

    def window_batch(self, masks):
        masks = _as_masks(masks)
        n = masks.shape[1]
        _check_window(n)
        half = n // 2
        start = n - max(1, int(n * WINDOW_FRACTION))
        cum = np.cumsum(masks[:, half:], axis=1)
        # counts on (n/2, m] for m in the trailing window
        window = cum[:, start - half - 1:] if start > half else cum
        return np.minimum(window.astype(np.float64), self.ceiling)

    def describe(self):
        return {"kind": self.kind, "ceiling": self.ceiling}


class SupDensity(Submeasure):
    """``sup_t |A ∩ [1, theta_t]| / theta_t`` over the partial sums that fit
    inside the horizon."""

    kind = "SupDensity"

    def __init__(self, weights: WeightedSeq | None = None):
        self.weights = weights if weights is not None else constant_weights(1.0)

    def _cuts(self, n):
        return theta_cuts(self.weights, n)

    def tail_batch(self, masks, j):
        masks = _as_masks(masks)
        n = masks.shape[1]
        theta, cuts = self._cuts(n)
        if theta.size == 0:
            return np.zeros(masks.shape[0])
        j = max(0, int(j))
        keep = cuts > j
        if not np.any(keep):
            return np.zeros(masks.shape[0])
        theta, cuts = theta[keep], cuts[keep]
        c = _cumcounts(masks)
        base = c[:, min(j, n)][:, None]
        vals = (c[:, cuts] - base) / theta[None, :]
        return vals.max(axis=1)

    def window_batch(self, masks):
        masks = _as_masks(masks)
        n = masks.shape[1]
        theta, cuts = self._cuts(n)
        T = theta.size
        _check_window(T)
        w = max(1, int(T * WINDOW_FRACTION))
        c = _cumcounts(masks)
        return c[:, cuts[T - w:]] / theta[None, T - w:]

    def stats_batch(self, masks, j):
        masks = _as_masks(masks)
        n = masks.shape[1]
        theta, cuts = self._cuts(n)
        T = theta.size
        _check_window(T)
        w = max(1, int(T * WINDOW_FRACTION))
        j = max(0, min(int(j), n))
        if cuts[T - w] <= j:
            return super().stats_batch(masks, j)
        # one cumulative count past j serves both the tail and the window
        head = masks[:, :j].sum(axis=1, dtype=np.int64)
        cum = np.cumsum(masks[:, j:], axis=1, dtype=np.int32)
        keep = cuts > j
        th, ct = theta[keep], cuts[keep]
        if ct.size == n - j and ct[0] == j + 1:
            tail_counts = cum
        else:
            tail_counts = cum[:, ct - j - 1]
        tails = (tail_counts / th[None, :]).max(axis=1) if ct.size else \
            np.zeros(masks.shape[0])
        wc = cuts[T - w:]
        window = (head[:, None] + cum[:, wc - j - 1]) / theta[None, T - w:]
        totals = head + (cum[:, -1] if cum.shape[1] else 0)
        return tails, window.min(axis=1), totals

    def describe(self):
        return {"kind": self.kind, "weights": self.weights.name}


class CustomTable(Submeasure):
    """Weights on a finite table of integers plus a constant tail weight,
    combined by ``max`` or ``sum``.

    Integers outside the table receive ``tail``.  With the max rule and a
    positive tail the exhaustive ideal is the finite sets; with tail 0 every
    set is small.
    """

    kind = "CustomTable"

    def __init__(self, table: dict[int, float], rule: str = "max",
                 tail: float = 0.0):
        if rule not in ("max", "sum"):
            raise ArgumentError("rule must be 'max' or 'sum'")
        if tail < 0 or any(v < 0 for v in table.values()):
            raise ArgumentError("table weights must be non-negative")
        if any(int(k) < 1 for k in table):
            raise ArgumentError("table keys must be positive integers")
        self.table = {int(k): float(v) for k, v in table.items()}
        self.rule = rule
        self.tail = float(tail)

    def _weights(self, n):
        w = np.full(n, self.tail)
        for k, v in self.table.items():
            if k <= n:
                w[k - 1] = v
        return w

    def _combine(self, masks, w):
        vals = np.where(masks, w[None, :], 0.0)
        if self.rule == "max":
            return vals.max(axis=1) if vals.shape[1] else np.zeros(vals.shape[0])
        return vals.sum(axis=1)

    def tail_batch(self, masks, j):
        masks = _as_masks(masks)
        n = masks.shape[1]
        j = max(0, min(int(j), n))
        return self._combine(masks[:, j:], self._weights(n)[j:])

    def window_batch(self, masks):
        masks = _as_masks(masks)
        n = masks.shape[1]
        _check_window(n)
        half = n // 2
        start = n - max(1, int(n * WINDOW_FRACTION))
        w = self._weights(n)
        vals = np.where(masks[:, half:], w[None, half:], 0.0)
        acc = np.maximum.accumulate(vals, axis=1) if self.rule == "max" \
            else np.cumsum(vals, axis=1)
        return acc[:, start - half - 1:] if start > half else acc

    def describe(self):
        return {"kind": self.kind, "rule": self.rule, "tail": self.tail,
                "table": {str(k): v for k, v in sorted(self.table.items())}}


def _check_window(length: int):
    if length < int(math.ceil(1 / WINDOW_FRACTION)):
        raise ConfigurationError(
            f"horizon too small for the trailing window (length {length}, "
            f"need at least {int(math.ceil(1 / WINDOW_FRACTION))})")


# ---------------------------------------------------------------------------
# ideal handles

@dataclass(frozen=True, eq=False)
class IdealHandle:
    """An exhaustive ideal ``{A : phi(A minus [1, t]) -> 0}`` with default
    verdict parameters."""

    name: str
    submeasure: Submeasure
    structural_tags: frozenset = frozenset()
    horizon_default: int = 10_000
    tau_in: float = 0.05
    tau_out: float = 0.2

    def __post_init__(self):
        if not 0 < self.tau_in < self.tau_out:
            raise ArgumentError("need 0 < tau_in < tau_out")

    def with_thresholds(self, tau_in: float, tau_out: float) -> "IdealHandle":
        return IdealHandle(self.name, self.submeasure, self.structural_tags,
                           self.horizon_default, tau_in, tau_out)

    def describe(self) -> dict:
        return {"name": self.name, "submeasure": self.submeasure.describe(),
                "tau_in": self.tau_in, "tau_out": self.tau_out}


_BUILTIN_TAGS = frozenset({"admissible", "analytic_P"})


def fin(horizon_default: int = 10_000, **kw) -> IdealHandle:
    return IdealHandle("fin", Counting(1.0), _BUILTIN_TAGS, horizon_default, **kw)


def natural_density(horizon_default: int = 10_000, **kw) -> IdealHandle:
    return IdealHandle("natural_density", SupDensity(constant_weights(1.0)),
                       _BUILTIN_TAGS, horizon_default, **kw)


def weighted_density(omega: WeightedSeq, horizon_default: int = 10_000,
                     **kw) -> IdealHandle:
    return IdealHandle(f"weighted_density[{omega.name}]", SupDensity(omega),
                       _BUILTIN_TAGS, horizon_default, **kw)


def custom(phi: Submeasure, name: str = "custom", horizon_default: int = 10_000,
           tags: Iterable[str] = (), **kw) -> IdealHandle:
    return IdealHandle(name, phi, frozenset(tags), horizon_default, **kw)


# ---------------------------------------------------------------------------
# scalar front ends

def _mask_of(A, n: int) -> np.ndarray:
    if isinstance(A, np.ndarray) and A.dtype == bool:
        if A.size < n:
            raise ConfigurationError("mask shorter than the horizon")
        return A[:n]
    return as_intset(A).mask(n)


def submeasure_eval(phi: Submeasure, A, n: int) -> float:
    """Evaluate ``phi`` on ``A ∩ [1, n]``."""
    if n < 1:
        raise ArgumentError("horizon must be at least 1")
    return float(phi.tail_batch(_mask_of(A, n), 0)[0])


def exh_tail(A, phi: Submeasure, j: int, n: int) -> float:
    """``phi(A minus [1, j])`` evaluated to horizon ``n``."""
    if j < 0:
        raise ArgumentError("j must be non-negative")
    if n < 1:
        raise ArgumentError("horizon must be at least 1")
    return float(phi.tail_batch(_mask_of(A, n), j)[0])


def batch_verdicts(masks, ideal: IdealHandle, tau_in: float | None = None,
                   tau_out: float | None = None, return_sizes: bool = False):
    """Vectorised verdicts for rows of ``masks`` (horizon = row length).

    Returns ``(codes, tails, lowers)`` (plus set sizes when
    ``return_sizes``) with codes 1 (InIdeal), -1 (NotInIdeal)
    and 0 (Undecided).  Conflicting evidence (both tests pass) is Undecided.
    """
    tau_in = ideal.tau_in if tau_in is None else tau_in
    tau_out = ideal.tau_out if tau_out is None else tau_out
    if not 0 < tau_in < tau_out:
        raise ArgumentError("need 0 < tau_in < tau_out")
    masks = _as_masks(masks)
    n = masks.shape[1]
    tails, lowers, totals = ideal.submeasure.stats_batch(masks, n // 2)
    small = tails <= tau_in
    large = lowers >= tau_out
    codes = np.where(small & ~large, 1, np.where(large & ~small, -1, 0))
    if return_sizes:
        return codes.astype(np.int8), tails, lowers, totals
    return codes.astype(np.int8), tails, lowers


def membership_verdict(A, I: IdealHandle, n: int | None = None,
                       tau_in: float | None = None,
                       tau_out: float | None = None) -> MembershipVerdict:
    """Finite-horizon verdict on whether ``A`` belongs to the ideal ``I``."""
    n = I.horizon_default if n is None else int(n)
    tau_in = I.tau_in if tau_in is None else tau_in
    tau_out = I.tau_out if tau_out is None else tau_out
    codes, tails, lowers = batch_verdicts(_mask_of(A, n), I, tau_in, tau_out)
    return MembershipVerdict(Verdict.from_code(codes[0]), float(tails[0]),
                             float(lowers[0]), n, (tau_in, tau_out))


@dataclass(frozen=True)
class DensityTrace:
    value: float
    trace: np.ndarray
    theta: np.ndarray


def weighted_density_estimate(A, omega: WeightedSeq, N: int) -> DensityTrace:
    """``|A ∩ [1, theta_N]| / theta_N`` with the trace over ``t = 1..N``."""
    theta = partial_sums(omega, N)
    cuts = np.floor(theta * (1.0 + _FLOOR_GUARD)).astype(np.int64)
    counts = as_intset(A).counts_at(cuts)
    trace = counts / theta
    return DensityTrace(float(trace[-1]), trace, theta)

