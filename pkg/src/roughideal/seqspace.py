"""Weighted sequences, point sequences in concrete normed spaces and distance
oracles.

Three ambients are supported:

* :class:`EuclideanD` -- ``R^d`` with the Euclidean or the sup norm;
* :class:`TruncatedSup` -- bounded sequences kept on their first ``d``
  coordinates, with the sup norm;
* :class:`QuadratureC01` -- continuous functions on ``[0, 1]`` with the
  integral norm ``int_0^1 |f|``, evaluated by composite quadrature split at
  declared breakpoints.

Generators are vectorised: they receive an ``int64`` array of 1-based
indices and return one row per index.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .errors import ArgumentError, UnknownNameError, WeightViolationError

__all__ = [
    "WeightedSeq", "constant_weights", "EuclideanD", "TruncatedSup",
    "QuadratureC01", "CFunction", "PointSeq", "DistanceOracle",
    "quadrature_norm", "ambient_norm", "in_unit_ball", "distances",
    "weighted_distance", "weighted_profile", "candidate_distance",
    "paper_sequence", "DEFAULT_CHECK_HORIZON",
]

DEFAULT_CHECK_HORIZON = 10_000


# ---------------------------------------------------------------------------
# weights

@dataclass(frozen=True, eq=False)
class WeightedSeq:
    """Positive weights ``t -> omega_t`` bounded below by ``beta``.

    ``gen`` maps an int64 index array to weights.  ``mu`` is a level with
    ``{t : omega_t > mu}`` small in the ideal of interest, when known.
    ``inf_value`` and ``liminf_value`` are closed-form overrides for the
    infimum and the lower limit of the weights.
    """

    gen: Callable[[np.ndarray], np.ndarray]
    beta: float
    name: str
    mu: float | None = None
    inf_value: float | None = None
    liminf_value: float | None = None
    check_horizon: int = DEFAULT_CHECK_HORIZON

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ArgumentError(f"{self.name}: beta must be positive and finite")
        if self.check_horizon > 0:
            self.sample(self.check_horizon)

    def __call__(self, t):
        arr = np.atleast_1d(np.asarray(t, dtype=np.int64))
        out = self._eval(arr)
        return float(out[0]) if np.ndim(t) == 0 else out

    def _eval(self, t: np.ndarray) -> np.ndarray:
        if np.any(t < 1):
            raise ArgumentError("weight indices start at 1")
        w = np.broadcast_to(np.asarray(self.gen(t), dtype=np.float64),
                            t.shape).astype(np.float64, copy=True)
        bad = ~(w > self.beta) | ~np.isfinite(w)
        if np.any(bad):
            k = int(np.flatnonzero(bad)[0])
            what = "non-positive" if not w[k] > 0 else f"not above beta={self.beta}"
            raise WeightViolationError(
                f"{self.name}: weight at index {int(t[k])} is {what} ({w[k]!r})",
                index=int(t[k]), value=float(w[k]))
        return w

    def sample(self, n: int) -> np.ndarray:
        """Weights ``omega_1 .. omega_n``."""
        return _sample_weights(self, int(n))

    def infimum(self, n: int | None = None) -> float:
        if self.inf_value is not None:
            return self.inf_value
        return float(self.sample(n or self.check_horizon or 1000).min())

    def tail_minimum(self, n: int) -> float:
        """Lower-limit surrogate: minimum over the final tenth of ``1..n``
        unless a closed form is declared."""
        if self.liminf_value is not None:
            return self.liminf_value
        w = self.sample(n)
        return float(w[n - max(1, n // 10):].min())


@functools.lru_cache(maxsize=128)
def _sample_weights(omega: WeightedSeq, n: int) -> np.ndarray:
    if n < 1:
        raise ArgumentError("sample size must be positive")
    w = omega._eval(np.arange(1, n + 1, dtype=np.int64))
    w.setflags(write=False)
    return w


def constant_weights(value: float = 1.0, beta: float | None = None,
                     name: str | None = None) -> WeightedSeq:
    """``omega_t = value``, bounded below by ``beta`` (default ``0.99 value``)."""
    return WeightedSeq(lambda t: np.full(t.shape, float(value)),
                       beta if beta is not None else 0.99 * value,
                       name or f"const({value:g})", mu=float(value),
                       inf_value=float(value), liminf_value=float(value))


# ---------------------------------------------------------------------------
# ambients

@dataclass(frozen=True)
class EuclideanD:
    d: int = 1
    norm: str = "euclidean"

    def __post_init__(self):
        if self.d < 1:
            raise ArgumentError("dimension must be positive")
        if self.norm not in ("euclidean", "sup"):
            raise ArgumentError("norm must be 'euclidean' or 'sup'")


@dataclass(frozen=True)
class TruncatedSup:
    d: int = 256

    def __post_init__(self):
        if self.d < 1:
            raise ArgumentError("dimension must be positive")


@dataclass(frozen=True)
class QuadratureC01:
    M: int = 512
    rule: str = "simpson"

    def __post_init__(self):
        if self.M < 16:
            raise ArgumentError("quadrature needs at least 16 nodes")
        if self.rule not in ("simpson", "midpoint"):
            raise ArgumentError("rule must be 'simpson' or 'midpoint'")


Ambient = Union[EuclideanD, TruncatedSup, QuadratureC01]


@dataclass(frozen=True, eq=False)
class CFunction:
    """A function on ``[0, 1]`` with the points where it may fail to be smooth."""

    f: Callable[[np.ndarray], np.ndarray]
    breaks: tuple[float, ...] = ()
    name: str = "f"

    def __call__(self, u):
        return self.f(np.asarray(u, dtype=np.float64))

    def __sub__(self, other: "CFunction") -> "CFunction":
        other = as_cfunction(other)
        return CFunction(lambda u: self.f(u) - other.f(u),
                         tuple(sorted(set(self.breaks) | set(other.breaks))),
                         f"{self.name}-{other.name}")


def as_cfunction(c) -> CFunction:
    if isinstance(c, CFunction):
        return c
    if callable(c):
        return CFunction(c)
    value = float(c)
    return CFunction(lambda u: np.full(np.shape(u), value), name=f"{value:g}")


# ---------------------------------------------------------------------------
# quadrature

def _panel_counts(rule: str, M: int, panels: int) -> int:
    m = max(2, M // max(1, panels))
    if rule == "simpson" and m % 2:
        m -= 1
    return m


def _abs_integral(values: np.ndarray, h: np.ndarray, rule: str) -> np.ndarray:
    """Integrate ``|values|`` along the last axis; ``h`` is the node spacing
    (broadcast against all but the last axis)."""
    if rule == "midpoint":
        return h * np.abs(values).sum(axis=-1)
    a = values[..., 0:-2:2]
    b = values[..., 1:-1:2]
    c = values[..., 2::2]
    simpson = (np.abs(a) + 4.0 * np.abs(b) + np.abs(c)) / 3.0
    # pairs with a sign change: exact |.| integral of the linear interpolant
    mixed = (a * b < 0) | (b * c < 0)
    if np.any(mixed):
        lin = _abs_trapezoid(a, b) + _abs_trapezoid(b, c)
        simpson = np.where(mixed, lin, simpson)
    return h * simpson.sum(axis=-1)


def _abs_trapezoid(a, b):
    aa, bb = np.abs(a), np.abs(b)
    same = a * b >= 0
    denom = np.where(same, 1.0, aa + bb)
    return np.where(same, 0.5 * (aa + bb), 0.5 * (a * a + b * b) / denom)


def _panel_nodes(lo: np.ndarray, hi: np.ndarray, m: int, rule: str):
    # lo, hi: (..., P) -> nodes (..., P, K), spacing (..., P)
    h = (hi - lo) / m
    if rule == "midpoint":
        k = np.arange(m) + 0.5
    else:
        k = np.arange(m + 1, dtype=np.float64)
    nodes = lo[..., None] + h[..., None] * k
    return nodes, h


def quadrature_norm(f, M: int = 512, rule: str = "simpson",
                    breakpoints: Sequence[float] = ()) -> float:
    """Composite-rule value of ``int_0^1 |f(u)| du``.

    Breakpoints (kinks or jumps of ``f``) become panel boundaries, so
    piecewise-linear integrands are integrated exactly.  A sign change inside
    a Simpson pair is handled by the exact rule for the linear interpolant.
    """
    QuadratureC01(M, rule)
    g = as_cfunction(f)
    pts = sorted({0.0, 1.0} | {float(b) for b in tuple(breakpoints) + g.breaks
                               if 0.0 < float(b) < 1.0})
    lo, hi = np.asarray(pts[:-1]), np.asarray(pts[1:])
    m = _panel_counts(rule, M, lo.size)
    nodes, h = _panel_nodes(lo, hi, m, rule)
    vals = np.asarray(g.f(nodes), dtype=np.float64)
    vals = np.broadcast_to(vals, nodes.shape)
    if not np.all(np.isfinite(vals)):
        raise ArgumentError("integrand is not finite at a quadrature node")
    return float(_abs_integral(vals, h, rule).sum())


# ---------------------------------------------------------------------------
# sequences

@dataclass(frozen=True, eq=False)
class PointSeq:
    """A sequence ``t -> x_t`` in one of the supported ambients.

    For vector ambients ``gen(t)`` returns an ``(n, d)`` array (or ``(n,)``
    when ``d = 1``).  For :class:`QuadratureC01`, ``gen(t, u)`` evaluates
    ``x_t(u)`` with ``t`` shaped ``(n, 1, 1)`` broadcast against nodes ``u``,
    and ``breaks(t)`` returns an ``(n, B)`` array of interior breakpoints.
    ``max_coord(t)`` gives the largest 1-based coordinate touched by ``x_t``
    in the truncated model.
    """

    ambient: Ambient
    gen: Callable
    name: str
    breaks: Callable[[np.ndarray], np.ndarray] | None = None
    max_coord: Callable[[np.ndarray], np.ndarray] | None = None
    params: Mapping = field(default_factory=dict)

    @property
    def is_vector(self) -> bool:
        return not isinstance(self.ambient, QuadratureC01)

    @property
    def dim(self) -> int | None:
        return None if not self.is_vector else self.ambient.d

    def points(self, t) -> np.ndarray:
        """Rows ``x_t`` for the indices ``t`` (vector ambients only)."""
        if not self.is_vector:
            raise ArgumentError("points() needs a vector ambient")
        t = np.atleast_1d(np.asarray(t, dtype=np.int64))
        if isinstance(self.ambient, TruncatedSup) and self.max_coord is not None:
            top = int(np.max(self.max_coord(t)))
            if top > self.ambient.d:
                raise ArgumentError(
                    f"{self.name}: coordinate {top} touched but d = {self.ambient.d}")
        p = np.asarray(self.gen(t), dtype=np.float64)
        if p.ndim == 1:
            p = p[:, None]
        if p.shape != (t.size, self.ambient.d):
            raise ArgumentError(
                f"{self.name}: generator returned shape {p.shape}, "
                f"expected {(t.size, self.ambient.d)}")
        return p

    def point(self, t: int):
        """``x_t`` as a vector or, in C[0,1], as a :class:`CFunction`."""
        if self.is_vector:
            return self.points([t])[0]
        tt = np.array([[float(t)]])

        def f(u, _t=tt):
            u = np.asarray(u, dtype=np.float64)
            return np.asarray(self.gen(_t.reshape((1,) * max(u.ndim, 1)), u),
                              dtype=np.float64).reshape(u.shape)
        br = () if self.breaks is None else tuple(
            float(b) for b in np.ravel(self.breaks(np.array([t])))
            if 0.0 < b < 1.0)
        return CFunction(f, br, f"{self.name}[{t}]")


@dataclass(frozen=True, eq=False)
class DistanceOracle:
    """Closed-form distance profiles ``t -> ||x_t - c||`` for named candidates.

    ``dist(t, name)`` is vectorised over ``t``.  ``mutual`` holds declared
    distances between candidate pairs, keyed by ``frozenset({a, b})``.
    """

    candidates: tuple[str, ...]
    dist: Callable[[np.ndarray, str], np.ndarray]
    name: str
    mutual: Mapping[frozenset, float] = field(default_factory=dict)

    def distance(self, t, c: str) -> np.ndarray:
        if c not in self.candidates:
            raise UnknownNameError(f"{self.name}: unknown candidate {c!r}")
        t = np.atleast_1d(np.asarray(t, dtype=np.int64))
        return np.broadcast_to(np.asarray(self.dist(t, c), dtype=np.float64),
                               t.shape).copy()

    def triangle_violations(self, t) -> list[tuple]:
        """Sampled ``(t, c1, c2)`` with ``|d(t,c1) - d(t,c2)| > D(c1,c2)``."""
        t = np.atleast_1d(np.asarray(t, dtype=np.int64))
        bad = []
        for pair, D in self.mutual.items():
            a, b = sorted(pair)
            gap = np.abs(self.distance(t, a) - self.distance(t, b))
            for k in np.flatnonzero(gap > D * (1 + 1e-12) + 1e-15):
                bad.append((int(t[k]), a, b))
        return bad


def ambient_norm(ambient: Ambient, v) -> float:
    """Norm of a single element of ``ambient``."""
    if isinstance(ambient, QuadratureC01):
        return quadrature_norm(as_cfunction(v), ambient.M, ambient.rule)
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size != ambient.d:
        raise ArgumentError(f"expected {ambient.d} coordinates, got {v.size}")
    if isinstance(ambient, TruncatedSup) or ambient.norm == "sup":
        return float(np.max(np.abs(v)))
    return float(np.linalg.norm(v))


def in_unit_ball(ambient: Ambient, v) -> bool:
    return ambient_norm(ambient, v) <= 1.0


def candidate_distance(space, a, b) -> float:
    """Distance between two candidates of the same space."""
    if isinstance(space, DistanceOracle):
        if a == b:
            return 0.0
        key = frozenset((a, b))
        if key not in space.mutual:
            raise UnknownNameError(f"no declared distance between {a!r} and {b!r}")
        return float(space.mutual[key])
    amb = space.ambient if isinstance(space, PointSeq) else space
    if isinstance(amb, QuadratureC01):
        return ambient_norm(amb, as_cfunction(a) - as_cfunction(b))
    return ambient_norm(amb, np.asarray(a, float) - np.asarray(b, float))


def _rows_per_chunk(width: int, budget: int = 1 << 22) -> int:
    return max(1, budget // max(1, width))


def distances(x, c, t) -> np.ndarray:
    """``||x_t - c||`` for every index in ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=np.int64))
    if np.any(t < 1):
        raise ArgumentError("indices start at 1")
    if isinstance(x, DistanceOracle):
        return x.distance(t, c)
    if not isinstance(x, PointSeq):
        raise ArgumentError("expected a PointSeq or DistanceOracle")
    amb = x.ambient
    if isinstance(amb, QuadratureC01):
        return _c01_distances(x, as_cfunction(c), t)
    cv = np.asarray(c, dtype=np.float64).ravel()
    if cv.size != amb.d:
        raise ArgumentError(
            f"candidate has {cv.size} coordinates, ambient has {amb.d}")
    out = np.empty(t.size)
    step = _rows_per_chunk(amb.d)
    sup = isinstance(amb, TruncatedSup) or amb.norm == "sup"
    for s in range(0, t.size, step):
        diff = x.points(t[s:s + step]) - cv[None, :]
        out[s:s + step] = (np.max(np.abs(diff), axis=1) if sup
                           else np.sqrt(np.einsum("ij,ij->i", diff, diff)))
    return out


def _c01_distances(x: PointSeq, c: CFunction, t: np.ndarray) -> np.ndarray:
    amb = x.ambient
    n = t.size
    cb = np.array([b for b in c.breaks if 0.0 < b < 1.0], dtype=np.float64)
    out = np.empty(n)
    # panel count is fixed across rows so the whole chunk shares one layout
    nb = 0 if x.breaks is None else np.atleast_2d(x.breaks(t[:1])).shape[1]
    panels = nb + cb.size + 1
    m = _panel_counts(amb.rule, amb.M, panels)
    step = _rows_per_chunk(panels * (m + 1))
    for s in range(0, n, step):
        tt = t[s:s + step]
        k = tt.size
        if nb:
            xb = np.clip(np.atleast_2d(x.breaks(tt)).astype(np.float64), 0.0, 1.0)
        else:
            xb = np.zeros((k, 0))
        edges = np.concatenate(
            [np.zeros((k, 1)), xb, np.broadcast_to(cb, (k, cb.size)),
             np.ones((k, 1))], axis=1)
        edges.sort(axis=1)
        nodes, h = _panel_nodes(edges[:, :-1], edges[:, 1:], m, amb.rule)
        tv = tt.astype(np.float64)[:, None, None]
        vals = np.asarray(x.gen(tv, nodes), dtype=np.float64) - \
            np.asarray(c.f(nodes), dtype=np.float64)
        vals = np.broadcast_to(vals, nodes.shape)
        if not np.all(np.isfinite(vals)):
            raise ArgumentError(f"{x.name}: non-finite value at a quadrature node")
        out[s:s + step] = _abs_integral(vals, h, amb.rule).sum(axis=1)
    return out


def weighted_distance(x, omega: WeightedSeq, c, t):
    """``omega_t * ||x_t - c||``; scalar for scalar ``t``."""
    tt = np.atleast_1d(np.asarray(t, dtype=np.int64))
    if np.any(tt < 1):
        raise ArgumentError("indices start at 1")
    vals = omega._eval(tt) * distances(x, c, tt)
    return float(vals[0]) if np.ndim(t) == 0 else vals


def weighted_profile(x, omega: WeightedSeq, c, n: int) -> np.ndarray:
    """``omega_t * ||x_t - c||`` for ``t = 1..n``."""
    t = np.arange(1, n + 1, dtype=np.int64)
    return omega.sample(n) * distances(x, c, t)


def paper_sequence(name: str, **params):
    """Registry lookup; see :mod:`roughideal.registry`."""
    from .registry import paper_sequence as _lookup
    return _lookup(name, **params)
