"""Named sequences with their weights.

Every entry returns ``(x, omega)`` where ``x`` is a :class:`PointSeq` or a
:class:`DistanceOracle` and ``omega`` a :class:`WeightedSeq`.  Keyword
parameters tune the constructions (dimension, roughness, quadrature size).
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import ArgumentError, UnknownNameError
from .seqspace import (CFunction, DistanceOracle, EuclideanD, PointSeq,
                       QuadratureC01, TruncatedSup, WeightedSeq,
                       constant_weights)

__all__ = ["paper_sequence", "registry_names", "describe", "basis_vector",
           "perturbed_midpoint", "ramp_function", "monomial", "zero_function",
           "lim_gamma_sequence", "block_sequence", "example_4_4_candidates"]


def _is_square(t):
    t = np.asarray(t, dtype=np.int64)
    r = np.floor(np.sqrt(t.astype(np.float64))).astype(np.int64)
    r = np.where((r + 1) * (r + 1) <= t, r + 1, r)
    r = np.where(r * r > t, r - 1, r)
    return r * r == t


def _v2_index(t):
    t = np.asarray(t).astype(np.int64)
    low = t & -t
    return np.round(np.log2(low.astype(np.float64))).astype(np.int64) + 1


# ---------------------------------------------------------------------------
# candidates

def basis_vector(k: int, d: int = 256) -> np.ndarray:
    if not 1 <= k <= d:
        raise ArgumentError("basis index out of range")
    v = np.zeros(d)
    v[k - 1] = 1.0
    return v


def perturbed_midpoint(eta: float, d: int = 256) -> np.ndarray:
    """1/2 on the first two coordinates and ``-eta/2`` elsewhere."""
    v = np.full(d, -eta / 2.0)
    v[:2] = 0.5
    return v


def ramp_function(k: int) -> CFunction:
    """0 up to 1/2, then rising with slope k until it reaches 1."""
    return CFunction(lambda u: np.clip(k * (np.asarray(u) - 0.5), 0.0, 1.0),
                     tuple(b for b in (0.5, 0.5 + 1.0 / k) if b < 1.0),
                     f"ramp{k}")


def monomial(j: int) -> CFunction:
    """``u -> u^(j-1)``."""
    return CFunction(lambda u: np.asarray(u, dtype=np.float64) ** (j - 1),
                     (), f"g{j}")


def zero_function() -> CFunction:
    return CFunction(lambda u: np.zeros(np.shape(u)), (), "0")


# ---------------------------------------------------------------------------
# entries

def _sec2_example(**_):
    def gen(t):
        tf = t.astype(np.float64)
        off = (-1.0) ** tf / tf + 1.0 / tf ** 2
        return np.where(_is_square(t), tf ** 2, off)
    x = PointSeq(EuclideanD(1), gen, "sec2_example")
    w = WeightedSeq(lambda t: t.astype(np.float64), 0.99, "omega=t",
                    inf_value=1.0, liminf_value=np.inf)
    return x, w


def _note_2_5(beta: float = 1.0, d: int = 256, **_):
    def gen(t):
        out = np.zeros((t.size, d))
        out[np.arange(t.size), t - 1] = 1.0
        return out
    x = PointSeq(TruncatedSup(d), gen, "note_2_5", max_coord=lambda t: t,
                 params={"d": d})
    w = constant_weights(beta, name=f"omega={beta:g}")
    return x, w


def _example_2_12(d: int = 256, **_):
    x, _w = _note_2_5(1.0, d)
    x = PointSeq(x.ambient, x.gen, "example_2_12", max_coord=x.max_coord,
                 params={"d": d})
    w = WeightedSeq(lambda t: 2.0 + 1.0 / t, 2.0, "omega=2+1/t", mu=3.0,
                    inf_value=2.0, liminf_value=2.0)
    return x, w


def _example_3_1(M: int = 512, rule: str = "simpson", **_):
    def gen(t, u):
        return np.clip(t * (u - 0.5), 0.0, 1.0)

    def breaks(t):
        t = np.asarray(t, dtype=np.float64)
        return np.stack([np.full(t.shape, 0.5),
                         np.minimum(0.5 + 1.0 / t, 1.0)], axis=1)
    x = PointSeq(QuadratureC01(M, rule), gen, "example_3_1", breaks=breaks)

    def weights(t):
        tf = t.astype(np.float64)
        return np.where(_is_square(t), tf ** 2, (1.0 + tf) / tf)
    w = WeightedSeq(weights, 0.99, "omega=(1+t)/t|t^2", mu=2.0,
                    inf_value=1.0, liminf_value=1.0)
    return x, w


def _remark_4_3(**_):
    x = PointSeq(EuclideanD(1), lambda t: 1.0 / t.astype(np.float64),
                 "remark_4_3")
    w = WeightedSeq(lambda t: t.astype(np.float64) ** 2, 0.99, "omega=t^2",
                    inf_value=1.0, liminf_value=np.inf)
    return x, w


def _example_4_4(r: float = 0.5, M: int = 512, rule: str = "simpson", **_):
    def gen(t, u):
        j = _v2_index(t)
        return u ** (j - 1) + 2.0 * r * u / t
    x = PointSeq(QuadratureC01(M, rule), gen, "example_4_4", params={"r": r})
    w = WeightedSeq(lambda t: t.astype(np.float64), 0.99, "omega=t",
                    inf_value=1.0, liminf_value=np.inf)
    return x, w


def _example_4_6(**_):
    def dist(t, name):
        t = np.asarray(t, dtype=np.int64)
        if name == "0":
            return np.ones(t.shape)
        # even t: P_t - P keeps the diagonal 1/i for i > t; odd t: Q_t - P
        # has -1 in the first coordinate
        return np.where(t % 2 == 0, 1.0 / (t + 1.0), 1.0)
    x = DistanceOracle(("0", "P"), dist, "example_4_6",
                       mutual={frozenset(("0", "P")): 1.0})

    def weights(t):
        return np.where(t % 2 == 0, np.sqrt(t.astype(np.float64)), 1.0)
    w = WeightedSeq(weights, 0.99, "omega=sqrt(t)|1", inf_value=1.0,
                    liminf_value=1.0)
    return x, w


def lim_gamma_sequence(r: float = 1.0, omega: WeightedSeq | None = None,
                       in_set: Callable[[np.ndarray], np.ndarray] | None = None,
                       d: int = 1, norm: str = "euclidean"):
    """``r s_t / omega_t`` on the set, ``t s_t`` off it, with unit directions
    ``s_t = (-1)^t e_(t mod d)``."""
    omega = omega or constant_weights(1.0)
    in_set = in_set or (lambda t: t % 2 == 0)

    def gen(t):
        tf = t.astype(np.float64)
        sign = (-1.0) ** tf
        scale = np.where(in_set(t), r / omega.sample(int(t.max()))[t - 1], tf)
        out = np.zeros((t.size, d))
        out[np.arange(t.size), (t - 1) % d] = sign * scale
        return out
    x = PointSeq(EuclideanD(d, norm), gen, "thm_4_9", params={"r": r, "d": d})
    return x, omega


def block_sequence(points: Sequence, blocks="dyadic",
                   omega: WeightedSeq | None = None):
    """Constant ``a_i`` on the i-th block of a partition of N.

    ``blocks="dyadic"`` uses the odd multiples of ``2^(i-1)``, cycling through
    ``points`` when there are more blocks than points; an integer ``m`` uses
    the residue classes mod ``m`` (block ``i`` is ``t = i mod m``).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[0] == 1 and np.ndim(points) == 1:
        pts = pts.T
    k, d = pts.shape
    if k == 0:
        raise ArgumentError("need at least one point")
    if blocks == "dyadic":
        def gen(t):
            return pts[(_v2_index(t) - 1) % k]
    else:
        m = int(blocks)
        if m < k:
            raise ArgumentError("residue blocks need m >= number of points")

        def gen(t):
            idx = (t - 1) % m
            # blocks beyond the listed points carry the first point
            return pts[np.where(idx < k, idx, 0)]
    x = PointSeq(EuclideanD(d), gen, "thm_4_10",
                 params={"blocks": blocks, "points": pts.tolist()})
    return x, omega or constant_weights(1.0)


def _thm_4_9(r: float = 1.0, d: int = 1, **_):
    return lim_gamma_sequence(r=r, d=d)


def _thm_4_10(points=(0.0, 1.0), blocks="dyadic", **_):
    return block_sequence(points, blocks)


def _const_zero(d: int = 1, **_):
    x = PointSeq(EuclideanD(d), lambda t: np.zeros((t.size, d)), "const_zero")
    return x, constant_weights(1.0)


def _alternating(**_):
    x = PointSeq(EuclideanD(1), lambda t: (-1.0) ** t.astype(np.float64),
                 "alternating")
    return x, constant_weights(1.0)


_REGISTRY = {
    "sec2_example": (_sec2_example,
                     "(-1)^t/t + 1/t^2 off squares, t^2 on squares; weights t"),
    "note_2_5": (_note_2_5, "unit vectors e_t in truncated l-infinity; constant weights"),
    "example_2_12": (_example_2_12, "unit vectors e_t; weights 2 + 1/t"),
    "example_3_1": (_example_3_1,
                    "ramps in C[0,1] with the integral norm; weights (1+t)/t, t^2 on squares"),
    "remark_4_3": (_remark_4_3, "x_t = 1/t; weights t^2"),
    "example_4_4": (_example_4_4,
                    "u^(j-1) + 2ru/k on the j-th dyadic block, integral norm; weights k"),
    "example_4_6": (_example_4_6,
                    "operator-norm distance profiles to 0 and P; weights sqrt(t) on evens, 1 on odds"),
    "thm_4_9": (_thm_4_9, "r s_t on the evens, t s_t on the odds; unit weights"),
    "thm_4_10": (_thm_4_10, "constant on the blocks of a partition"),
    "const_zero": (_const_zero, "x_t = 0; unit weights"),
    "alternating": (_alternating, "x_t = (-1)^t; unit weights"),
}


def registry_names() -> list[str]:
    return list(_REGISTRY)


def describe(name: str) -> str:
    if name not in _REGISTRY:
        raise UnknownNameError(f"unknown sequence {name!r}")
    return _REGISTRY[name][1]


def paper_sequence(name: str, **params):
    """Return ``(x, omega)`` for a registered sequence."""
    if name not in _REGISTRY:
        raise UnknownNameError(
            f"unknown sequence {name!r}; known: {', '.join(_REGISTRY)}")
    return _REGISTRY[name][0](**params)


def example_4_4_candidates(x=None, j_max: int = 6):
    """``g_1, ..., g_jmax`` and ``0`` with ``g_j -> 0`` declared as a limit."""
    from .grids import CandidateList
    x = x if x is not None else _example_4_4()[0]
    names = [f"g{j}" for j in range(1, j_max + 1)] + ["0"]
    items = [monomial(j) for j in range(1, j_max + 1)] + [zero_function()]
    return CandidateList(names, items, x, {"0": names[:-1]})
