"""Candidate grids.

:class:`BoxGrid` is a uniform grid on an interval or box of ``R^d``; subsets
are boolean index masks and clusters are connected components of grid cells.
:class:`CandidateList` is a finite named list of elements of any ambient
(vectors, functions on ``[0, 1]`` or oracle names) without neighbour
structure, optionally with declared limit relations between its members.
"""
from __future__ import annotations

import itertools
from typing import Any, Mapping, Sequence

import numpy as np
from scipy import ndimage

from .errors import ArgumentError
from .seqspace import DistanceOracle, PointSeq, candidate_distance

__all__ = ["BoxGrid", "CandidateList", "grid_from_spec"]


class BoxGrid:
    """Uniform grid ``lo + i * step`` in each of ``dim`` coordinates."""

    is_euclidean = True

    def __init__(self, lo: float, hi: float, step: float, dim: int = 1,
                 norm: str = "euclidean"):
        if not step > 0:
            raise ArgumentError("grid step must be positive")
        if not hi >= lo:
            raise ArgumentError("grid needs hi >= lo")
        if dim < 1:
            raise ArgumentError("grid dimension must be positive")
        self.lo, self.hi, self.step, self.dim = float(lo), float(hi), float(step), int(dim)
        self.norm = norm
        count = int(np.floor((hi - lo) / step + 1e-9)) + 1
        self.axis = np.round(lo + step * np.arange(count), 12)
        self.shape = (count,) * self.dim
        mesh = np.meshgrid(*([self.axis] * self.dim), indexing="ij")
        self.points = np.stack([m.ravel() for m in mesh], axis=1)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def candidate(self, i: int) -> np.ndarray:
        return self.points[i]

    def label(self, i: int):
        p = self.points[i]
        return float(p[0]) if self.dim == 1 else tuple(float(v) for v in p)

    def labels(self) -> list:
        return [self.label(i) for i in range(self.size)]

    def index_of(self, point) -> int | None:
        p = np.atleast_1d(np.asarray(point, dtype=np.float64))
        if p.size != self.dim:
            raise ArgumentError("point dimension does not match the grid")
        k = np.round((p - self.lo) / self.step).astype(np.int64)
        if np.any(k < 0) or np.any(k >= self.shape[0]):
            return None
        if np.any(np.abs(self.axis[k] - p) > 1e-9 * max(1.0, self.step)):
            return None
        return int(np.ravel_multi_index(tuple(k), self.shape))

    def multi_index(self, i: int) -> tuple:
        return np.unravel_index(i, self.shape)

    def neighbors(self, i: int) -> list[int]:
        idx = np.array(self.multi_index(i))
        out = []
        for axis in range(self.dim):
            for delta in (-1, 1):
                k = idx.copy()
                k[axis] += delta
                if 0 <= k[axis] < self.shape[axis]:
                    out.append(int(np.ravel_multi_index(tuple(k), self.shape)))
        return out

    def distance(self, i: int, k: int) -> float:
        diff = self.points[i] - self.points[k]
        if self.norm == "sup":
            return float(np.max(np.abs(diff)))
        return float(np.linalg.norm(diff))

    def midpoint_indices(self, i: int, k: int) -> list[int]:
        """Grid nodes nearest the midpoint (all floor/ceil combinations)."""
        a = np.array(self.multi_index(i))
        b = np.array(self.multi_index(k))
        s = a + b
        choices = [sorted({int(v // 2), int(-(-v // 2))}) for v in s]
        return [int(np.ravel_multi_index(c, self.shape))
                for c in itertools.product(*choices)]

    def clusters(self, mask) -> list[np.ndarray]:
        """Connected components (axis neighbours) of the masked cells."""
        m = np.asarray(mask, dtype=bool).reshape(self.shape)
        lab, count = ndimage.label(m)
        flat = lab.ravel()
        return [np.flatnonzero(flat == c) for c in range(1, count + 1)]

    def ball_contained(self, mask, center: int, radius: float) -> bool:
        """Whether every node within ``radius`` of ``center`` is masked."""
        m = np.asarray(mask, dtype=bool)
        d = np.linalg.norm(self.points - self.points[center], axis=1) \
            if self.norm != "sup" else \
            np.max(np.abs(self.points - self.points[center]), axis=1)
        inside = d <= radius + 1e-9 * self.step
        return bool(np.all(m[inside]))

    def largest_ball(self, mask) -> float:
        """Largest radius (multiple of the step) of a grid ball inside ``mask``
        whose nodes lie on the grid."""
        m = np.asarray(mask, dtype=bool).reshape(self.shape)
        if not m.any():
            return -np.inf
        # chessboard/taxicab distance to the nearest unmasked or off-grid cell
        padded = np.pad(m, 1, constant_values=False)
        metric = "taxicab" if self.norm != "sup" else "chessboard"
        dist = ndimage.distance_transform_cdt(padded, metric=metric)
        inner = dist[(slice(1, -1),) * self.dim]
        return float((inner.max() - 1) * self.step)

    def describe(self) -> dict:
        return {"type": "box", "lo": self.lo, "hi": self.hi, "step": self.step,
                "dim": self.dim, "size": self.size}


class CandidateList:
    """Finite list of named candidates.

    ``space`` (a PointSeq, DistanceOracle or ambient) supplies distances
    between members.  ``limits`` maps a member name to names of members that
    converge to it, used by the closedness check.
    """

    is_euclidean = False

    def __init__(self, names: Sequence[str], items: Sequence[Any] | None = None,
                 space=None, limits: Mapping[str, Sequence[str]] | None = None):
        names = list(names)
        if not names:
            raise ArgumentError("candidate list is empty")
        if len(set(names)) != len(names):
            raise ArgumentError("candidate names must be unique")
        items = list(items) if items is not None else list(names)
        if len(items) != len(names):
            raise ArgumentError("names and items differ in length")
        self.names = names
        self.items = items
        self.space = space
        self.limits = {k: list(v) for k, v in (limits or {}).items()}
        for k, v in self.limits.items():
            for name in [k, *v]:
                if name not in names:
                    raise ArgumentError(f"limit relation names unknown member {name!r}")
        self._dist_cache: dict = {}

    @property
    def size(self) -> int:
        return len(self.names)

    def candidate(self, i: int):
        return self.items[i]

    def label(self, i: int):
        return self.names[i]

    def labels(self) -> list:
        return list(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def neighbors(self, i: int) -> list[int]:
        return []

    def distance(self, i: int, k: int) -> float:
        key = (min(i, k), max(i, k))
        if key not in self._dist_cache:
            if self.space is None:
                raise ArgumentError("candidate list has no distance structure")
            a, b = self.items[key[0]], self.items[key[1]]
            self._dist_cache[key] = candidate_distance(self.space, a, b)
        return self._dist_cache[key]

    def clusters(self, mask) -> list[np.ndarray]:
        return [np.array([i]) for i in np.flatnonzero(np.asarray(mask, bool))]

    def describe(self) -> dict:
        return {"type": "list", "names": list(self.names)}


def grid_from_spec(spec: Mapping) -> BoxGrid:
    return BoxGrid(spec["lo"], spec["hi"], spec["step"], spec.get("dim", 1),
                   spec.get("norm", "euclidean"))
