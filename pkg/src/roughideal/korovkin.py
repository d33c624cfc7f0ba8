"""Bernstein-type operators, equi-convergence fields and Korovkin checks.

Functions on ``[0, 1]`` are vectorised callables.  Operators are described
by :class:`OperatorSpec`; tables of ``L_t(f; x)`` for ``t = 1..T`` are built
with the Pascal recurrence on the binomial masses, so each new ``t`` reuses
the previous row instead of recomputing the masses.

An :class:`EquiField` holds, for a sequence ``f_t -> f`` and ``eps > 0``,
either the exceedance densities ``g_j(x) = |{t <= theta_j : omega_t
|f_t(x) - f(x)| > eps}| / theta_j`` (mode ``g``) or the tail submeasures
``h_j(x) = phi({t : omega_t |f_t(x) - f(x)| > eps} minus [1, j])`` (mode
``h``).  Uniform convergence to zero is judged on the per-``j`` sup over the
spatial grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .errors import ArgumentError, ConfigurationError, PreconditionError
from .ideals import IdealHandle, SupDensity, partial_sums
from .seqspace import WeightedSeq, constant_weights

__all__ = [
    "T_MAX", "UNIFORM_TOL", "binomial_masses", "bernstein_eval", "bump_h",
    "bump_peak", "korovkin_grid", "OperatorSpec", "bernstein",
    "perturbed_bernstein", "kernel_operator", "operator_table", "EquiField",
    "equi_field", "uniform_zero_verdict", "choose_delta", "validate_delta",
    "korovkin_bound_check", "korovkin_transfer_check", "tachev_decay",
    "example_5_3_adjudication", "test_function", "TEST_FUNCTIONS",
    "sqrt_weights",
]

#: largest operator index supported
T_MAX = 4096
#: default tolerance of the uniform-zero verdict
UNIFORM_TOL = 1e-2
# share of the j-list used for the trailing trend
_TREND_FRACTION = 0.25
_RENORM_EVERY = 64
_TIE_RTOL = 1e-12


def _check_x(x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(~np.isfinite(x)) or np.any(x < 0) or np.any(x > 1):
        raise ArgumentError("evaluation points must lie in [0, 1]")
    return x


def _check_t(t: int) -> int:
    t = int(t)
    if t < 1:
        raise ArgumentError("operator index must be at least 1")
    if t > T_MAX:
        raise ConfigurationError(f"operator index {t} exceeds the cap {T_MAX}")
    return t


def _fvalues(f: Callable, u: np.ndarray) -> np.ndarray:
    v = np.broadcast_to(np.asarray(f(u), dtype=np.float64), u.shape)
    if np.any(~np.isfinite(v)):
        k = int(np.flatnonzero(~np.isfinite(v))[0])
        raise ArgumentError(f"function value at {u[k]:.17g} is not finite")
    return v


# ---------------------------------------------------------------------------
# Bernstein operator and bumps

def binomial_masses(t: int, x) -> np.ndarray:
    """``C(t, k) x^k (1 - x)^(t - k)`` for ``k = 0..t``, one row per ``x``."""
    t = _check_t(t)
    x = _check_x(x)
    k = np.arange(t + 1)
    # subnormal x overflows the pmf evaluation; the log form copes with it
    tiny = (x > 0) & (x < np.finfo(np.float64).tiny)
    safe = np.where(tiny, 0.5, x)
    out = stats.binom.pmf(k[None, :], t, safe[:, None])
    if np.any(tiny):
        out[tiny] = np.exp(stats.binom.logpmf(k[None, :], t, x[tiny][:, None]))
    return out


def bernstein_eval(f: Callable, t: int, x):
    """``B_t(f; x)``; scalar in, scalar out."""
    xs = _check_x(x)
    t = _check_t(t)
    vals = _fvalues(f, np.arange(t + 1) / t)
    out = binomial_masses(t, xs) @ vals
    return float(out[0]) if np.ndim(x) == 0 else out


def bump_h(t: int, x):
    """Tent of height 1 on ``[2^-t, 2^(1-t)]`` peaking at ``1.5 * 2^-t``."""
    t = int(t)
    if t < 1:
        raise ArgumentError("bump index must be at least 1")
    xs = np.asarray(x, dtype=np.float64)
    # u = 2^(t+1) x is exact; the tent is min(u - 2, 4 - u) clipped at 0
    with np.errstate(over="ignore", invalid="ignore"):
        u = np.ldexp(xs, t + 1)
        out = np.maximum(np.minimum(u - 2.0, 4.0 - u), 0.0)
    out = np.where(np.isfinite(u), out, 0.0)
    return float(out) if np.ndim(x) == 0 else out


def bump_peak(t: int) -> float:
    return math.ldexp(1.0, 1 - t) - math.ldexp(1.0, -t - 1)


def korovkin_grid(nodes: int = 101, bump_cap: int = 64) -> np.ndarray:
    """Uniform nodes on ``[0, 1]`` plus the endpoints and peaks of the
    bumps ``h_1, ..., h_bump_cap``."""
    if nodes < 2:
        raise ArgumentError("need at least two grid nodes")
    if not 0 <= bump_cap <= 1000:
        raise ArgumentError("bump_cap must lie in [0, 1000]")
    pts = [np.linspace(0.0, 1.0, nodes)]
    for t in range(1, bump_cap + 1):
        pts.append(np.array([math.ldexp(1.0, -t), bump_peak(t),
                             math.ldexp(1.0, 1 - t)]))
    return np.unique(np.concatenate(pts))


# ---------------------------------------------------------------------------
# operators

@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """A positive linear operator family ``t -> L_t``.

    ``kind`` is ``bernstein``, ``perturbed_bernstein`` (``(1 + h_t) B_t``)
    or ``kernel``; a kernel maps ``(t, x)`` to ``(nodes, weights)`` with
    ``L_t(f; x) = weights @ f(nodes)``.
    """

    kind: str
    kernel: Callable | None = field(default=None, repr=False)
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("bernstein", "perturbed_bernstein", "kernel"):
            raise ArgumentError(f"unknown operator kind {self.kind!r}")
        if (self.kind == "kernel") != (self.kernel is not None):
            raise ArgumentError("a kernel is required exactly for kind='kernel'")

    @property
    def positivity_flag(self) -> bool:
        """Whether the weights are non-negative (sampled for kernels)."""
        if self.kind != "kernel":
            return True
        x = np.linspace(0.0, 1.0, 21)
        return all(np.all(self._kernel(t, x)[1] >= 0) for t in range(1, 9))

    def _kernel(self, t, x):
        nodes, weights = self.kernel(t, x)
        nodes = np.asarray(nodes, dtype=np.float64)
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (x.size, nodes.size):
            raise ArgumentError("kernel weights must have shape (len(x), len(nodes))")
        return nodes, weights

    def apply(self, f: Callable, t: int, x) -> np.ndarray:
        x = _check_x(x)
        t = _check_t(t)
        if self.kind == "kernel":
            nodes, weights = self._kernel(t, x)
            if np.any(weights < 0):
                raise PreconditionError("kernel weights are negative", witness=t)
            return weights @ _fvalues(f, nodes)
        out = binomial_masses(t, x) @ _fvalues(f, np.arange(t + 1) / t)
        if self.kind == "perturbed_bernstein":
            out = (1.0 + bump_h(t, x)) * out
        return out

    def describe(self) -> dict:
        return {"kind": self.kind, "name": self.name or self.kind}


def bernstein() -> OperatorSpec:
    return OperatorSpec("bernstein", name="bernstein")


def perturbed_bernstein() -> OperatorSpec:
    return OperatorSpec("perturbed_bernstein", name="perturbed_bernstein")


def kernel_operator(kernel: Callable, name: str = "kernel") -> OperatorSpec:
    return OperatorSpec("kernel", kernel, name)


def _bernstein_sweep(fs: Sequence[Callable], T: int, x: np.ndarray) -> np.ndarray:
    """``B_t(f_i; x)`` for ``t = 1..T``, shape ``(len(fs), T, len(x))``."""
    out = np.empty((len(fs), T, x.size))
    # masses live in rows 0..t of two ping-pong buffers laid out (k, x)
    cur = np.zeros((T + 1, x.size))
    nxt = np.zeros((T + 1, x.size))
    tmp = np.empty((T + 1, x.size))
    cur[0] = 1.0
    xr, yr = x[None, :], (1.0 - x)[None, :]
    for t in range(1, T + 1):
        np.multiply(cur[:t], yr, out=nxt[:t])
        nxt[t] = 0.0
        np.multiply(cur[:t], xr, out=tmp[:t])
        nxt[1:t + 1] += tmp[:t]
        cur, nxt = nxt, cur
        if t % _RENORM_EVERY == 0:
            cur[:t + 1] /= cur[:t + 1].sum(axis=0, keepdims=True)
        u = np.arange(t + 1) / t
        F = np.stack([_fvalues(f, u) for f in fs])
        out[:, t - 1, :] = F @ cur[:t + 1]
    return out


def operator_table(op: OperatorSpec, fs, T: int, x) -> np.ndarray:
    """``L_t(f; x)`` for ``t = 1..T``; shape ``(T, len(x))`` for one function,
    ``(len(fs), T, len(x))`` for a list."""
    single = callable(fs)
    fl = [fs] if single else list(fs)
    x = _check_x(x)
    T = _check_t(T)
    if op.kind == "kernel":
        tab = np.stack([np.stack([op.apply(f, t, x) for t in range(1, T + 1)])
                        for f in fl])
    else:
        tab = _bernstein_sweep(fl, T, x)
        if op.kind == "perturbed_bernstein":
            bumps = np.stack([bump_h(t, x) for t in range(1, T + 1)])
            tab = tab * (1.0 + bumps)[None, :, :]
    return tab[0] if single else tab


# ---------------------------------------------------------------------------
# equi-convergence fields

@dataclass(frozen=True, eq=False)
class EquiField:
    """Field values over ``j_list`` x ``grid`` with the per-``j`` grid sup."""

    mode: str
    values: np.ndarray = field(repr=False)
    eps: float
    j_list: tuple
    grid: np.ndarray = field(repr=False)
    horizon: int
    sup_trace: np.ndarray

    def verdict(self, tau: float = UNIFORM_TOL) -> str:
        return uniform_zero_verdict(self.sup_trace, tau)


def sqrt_weights() -> WeightedSeq:
    return WeightedSeq(lambda t: np.sqrt(t.astype(np.float64)), 0.99,
                       "omega=sqrt(t)", inf_value=1.0, liminf_value=np.inf)


def _errors_table(seq, f: Callable | None, T: int, x: np.ndarray) -> np.ndarray:
    """``|f_t(x) - f(x)|`` for ``t = 1..T``."""
    if isinstance(seq, OperatorSpec):
        if f is None:
            raise ArgumentError("an operator needs a target function")
        vals = operator_table(seq, f, T, x)
    elif isinstance(seq, np.ndarray):
        if seq.ndim != 2 or seq.shape[0] < T or seq.shape[1] != x.size:
            raise ConfigurationError("precomputed table does not cover the horizon")
        vals = seq[:T]
    else:
        vals = np.stack([np.broadcast_to(np.asarray(seq(t, x), dtype=np.float64),
                                         x.shape) for t in range(1, T + 1)])
    target = np.zeros(x.shape) if f is None else _fvalues(f, x)
    return np.abs(vals - target[None, :])


def field_horizon(omega: WeightedSeq, j_list) -> int:
    """Largest index counted by the mode-g field."""
    J = max(int(j) for j in j_list)
    return int(np.floor(partial_sums(omega, J)[-1] * (1 + _TIE_RTOL)))


def equi_field(mode: str, seq, f: Callable | None, omega: WeightedSeq, eps: float,
               j_list: Sequence[int], grid, ideal: IdealHandle | None = None,
               horizon: int | None = None, table: np.ndarray | None = None) -> EquiField:
    """Fill the ``g`` or ``h`` field of ``seq -> f``.

    ``seq`` is an :class:`OperatorSpec` (with target ``f``), a callable
    ``(t, x) -> f_t(x)`` or a precomputed ``(T, len(grid))`` table of
    ``f_t`` values.  Mode ``h`` uses the submeasure of ``ideal``
    (default: weighted density of ``omega``) evaluated to ``horizon``.
    """
    if mode not in ("g", "h"):
        raise ArgumentError("mode must be 'g' or 'h'")
    if not eps > 0:
        raise ArgumentError("eps must be positive")
    js = tuple(int(j) for j in j_list)
    if not js or min(js) < 1:
        raise ArgumentError("j_list must hold positive integers")
    x = _check_x(grid)
    need = field_horizon(omega, js)
    if mode == "g":
        n = need if horizon is None else int(horizon)
        if n < need:
            raise ConfigurationError(
                f"horizon {n} is below the largest counted index {need}")
    else:
        n = max(need, max(js)) if horizon is None else int(horizon)
    err = _errors_table(table if table is not None else seq, f, n, x)
    w = omega.sample(n)
    score = w[:, None] * err
    thr = eps * (1 + _TIE_RTOL)
    exceed = score > thr                         # (n, len(x))
    if mode == "g":
        theta = partial_sums(omega, max(js))
        cum = np.cumsum(exceed, axis=0, dtype=np.int64)
        rows = []
        for j in js:
            th = theta[j - 1]
            cut = int(np.floor(th * (1 + _TIE_RTOL)))
            rows.append(cum[cut - 1] / th)
        values = np.stack(rows)
    else:
        phi = (ideal.submeasure if ideal is not None else SupDensity(omega))
        masks = np.ascontiguousarray(exceed.T)
        values = np.stack([phi.tail_batch(masks, j) for j in js])
    return EquiField(mode, values, float(eps), js, x, n, values.max(axis=1))


def uniform_zero_verdict(sup_trace, tau: float = UNIFORM_TOL) -> str:
    """``UNIFORM-ZERO`` when the last sup is at most ``tau`` and the trailing
    trend does not rise, ``NOT-UNIFORM-ZERO`` when the last sup exceeds
    ``tau`` and the trend does not fall, else ``INCONCLUSIVE``."""
    s = np.asarray(sup_trace, dtype=np.float64)
    if s.size == 0:
        raise ArgumentError("empty sup trace")
    k = max(2, int(math.ceil(s.size * _TREND_FRACTION)))
    tail = s[-k:]
    if tail.size < 2 or np.ptp(tail) == 0:
        slope = 0.0
    else:
        slope = float(np.polyfit(np.arange(tail.size), tail, 1)[0])
    scale = 1e-12 * max(1.0, float(np.max(np.abs(tail))))
    final = float(s[-1])
    if final <= tau and slope <= scale:
        return "UNIFORM-ZERO"
    if final > tau and slope >= -scale:
        return "NOT-UNIFORM-ZERO"
    return "INCONCLUSIVE"


# ---------------------------------------------------------------------------
# Korovkin bound

def _e0(u):
    return np.ones(np.shape(u))


def _e1(u):
    return np.asarray(u, dtype=np.float64)


def _e2(u):
    return np.asarray(u, dtype=np.float64) ** 2


def _smooth_abs(u, width=0.05):
    u = np.asarray(u, dtype=np.float64)
    return np.sqrt((u - 0.5) ** 2 + width ** 2)


TEST_FUNCTIONS: dict[str, tuple[Callable, Callable]] = {
    "e0": (_e0, lambda u: np.zeros(np.shape(u))),
    "e1": (_e1, _e0),
    "e2": (_e2, lambda u: 2.0 * np.asarray(u, dtype=np.float64)),
    "sin_pi": (lambda u: np.sin(np.pi * np.asarray(u, dtype=np.float64)),
               lambda u: np.pi * np.cos(np.pi * np.asarray(u, dtype=np.float64))),
    "smooth_abs": (_smooth_abs,
                   lambda u: (np.asarray(u) - 0.5) / _smooth_abs(u)),
    "x_plus_2": (lambda u: np.asarray(u, dtype=np.float64) + 2.0, _e0),
    "x2_plus_3x": (lambda u: _e2(u) + 3.0 * _e1(u),
                   lambda u: 2.0 * np.asarray(u, dtype=np.float64) + 3.0),
}


def test_function(name: str) -> tuple[Callable, Callable]:
    """``(f, f')`` for a named test function."""
    from .errors import UnknownNameError
    if name not in TEST_FUNCTIONS:
        raise UnknownNameError(
            f"unknown function {name!r}; known: {', '.join(TEST_FUNCTIONS)}")
    return TEST_FUNCTIONS[name]


test_function.__test__ = False  # not a pytest test


def _fine(nodes: int = 2001) -> np.ndarray:
    return np.linspace(0.0, 1.0, nodes)


def _oscillation(f: Callable, delta: float, fine: np.ndarray):
    """Largest ``|f(x) - f(c)|`` over fine-grid pairs with ``|x - c| < delta``
    and the pair attaining it."""
    v = _fvalues(f, fine)
    h = fine[1] - fine[0]
    kmax = int(math.ceil(delta / h - 1e-12)) - 1
    best, pair = 0.0, None
    for k in range(1, min(kmax, fine.size - 1) + 1):
        d = np.abs(v[k:] - v[:-k])
        i = int(np.argmax(d))
        if d[i] > best:
            best, pair = float(d[i]), (float(fine[i]), float(fine[i + k]))
    return best, pair


def validate_delta(f: Callable, delta: float, level: float, fine=None) -> float:
    """Check ``|f(x) - f(c)| <= level`` whenever ``|x - c| < delta`` on a fine
    grid; returns the largest difference seen."""
    if not delta > 0:
        raise ArgumentError("delta must be positive")
    fine = _fine() if fine is None else np.asarray(fine, dtype=np.float64)
    worst, pair = _oscillation(f, delta, fine)
    if worst > level:
        raise PreconditionError(
            f"delta={delta:g} too large: |f({pair[1]:.6g}) - f({pair[0]:.6g})| = "
            f"{worst:.6g} > {level:.6g}", witness=pair)
    return worst


def choose_delta(f: Callable, level: float, fine=None) -> float:
    """Largest fine-grid multiple ``delta`` accepted by :func:`validate_delta`."""
    fine = _fine() if fine is None else np.asarray(fine, dtype=np.float64)
    h = fine[1] - fine[0]
    lo, hi = 1, fine.size
    if _oscillation(f, 2 * h, fine)[0] > level:
        raise PreconditionError("no admissible delta at the fine-grid resolution")
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _oscillation(f, (mid + 1) * h, fine)[0] <= level:
            lo = mid
        else:
            hi = mid - 1
    return (lo + 1) * h


def _sup_bound(f: Callable, fine=None) -> float:
    fine = _fine() if fine is None else fine
    return float(np.max(np.abs(_fvalues(f, fine))))


def korovkin_bound_check(f: Callable, op: OperatorSpec, t_list: Sequence[int],
                         c_grid, eps: float, mu: float = 1.0,
                         delta: float | None = None, B: float | None = None,
                         return_cells: bool = False) -> dict:
    """Check ``|L_t(f;c) - f(c)| <= eps/mu + B' sum_i |L_t(e_i;c) - e_i(c)|``
    at every ``(c, t)``, with ``B' = eps/mu + B + (2B/delta^2)
    (||e_2|| + 2||e_1|| + 1)``.

    With ``return_cells`` the ``(t, c)`` arrays of both sides are included
    under ``lhs`` and ``rhs``.
    """
    if not eps > 0 or not mu > 0:
        raise ArgumentError("eps and mu must be positive")
    level = eps / mu
    delta = choose_delta(f, level) if delta is None else float(delta)
    validate_delta(f, delta, level)
    B = _sup_bound(f) if B is None else float(B)
    b_prime = level + B + (2.0 * B / delta ** 2) * (1.0 + 2.0 + 1.0)
    c = _check_x(c_grid)
    ts = sorted({int(t) for t in t_list})
    tab = operator_table(op, [f, _e0, _e1, _e2], max(ts), c)
    rows = np.array(ts) - 1
    lhs = np.abs(tab[0, rows] - _fvalues(f, c)[None, :])
    moments = sum(np.abs(tab[i + 1, rows] - g(c)[None, :])
                  for i, g in enumerate((_e0, _e1, _e2)))
    rhs = level + b_prime * moments
    slack = rhs - lhs
    bad = np.argwhere(slack < -1e-12 * np.maximum(1.0, rhs))
    rep = {"operator": op.describe(), "eps": eps, "mu": mu, "delta": delta,
           "B": B, "B_prime": b_prime, "t_list": ts, "nodes": int(c.size),
           "cells": int(slack.size), "min_slack": float(slack.min()),
           "max_slack": float(slack.max()),
           "violations": [{"t": ts[i], "c": float(c[k])} for i, k in bad],
           "holds": bad.size == 0}
    if return_cells:
        rep["lhs"], rep["rhs"] = lhs, rhs
    return rep


def korovkin_transfer_check(f: Callable, op: OperatorSpec, omega: WeightedSeq,
                            mu: float, eps: float, j_list: Sequence[int], grid,
                            ideal: IdealHandle | None = None,
                            horizon: int | None = None, delta: float | None = None,
                            B: float | None = None, tau: float = UNIFORM_TOL) -> dict:
    """Field form of the Korovkin implication.

    With ``A = {t : omega_t > mu}``, ``eps' = beta eps / (3 mu B')`` and the
    ``h`` fields of the test functions at ``eps'``, every cell satisfies
    ``h^f_j(2 eps) <= phi(A minus [1, j]) + sum_i h^(e_i)_j(eps')``.  The
    report checks this cellwise and compares the verdicts: when the three
    test-function fields are uniformly zero at ``tau``, the ``f`` field
    should be uniformly zero at the derived tolerance
    ``phi(A minus [1, j_last]) + 3 tau``.
    """
    if not eps > 0 or not mu > 0:
        raise ArgumentError("eps and mu must be positive")
    level = eps / mu
    delta = choose_delta(f, level) if delta is None else float(delta)
    validate_delta(f, delta, level)
    B = _sup_bound(f) if B is None else float(B)
    b_prime = level + B + 8.0 * B / delta ** 2
    eps_test = omega.beta * eps / (3.0 * mu * b_prime)
    x = _check_x(grid)
    js = tuple(int(j) for j in j_list)
    n = max(field_horizon(omega, js), max(js)) if horizon is None else int(horizon)
    phi = ideal.submeasure if ideal is not None else SupDensity(omega)
    tabs = operator_table(op, [f, _e0, _e1, _e2], n, x)
    hf = equi_field("h", None, f, omega, 2 * eps, js, x, ideal, n, table=tabs[0])
    tests = [equi_field("h", None, g, omega, eps_test, js, x, ideal, n,
                        table=tabs[i + 1])
             for i, g in enumerate((_e0, _e1, _e2))]
    big = (omega.sample(n) > mu)[None, :]
    a_tail = np.array([phi.tail_batch(big, j)[0] for j in js])
    rhs = a_tail[:, None] + sum(tf.values for tf in tests)
    bad = np.argwhere(hf.values > rhs + 1e-12)
    test_verdicts = [tf.verdict(tau) for tf in tests]
    derived = float(a_tail[-1] + 3 * tau)
    f_verdict = hf.verdict(derived)
    hyp = all(v == "UNIFORM-ZERO" for v in test_verdicts)
    return {"operator": op.describe(), "eps": eps, "mu": mu, "delta": delta,
            "B_prime": b_prime, "eps_test": eps_test, "horizon": n,
            "cell_violations": int(bad.shape[0]),
            "test_verdicts": test_verdicts, "f_verdict": f_verdict,
            "derived_tolerance": derived, "hypothesis_met": hyp,
            "implication_holds": (not hyp) or f_verdict == "UNIFORM-ZERO",
            "holds": bad.shape[0] == 0 and ((not hyp) or f_verdict == "UNIFORM-ZERO")}


# ---------------------------------------------------------------------------
# remainder decay and the perturbed-operator adjudication

def _first_moment(t: int, x: np.ndarray) -> np.ndarray:
    """``B_t(e_1 - x; x)`` computed by direct summation."""
    k = np.arange(t + 1) / t
    return np.sum(binomial_masses(t, x) * (k[None, :] - x[:, None]), axis=1)


def tachev_decay(f: Callable, fprime: Callable, t_list: Sequence[int], grid=None) -> dict:
    """``D_t = sup_x sqrt(t) |B_t(f;x) - f(x) - B_t(e_1 - x; x) f'(x)|``."""
    x = _check_x(np.linspace(0, 1, 101) if grid is None else grid)
    ts = [_check_t(t) for t in t_list]
    fx, dfx = _fvalues(f, x), _fvalues(fprime, x)
    D, moments = [], []
    for t in ts:
        m1 = _first_moment(t, x)
        bt = bernstein_eval(f, t, x)
        D.append(float(np.max(np.sqrt(t) * np.abs(bt - fx - m1 * dfx))))
        moments.append(float(np.max(np.abs(m1))))
    D_arr = np.array(D)
    diffs = np.diff(D_arr)
    return {"t_list": ts, "D": D, "first_moment_max": moments,
            "strictly_decreasing": bool(np.all(diffs < 0)),
            "ratios": (D_arr[1:] / D_arr[:-1]).tolist() if len(D) > 1 else []}


def example_5_3_adjudication(f: Callable, fprime: Callable,
                             omega: WeightedSeq | None = None, eps: float = 0.1,
                             j_list: Sequence[int] = tuple(range(1, 201)),
                             grid=None, horizon: int | None = None,
                             moment_ts: Sequence[int] = (10, 50, 250),
                             decomposition_ts: Sequence[int] = (1, 2, 4, 8, 16, 32, 64),
                             tau: float = UNIFORM_TOL,
                             moment_bound: float = 1e-10) -> dict:
    """Evidence on whether ``(1 + h_t) B_t f -> f`` weighted equi-statistically.

    Reports the mode-g sup trace with its verdict (and the mode-h check for
    comparison), the measured first moments ``B_t(e_1 - x; x)`` next to the
    value ``x (1 - x)`` that the contradiction argument relies on, and the
    termwise split ``sqrt(t)|L_t f - f| <= sqrt(t)|B_t f - f| +
    sqrt(t) h_t |B_t f|``.
    """
    omega = omega or sqrt_weights()
    x = _check_x(korovkin_grid() if grid is None else grid)
    if np.min(np.abs(_fvalues(fprime, x))) <= 0:
        raise PreconditionError("f' vanishes on the grid")
    js = tuple(int(j) for j in j_list)
    n = field_horizon(omega, js) if horizon is None else int(horizon)
    op = perturbed_bernstein()
    btab = operator_table(bernstein(), f, n, x)
    bumps = np.stack([bump_h(t, x) for t in range(1, n + 1)])
    ltab = (1.0 + bumps) * btab
    gf = equi_field("g", op, f, omega, eps, js, x, horizon=n, table=ltab)
    hf = equi_field("h", op, f, omega, eps, js, x, horizon=n, table=ltab)

    mpanel = []
    for t in moment_ts:
        m1 = _first_moment(int(t), x)
        mpanel.append({"t": int(t), "max_abs_measured": float(np.max(np.abs(m1))),
                       "max_claimed_x_1_minus_x": float(np.max(x * (1 - x))),
                       "passes": bool(np.max(np.abs(m1)) <= moment_bound)})

    fx = _fvalues(f, x)
    decomp = []
    for t in decomposition_ts:
        if t > n:
            continue
        s = math.sqrt(t)
        total = s * np.abs(ltab[t - 1] - fx)
        bern = s * np.abs(btab[t - 1] - fx)
        bump = s * bumps[t - 1] * np.abs(btab[t - 1])
        decomp.append({"t": int(t), "total_max": float(total.max()),
                       "bernstein_max": float(bern.max()),
                       "bump_max": float(bump.max()),
                       "split_holds": bool(np.all(total <= bern + bump + 1e-12))})
    verdict = gf.verdict(tau)
    return {"eps": eps, "weights": omega.name, "j_max": max(js), "horizon": n,
            "grid_nodes": int(x.size), "tau": tau,
            "g_sup_trace": gf.sup_trace.tolist(),
            "h_sup_trace": hf.sup_trace.tolist(),
            "verdict": verdict, "h_verdict": hf.verdict(tau),
            "bridge_agrees": verdict == hf.verdict(tau),
            "first_moment": mpanel,
            "first_moment_passes": all(m["passes"] for m in mpanel),
            "decomposition": decomp}
