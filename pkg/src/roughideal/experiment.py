"""Experiment configurations and the task runners behind the command line.

A configuration is one JSON object.  :func:`validate` checks every field
(types, signs, orderings, unknown keys) and raises :class:`ConfigError`
with the dotted path of the first offending field before anything is
computed.  :func:`run` executes a validated configuration and returns a
:class:`RunResult` holding a JSON-ready summary and one CSV table.

Specs shared by several tasks:

* sequence -- ``"name"`` or ``{"kind": "registry", "name": ..., "params":
  {...}}`` or ``{"kind": "expr", "expr": "<expression in t>"}`` (a real
  sequence);
* weights -- ``{"kind": "constant", "value": v}``, ``{"kind": "sqrt"}`` or
  ``{"kind": "expr", "expr": ..., "beta": b, "mu": m}``;
* ideal -- ``{"kind": "natural_density" | "weighted_density" | "fin" |
  "custom", "weights": <weights>, "tau_in": a, "tau_out": b, ...}``;
* grid -- ``{"lo", "hi", "step", "dim", "norm"}`` or ``{"kind":
  "candidates", "names": [...], "limits": {...}}``;
* function -- a name from :data:`~roughideal.korovkin.TEST_FUNCTIONS` or
  ``{"expr": "<expression in x>", "derivative": "<expression in x>"}``.
"""
from __future__ import annotations

import copy
import inspect
import math
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from . import __version__
from . import cluster, ideals, korovkin, registry, roughlim
from .errors import (ConfigError, InconclusiveError, RoughIdealError,
                     UnknownNameError)
from .expr import ExprError, compile_expr
from .grids import BoxGrid, CandidateList
from .seqspace import (DistanceOracle, EuclideanD, PointSeq, QuadratureC01,
                       TruncatedSup, WeightedSeq, constant_weights)

__all__ = ["TASKS", "RunResult", "validate", "run", "csv_columns"]


@dataclass
class RunResult:
    summary: dict
    header: list
    rows: list
    status: str = "ok"           # ok | inconclusive


# ---------------------------------------------------------------------------
# field checks

def _keys(d, allowed: set, path: str, required: Sequence[str] = ()):
    if not isinstance(d, Mapping):
        raise ConfigError("expected an object", path)
    for k in d:
        if k not in allowed:
            raise ConfigError(f"unknown key {k!r}", f"{path}.{k}" if path else k)
    for k in required:
        if k not in d:
            raise ConfigError("required field missing", f"{path}.{k}" if path else k)


def _p(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _num(v, path: str, positive=False, nonneg=False, integer=False,
         lo=None, hi=None) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError("expected a number", path)
    if integer and not float(v).is_integer():
        raise ConfigError("expected an integer", path)
    if not math.isfinite(v):
        raise ConfigError("expected a finite number", path)
    if positive and not v > 0:
        raise ConfigError("must be positive", path)
    if nonneg and v < 0:
        raise ConfigError("must be non-negative", path)
    if lo is not None and v < lo:
        raise ConfigError(f"must be at least {lo}", path)
    if hi is not None and v > hi:
        raise ConfigError(f"must be at most {hi}", path)
    return int(v) if integer else float(v)


def _numlist(v, path: str, decreasing=False, increasing=False, **kw) -> list:
    if not isinstance(v, list) or not v:
        raise ConfigError("expected a non-empty list", path)
    out = [_num(e, f"{path}[{i}]", **kw) for i, e in enumerate(v)]
    if decreasing and any(b >= a for a, b in zip(out, out[1:])):
        raise ConfigError("must be strictly decreasing", path)
    if increasing and any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError("must be strictly increasing", path)
    return out


def _str(v, path: str, choices=None) -> str:
    if not isinstance(v, str):
        raise ConfigError("expected a string", path)
    if choices is not None and v not in choices:
        raise ConfigError(f"must be one of {sorted(choices)}", path)
    return v


def _expr(src, path: str, var: str):
    try:
        return compile_expr(_str(src, path), var)
    except ExprError as exc:
        raise ConfigError(str(exc), path) from None


# ---------------------------------------------------------------------------
# config builders

def build_weights(spec, path: str = "weights") -> WeightedSeq:
    if isinstance(spec, str):
        spec = {"kind": spec}
    _keys(spec, {"kind", "value", "expr", "beta", "mu", "name"}, path, ["kind"])
    kind = _str(spec["kind"], _p(path, "kind"), {"constant", "sqrt", "expr"})
    if kind == "constant":
        value = _num(spec.get("value", 1.0), _p(path, "value"), positive=True)
        return constant_weights(value)
    if kind == "sqrt":
        return korovkin.sqrt_weights()
    if "expr" not in spec or "beta" not in spec:
        raise ConfigError("expr weights need 'expr' and 'beta'", path)
    fn = _expr(spec["expr"], _p(path, "expr"), "t")
    beta = _num(spec["beta"], _p(path, "beta"), positive=True)
    mu = None if spec.get("mu") is None else _num(spec["mu"], _p(path, "mu"), positive=True)
    try:
        return WeightedSeq(lambda t: fn(t.astype(np.float64)), beta,
                           spec.get("name", f"omega={spec['expr']}"), mu=mu)
    except RoughIdealError as exc:
        raise ConfigError(str(exc), _p(path, "expr")) from None


def build_ideal(spec, path: str = "ideal", thresholds=None, horizon=None):
    spec = {"kind": "natural_density"} if spec is None else spec
    if isinstance(spec, str):
        spec = {"kind": spec}
    _keys(spec, {"kind", "weights", "tau_in", "tau_out", "ceiling", "table",
                 "rule", "tail"}, path, ["kind"])
    kind = _str(spec["kind"], _p(path, "kind"),
                {"natural_density", "weighted_density", "fin", "custom"})
    tau_in = _num(spec.get("tau_in", 0.05), _p(path, "tau_in"), positive=True)
    tau_out = _num(spec.get("tau_out", 0.2), _p(path, "tau_out"), positive=True)
    if thresholds is not None:
        tau_in, tau_out = thresholds
    if not tau_in < tau_out:
        raise ConfigError("need tau_in < tau_out", _p(path, "tau_out"))
    kw = {"tau_in": tau_in, "tau_out": tau_out}
    if kind == "natural_density":
        h = ideals.natural_density(**kw)
    elif kind == "weighted_density":
        if "weights" not in spec:
            raise ConfigError("weighted density needs weights", _p(path, "weights"))
        h = ideals.weighted_density(build_weights(spec["weights"], _p(path, "weights")), **kw)
    elif kind == "fin":
        ceiling = _num(spec.get("ceiling", 1.0), _p(path, "ceiling"), positive=True)
        h = ideals.IdealHandle("fin", ideals.Counting(ceiling), ideals._BUILTIN_TAGS, **kw)
    else:
        table = spec.get("table", {})
        if not isinstance(table, Mapping):
            raise ConfigError("expected an object", _p(path, "table"))
        tab = {}
        for k, v in table.items():
            if not re.fullmatch(r"[1-9][0-9]*", str(k)):
                raise ConfigError("table keys must be positive integers", _p(path, f"table.{k}"))
            tab[int(k)] = _num(v, _p(path, f"table.{k}"), nonneg=True)
        rule = _str(spec.get("rule", "max"), _p(path, "rule"), {"max", "sum"})
        tail = _num(spec.get("tail", 0.0), _p(path, "tail"), nonneg=True)
        h = ideals.custom(ideals.CustomTable(tab, rule, tail), **kw)
    return h


def _registry_entry(name: str, params, path: str):
    if name not in registry.registry_names():
        raise ConfigError(f"unknown sequence {name!r}", path)
    params = {} if params is None else params
    if not isinstance(params, Mapping):
        raise ConfigError("expected an object", _p(path, "params"))
    fn = registry._REGISTRY[name][0]
    sig = inspect.signature(fn)
    known = {p for p, q in sig.parameters.items() if q.kind is q.KEYWORD_ONLY
             or q.kind is q.POSITIONAL_OR_KEYWORD}
    for k in params:
        if k not in known:
            raise ConfigError(f"unknown parameter {k!r} for {name}", _p(path, f"params.{k}"))
    try:
        return registry.paper_sequence(name, **params)
    except (RoughIdealError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc), _p(path, "params")) from None


def build_sequence(spec, path: str = "sequence"):
    if isinstance(spec, str):
        spec = {"kind": "registry", "name": spec}
    _keys(spec, {"kind", "name", "params", "expr"}, path, ["kind"])
    kind = _str(spec["kind"], _p(path, "kind"), {"registry", "expr"})
    if kind == "registry":
        if "name" not in spec:
            raise ConfigError("required field missing", _p(path, "name"))
        return _registry_entry(_str(spec["name"], _p(path, "name")),
                               spec.get("params"), path)
    if "expr" not in spec:
        raise ConfigError("required field missing", _p(path, "expr"))
    fn = _expr(spec["expr"], _p(path, "expr"), "t")
    x = PointSeq(EuclideanD(1), lambda t: fn(t.astype(np.float64)),
                 f"expr[{spec['expr']}]")
    return x, constant_weights(1.0)


def _named_candidate(name: str, x, path: str):
    amb = getattr(x, "ambient", None)
    if isinstance(x, DistanceOracle):
        if name not in x.candidates:
            raise ConfigError(f"unknown candidate {name!r}", path)
        return name
    if isinstance(amb, QuadratureC01):
        if name == "0":
            return registry.zero_function()
        m = re.fullmatch(r"g([1-9][0-9]*)", name)
        if m:
            return registry.monomial(int(m.group(1)))
        m = re.fullmatch(r"ramp([1-9][0-9]*)", name)
        if m:
            return registry.ramp_function(int(m.group(1)))
        raise ConfigError(f"unknown function candidate {name!r} (use 0, g<j>, ramp<k>)", path)
    if isinstance(amb, TruncatedSup):
        if name == "0":
            return np.zeros(amb.d)
        m = re.fullmatch(r"e([1-9][0-9]*)", name)
        if m and int(m.group(1)) <= amb.d:
            return registry.basis_vector(int(m.group(1)), amb.d)
        m = re.fullmatch(r"midpoint:([0-9.eE+-]+)", name)
        if m:
            return registry.perturbed_midpoint(float(m.group(1)), amb.d)
        raise ConfigError(f"unknown vector candidate {name!r} (use 0, e<k>, midpoint:<eta>)", path)
    try:
        vals = [float(v) for v in name.split(",")]
    except ValueError:
        raise ConfigError(f"candidate {name!r} is not a point", path) from None
    if len(vals) != amb.d:
        raise ConfigError("candidate dimension does not match the sequence", path)
    return np.array(vals)


def build_grid(spec, x, path: str = "grid"):
    if not isinstance(spec, Mapping):
        raise ConfigError("expected an object", path)
    if spec.get("kind", "box") == "candidates":
        _keys(spec, {"kind", "names", "limits"}, path, ["names"])
        names = spec["names"]
        if not isinstance(names, list) or not names or \
                not all(isinstance(n, str) for n in names):
            raise ConfigError("expected a non-empty list of names", _p(path, "names"))
        if len(set(names)) != len(names):
            raise ConfigError("names must be unique", _p(path, "names"))
        items = [_named_candidate(n, x, f"{path}.names[{i}]") for i, n in enumerate(names)]
        limits = spec.get("limits", {})
        if not isinstance(limits, Mapping):
            raise ConfigError("expected an object", _p(path, "limits"))
        for k, v in limits.items():
            if k not in names or not isinstance(v, list) or any(a not in names for a in v):
                raise ConfigError("limit relations must name listed candidates",
                                  _p(path, f"limits.{k}"))
        return CandidateList(names, items, x, limits)
    _keys(spec, {"kind", "lo", "hi", "step", "dim", "norm"}, path, ["lo", "hi", "step"])
    lo = _num(spec["lo"], _p(path, "lo"))
    hi = _num(spec["hi"], _p(path, "hi"))
    if not hi >= lo:
        raise ConfigError("need hi >= lo", _p(path, "hi"))
    step = _num(spec["step"], _p(path, "step"), positive=True)
    dim = _num(spec.get("dim", 1), _p(path, "dim"), integer=True, lo=1, hi=3)
    norm = _str(spec.get("norm", "euclidean"), _p(path, "norm"), {"euclidean", "sup"})
    count = (hi - lo) / step + 1
    if count ** dim > 2_000_000:
        raise ConfigError("grid has more than 2e6 nodes", path)
    if not isinstance(getattr(x, "ambient", None), EuclideanD):
        raise ConfigError("box grids need a Euclidean sequence", path)
    if x.ambient.d != dim:
        raise ConfigError(f"grid dimension {dim} does not match the sequence "
                          f"dimension {x.ambient.d}", _p(path, "dim"))
    return BoxGrid(lo, hi, step, dim, norm)


def build_function(spec, path: str = "f"):
    if isinstance(spec, str):
        try:
            return korovkin.test_function(spec)
        except UnknownNameError as exc:
            raise ConfigError(str(exc), path) from None
    _keys(spec, {"expr", "derivative"}, path, ["expr"])
    f = _expr(spec["expr"], _p(path, "expr"), "x")
    d = _expr(spec["derivative"], _p(path, "derivative"), "x") if "derivative" in spec else None
    return f, d


def build_set(spec, path: str = "set"):
    if isinstance(spec, str):
        spec = {"kind": spec}
    _keys(spec, {"kind", "first", "step", "j", "elements", "expr"}, path, ["kind"])
    kind = _str(spec["kind"], _p(path, "kind"),
                {"naturals", "evens", "odds", "squares", "progression",
                 "dyadic_block", "explicit", "expr"})
    if kind in ("naturals", "evens", "odds", "squares"):
        return getattr(ideals, kind)()
    if kind == "progression":
        first = _num(spec.get("first", 1), _p(path, "first"), integer=True, lo=1)
        step = _num(spec.get("step", 1), _p(path, "step"), integer=True, lo=1)
        return ideals.progression(first, step)
    if kind == "dyadic_block":
        return ideals.dyadic_block(_num(spec.get("j", 1), _p(path, "j"), integer=True, lo=1))
    if kind == "explicit":
        el = spec.get("elements")
        if not isinstance(el, list):
            raise ConfigError("expected a list", _p(path, "elements"))
        vals = [_num(e, f"{path}.elements[{i}]", integer=True, lo=1) for i, e in enumerate(el)]
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ConfigError("elements must be strictly increasing", _p(path, "elements"))
        return ideals.ExplicitSet(vals)
    fn = _expr(spec.get("expr"), _p(path, "expr"), "t")
    return ideals.PredicateSet(lambda t: fn(t.astype(np.float64)) != 0,
                               f"expr[{spec['expr']}]")


def _eps(cfg, key="eps_grid"):
    if key not in cfg:
        return roughlim.DEFAULT_EPS
    return tuple(_numlist(cfg[key], key, decreasing=True, positive=True))


def _horizon(cfg, default=None):
    if "horizon" not in cfg:
        return default
    return _num(cfg["horizon"], "horizon", integer=True, lo=10, hi=10_000_000)


def _thresholds(cfg):
    if "thresholds" not in cfg:
        return None
    v = _numlist(cfg["thresholds"], "thresholds", positive=True)
    if len(v) != 2 or not v[0] < v[1]:
        raise ConfigError("expected [tau_in, tau_out] with tau_in < tau_out", "thresholds")
    return tuple(v)


def _j_list(v, path="j_list"):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        J = _num(v, path, integer=True, lo=1, hi=4096)
        return list(range(1, J + 1))
    return [int(j) for j in _numlist(v, path, increasing=True, integer=True, lo=1)]


def _r_values(cfg, single_default=None):
    if "r_grid" in cfg:
        return _numlist(cfg["r_grid"], "r_grid", nonneg=True)
    if "r" in cfg:
        return [_num(cfg["r"], "r", nonneg=True)]
    if single_default is None:
        raise ConfigError("required field missing", "r")
    return [single_default]


def _label(v):
    if isinstance(v, tuple):
        return ",".join(repr(float(c)) for c in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# task runners

_COMMON = {"task", "seed"}
_SCAN = _COMMON | {"sequence", "weights", "ideal", "grid", "eps_grid", "horizon",
                   "thresholds"}


def _problem(cfg):
    if "sequence" not in cfg:
        raise ConfigError("required field missing", "sequence")
    x, omega = build_sequence(cfg["sequence"], "sequence")
    if "weights" in cfg:
        omega = build_weights(cfg["weights"])
    ideal = build_ideal(cfg.get("ideal"), thresholds=_thresholds(cfg))
    if "grid" not in cfg:
        raise ConfigError("required field missing", "grid")
    grid = build_grid(cfg["grid"], x)
    n = _horizon(cfg, ideal.horizon_default)
    return x, omega, ideal, grid, n


def _verdict_rows(grid, codes, agg):
    names = {1: "InIdeal", -1: "NotInIdeal", 0: "Undecided"}
    return [[_label(grid.label(i))] + [names[int(c)] for c in codes[i]] + [agg[i]]
            for i in range(grid.size)]


def _clusters_summary(grid, mask):
    out = []
    for comp in grid.clusters(mask):
        labels = [grid.label(int(i)) for i in comp]
        if isinstance(grid, BoxGrid) and grid.dim == 1:
            out.append({"lo": labels[0], "hi": labels[-1], "size": len(labels)})
        else:
            out.append({"members": [_label(v) for v in labels[:50]], "size": len(labels)})
    return out


def _run_density(cfg, threads):
    _keys(cfg, _COMMON | {"set", "ideal", "weights", "horizon", "thresholds", "j",
                          "trace_points"}, "")
    A = build_set(cfg.get("set", "evens"))
    ideal = build_ideal(cfg.get("ideal"), thresholds=_thresholds(cfg))
    n = _horizon(cfg, ideal.horizon_default)
    omega = build_weights(cfg["weights"]) if "weights" in cfg else (
        ideal.submeasure.weights if isinstance(ideal.submeasure, ideals.SupDensity)
        else constant_weights(1.0))
    j = _num(cfg.get("j", n // 2), "j", integer=True, nonneg=True)
    points = _num(cfg.get("trace_points", 1000), "trace_points", integer=True, lo=1)
    v = ideals.membership_verdict(A, ideal, n)
    tail = ideals.exh_tail(A, ideal.submeasure, j, n)
    dens = ideals.weighted_density_estimate(A, omega, n)
    stride = max(1, math.ceil(n / points))
    idx = list(range(stride - 1, n, stride))
    if idx[-1] != n - 1:
        idx.append(n - 1)
    rows = [[i + 1, float(dens.theta[i]), float(dens.trace[i])] for i in idx]
    summary = {"set": A.name, "ideal": ideal.describe(), "horizon": n,
               "verdict": v.verdict.value, "tail_value": v.tail_value,
               "lower_bound": v.lower_bound, "exh_tail": {"j": j, "value": tail},
               "weighted_density": {"weights": omega.name, "value": dens.value}}
    return RunResult(summary, ["t", "theta", "density"], rows)


def _run_limit_set(cfg, threads):
    _keys(cfg, _SCAN | {"r"}, "", ["r"])
    x, omega, ideal, grid, n = _problem(cfg)
    r = _num(cfg["r"], "r", nonneg=True)
    est = roughlim.scan_limit_set(grid, r, x, omega, ideal, _eps(cfg), n, threads=threads)
    agg = ["accepted" if est.inner[i] else ("rejected" if not est.outer[i] else "undecided")
           for i in range(grid.size)]
    summary = {"r": r, "horizon": n, "eps_grid": list(est.eps_grid),
               "thresholds": list(est.verdict_params), "status": est.status(),
               "inner_size": int(est.inner.sum()), "outer_size": int(est.outer.sum()),
               "undecided_size": int(est.undecided.sum()),
               "inner_clusters": _clusters_summary(grid, est.inner),
               "single_cluster": len(est.clusters()) == 1}
    if not isinstance(grid, BoxGrid):
        summary["inner"] = [_label(v) for v in est.inner_labels()]
    header = ["candidate"] + [f"eps={e!r}" for e in est.eps_grid] + ["aggregate"]
    return RunResult(summary, header, _verdict_rows(grid, est.codes, agg))


def _run_min_degree(cfg, threads):
    _keys(cfg, _SCAN | {"bracket0", "tol", "max_iter"}, "")
    x, omega, ideal, grid, n = _problem(cfg)
    b0 = tuple(_numlist(cfg.get("bracket0", [0.0, 2.0]), "bracket0", increasing=True,
                        nonneg=True))
    if len(b0) != 2:
        raise ConfigError("expected [lo, hi]", "bracket0")
    tol = _num(cfg.get("tol", 0.05), "tol", positive=True)
    max_iter = _num(cfg.get("max_iter", 60), "max_iter", integer=True, lo=1)
    est = roughlim.minimal_degree(x, omega, ideal, b0, tol, grid, _eps(cfg), n,
                                  max_iter=max_iter, threads=threads)
    summary = {"bracket": list(est.bracket), "width": est.width,
               "witness": _label(est.witness), "tol": tol,
               "r_scan_lo": est.r_scan_lo, "r_scan_hi": est.r_scan_hi,
               "pinned": est.pinned, "iterations": est.iterations,
               "horizon": est.horizon}
    rows = [[r, h, st, c] for r, h, st, c in est.path]
    return RunResult(summary, ["r", "horizon", "status", "accepted"], rows)


def _run_structure(cfg, threads):
    _keys(cfg, _SCAN | {"r", "r_grid", "sigmas", "k_max"}, "")
    x, omega, ideal, grid, n = _problem(cfg)
    rs = sorted(_r_values(cfg))
    eps = _eps(cfg)
    seed = _num(cfg.get("seed", 0), "seed", integer=True, nonneg=True)
    sig = _numlist(cfg["sigmas"], "sigmas", positive=True) if "sigmas" in cfg else None
    k_max = _num(cfg.get("k_max", 5), "k_max", integer=True, lo=1, hi=20)
    ests = [roughlim.scan_limit_set(grid, r, x, omega, ideal, eps, n, threads=threads)
            for r in rs]
    reports, rows = [], []
    clusters = [cluster.scan_cluster_set(grid, r, x, omega, ideal, eps, n, threads=threads)
                for r in rs]
    for est, cl in zip(ests, clusters):
        rep = roughlim.structural_report(est, omega, sig, seed=seed)
        inter = roughlim.check_intersection_identity(grid, est.r, x, omega, ideal, eps,
                                                     n, k_max)
        lig = cluster.check_lim_in_gamma(est, cl)
        rep["intersection"] = inter
        rep["lim_in_gamma"] = lig
        rep["clusters"] = len(est.clusters())
        reports.append(rep)
        rows.append([est.r, int(est.inner.sum()), len(est.clusters()),
                     rep["diameter"]["diameter"], rep["diameter"]["resolved_bound"],
                     rep["diameter"]["holds"], rep["midpoint"]["holds"],
                     rep["ball"]["holds"], inter["holds"], lig["holds"]])
    mono = roughlim.check_monotone(ests)
    summary = {"horizon": n, "eps_grid": list(eps), "r_grid": rs,
               "monotone_violations": [list(p) for p in mono],
               "reports": reports,
               "all_hold": bool(not mono and all(
                   r["diameter"]["holds"] and r["midpoint"]["holds"] and r["ball"]["holds"]
                   and r["intersection"]["holds"] and r["lim_in_gamma"]["holds"]
                   for r in reports))}
    header = ["r", "inner_size", "clusters", "diameter", "diameter_bound",
              "diameter_holds", "midpoint_holds", "ball_holds", "intersection_holds",
              "lim_in_gamma_holds"]
    return RunResult(summary, header, rows)


def _run_cluster_set(cfg, threads):
    _keys(cfg, _SCAN | {"r", "r_grid"}, "")
    x, omega, ideal, grid, n = _problem(cfg)
    rs = _r_values(cfg)
    eps = _eps(cfg)
    names = {1: "InIdeal", -1: "NotInIdeal", 0: "Undecided"}
    per_r, rows = [], []
    for r in rs:
        est = cluster.scan_cluster_set(grid, r, x, omega, ideal, eps, n, threads=threads)
        closed = cluster.grid_closedness(est)
        item = {"r": r, "status": est.status(),
                "accepted_size": int(est.accepted.sum()),
                "rejected_size": int(est.rejected.sum()),
                "undecided_size": int(est.undecided.sum()),
                "accepted_clusters": _clusters_summary(grid, est.accepted),
                "closedness": {"holes": [_label(h) for h in closed["holes"]],
                               "closed": closed["closed"]}}
        if not isinstance(grid, BoxGrid):
            item["accepted"] = [_label(v) for v in est.accepted_labels()]
            item["rejected"] = [_label(v) for v in est.rejected_labels()]
            item["rejecting_eps"] = {_label(grid.label(i)): est.rejecting_eps(i)
                                     for i in np.flatnonzero(est.rejected)}
        per_r.append(item)
        for i in range(grid.size):
            agg = "accepted" if est.accepted[i] else (
                "rejected" if est.rejected[i] else "undecided")
            rows.append([r, _label(grid.label(i))] +
                        [names[int(c)] for c in est.codes[i]] +
                        [int(c) for c in est.counts[i]] + [agg])
    summary = {"horizon": n, "eps_grid": list(eps),
               "thresholds": [ideal.tau_in, ideal.tau_out], "per_r": per_r}
    header = ["r", "candidate"] + [f"near_verdict_eps={e!r}" for e in eps] + \
        [f"near_count_eps={e!r}" for e in eps] + ["aggregate"]
    return RunResult(summary, header, rows)


def _run_repr_closed(cfg, threads):
    _keys(cfg, _COMMON | {"F", "blocks", "grid", "r_grid", "weights", "ideal", "eps_grid",
                          "horizon", "thresholds", "inner_tol", "delta_out"}, "",
          ["F", "grid", "r_grid"])
    F = cfg["F"]
    if not isinstance(F, list) or not F:
        raise ConfigError("expected a non-empty list of points", "F")
    if all(isinstance(v, list) for v in F):
        pts = np.array([_numlist(v, f"F[{i}]") for i, v in enumerate(F)])
        if len({len(v) for v in F}) != 1:
            raise ConfigError("points must share a dimension", "F")
    else:
        pts = np.array(_numlist(F, "F"))[:, None]
    blocks = cfg.get("blocks", "dyadic")
    if blocks != "dyadic":
        blocks = _num(blocks, "blocks", integer=True, lo=1)
        if blocks < pts.shape[0]:
            raise ConfigError("modulus must be at least the number of points", "blocks")
    omega = build_weights(cfg["weights"]) if "weights" in cfg else constant_weights(1.0)
    ideal = build_ideal(cfg.get("ideal"), thresholds=_thresholds(cfg))
    x0 = PointSeq(EuclideanD(pts.shape[1]), lambda t: np.zeros((t.size, pts.shape[1])), "F")
    grid = build_grid(cfg["grid"], x0)
    rs = _numlist(cfg["r_grid"], "r_grid", positive=True)
    inner = _num(cfg["inner_tol"], "inner_tol", positive=True) if "inner_tol" in cfg else None
    dout = _num(cfg["delta_out"], "delta_out", positive=True) if "delta_out" in cfg else None
    _, rep = cluster.closed_set_representation(pts, grid, rs, ideal, blocks, omega,
                                               _eps(cfg), _horizon(cfg), inner, dout)
    rows = [[p["r"], p["inner_nodes"], len(p["inner_missed"]), p["outer_checked"],
             p["outer_nodes"], len(p["outer_not_rejected"]), p["accepted"]]
            for p in rep["per_r"]]
    header = ["r", "inner_nodes", "inner_missed", "outer_checked", "outer_nodes",
              "outer_not_rejected", "accepted"]
    return RunResult(rep, header, rows)


def _run_lim_gamma_gap(cfg, threads):
    _keys(cfg, _COMMON | {"ideal", "weights", "r", "set", "d", "norm", "eps_grid",
                          "horizon", "thresholds"}, "")
    ideal = build_ideal(cfg.get("ideal"), thresholds=_thresholds(cfg))
    omega = build_weights(cfg["weights"]) if "weights" in cfg else constant_weights(1.0)
    r = _num(cfg.get("r", 1.0), "r", positive=True)
    d = _num(cfg.get("d", 1), "d", integer=True, lo=1, hi=64)
    norm = _str(cfg.get("norm", "euclidean"), "norm", {"euclidean", "sup"})
    A = build_set(cfg.get("set", "evens"))
    in_set = (lambda t: A.mask(int(np.max(t)))[np.asarray(t) - 1])
    _, rep = cluster.lim_gamma_gap(ideal, omega, r, in_set, d, norm, _eps(cfg),
                                   _horizon(cfg))
    rows = [[k, rep[k]] for k in ("set_verdict", "complement_verdict", "cluster_verdict",
                                   "limit_verdict", "holds")]
    return RunResult(rep, ["quantity", "value"], rows)


def _operator(v, path="operator"):
    kind = _str(v, path, {"bernstein", "perturbed_bernstein"})
    return korovkin.bernstein() if kind == "bernstein" else korovkin.perturbed_bernstein()


def _kgrid(cfg, default_cap=64):
    spec = cfg.get("grid", {})
    _keys(spec, {"nodes", "bump_cap"}, "grid")
    nodes = _num(spec.get("nodes", 101), "grid.nodes", integer=True, lo=2, hi=10001)
    cap = _num(spec.get("bump_cap", default_cap), "grid.bump_cap", integer=True, lo=0, hi=1000)
    return korovkin.korovkin_grid(nodes, cap)


def _run_korovkin_field(cfg, threads):
    _keys(cfg, _COMMON | {"mode", "operator", "f", "weights", "eps", "j_list", "grid",
                          "ideal", "horizon", "tau"}, "")
    mode = _str(cfg.get("mode", "g"), "mode", {"g", "h"})
    op = _operator(cfg.get("operator", "perturbed_bernstein"))
    f, _ = build_function(cfg.get("f", "x2_plus_3x"))
    omega = build_weights(cfg["weights"]) if "weights" in cfg else korovkin.sqrt_weights()
    eps = _num(cfg.get("eps", 0.1), "eps", positive=True)
    js = _j_list(cfg.get("j_list", 200))
    ideal = build_ideal(cfg["ideal"]) if "ideal" in cfg else None
    tau = _num(cfg.get("tau", korovkin.UNIFORM_TOL), "tau", positive=True)
    x = _kgrid(cfg)
    fld = korovkin.equi_field(mode, op, f, omega, eps, js, x, ideal, _horizon(cfg))
    summary = {"mode": mode, "operator": op.describe(), "eps": eps,
               "weights": omega.name, "horizon": fld.horizon, "j_list": list(js),
               "grid_nodes": int(x.size), "sup_trace": fld.sup_trace.tolist(),
               "tau": tau, "verdict": fld.verdict(tau)}
    rows = [[j, float(xv), float(fld.values[a, b])]
            for a, j in enumerate(js) for b, xv in enumerate(x)]
    return RunResult(summary, ["j", "x", "value"], rows)


def _run_korovkin_bound(cfg, threads):
    _keys(cfg, _COMMON | {"f", "operator", "t_list", "grid", "eps", "mu", "delta", "B"}, "")
    f, _ = build_function(cfg.get("f", "e2"))
    op = _operator(cfg.get("operator", "bernstein"))
    ts = _j_list(cfg.get("t_list", 64), "t_list")
    eps = _num(cfg.get("eps", 0.1), "eps", positive=True)
    mu = _num(cfg.get("mu", 1.0), "mu", positive=True)
    delta = _num(cfg["delta"], "delta", positive=True) if "delta" in cfg else None
    B = _num(cfg["B"], "B", positive=True) if "B" in cfg else None
    c = _kgrid(cfg, 0 if op.kind == "bernstein" else 64)
    rep = korovkin.korovkin_bound_check(f, op, ts, c, eps, mu, delta, B, return_cells=True)
    lhs, rhs = rep.pop("lhs"), rep.pop("rhs")
    rows = [[t, float(cv), float(lhs[a, b]), float(rhs[a, b]), float(rhs[a, b] - lhs[a, b])]
            for a, t in enumerate(rep["t_list"]) for b, cv in enumerate(c)]
    return RunResult(rep, ["t", "c", "lhs", "rhs", "slack"], rows)


def _run_tachev(cfg, threads):
    _keys(cfg, _COMMON | {"f", "t_list", "grid"}, "")
    f, fp = build_function(cfg.get("f", "e2"))
    if fp is None:
        raise ConfigError("the function needs a derivative", "f.derivative")
    ts = [int(t) for t in _numlist(cfg.get("t_list", [25, 100, 400]), "t_list",
                                   integer=True, lo=1, hi=korovkin.T_MAX)]
    spec = cfg.get("grid", {})
    _keys(spec, {"nodes"}, "grid")
    nodes = _num(spec.get("nodes", 101), "grid.nodes", integer=True, lo=2, hi=100001)
    rep = korovkin.tachev_decay(f, fp, ts, np.linspace(0.0, 1.0, nodes))
    rows = [[t, d, m] for t, d, m in zip(rep["t_list"], rep["D"], rep["first_moment_max"])]
    return RunResult(rep, ["t", "D", "first_moment_max"], rows)


def _run_adjudicate(cfg, threads):
    _keys(cfg, _COMMON | {"f", "weights", "eps", "j_list", "grid", "horizon", "moment_ts",
                          "tau"}, "")
    f, fp = build_function(cfg.get("f", "x2_plus_3x"))
    if fp is None:
        raise ConfigError("the function needs a derivative", "f.derivative")
    omega = build_weights(cfg["weights"]) if "weights" in cfg else korovkin.sqrt_weights()
    eps = _num(cfg.get("eps", 0.1), "eps", positive=True)
    js = _j_list(cfg.get("j_list", 200))
    mts = [int(t) for t in _numlist(cfg.get("moment_ts", [10, 50, 250]), "moment_ts",
                                    integer=True, lo=1, hi=korovkin.T_MAX)]
    tau = _num(cfg.get("tau", korovkin.UNIFORM_TOL), "tau", positive=True)
    x = _kgrid(cfg)
    rep = korovkin.example_5_3_adjudication(f, fp, omega, eps, js, x, _horizon(cfg),
                                            mts, tau=tau)
    rows = [[j, g, h] for j, g, h in zip(js, rep["g_sup_trace"], rep["h_sup_trace"])]
    return RunResult(rep, ["j", "g_sup", "h_sup"], rows)


TASKS: dict[str, Callable] = {
    "density": _run_density,
    "limit-set": _run_limit_set,
    "min-degree": _run_min_degree,
    "structure": _run_structure,
    "cluster-set": _run_cluster_set,
    "repr-closed": _run_repr_closed,
    "lim-gamma-gap": _run_lim_gamma_gap,
    "korovkin-field": _run_korovkin_field,
    "korovkin-bound": _run_korovkin_bound,
    "tachev": _run_tachev,
    "adjudicate-5-3": _run_adjudicate,
}


def validate(cfg: Mapping, task: str | None = None) -> dict:
    """Normalise the task name and check the document shape."""
    if not isinstance(cfg, Mapping):
        raise ConfigError("configuration must be a JSON object")
    cfg = copy.deepcopy(dict(cfg))
    name = cfg.get("task", task)
    if name is None:
        raise ConfigError("required field missing", "task")
    if task is not None and name != task:
        raise ConfigError(f"config task {name!r} does not match subcommand {task!r}", "task")
    _str(name, "task", set(TASKS))
    cfg["task"] = name
    return cfg


def run(cfg: Mapping, threads: int = 1) -> RunResult:
    """Validate and execute one configuration.

    An inconclusive minimal-degree search returns ``status='inconclusive'``
    with the evidence gathered so far instead of raising.
    """
    cfg = validate(cfg)
    try:
        result = TASKS[cfg["task"]](cfg, threads)
    except InconclusiveError as exc:
        scans = [{"r": s.r, "horizon": s.horizon, "status": s.status(),
                  "inner_size": int(s.inner.sum())} for s in exc.scans
                 if s is not None and hasattr(s, "inner")]
        result = RunResult({"inconclusive": str(exc), "scans": scans},
                           ["r", "horizon", "status", "accepted"],
                           [[s["r"], s["horizon"], s["status"], s["inner_size"]]
                            for s in scans], "inconclusive")
    result.summary = {"task": cfg["task"], "status": result.status,
                      "result": result.summary,
                      "provenance": {"package": "roughideal", "version": __version__,
                                     "config": cfg}}
    return result


def csv_columns() -> dict:
    """Documented CSV column orders per task."""
    return {
        "density": ["t", "theta", "density"],
        "limit-set": ["candidate", "eps=<e> ...", "aggregate"],
        "min-degree": ["r", "horizon", "status", "accepted"],
        "structure": ["r", "inner_size", "clusters", "diameter", "diameter_bound",
                      "diameter_holds", "midpoint_holds", "ball_holds",
                      "intersection_holds", "lim_in_gamma_holds"],
        "cluster-set": ["r", "candidate", "near_verdict_eps=<e> ...",
                        "near_count_eps=<e> ...", "aggregate"],
        "repr-closed": ["r", "inner_nodes", "inner_missed", "outer_checked",
                        "outer_nodes", "outer_not_rejected", "accepted"],
        "lim-gamma-gap": ["quantity", "value"],
        "korovkin-field": ["j", "x", "value"],
        "korovkin-bound": ["t", "c", "lhs", "rhs", "slack"],
        "tachev": ["t", "D", "first_moment_max"],
        "adjudicate-5-3": ["j", "g_sup", "h_sup"],
    }
