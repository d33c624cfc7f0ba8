"""Small vectorised expression language for configuration files.

Expressions are Python-syntax arithmetic over one variable (``t`` for
sequences and weights, ``x`` or ``u`` for functions on ``[0, 1]``) and are
evaluated on float64 arrays.  Allowed syntax:

* numbers, the constants ``pi`` and ``e``;
* ``+ - * / // % **`` and unary minus (so ``(-1)**t`` works for integer t);
* comparisons ``< <= > >= == !=`` (chains allowed), ``and``, ``or``, ``not``;
* ``a if cond else b`` and ``where(cond, a, b)``;
* ``piecewise(c1, v1, c2, v2, ..., default)`` -- first true condition wins;
* functions ``sqrt log exp abs sin cos tan floor ceil min max is_square``.

Anything else (attribute access, names other than the variable, calls to
unlisted functions, subscripts, lambdas) is rejected when the expression is
compiled, before any evaluation.
"""
from __future__ import annotations

import ast
import math
import operator
from typing import Callable

import numpy as np

from .errors import ArgumentError

__all__ = ["compile_expr", "ExprError"]


class ExprError(ArgumentError):
    """Raised for expressions outside the grammar."""


def _is_square(v):
    v = np.asarray(v, dtype=np.float64)
    r = np.floor(np.sqrt(np.maximum(v, 0.0)) + 0.5)
    return (r * r == v) & (v >= 0)


def _piecewise(*args):
    if len(args) < 1 or len(args) % 2 == 0:
        raise ExprError("piecewise needs condition/value pairs and a default")
    out = np.asarray(args[-1], dtype=np.float64)
    for cond, val in reversed(list(zip(args[0:-1:2], args[1:-1:2]))):
        out = np.where(cond, val, out)
    return out


_FUNCS: dict[str, Callable] = {
    "sqrt": np.sqrt, "log": np.log, "exp": np.exp, "abs": np.abs,
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "floor": np.floor,
    "ceil": np.ceil, "min": np.minimum, "max": np.maximum,
    "is_square": _is_square, "where": np.where, "piecewise": _piecewise,
}
_CONSTS = {"pi": math.pi, "e": math.e}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.FloorDiv: operator.floordiv,
           ast.Mod: operator.mod, ast.Pow: operator.pow}
_CMPOPS = {ast.Lt: operator.lt, ast.LtE: operator.le, ast.Gt: operator.gt,
           ast.GtE: operator.ge, ast.Eq: operator.eq, ast.NotEq: operator.ne}


def _check(node, var: str):
    if isinstance(node, ast.Expression):
        return _check(node.body, var)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExprError(f"unsupported constant {node.value!r}")
        return
    if isinstance(node, ast.Name):
        if node.id != var and node.id not in _CONSTS:
            raise ExprError(f"unknown name {node.id!r} (variable is {var!r})")
        return
    if isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise ExprError(f"unsupported operator {type(node.op).__name__}")
        _check(node.left, var)
        _check(node.right, var)
        return
    if isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd, ast.Not)):
            raise ExprError(f"unsupported operator {type(node.op).__name__}")
        _check(node.operand, var)
        return
    if isinstance(node, ast.Compare):
        if any(type(op) not in _CMPOPS for op in node.ops):
            raise ExprError("unsupported comparison")
        for child in [node.left, *node.comparators]:
            _check(child, var)
        return
    if isinstance(node, ast.BoolOp):
        for child in node.values:
            _check(child, var)
        return
    if isinstance(node, ast.IfExp):
        for child in (node.test, node.body, node.orelse):
            _check(child, var)
        return
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
            name = getattr(node.func, "id", type(node.func).__name__)
            raise ExprError(f"unknown function {name!r}")
        if node.keywords:
            raise ExprError("keyword arguments are not supported")
        for child in node.args:
            _check(child, var)
        return
    raise ExprError(f"unsupported syntax {type(node).__name__}")


def _eval(node, env):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        return env[node.id]
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, env)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
        return np.logical_not(v)
    if isinstance(node, ast.Compare):
        left = _eval(node.left, env)
        out = True
        for op, comp in zip(node.ops, node.comparators):
            right = _eval(comp, env)
            out = np.logical_and(out, _CMPOPS[type(op)](left, right))
            left = right
        return out
    if isinstance(node, ast.BoolOp):
        vals = [_eval(v, env) for v in node.values]
        fn = np.logical_and if isinstance(node.op, ast.And) else np.logical_or
        out = vals[0]
        for v in vals[1:]:
            out = fn(out, v)
        return out
    if isinstance(node, ast.IfExp):
        return np.where(_eval(node.test, env), _eval(node.body, env),
                        _eval(node.orelse, env))
    if isinstance(node, ast.Call):
        return _FUNCS[node.func.id](*[_eval(a, env) for a in node.args])
    raise ExprError(f"unsupported syntax {type(node).__name__}")  # pragma: no cover


def compile_expr(source: str, var: str = "t") -> Callable[[np.ndarray], np.ndarray]:
    """Compile ``source`` into a vectorised function of ``var``."""
    if not isinstance(source, str) or not source.strip():
        raise ExprError("expression must be a non-empty string")
    try:
        tree = ast.parse(source.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExprError(f"cannot parse expression {source!r}: {exc.msg}") from None
    _check(tree, var)

    def fn(values):
        arr = np.asarray(values, dtype=np.float64)
        env = dict(_CONSTS)
        env[var] = arr
        with np.errstate(all="ignore"):
            out = _eval(tree, env)
        return np.broadcast_to(np.asarray(out, dtype=np.float64), arr.shape).copy()

    fn.__name__ = f"expr[{source.strip()}]"
    fn.source = source.strip()
    return fn
