"""Deterministic JSON/CSV emission and the artifact index.

Floats are written with 17 significant digits so values round-trip exactly;
non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
Key order is the insertion order of the producing code, so identical runs
give identical bytes.  Timestamps appear only in the bundle index.
"""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import ArgumentError, RoughIdealError

__all__ = ["format_float", "to_plain", "dumps", "write_json", "write_csv",
           "report_bundle", "sha256_file", "MissingArtifactError"]


class MissingArtifactError(RoughIdealError):
    """Raised when an indexed artifact does not exist."""


def format_float(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    s = format(v, ".17g")
    # keep integral floats recognisable as floats
    return s if any(c in s for c in ".en") else s + ".0"


def to_plain(obj: Any) -> Any:
    """Convert numpy scalars/arrays, tuples and enums to JSON-ready values."""
    if isinstance(obj, Mapping):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    raise ArgumentError(f"cannot serialise {type(obj).__name__}")


def _emit(obj, indent: int, level: int, out: list):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for k, (key, val) in enumerate(obj.items()):
            out.append(pad + json.dumps(key) + ": ")
            _emit(val, indent, level + 1, out)
            out.append(",\n" if k < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        if all(not isinstance(v, (dict, list)) for v in obj):
            out.append("[" + ", ".join(_scalar(v) for v in obj) + "]")
            return
        out.append("[\n")
        for k, val in enumerate(obj):
            out.append(pad)
            _emit(val, indent, level + 1, out)
            out.append(",\n" if k < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        out.append(_scalar(obj))


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        s = format_float(v)
        return json.dumps(s) if s in ("nan", "inf", "-inf") else s
    return json.dumps(v)


def dumps(obj: Any, indent: int = 2) -> str:
    out: list[str] = []
    _emit(to_plain(obj), indent, 0, out)
    return "".join(out) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    if v is None:
        return ""
    return str(v)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ArgumentError("CSV row length does not match the header")
        w.writerow([_cell(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def report_bundle(paths: Sequence, index_path=None, root=None) -> dict:
    """Index of artifacts with sizes and SHA-256 checksums.

    Paths are recorded relative to ``root`` (default: the index directory).
    The index is written to ``index_path`` when given.
    """
    base = Path(root) if root is not None else (
        Path(index_path).parent if index_path is not None else Path.cwd())
    entries = []
    for p in sorted(Path(q) for q in paths):
        if not p.is_file():
            raise MissingArtifactError(f"missing artifact {p}")
        try:
            rel = os.path.relpath(p, base)
        except ValueError:
            rel = str(p)
        entries.append({"path": rel.replace(os.sep, "/"), "bytes": p.stat().st_size,
                        "sha256": sha256_file(p)})
    index = {"created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
             "count": len(entries), "artifacts": entries}
    if index_path is not None:
        write_json(index_path, index)
    return index
