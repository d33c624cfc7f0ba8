"""Command-line driver.

Every subcommand reads an optional JSON config (``--config``), runs it and
writes ``<stem>.json`` and ``<stem>.csv`` into ``--out`` together with an
``index.json`` listing the files with checksums.  Exit status is 0 on
success, 2 when the run was inconclusive and 1 on any error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigError, RoughIdealError
from .experiment import TASKS, run, validate
from .reporting import report_bundle, write_csv, write_json
from .suite import SUITE

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


def _load(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a JSON object")
    return cfg


def execute(cfg: dict, out: Path, stem: str, threads: int = 1):
    """Run one config and write its JSON and CSV; returns (status, paths)."""
    result = run(cfg, threads=threads)
    paths = [write_json(out / f"{stem}.json", result.summary),
             write_csv(out / f"{stem}.csv", result.header, result.rows)]
    return result.status, paths


def _run_suite(out: Path, threads: int, horizon: int | None):
    status, paths = EXIT_OK, []
    for name, cfg in SUITE:
        cfg = dict(cfg)
        if horizon is not None and "horizon" in cfg:
            cfg["horizon"] = horizon
        st, ps = execute(cfg, out, name, threads)
        print(f"{name}: {st}")
        paths.extend(ps)
        if st == "inconclusive":
            status = EXIT_INCONCLUSIVE
    return status, paths


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="roughideal",
                                description="Rough weighted ideal convergence experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in [*TASKS, "suite"]:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON experiment configuration")
        s.add_argument("--out", default="out", help="output directory (default: out)")
        s.add_argument("--horizon", type=int, help="override the config horizon")
        s.add_argument("--threads", type=int, default=1,
                       help="worker threads for candidate scans (results unchanged)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        if args.threads < 1:
            raise ConfigError("must be at least 1", "--threads")
        if args.command == "suite":
            status, paths = _run_suite(out, args.threads, args.horizon)
        else:
            cfg = validate(_load(args.config), args.command)
            if args.horizon is not None:
                cfg["horizon"] = args.horizon
            st, paths = execute(cfg, out, args.command.replace("-", "_"), args.threads)
            status = EXIT_INCONCLUSIVE if st == "inconclusive" else EXIT_OK
        index = report_bundle(paths, out / "index.json")
        print(f"wrote {index['count']} artifacts to {out}")
        return status
    except RoughIdealError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
