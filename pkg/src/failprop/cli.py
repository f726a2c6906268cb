"""``failprop`` command line.

Exit codes: 0 all good, 1 a property or finding failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from failprop import __version__
from failprop.checker import (
    DEFAULT_MAX_COUNTEREXAMPLES,
    Outcome,
    check,
    default_workers,
    minimal_cutsets,
    run_instance,
)
from failprop.dsl import parse_condition, parse_constraint, parse_model, parse_model_unchecked
from failprop.errors import FailpropError, ModelError, ParseError
from failprop.model import Model, validate_structure
from failprop.report import render_check, render_cutsets, render_run, render_validate

EXIT_OK, EXIT_FINDING, EXIT_USAGE = 0, 1, 2
DEFAULT_MAX_FAILURES = 2


@dataclass(frozen=True)
class RunConfig:
    paths: tuple[str, ...]
    command: str
    fmt: str = "text"
    max_failures: int | None = DEFAULT_MAX_FAILURES
    exhaustive: bool = False
    max_counterexamples: int = DEFAULT_MAX_COUNTEREXAMPLES
    workers: int = 1

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("worker count must be at least 1")
        if self.max_failures is not None and self.max_failures < 1:
            raise ValueError("max_failures must be at least 1")

    @property
    def failure_bound(self) -> int | None:
        return None if self.exhaustive else self.max_failures


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {n}")
    return n


def _non_negative(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="failprop",
        description="Bounded exhaustive checking of failure propagation in dataflow models.",
    )
    p.add_argument("--version", action="version", version=f"failprop {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("path", help="model file (.fprop)")
        sp.add_argument("--format", choices=("text", "json"), default="text")

    def bounds(sp):
        sp.add_argument("--max-failures", type=_positive, default=DEFAULT_MAX_FAILURES,
                        help="max simultaneous failures among unconstrained functions "
                             f"(default {DEFAULT_MAX_FAILURES})")
        sp.add_argument("--exhaustive", action="store_true",
                        help="sweep every failure combination (removes --max-failures)")

    sp = sub.add_parser("validate", help="parse a model and check its structure")
    common(sp)

    sp = sub.add_parser("check", help="check assertions")
    common(sp)
    bounds(sp)
    sp.add_argument("--assert", dest="assertions", action="append", default=[],
                    metavar="NAME", help="check only this assertion (repeatable)")
    sp.add_argument("--max-counterexamples", type=_non_negative,
                    default=DEFAULT_MAX_COUNTEREXAMPLES)
    sp.add_argument("--workers", type=_positive, default=None,
                    help="worker processes (default: $FAILPROP_WORKERS or 1)")
    sp.add_argument("--timing", action="store_true",
                    help="include wall-clock times (output is then not reproducible)")

    sp = sub.add_parser("run", help="find one instance satisfying a constraint")
    common(sp)
    bounds(sp)
    sp.add_argument("--where", required=True,
                    help='scenario constraint, e.g. "GPS.status = Err and others OK"')

    sp = sub.add_parser("cutsets", help="minimal failure combinations breaking a condition")
    common(sp)
    sp.add_argument("--condition", required=True,
                    help='e.g. "oSelected1.status = OK and oSelected2.status = OK"')
    sp.add_argument("--order", type=_positive, default=1, help="max cut-set order (default 1)")
    sp.add_argument("--any-valuation", action="store_true",
                    help="count failures breaking the condition under some free-input "
                         "valuation, not all")
    return p


def _err(msg: str) -> None:
    print(f"failprop: {msg}", file=sys.stderr)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load(path: str) -> Model:
    return parse_model(_read(path), file=path)


def cmd_validate(path: str, fmt: str = "text") -> int:
    try:
        text = _read(path)
        model = parse_model_unchecked(text, file=path)
    except OSError as e:
        _err(f"cannot read {path}: {e.strerror or e}")
        return EXIT_USAGE
    except ParseError as e:
        _err(str(e))
        return EXIT_USAGE
    violations = validate_structure(model)
    summary = (f"({len(model.functions)} functions, {len(model.ports)} ports, "
               f"{len(model.flows)} flows, {len(model.assertions)} assertions)")
    sys.stdout.write(render_validate(model.name, violations, fmt, summary))
    return EXIT_FINDING if violations else EXIT_OK


def cmd_check(cfg: RunConfig, names=(), timing: bool = False) -> int:
    model = _load(cfg.paths[0])
    if not model.assertions:
        _err("no assertions")
        return EXIT_USAGE
    known = {a.name for a in model.assertions}
    unknown = [n for n in names if n not in known]
    if unknown:
        _err(f"unknown assertion(s): {', '.join(unknown)}")
        return EXIT_USAGE
    selected = [a for a in model.assertions if not names or a.name in names]
    verdicts = [
        check(model, a, max_failures=cfg.failure_bound,
              max_counterexamples=cfg.max_counterexamples, workers=cfg.workers)
        for a in selected
    ]
    sys.stdout.write(render_check(model, verdicts, cfg.fmt, timing))
    return EXIT_OK if all(v.outcome is Outcome.HOLDS for v in verdicts) else EXIT_FINDING


def cmd_run(cfg: RunConfig, where: str) -> int:
    model = _load(cfg.paths[0])
    constraint = parse_constraint(where, model, file="--where")
    instance = run_instance(model, constraint, cfg.failure_bound)
    sys.stdout.write(render_run(model, instance, cfg.fmt))
    return EXIT_OK if instance is not None else EXIT_FINDING


def cmd_cutsets(cfg: RunConfig, condition: str, max_order: int,
                any_valuation: bool = False) -> int:
    if max_order < 1:
        _err("order must be at least 1")
        return EXIT_USAGE
    model = _load(cfg.paths[0])
    cond = parse_condition(condition, model, file="--condition")
    cutsets = minimal_cutsets(model, cond, max_order, every_valuation=not any_valuation)
    sys.stdout.write(render_cutsets(model, cutsets, cond, max_order, cfg.fmt))
    return EXIT_FINDING if any(c.order == 1 for c in cutsets) else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        return cmd_validate(args.path, args.format)
    workers = getattr(args, "workers", None) or default_workers()
    cfg = RunConfig(
        paths=(args.path,), command=args.command, fmt=args.format,
        max_failures=getattr(args, "max_failures", DEFAULT_MAX_FAILURES),
        exhaustive=getattr(args, "exhaustive", False),
        max_counterexamples=getattr(args, "max_counterexamples", DEFAULT_MAX_COUNTEREXAMPLES),
        workers=workers,
    )
    try:
        if args.command == "check":
            return cmd_check(cfg, tuple(args.assertions), args.timing)
        if args.command == "run":
            return cmd_run(cfg, args.where)
        return cmd_cutsets(cfg, args.condition, args.order, args.any_valuation)
    except OSError as e:
        _err(f"cannot read {args.path}: {e.strerror or e}")
    except ModelError as e:
        _err(f"{args.path} is not a valid model")
        for v in e.violations:
            print(f"  {v}", file=sys.stderr)
    except ParseError as e:
        _err(str(e))
    except FailpropError as e:
        _err(str(e))
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
