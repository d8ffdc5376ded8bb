"""Command-line front end.

Four subcommands: `prove` decides a formula or sequent and emits the
countermodel when it loses, `check-model` replays a model file against a
sequent, `fuzz` runs the exhaustive differential checker, and `bench`
times a corpus of expected verdicts.

Exit codes are part of the interface:

  0  VALID / model falsifies at the point / all checks passed
  1  INVALID / model does not falsify / some check failed
  2  usage, parse, model-format, or persistence error
  3  internal invariant failure (budget overrun, broken verification)

An INVALID verdict is only reported after the emitted countermodel has
been verified against the sequent; if that self-check fails the exit
code is 3, never a bare INVALID.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from typing import Optional

from .fuzz import format_report, run_fuzz
from .prover import DEFAULT_NODE_BUDGET, InternalError, prove_sequent
from .render import FORMATS, emit
from .semantics import ModelFormatError, check_persistence, falsifies, model_from_json
from .sequent import Sequent
from .syntax import ParseError, parse, parse_sequent

EXIT_VALID = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


@dataclass
class Config:
    """Defaults shared by the subcommands."""

    node_budget: int = DEFAULT_NODE_BUDGET
    oracle_max_worlds: int = 3
    emit_format: str = "text"
    seed: Optional[int] = None  # randomized corpus order only


def _parse_input(text: str) -> Sequent:
    """Sequent text when it contains a turnstile, otherwise `|- formula`."""
    if "|-" in text:
        return parse_sequent(text)
    return Sequent(frozenset(), frozenset((parse(text),)))


def cmd_prove(args) -> int:
    try:
        seq = parse_sequent(args.input) if args.sequent else _parse_input(args.input)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    verdict = prove_sequent(seq, budget=args.budget)

    if verdict.valid:
        line = "VALID"
    else:
        line = f"INVALID (countermodel verified at world {verdict.world})"
    if args.emit == "text":
        print(line)
        if not verdict.valid:
            print(emit(verdict.model, "text"))
        if args.trace:
            print("search tree:")
            print(emit(verdict.result.root, "text"))
    else:
        # keep stdout format-clean so it can be piped straight to a consumer
        print(line, file=sys.stderr)
        if not verdict.valid:
            print(emit(verdict.model, args.emit))
        if args.trace:
            print(emit(verdict.result.root, args.emit))
    return EXIT_VALID if verdict.valid else EXIT_INVALID


def cmd_check_model(args) -> int:
    try:
        with open(args.model, encoding="utf-8") as fh:
            model = model_from_json(fh.read())
    except OSError as e:
        print(f"cannot read {args.model}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ModelFormatError as e:
        print(f"model error: {e}", file=sys.stderr)
        return EXIT_USAGE
    ok, witness = check_persistence(model)
    if not ok:
        print(f"model error: persistence violation at {witness!r}", file=sys.stderr)
        return EXIT_USAGE
    if args.world not in model.val:
        print(f"model has no world {args.world}", file=sys.stderr)
        return EXIT_USAGE
    try:
        seq = _parse_input(args.sequent)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if falsifies(model, args.world, seq):
        print(f"falsified at world {args.world}")
        return EXIT_VALID
    print(f"not falsified at world {args.world}")
    return EXIT_INVALID


def cmd_fuzz(args) -> int:
    progress = None
    if sys.stderr.isatty():

        def progress(done, total):
            print(f"\r{done}/{total}", end="", file=sys.stderr, flush=True)

    report = run_fuzz(
        args.atoms,
        args.size,
        budget=args.budget,
        oracle_worlds=args.oracle_worlds,
        jobs=args.jobs,
        limit=args.limit,
        deadline=args.deadline,
        seed=args.seed,
        progress=progress,
    )
    if progress is not None:
        print(file=sys.stderr)
    print(format_report(report))
    return EXIT_VALID if report.ok else EXIT_INVALID


def cmd_bench(args) -> int:
    try:
        with open(args.corpus, encoding="utf-8") as fh:
            raw = fh.read().splitlines()
    except OSError as e:
        print(f"cannot read {args.corpus}: {e}", file=sys.stderr)
        return EXIT_USAGE
    items = []
    for no, line in enumerate(raw, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if text.startswith("VALID:"):
            items.append((no, True, text[len("VALID:"):].strip()))
        elif text.startswith("INVALID:"):
            items.append((no, False, text[len("INVALID:"):].strip()))
        else:
            print(f"{args.corpus}:{no}: missing VALID:/INVALID: prefix", file=sys.stderr)
            return EXIT_USAGE

    mismatches = 0
    for no, expected, text in items:
        try:
            seq = _parse_input(text)
        except ParseError as e:
            print(f"{args.corpus}:{no}: parse error: {e}", file=sys.stderr)
            return EXIT_USAGE
        t0 = time.perf_counter()
        verdict = prove_sequent(seq, budget=args.budget, instrument=True)
        ms = (time.perf_counter() - t0) * 1000.0
        stats = verdict.result.stats
        mark = "ok" if verdict.valid == expected else "MISMATCH"
        if verdict.valid != expected:
            mismatches += 1
        got = "VALID" if verdict.valid else "INVALID"
        print(
            f"{mark:8s} {got:7s} {ms:9.2f} ms"
            f"  nodes={stats.nodes_expanded:<6d} depth={stats.max_depth:<3d}"
            f" triples={stats.interleaved_triples:<3d} {text}"
        )
    print(f"{len(items)} items, {mismatches} mismatches")
    return EXIT_INVALID if mismatches else EXIT_VALID


def build_parser() -> argparse.ArgumentParser:
    cfg = Config()
    ap = argparse.ArgumentParser(
        prog="biint",
        description="Terminating prover and countermodel generator for "
        "propositional bi-intuitionistic logic.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="decide a formula or sequent")
    p.add_argument("input", help="formula text, or sequent text containing |-")
    p.add_argument(
        "--sequent", action="store_true", help="always parse the input as a sequent"
    )
    p.add_argument(
        "--emit",
        choices=FORMATS,
        default=cfg.emit_format,
        help="output format for countermodels and traces (default text)",
    )
    p.add_argument(
        "--budget",
        type=int,
        default=cfg.node_budget,
        help="search node budget (default %(default)s)",
    )
    p.add_argument(
        "--trace",
        action="store_true",
        help="dump the full search tree, failed branches and variables included",
    )
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser(
        "check-model", help="check that a model file falsifies a sequent at a world"
    )
    p.add_argument("model", help="model JSON file")
    p.add_argument("world", type=int, help="world id to evaluate at")
    p.add_argument("sequent", help="sequent (or formula) text")
    p.set_defaults(func=cmd_check_model)

    p = sub.add_parser("fuzz", help="exhaustively check all formulas over a signature")
    p.add_argument("--atoms", type=int, default=1, help="atom count (default 1)")
    p.add_argument(
        "--size", type=int, default=3, help="maximum connective count (default 3)"
    )
    p.add_argument("--budget", type=int, default=cfg.node_budget)
    p.add_argument(
        "--oracle-worlds",
        type=int,
        default=cfg.oracle_max_worlds,
        help="world bound for the validity oracle (default %(default)s)",
    )
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--limit", type=int, default=None, help="stop after N formulas")
    p.add_argument(
        "--deadline", type=float, default=None, help="wall-clock limit in seconds"
    )
    p.add_argument(
        "--seed", type=int, default=cfg.seed, help="randomize corpus order only"
    )
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("bench", help="time a corpus of expected verdicts")
    p.add_argument("corpus", help="file of VALID:/INVALID: prefixed sequents")
    p.add_argument("--budget", type=int, default=cfg.node_budget)
    p.set_defaults(func=cmd_bench)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InternalError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
