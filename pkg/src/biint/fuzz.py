"""Exhaustive differential testing of the prover against the semantics.

`run_fuzz` enumerates every formula over a small signature and checks,
for each one:

* validity agreement: a formula the prover calls derivable must have no
  bounded countermodel (checked with a precomputed-model oracle that is
  cross-validated against `bounded_countermodel` in the test suite);
* countermodel soundness: a formula called open must yield a model graph
  that passes all structural properties, is a di-tree, and falsifies the
  formula at its root;
* duality: `|- f` and `dual(f) |-` must get the same status;
* variable discipline: every derivable search node carries empty
  variable sets;
* instrumentation: no budget, degree, or interleaving violations anywhere
  in the search.

Failures never raise; they are collected into the report, which the CLI
turns into a nonzero exit.
"""

from __future__ import annotations

import gc
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from random import Random
from typing import Optional

import numpy as np

from .countermodel import BuildCache, countermodel
from .formula import Formula, count_formulas, dual, enumerate_formulas
from .prover import DEFAULT_NODE_BUDGET, InternalError, prove
from .semantics import _frames
from .sequent import Sequent
from .syntax import print_formula


@contextmanager
def _gc_paused():
    # the core types are cycle-free, so collector passes only cost time here
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()

_ATOM_NAMES = "pqrstuvwxyz"

FAILURE_CAP = 100  # keep the report bounded when something is systematically broken


class ValidityOracle:
    """Bounded-countermodel existence test over a fixed atom signature.

    Precomputes every reflexive-transitive frame with at most `max_worlds`
    worlds and every persistent valuation of the given atoms over it, in
    the same enumeration order as `bounded_countermodel`.  Forcing sets
    are world bitmasks, one lane per model in a numpy vector, so the
    connectives become single array operations across all models at once;
    implication and exclusion go through per-model lookup tables indexed
    by the operand masks.  Subformula vectors are memoized up to
    `memo_connectives` connectives, which pays off because the enumerator
    reuses its smaller layers as children.
    """

    def __init__(self, atoms, max_worlds: int = 3, memo_connectives: Optional[int] = None):
        if max_worlds > 7:
            raise ValueError("oracle masks are uint8, max_worlds must be <= 7")
        self.atom_names = tuple(sorted(atoms))
        self.max_worlds = max_worlds
        self.memo_cutoff = memo_connectives
        self.memo = {}
        width = 1 << max_worlds
        full = []
        imp_table = []
        exc_table = []
        atom_vecs = {a: [] for a in self.atom_names}
        for n in range(1, max_worlds + 1):
            everything = (1 << n) - 1
            for _, succ in _frames(n):
                succ_masks = [sum(1 << v for v in succ[w]) for w in range(n)]
                pred_masks = [
                    sum(1 << u for u in range(n) if w in succ[u]) for w in range(n)
                ]
                # upward-closed subsets are the possible single-atom valuations
                upsets = [
                    m
                    for m in range(everything + 1)
                    if all(not (m >> w & 1) or succ_masks[w] & ~m == 0 for w in range(n))
                ]
                # tables are padded to the uint8 index range; slots past
                # `everything` alias their truncated mask and are never hit
                imp = [
                    sum(1 << w for w in range(n) if succ_masks[w] & ~(m & everything) == 0)
                    for m in range(width)
                ]
                exc = [
                    sum(1 << w for w in range(n) if pred_masks[w] & m & everything)
                    for m in range(width)
                ]
                for combo in self._combos(upsets, len(self.atom_names)):
                    full.append(everything)
                    imp_table.append(imp)
                    exc_table.append(exc)
                    for a, m in zip(self.atom_names, combo):
                        atom_vecs[a].append(m)
        self.size = len(full)
        self.full = np.array(full, dtype=np.uint8)
        self.imp_table = np.array(imp_table, dtype=np.uint8)
        self.exc_table = np.array(exc_table, dtype=np.uint8)
        self.atom_vecs = {a: np.array(v, dtype=np.uint8) for a, v in atom_vecs.items()}
        self.zero = np.zeros(self.size, dtype=np.uint8)
        self.rows = np.arange(self.size)

    @staticmethod
    def _combos(options, k):
        if k == 0:
            yield ()
            return
        for rest in ValidityOracle._combos(options, k - 1):
            for m in options:
                yield rest + (m,)

    def _vec(self, f: Formula):
        v = self.memo.get(f)
        if v is not None:
            return v
        r = f.rank
        if r == 2:
            v = self.atom_vecs[f.name]  # KeyError = atom outside the signature
        elif r == 0:
            v = self.full
        elif r == 1:
            v = self.zero
        else:
            a = self._vec(f.left)
            b = self._vec(f.right)
            if r == 3:
                v = a & b
            elif r == 4:
                v = a | b
            elif r == 5:
                v = self.imp_table[self.rows, (~a | b) & self.full]
            else:
                v = self.exc_table[self.rows, a & ~b]
        if self.memo_cutoff is None or (f.length - 1) // 2 < self.memo_cutoff:
            self.memo[f] = v
        return v

    def has_countermodel(self, f: Formula) -> bool:
        """True iff some model with at most max_worlds worlds rejects f somewhere."""
        return not np.array_equal(self._vec(f), self.full)


@dataclass
class FuzzFailure:
    formula: str
    kind: str
    detail: str


@dataclass
class FuzzReport:
    atoms: tuple
    max_connectives: int
    corpus_size: int
    checked: int = 0
    valid: int = 0
    invalid: int = 0
    models_verified: int = 0
    duality_checked: int = 0
    nodes_expanded: int = 0
    interleaved_triples: int = 0
    failure_count: int = 0
    failures: list = field(default_factory=list)
    elapsed: float = 0.0
    completed: bool = True

    @property
    def ok(self) -> bool:
        return self.failure_count == 0

    def record(self, failure: FuzzFailure):
        self.failure_count += 1
        if len(self.failures) < FAILURE_CAP:
            self.failures.append(failure)

    def merge(self, other: "FuzzReport"):
        self.checked += other.checked
        self.valid += other.valid
        self.invalid += other.invalid
        self.models_verified += other.models_verified
        self.duality_checked += other.duality_checked
        self.nodes_expanded += other.nodes_expanded
        self.interleaved_triples += other.interleaved_triples
        self.failure_count += other.failure_count
        self.failures = (self.failures + other.failures)[:FAILURE_CAP]
        self.completed = self.completed and other.completed


def _check_formula(
    f: Formula,
    oracle: ValidityOracle,
    budget: int,
    report: FuzzReport,
    cache: Optional[BuildCache] = None,
):
    seq = Sequent(frozenset(), frozenset((f,)))
    try:
        res = prove(seq, budget=budget, instrument=True)
    except InternalError as e:
        report.record(FuzzFailure(print_formula(f), "violation", str(e)))
        return
    report.nodes_expanded += res.stats.nodes_expanded
    report.interleaved_triples += res.stats.interleaved_triples

    for node in res.root.walk():
        if node.status == "derivable" and (node.vars.lhs_sets or node.vars.rhs_sets):
            report.record(
                FuzzFailure(print_formula(f), "derivable-vars", f"at {node.sequent!r}")
            )
            break

    # the verdict search above carries the instrumentation; the dual run
    # only contributes a status, which is a pure function of the sequent,
    # so it may share the uninstrumented memo like any other status probe
    dseq = Sequent(frozenset((dual(f),)), frozenset())
    try:
        if cache is not None:
            dstatus = cache.status.get(dseq)
            if dstatus is None:
                dstatus = prove(dseq, budget=budget, memo=cache.nodes).status
                cache.status[dseq] = dstatus
                cache.trim()
        else:
            dstatus = prove(dseq, budget=budget).status
    except InternalError as e:
        report.record(FuzzFailure(print_formula(f), "violation", f"dual: {e}"))
        return
    report.duality_checked += 1
    if dstatus != res.status:
        report.record(
            FuzzFailure(
                print_formula(f),
                "duality",
                f"|- f is {res.status} but dual(f) |- is {dstatus}",
            )
        )
        return

    if res.status == "derivable":
        report.valid += 1
        if oracle.has_countermodel(f):
            report.record(
                FuzzFailure(print_formula(f), "oracle", "countermodel for a derivable formula")
            )
        return

    report.invalid += 1
    try:
        # countermodel() verifies before returning: the seven graph
        # properties, the di-tree skeleton, and falsification at the root
        # all passed on this object or a VerificationError lands here
        countermodel(seq, budget=budget, cache=cache)
    except InternalError as e:
        report.record(FuzzFailure(print_formula(f), "countermodel", str(e)))
        return
    report.models_verified += 1


def _shuffled(stream, rng: Random, buffer_size: int = 8192):
    # bounded shuffle: good local mixing without materializing the corpus
    buf = []
    for item in stream:
        buf.append(item)
        if len(buf) >= buffer_size:
            k = rng.randrange(len(buf))
            buf[k], buf[-1] = buf[-1], buf[k]
            yield buf.pop()
    rng.shuffle(buf)
    yield from buf


def _atom_tuple(atoms):
    if isinstance(atoms, int):
        return tuple(_ATOM_NAMES[:atoms])
    return tuple(sorted(atoms))


def _run_slice(args):
    (names, max_connectives, start, step, budget, oracle_worlds, limit, end_ts, seed) = args
    report = FuzzReport(names, max_connectives, count_formulas(len(names), max_connectives))
    oracle = ValidityOracle(names, oracle_worlds, memo_connectives=max_connectives)
    cache = BuildCache()
    stream = enumerate_formulas(names, max_connectives)
    if seed is not None:
        stream = _shuffled(stream, Random(seed))
    with _gc_paused():
        for i, f in enumerate(stream):
            if i % step != start:
                continue
            if limit is not None and report.checked >= limit:
                break
            if end_ts is not None and time.monotonic() > end_ts:
                report.completed = False
                break
            _check_formula(f, oracle, budget, report, cache)
            report.checked += 1
    return report


def run_fuzz(
    atoms,
    max_connectives: int,
    *,
    budget: int = DEFAULT_NODE_BUDGET,
    oracle_worlds: int = 3,
    jobs: int = 1,
    limit: Optional[int] = None,
    deadline: Optional[float] = None,
    seed: Optional[int] = None,
    progress=None,
) -> FuzzReport:
    """Check every formula over the signature; see the module docstring.

    `atoms` is an atom count or an iterable of names.  `limit` caps how
    many formulas are checked, `deadline` is a wall-clock budget in
    seconds after which the run stops with completed=False, `seed`
    randomizes corpus order, and `jobs` > 1 fans the corpus out over
    worker processes.  `progress(checked, total)` is called periodically
    when given (single-process runs only).
    """
    names = _atom_tuple(atoms)
    start = time.monotonic()
    end_ts = start + deadline if deadline is not None else None
    total = count_formulas(len(names), max_connectives)

    if jobs > 1:
        import multiprocessing

        tasks = [
            (names, max_connectives, w, jobs, budget, oracle_worlds,
             None if limit is None else (limit // jobs + (w < limit % jobs)),
             end_ts, seed)
            for w in range(jobs)
        ]
        report = FuzzReport(names, max_connectives, total)
        with multiprocessing.get_context("fork").Pool(jobs) as pool:
            for part in pool.imap_unordered(_run_slice, tasks):
                report.merge(part)
        report.elapsed = time.monotonic() - start
        return report

    report = FuzzReport(names, max_connectives, total)
    oracle = ValidityOracle(names, oracle_worlds, memo_connectives=max_connectives)
    cache = BuildCache()
    stream = enumerate_formulas(names, max_connectives)
    if seed is not None:
        stream = _shuffled(stream, Random(seed))
    with _gc_paused():
        for f in stream:
            if limit is not None and report.checked >= limit:
                break
            if end_ts is not None and time.monotonic() > end_ts:
                report.completed = False
                break
            _check_formula(f, oracle, budget, report, cache)
            report.checked += 1
            if progress is not None and report.checked % 2000 == 0:
                progress(report.checked, total)
    report.elapsed = time.monotonic() - start
    return report


def format_report(report: FuzzReport) -> str:
    lines = []
    names = ", ".join(report.atoms)
    lines.append(
        f"corpus: atoms {{{names}}}, <= {report.max_connectives} connectives:"
        f" {report.corpus_size} formulas"
    )
    state = "complete" if report.completed and report.checked >= report.corpus_size else (
        "complete (limited)" if report.completed else "partial (deadline)"
    )
    rate = report.checked / report.elapsed if report.elapsed > 0 else 0.0
    lines.append(
        f"checked: {report.checked} [{state}] in {report.elapsed:.1f}s ({rate:.0f}/s)"
    )
    lines.append(f"valid: {report.valid}  invalid: {report.invalid}")
    lines.append(f"countermodels verified: {report.models_verified}")
    bad_dual = sum(1 for x in report.failures if x.kind == "duality")
    lines.append(
        f"duality agreement: {report.duality_checked - bad_dual}/{report.duality_checked}"
    )
    violations = sum(1 for x in report.failures if x.kind == "violation")
    lines.append(
        f"search: {report.nodes_expanded} nodes expanded,"
        f" {report.interleaved_triples} interleaved transitional triples,"
        f" {violations} instrumentation violations"
    )
    lines.append(f"failures: {report.failure_count}")
    if report.failures:
        first = report.failures[0]
        lines.append(f"first failure [{first.kind}] {first.formula}: {first.detail}")
    return "\n".join(lines)
