"""Assertion checking, instance finding and minimal cut sets.

Scenarios are enumerated in canonical order: by number of failed swept
functions, then by combination of functions (declaration order), then by
failure modes (Err before Lost), then by free values (domain order).  All
results are merged in this order, so output never depends on worker count.
"""

from __future__ import annotations

import enum
import itertools
import math
import os
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from failprop.errors import FailpropError
from failprop.expr import FAILURES, STATUS, Status
from failprop.model import (
    Assertion,
    Constraint,
    Equality,
    Model,
    Violation,
    assertion_violations,
    validate_structure,
)
from failprop.semantics import Assignment, Scenario, solve

DEFAULT_MAX_COUNTEREXAMPLES = 10
CHUNK = 64


class Outcome(enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    VACUOUS = "Vacuous"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Counterexample:
    scenario: Scenario
    assignment: Assignment
    violated: tuple[Equality, ...]


@dataclass(frozen=True)
class Statistics:
    scenarios: int = 0
    solutions: int = 0
    matched: int = 0
    counterexamples: int = 0
    empty_scenarios: int = 0
    max_failures: int | None = None
    wall_time: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class Verdict:
    assertion: str
    outcome: Outcome
    counterexamples: tuple[Counterexample, ...] = ()
    stats: Statistics = Statistics()
    warnings: tuple[str, ...] = ()
    violations: tuple[Violation, ...] = ()
    structural: bool = False


@dataclass(frozen=True)
class CutSet:
    failures: tuple[tuple[str, Status], ...]
    condition: tuple[Equality, ...]
    # Free-input valuations under which the failures violate the condition.
    valuations: tuple[tuple[tuple[str, str], ...], ...] = ()

    @property
    def order(self) -> int:
        return len(self.failures)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{f}:{s}" for f, s in self.failures) + "}"


# -- scenario enumeration -------------------------------------------------

@dataclass(frozen=True)
class ScenarioSpace:
    """Scenarios admitted by a constraint, plus the port filters left over."""

    fixed: dict
    swept: tuple[str, ...]
    fixed_values: dict
    swept_free: tuple[str, ...]
    filters: tuple[Equality, ...]
    contradictory: bool
    max_failures: int | None
    values: tuple[str, ...]
    free_order: tuple[str, ...]

    def _bound(self) -> int:
        n = len(self.swept)
        return n if self.max_failures is None else min(n, self.max_failures)

    def size(self) -> int:
        if self.contradictory:
            return 0
        n = len(self.swept)
        statuses = sum(math.comb(n, i) * len(FAILURES) ** i for i in range(self._bound() + 1))
        return statuses * len(self.values) ** len(self.swept_free)

    def __iter__(self) -> Iterator[Scenario]:
        if self.contradictory:
            return
        base = dict(self.fixed)
        for name in self.swept:
            base[name] = Status.OK
        order = list(base)
        for size in range(self._bound() + 1):
            for combo in itertools.combinations(self.swept, size):
                for modes in itertools.product(FAILURES, repeat=size):
                    statuses = dict(base)
                    statuses.update(zip(combo, modes))
                    statuses = {f: statuses[f] for f in order}
                    for vals in itertools.product(self.values, repeat=len(self.swept_free)):
                        free = dict(self.fixed_values)
                        free.update(zip(self.swept_free, vals))
                        yield Scenario(statuses, {p: free[p] for p in self.free_order})


def scenario_space(model: Model, constraint: Constraint,
                   max_failures: int | None = None) -> ScenarioSpace:
    fixed: dict[str, Status] = {}
    fixed_values: dict[str, str] = {}
    filters: list[Equality] = []
    contradictory = False
    free = set(model.free_ports)
    for e in constraint.equalities:
        if e.name in model.function_map:
            if fixed.setdefault(e.name, e.literal) != e.literal:
                contradictory = True
        elif e.name in free and e.attr != STATUS:
            if fixed_values.setdefault(e.name, e.literal) != e.literal:
                contradictory = True
        else:
            filters.append(e)
    exempt = set(constraint.exempt) | set(fixed)
    swept = []
    for f in model.functions:
        if f.name in fixed:
            continue
        if constraint.others_ok and f.name not in exempt:
            fixed[f.name] = Status.OK
        else:
            swept.append(f.name)
    fixed = {f.name: fixed[f.name] for f in model.functions if f.name in fixed}
    swept_free = tuple(p for p in model.free_ports if p not in fixed_values)
    return ScenarioSpace(
        fixed=fixed, swept=tuple(swept), fixed_values=fixed_values, swept_free=swept_free,
        filters=tuple(filters), contradictory=contradictory, max_failures=max_failures,
        values=model.values, free_order=model.free_ports,
    )


def _holds(eq: Equality, a: Assignment) -> bool:
    return a.get(eq.name, eq.attr) == eq.literal


# -- check ----------------------------------------------------------------

@dataclass
class _Partial:
    scenarios: int = 0
    solutions: int = 0
    matched: int = 0
    empty: int = 0
    total: int = 0
    found: list = field(default_factory=list)


def _evaluate(model: Model, filters, conclusion, scenarios: Iterable[Scenario],
              cap: int | None) -> _Partial:
    acc = _Partial()
    for sc in scenarios:
        acc.scenarios += 1
        solutions = solve(model, sc)
        if not solutions:
            acc.empty += 1
        for a in solutions:
            acc.solutions += 1
            if not all(_holds(e, a) for e in filters):
                continue
            acc.matched += 1
            violated = tuple(e for e in conclusion if not _holds(e, a))
            if violated:
                acc.total += 1
                if cap is None or len(acc.found) < cap:
                    acc.found.append(Counterexample(sc, a, violated))
    return acc


_WORKER_STATE: tuple | None = None


def _init_worker(model, filters, conclusion, cap):
    global _WORKER_STATE
    _WORKER_STATE = (model, filters, conclusion, cap)


def _evaluate_block(block):
    model, filters, conclusion, cap = _WORKER_STATE
    return _evaluate(model, filters, conclusion, block, cap)


def _chunks(it: Iterator, size: int):
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield block


def _merge(merged: _Partial, part: _Partial, cap):
    merged.scenarios += part.scenarios
    merged.solutions += part.solutions
    merged.matched += part.matched
    merged.empty += part.empty
    merged.total += part.total
    room = None if cap is None else max(cap - len(merged.found), 0)
    merged.found.extend(part.found if room is None else part.found[:room])


def _run(model, filters, conclusion, space, cap, workers) -> _Partial:
    if workers <= 1:
        return _evaluate(model, filters, conclusion, space, cap)
    merged = _Partial()
    pending: deque = deque()
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                             initargs=(model, filters, conclusion, cap)) as pool:
        for block in _chunks(iter(space), CHUNK):
            pending.append(pool.submit(_evaluate_block, block))
            # bounded window; results are merged strictly in submission order
            if len(pending) >= 4 * workers:
                _merge(merged, pending.popleft().result(), cap)
        while pending:
            _merge(merged, pending.popleft().result(), cap)
    return merged


def _structural_verdict(model: Model, assertion: Assertion) -> Verdict:
    violations = tuple(validate_structure(model))
    outcome = Outcome.FAILS if violations else Outcome.HOLDS
    return Verdict(assertion.name, outcome, violations=violations, structural=True)


def check(model: Model, assertion: Assertion, *, max_failures: int | None = None,
          max_counterexamples: int | None = DEFAULT_MAX_COUNTEREXAMPLES,
          workers: int = 1) -> Verdict:
    """Check ``assertion`` over every scenario its hypothesis admits.

    Holds when every matching (scenario, assignment) pair satisfies the
    conclusion and at least one pair exists; Vacuous when none exists.
    ``max_failures`` bounds how many swept functions may fail at once
    (None sweeps them all).
    """
    if assertion.structural:
        return _structural_verdict(model, assertion)
    if assertion not in model.assertions:
        problems = assertion_violations(model, assertion)
        if problems:
            raise FailpropError(f"assertion {assertion.name} is not bound to the model: "
                                f"{problems[0].message}")
    started = time.perf_counter()
    space = scenario_space(model, assertion.hypothesis, max_failures)
    acc = _run(model, space.filters, assertion.conclusion, space, max_counterexamples,
               workers)
    stats = Statistics(acc.scenarios, acc.solutions, acc.matched, acc.total, acc.empty,
                       max_failures, time.perf_counter() - started)
    warnings = []
    if acc.matched == 0:
        outcome = Outcome.VACUOUS
        warnings.append("hypothesis admits no scenario/assignment pair")
    elif acc.total:
        outcome = Outcome.FAILS
    else:
        outcome = Outcome.HOLDS
    if acc.empty:
        warnings.append(f"{acc.empty} scenario(s) have no consistent assignment")
    if max_failures is not None and len(space.swept) > max_failures:
        warnings.append(f"bounded search: at most {max_failures} simultaneous failure(s) "
                        f"among {len(space.swept)} unconstrained function(s)")
    return Verdict(assertion.name, outcome, tuple(acc.found), stats, tuple(warnings))


def check_all(model: Model, **kwargs) -> list[Verdict]:
    if not model.assertions:
        raise FailpropError("no assertions")
    return [check(model, a, **kwargs) for a in model.assertions]


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("FAILPROP_WORKERS", "1")))
    except ValueError:
        return 1


# -- run ------------------------------------------------------------------

def run_instance(model: Model, constraint: Constraint,
                 max_failures: int | None = None) -> tuple[Scenario, Assignment] | None:
    """First (scenario, assignment) pair, in canonical order, meeting ``constraint``."""
    space = scenario_space(model, constraint, max_failures)
    for sc in space:
        for a in solve(model, sc):
            if all(_holds(e, a) for e in space.filters):
                return sc, a
    return None


# -- cut sets -------------------------------------------------------------

def _violating_valuations(model, failures, condition) -> tuple[list, int]:
    statuses = {f.name: Status.OK for f in model.functions}
    statuses.update(failures)
    free = model.free_ports
    hits, total = [], 0
    for vals in itertools.product(model.values, repeat=len(free)):
        total += 1
        sc = Scenario(statuses, dict(zip(free, vals)))
        if any(not all(_holds(e, a) for e in condition) for a in solve(model, sc)):
            hits.append(tuple(zip(free, vals)))
    return hits, total


def violates(model: Model, failures, condition, *, every_valuation: bool = True) -> bool:
    """Do ``failures`` (others OK) break ``condition``, for every free valuation?"""
    hits, total = _violating_valuations(model, dict(failures), condition)
    return len(hits) == total if every_valuation else bool(hits)


def minimal_cutsets(model: Model, condition, max_order: int, *,
                    every_valuation: bool = True) -> list[CutSet]:
    """Minimal failure combinations of size <= ``max_order`` that break ``condition``.

    A combination counts when, with every other function OK, some assignment
    violates the condition under every free-input valuation (or under at least
    one, with ``every_valuation=False``).
    """
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    condition = tuple(condition)
    names = [f.name for f in model.functions]
    found: list[CutSet] = []
    for order in range(1, min(max_order, len(names)) + 1):
        layer = []
        for combo in itertools.combinations(names, order):
            for modes in itertools.product(FAILURES, repeat=order):
                failures = tuple(zip(combo, modes))
                pairs = set(failures)
                if any(set(c.failures) <= pairs for c in found):
                    continue
                hits, total = _violating_valuations(model, dict(failures), condition)
                ok = len(hits) == total if every_valuation else bool(hits)
                if ok:
                    layer.append(CutSet(tuple(sorted(failures, key=_pair_key)), condition,
                                        tuple(hits)))
        found.extend(sorted(layer, key=lambda c: [_pair_key(p) for p in c.failures]))
    return found


def _pair_key(pair):
    return pair[0], pair[1].value
