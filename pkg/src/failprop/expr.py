"""Transfer expressions: guarded conditional chains over statuses and values.

A transfer is a :class:`Chain`. Its branches are tested top to bottom and the
first guard that holds selects the result; the trailing default makes every
chain total.  Guards are boolean combinations of :class:`Compare` atoms.

Terms are one of

* ``Ref(name, "status")`` / ``Ref(name, "value")`` -- an input port of the
  owning function, or ``Ref(owner, "status")`` for the function's own status;
* ``StatusLit`` -- one of OK, Err, Lost;
* ``ValueLit`` -- a member of the model's value domain.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Union

from failprop.errors import EngineError, SourceSpan


class Status(enum.Enum):
    OK = "OK"
    Err = "Err"
    Lost = "Lost"

    def __str__(self) -> str:
        return self.value


STATUSES: tuple[Status, ...] = (Status.OK, Status.Err, Status.Lost)
STATUS_INDEX = {s: i for i, s in enumerate(STATUSES)}
FAILURES: tuple[Status, ...] = (Status.Err, Status.Lost)

STATUS = "status"
VALUE = "value"


@dataclass(frozen=True)
class Ref:
    name: str
    attr: str
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return f"{self.name}.{self.attr}"


@dataclass(frozen=True)
class StatusLit:
    status: Status
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return self.status.value


@dataclass(frozen=True)
class ValueLit:
    name: str
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return self.name


Term = Union[Ref, StatusLit, ValueLit]


@dataclass(frozen=True)
class Compare:
    left: Term
    op: str  # "=" or "!="
    right: Term
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class And:
    args: tuple["Guard", ...]
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Or:
    args: tuple["Guard", ...]
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    arg: "Guard"
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


Guard = Union[Compare, And, Or, Not]


@dataclass(frozen=True)
class Chain:
    branches: tuple[tuple[Guard, Term], ...]
    default: Term
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


# -- construction helpers -------------------------------------------------

def st(name: str) -> Ref:
    return Ref(name, STATUS)


def val(name: str) -> Ref:
    return Ref(name, VALUE)


def lit(x: Status | str) -> StatusLit | ValueLit:
    return StatusLit(x) if isinstance(x, Status) else ValueLit(x)


def _term(x) -> Term:
    return x if isinstance(x, (Ref, StatusLit, ValueLit)) else lit(x)


def eq(a, b) -> Compare:
    return Compare(_term(a), "=", _term(b))


def ne(a, b) -> Compare:
    return Compare(_term(a), "!=", _term(b))


def all_of(*args: Guard) -> And:
    return And(tuple(args))


def any_of(*args: Guard) -> Or:
    return Or(tuple(args))


def negate(arg: Guard) -> Not:
    return Not(arg)


def chain(*branches, default) -> Chain:
    """``chain((guard, result), ..., default=result)``."""
    return Chain(tuple((g, _term(r)) for g, r in branches), _term(default))


# -- traversal ------------------------------------------------------------

def iter_terms(node):
    """Yield every term occurring in a chain or guard, in source order."""
    if isinstance(node, Chain):
        for guard, result in node.branches:
            yield from iter_terms(guard)
            yield result
        yield node.default
    elif isinstance(node, Compare):
        yield node.left
        yield node.right
    elif isinstance(node, (And, Or)):
        for a in node.args:
            yield from iter_terms(a)
    elif isinstance(node, Not):
        yield from iter_terms(node.arg)
    else:
        yield node


def refs(node) -> list[Ref]:
    return [t for t in iter_terms(node) if isinstance(t, Ref)]


def term_sort(term: Term) -> str:
    if isinstance(term, Ref):
        return term.attr
    return STATUS if isinstance(term, StatusLit) else VALUE


# -- evaluation -----------------------------------------------------------

Env = Mapping[tuple[str, str], Union[Status, str]]


def _eval_term(term: Term, env: Env):
    if isinstance(term, StatusLit):
        return term.status
    if isinstance(term, ValueLit):
        return term.name
    try:
        return env[(term.name, term.attr)]
    except KeyError:
        raise EngineError(f"unresolved reference {term}") from None


def eval_guard(guard: Guard, env: Env) -> bool:
    if isinstance(guard, Compare):
        same = _eval_term(guard.left, env) == _eval_term(guard.right, env)
        return same if guard.op == "=" else not same
    if isinstance(guard, And):
        return all(eval_guard(a, env) for a in guard.args)
    if isinstance(guard, Or):
        return any(eval_guard(a, env) for a in guard.args)
    if isinstance(guard, Not):
        return not eval_guard(guard.arg, env)
    raise EngineError(f"not a guard: {guard!r}")


def eval_expr(expr: Chain, env: Env):
    """Evaluate a chain first-match; returns a Status or a value name."""
    for guard, result in expr.branches:
        if eval_guard(guard, env):
            return _eval_term(result, env)
    return _eval_term(expr.default, env)
