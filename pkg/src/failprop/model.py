"""Architecture models: functions, ports, flows, transfers and assertions.

A :class:`Model` is plain immutable data.  :func:`validate_structure` reports
everything wrong with one; :func:`build_model` constructs and refuses to return
an invalid model.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Union

import networkx as nx

from failprop.errors import ModelError, SourceSpan
from failprop.expr import (
    STATUS,
    STATUSES,
    VALUE,
    And,
    Chain,
    Compare,
    Not,
    Or,
    Ref,
    Status,
    ValueLit,
    iter_terms,
    refs,
    term_sort,
)

# Words the DSL treats as syntax; never valid as a model name.
RESERVED = frozenset({
    "model", "values", "function", "in", "out", "free", "flow", "transfer",
    "assert", "when", "expect", "others", "except", "all", "structure",
    "implies", "else", "and", "or", "not", "status", "value",
}) | {s.value for s in STATUSES}


class Direction(enum.Enum):
    INPUT = "in"
    OUTPUT = "out"


@dataclass(frozen=True)
class PortDecl:
    name: str
    direction: Direction
    owner: str
    free: bool = False


@dataclass(frozen=True)
class Transfer:
    status: Chain
    value: Chain | None = None


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    transfers: Mapping[str, Transfer] = field(default_factory=dict)
    free: frozenset[str] = frozenset()
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Flow:
    source: str
    target: str
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Equality:
    """``name.attr = literal`` where name is a function or a port."""

    name: str
    attr: str
    literal: Union[Status, str]
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return f"{self.name}.{self.attr} = {self.literal}"


@dataclass(frozen=True)
class Constraint:
    """Conjunction of equalities, optionally closed by ``others OK``.

    With ``others_ok`` every function that is neither constrained by a status
    equality nor listed in ``exempt`` is fixed to OK.
    """

    equalities: tuple[Equality, ...] = ()
    others_ok: bool = False
    exempt: tuple[str, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.equalities and not self.others_ok


@dataclass(frozen=True)
class Assertion:
    name: str
    hypothesis: Constraint = Constraint()
    conclusion: tuple[Equality, ...] = ()
    structural: bool = False
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Violation:
    rule: str
    element: str
    message: str
    span: SourceSpan | None = field(default=None, compare=False)

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        return f"{where}[{self.rule}] {self.element}: {self.message}"


@dataclass(frozen=True)
class DependencyGraph:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    # Strongly connected components in a topological order of the condensation.
    sccs: tuple[tuple[str, ...], ...]
    cyclic: tuple[bool, ...]

    @property
    def is_acyclic(self) -> bool:
        return not any(self.cyclic)


@dataclass(frozen=True)
class Model:
    name: str
    values: tuple[str, ...]
    functions: tuple[FunctionDecl, ...]
    flows: tuple[Flow, ...] = ()
    assertions: tuple[Assertion, ...] = ()

    def __post_init__(self):
        # Flows are a relation; keep them in canonical order.
        object.__setattr__(
            self, "flows", tuple(sorted(self.flows, key=lambda f: (f.source, f.target)))
        )

    @property
    def default_value(self) -> str:
        return self.values[0]

    @cached_property
    def function_map(self) -> dict[str, FunctionDecl]:
        return {f.name: f for f in self.functions}

    @cached_property
    def ports(self) -> dict[str, PortDecl]:
        """Every port in declaration order (first owner wins on duplicates)."""
        out: dict[str, PortDecl] = {}
        for f in self.functions:
            for p in f.inputs:
                out.setdefault(p, PortDecl(p, Direction.INPUT, f.name, p in f.free))
            for p in f.outputs:
                out.setdefault(p, PortDecl(p, Direction.OUTPUT, f.name))
        return out

    @cached_property
    def flow_source(self) -> dict[str, str]:
        """Input port -> the output feeding it (first flow wins on duplicates)."""
        out: dict[str, str] = {}
        for fl in self.flows:
            out.setdefault(fl.target, fl.source)
        return out

    @cached_property
    def free_ports(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.ports.values() if p.free)

    @cached_property
    def graph(self) -> DependencyGraph:
        return dependency_graph(self)

    def assertion(self, name: str) -> Assertion:
        for a in self.assertions:
            if a.name == name:
                return a
        raise KeyError(name)


# -- validation -----------------------------------------------------------

def _check_name(name, kind, span, out):
    if not name.isascii() or not (name.replace("_", "a").isalnum()) or name[0].isdigit():
        out.append(Violation("identifier", name, f"invalid {kind} name", span))
    elif name in RESERVED:
        out.append(Violation("identifier", name, f"{kind} name is a reserved word", span))


def _check_transfer(model, f, port, attr, expr, out):
    element = f"{port}.{attr}"
    inputs = set(f.inputs)
    for t in iter_terms(expr):
        span = t.span or f.span
        if isinstance(t, ValueLit) and t.name not in model.values:
            out.append(Violation("transfer", element, f"undeclared value {t.name!r}", span))
        elif isinstance(t, Ref):
            if t.name == f.name:
                if t.attr != STATUS:
                    out.append(Violation("transfer", element,
                                         "a function has a status but no value", span))
            elif t.name not in inputs:
                out.append(Violation("transfer", element,
                                     f"reference to {t.name!r}, which is not an input of {f.name}",
                                     span))
    _check_sorts(expr, attr, element, f.span, out)


def _check_sorts(expr: Chain, attr, element, span, out):
    def guard(g):
        if isinstance(g, Compare):
            if term_sort(g.left) != term_sort(g.right):
                out.append(Violation("transfer", element,
                                     f"cannot compare {g.left} with {g.right}", g.span or span))
        elif isinstance(g, (And, Or)):
            for a in g.args:
                guard(a)
        elif isinstance(g, Not):
            guard(g.arg)

    for g, result in expr.branches:
        guard(g)
        if term_sort(result) != attr:
            out.append(Violation("transfer", element,
                                 f"branch yields {result}, expected a {attr}", result.span or span))
    if term_sort(expr.default) != attr:
        out.append(Violation("transfer", element,
                             f"branch yields {expr.default}, expected a {attr}",
                             expr.default.span or span))


def _check_equality(model, eq, element, out, *, port_only):
    span = eq.span
    if eq.name in model.function_map and not port_only:
        if eq.attr != STATUS:
            out.append(Violation("assertion", element,
                                 f"function {eq.name} has a status but no value", span))
    elif eq.name not in model.ports:
        kind = "port" if port_only else "port or function"
        out.append(Violation("assertion", element,
                             f"reference to undeclared {kind} {eq.name!r}", span))
        return
    if eq.attr == STATUS and not isinstance(eq.literal, Status):
        out.append(Violation("assertion", element, f"{eq.literal!r} is not a status", span))
    if eq.attr == VALUE and (isinstance(eq.literal, Status) or eq.literal not in model.values):
        out.append(Violation("assertion", element, f"undeclared value {eq.literal!s}", span))


def assertion_violations(model: Model, a: Assertion) -> list[Violation]:
    out: list[Violation] = []
    for e in a.hypothesis.equalities:
        _check_equality(model, e, a.name, out, port_only=False)
    for name in a.hypothesis.exempt:
        if name not in model.function_map:
            out.append(Violation("assertion", a.name,
                                 f"exempted name {name!r} is not a function", a.span))
    for e in a.conclusion:
        _check_equality(model, e, a.name, out, port_only=True)
    if not a.structural and not a.conclusion:
        out.append(Violation("assertion", a.name, "empty conclusion", a.span))
    return out


def validate_structure(model: Model) -> list[Violation]:
    """Every structural problem with ``model``; empty iff the model is well formed."""
    out: list[Violation] = []

    if not model.values:
        out.append(Violation("values", model.name, "value domain is empty"))
    seen_values: set[str] = set()
    for v in model.values:
        _check_name(v, "value", None, out)
        if v in seen_values:
            out.append(Violation("values", v, "duplicate value"))
        seen_values.add(v)

    # (a) every port belongs to exactly one function; names unique model-wide
    owner: dict[str, str] = {}
    fnames: set[str] = set()
    for f in model.functions:
        _check_name(f.name, "function", f.span, out)
        if f.name in fnames:
            out.append(Violation("unique-name", f.name, "duplicate function name", f.span))
        fnames.add(f.name)
        for p in (*f.inputs, *f.outputs):
            _check_name(p, "port", f.span, out)
            if p in owner:
                out.append(Violation("port-owner", p, "port owned by two functions"
                                     if owner[p] != f.name else "port declared twice", f.span))
            owner.setdefault(p, f.name)
    for name in fnames & set(owner):
        out.append(Violation("unique-name", name, "name used for both a function and a port"))
    for name in (fnames | set(owner)) & set(model.values):
        out.append(Violation("unique-name", name, "name used for both a value and an element"))

    # (b) flows go from output ports to input ports; (c) at most one flow per input
    targeted: dict[str, str] = {}
    for fl in model.flows:
        element = f"{fl.source} -> {fl.target}"
        src, tgt = model.ports.get(fl.source), model.ports.get(fl.target)
        if src is None:
            out.append(Violation("flow", element, f"flow references undeclared port {fl.source!r}",
                                 fl.span))
        elif src.direction is not Direction.OUTPUT:
            out.append(Violation("flow", element, "flow source must be an output port", fl.span))
        if tgt is None:
            out.append(Violation("flow", element, f"flow references undeclared port {fl.target!r}",
                                 fl.span))
        elif tgt.direction is not Direction.INPUT:
            out.append(Violation("flow", element, "flow target must be an input port", fl.span))
        if fl.target in targeted:
            out.append(Violation("flow-fan-in", fl.target, "input targeted by two flows", fl.span))
        targeted[fl.target] = fl.source

    for f in model.functions:
        for p in f.free:
            if p not in f.inputs:
                out.append(Violation("free", p, "only input ports can be free", f.span))
            elif p in targeted:
                out.append(Violation("free", p, "a free input cannot be the target of a flow",
                                     f.span))
        for p, tr in f.transfers.items():
            if p not in f.outputs:
                out.append(Violation("transfer", p,
                                     f"transfer for {p!r}, which is not an output of {f.name}",
                                     f.span))
                continue
            _check_transfer(model, f, p, STATUS, tr.status, out)
            if tr.value is not None:
                _check_transfer(model, f, p, VALUE, tr.value, out)
        for p in f.outputs:
            if p not in f.transfers:
                out.append(Violation("transfer", p, "output lacks a status transfer", f.span))

    anames: set[str] = set()
    for a in model.assertions:
        if a.name in anames:
            out.append(Violation("assertion", a.name, "duplicate assertion name", a.span))
        anames.add(a.name)
        out.extend(assertion_violations(model, a))
    return out


def build_model(name: str, values, functions, flows=(), assertions=()) -> Model:
    """Construct a model, raising :class:`ModelError` if it is not well formed."""
    model = Model(name, tuple(values), tuple(functions), tuple(flows), tuple(assertions))
    violations = validate_structure(model)
    if violations:
        raise ModelError(violations)
    return model


# -- dependency graph -----------------------------------------------------

def dependency_graph(model: Model) -> DependencyGraph:
    """Port-level dependencies and their SCCs in evaluation order.

    Edges run along flows (source -> target) and, inside a function, from an
    input to every output whose transfer mentions that input.
    """
    order = {p: i for i, p in enumerate(model.ports)}
    g = nx.DiGraph()
    g.add_nodes_from(order)
    edges: list[tuple[str, str]] = []
    for fl in model.flows:
        if fl.source in order and fl.target in order:
            edges.append((fl.source, fl.target))
    for f in model.functions:
        for p, tr in f.transfers.items():
            used = {r.name for r in refs(tr.status)}
            if tr.value is not None:
                used |= {r.name for r in refs(tr.value)}
            for i in f.inputs:
                if i in used:
                    edges.append((i, p))
    edges = sorted(set(edges), key=lambda e: (order[e[0]], order[e[1]]))
    g.add_edges_from(edges)

    cond = nx.condensation(g)
    members = {
        c: tuple(sorted(cond.nodes[c]["members"], key=order.__getitem__)) for c in cond.nodes
    }
    topo = nx.lexicographical_topological_sort(cond, key=lambda c: order[members[c][0]])
    sccs = tuple(members[c] for c in topo)
    cyclic = tuple(len(s) > 1 or g.has_edge(s[0], s[0]) for s in sccs)
    return DependencyGraph(tuple(order), tuple(edges), sccs, cyclic)
