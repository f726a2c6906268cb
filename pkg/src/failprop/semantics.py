"""Failure propagation: from a scenario to every consistent port assignment.

A scenario fixes the status of every function and the value of every free
input.  An assignment gives every port a status and a value such that

* ports joined by a flow agree on both status and value;
* every output equals its transfer evaluated on its function's status and
  inputs (outputs without a value transfer carry the default value);
* an input with no incoming flow is OK and carries its free value, or the
  default value when it is not free.

Ports are solved SCC by SCC in dependency order.  Acyclic components are
evaluated directly; a cyclic component has all joint candidates for its
outputs enumerated and filtered, so a loop may have zero or several solutions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from failprop.expr import STATUS, STATUS_INDEX, STATUSES, VALUE, Status, eval_expr
from failprop.model import Direction, Model


@dataclass(frozen=True)
class Scenario:
    statuses: Mapping[str, Status]
    free_values: Mapping[str, str]

    def failures(self) -> dict[str, Status]:
        return {f: s for f, s in self.statuses.items() if s is not Status.OK}


@dataclass(frozen=True)
class Assignment:
    port_status: Mapping[str, Status]
    port_value: Mapping[str, str]

    def get(self, port: str, attr: str):
        return self.port_status[port] if attr == STATUS else self.port_value[port]


def make_scenario(model: Model, statuses=None, free_values=None) -> Scenario:
    """Total scenario: unnamed functions are OK, unnamed free inputs take the default."""
    statuses = dict(statuses or {})
    free_values = dict(free_values or {})
    unknown = (set(statuses) - set(model.function_map)) | (set(free_values) - set(model.free_ports))
    if unknown:
        raise KeyError(f"not in model: {sorted(unknown)}")
    return Scenario(
        {f.name: statuses.get(f.name, Status.OK) for f in model.functions},
        {p: free_values.get(p, model.default_value) for p in model.free_ports},
    )


def check_scenario(model: Model, scenario: Scenario) -> None:
    if set(scenario.statuses) != set(model.function_map):
        raise ValueError("scenario must give a status to exactly the model's functions")
    if set(scenario.free_values) != set(model.free_ports):
        raise ValueError("scenario must give a value to exactly the model's free inputs")


def _function_env(model: Model, fname: str, scenario: Scenario, status, value) -> dict:
    f = model.function_map[fname]
    env = {(fname, STATUS): scenario.statuses[fname]}
    for p in f.inputs:
        if p in status:
            env[(p, STATUS)] = status[p]
            env[(p, VALUE)] = value[p]
    return env


def _output_state(model: Model, port: str, scenario: Scenario, status, value):
    owner = model.ports[port].owner
    tr = model.function_map[owner].transfers[port]
    env = _function_env(model, owner, scenario, status, value)
    s = eval_expr(tr.status, env)
    v = eval_expr(tr.value, env) if tr.value is not None else model.default_value
    return s, v


def _input_state(model: Model, port: str, scenario: Scenario, status, value):
    src = model.flow_source.get(port)
    if src is not None:
        return status[src], value[src]
    return Status.OK, scenario.free_values.get(port, model.default_value)


def _solve_cyclic(model, scc, scenario, status, value) -> Iterator[tuple[dict, dict]]:
    outputs = [p for p in scc if model.ports[p].direction is Direction.OUTPUT]
    inputs = [p for p in scc if model.ports[p].direction is Direction.INPUT]
    choices = []
    for p in outputs:
        tr = model.function_map[model.ports[p].owner].transfers[p]
        values = model.values if tr.value is not None else (model.default_value,)
        choices.append(list(itertools.product(STATUSES, values)))
    for combo in itertools.product(*choices):
        s, v = dict(status), dict(value)
        for p, (ps, pv) in zip(outputs, combo):
            s[p], v[p] = ps, pv
        # inputs inside a cycle are always fed by a flow from the same SCC
        for p in inputs:
            s[p], v[p] = _input_state(model, p, scenario, s, v)
        if all(_output_state(model, p, scenario, s, v) == (s[p], v[p]) for p in outputs):
            yield s, v


def assignment_key(model: Model, a: Assignment) -> tuple:
    value_index = {v: i for i, v in enumerate(model.values)}
    return tuple(
        (STATUS_INDEX[a.port_status[p]], value_index[a.port_value[p]])
        for p in sorted(model.ports)
    )


def solve(model: Model, scenario: Scenario) -> list[Assignment]:
    """Every assignment consistent with ``scenario``, deduplicated, canonically ordered."""
    check_scenario(model, scenario)
    graph = model.graph
    partials: list[tuple[dict, dict]] = [({}, {})]
    for scc, cyclic in zip(graph.sccs, graph.cyclic):
        if not cyclic:
            (p,) = scc
            is_output = model.ports[p].direction is Direction.OUTPUT
            for status, value in partials:
                if is_output:
                    status[p], value[p] = _output_state(model, p, scenario, status, value)
                else:
                    status[p], value[p] = _input_state(model, p, scenario, status, value)
        else:
            partials = [
                sv for status, value in partials
                for sv in _solve_cyclic(model, scc, scenario, status, value)
            ]
            if not partials:
                return []
    order = list(model.ports)
    unique = {}
    for status, value in partials:
        a = Assignment({p: status[p] for p in order}, {p: value[p] for p in order})
        unique.setdefault(assignment_key(model, a), a)
    return [unique[k] for k in sorted(unique)]


def all_scenarios(model: Model) -> Iterator[Scenario]:
    """The whole unconstrained scenario space in product order."""
    fnames = [f.name for f in model.functions]
    free = list(model.free_ports)
    for statuses in itertools.product(STATUSES, repeat=len(fnames)):
        for values in itertools.product(model.values, repeat=len(free)):
            yield Scenario(dict(zip(fnames, statuses)), dict(zip(free, values)))


@dataclass(frozen=True)
class UniquenessReport:
    unique: bool
    witness: Scenario | None = None
    solutions: int = 1
    scenarios_checked: int = 0


def solution_count_is_one(model: Model, scenarios=None) -> UniquenessReport:
    """Whether every scenario has exactly one assignment.

    Acyclic models are unique by construction and answered without a sweep.
    Otherwise ``scenarios`` (default: the full space) is swept and the first
    scenario with zero or several solutions is returned as witness.
    """
    if model.graph.is_acyclic and scenarios is None:
        return UniquenessReport(True)
    n = 0
    for sc in scenarios if scenarios is not None else all_scenarios(model):
        n += 1
        k = len(solve(model, sc))
        if k != 1:
            return UniquenessReport(False, sc, k, n)
    return UniquenessReport(True, None, 1, n)
