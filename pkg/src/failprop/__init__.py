"""Bounded exhaustive checking of failure propagation in dataflow architectures."""

__version__ = "0.1.0"

from failprop.checker import (  # noqa: E402
    CutSet,
    Outcome,
    Verdict,
    check,
    check_all,
    minimal_cutsets,
    run_instance,
)
from failprop.dsl import parse_assertion, parse_model, serialize  # noqa: E402
from failprop.expr import Status  # noqa: E402
from failprop.model import Model, build_model, dependency_graph, validate_structure  # noqa: E402
from failprop.semantics import Assignment, Scenario, make_scenario, solve  # noqa: E402

__all__ = [
    "Assignment", "CutSet", "Model", "Outcome", "Scenario", "Status", "Verdict",
    "build_model", "check", "check_all", "dependency_graph", "make_scenario",
    "minimal_cutsets", "parse_assertion", "parse_model", "run_instance", "serialize",
    "solve", "validate_structure",
]
