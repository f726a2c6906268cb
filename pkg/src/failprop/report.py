"""Text and JSON renderings of verdicts, instances and cut sets.

JSON documents share one envelope: ``{tool_version, model, command, results}``.
Both renderings are deterministic; wall-clock times appear only on request.
"""

from __future__ import annotations

import json

from failprop import __version__
from failprop.checker import Counterexample, CutSet, Outcome, Verdict
from failprop.model import Model, Violation
from failprop.semantics import Assignment, Scenario


def _envelope(model_name: str, command: str, results: list) -> str:
    doc = {"tool_version": __version__, "model": model_name, "command": command,
           "results": results}
    return json.dumps(doc, indent=2) + "\n"


def _violation_json(v: Violation) -> dict:
    out = {"rule": v.rule, "element": v.element, "message": v.message}
    if v.span is not None:
        out["span"] = {"file": v.span.file, "line": v.span.line, "column": v.span.column,
                       "length": v.span.length}
    return out


def _scenario_json(sc: Scenario) -> dict:
    return {
        "failures": {f: s.value for f, s in sc.failures().items()},
        "statuses": {f: s.value for f, s in sc.statuses.items()},
        "free_values": dict(sc.free_values),
    }


def _assignment_json(a: Assignment) -> dict:
    return {p: {"status": a.port_status[p].value, "value": a.port_value[p]}
            for p in a.port_status}


def _cex_json(c: Counterexample) -> dict:
    return {"scenario": _scenario_json(c.scenario),
            "violated": [str(e) for e in c.violated],
            "assignment": _assignment_json(c.assignment)}


def _verdict_json(v: Verdict, timing: bool) -> dict:
    stats = {
        "scenarios": v.stats.scenarios,
        "solutions": v.stats.solutions,
        "matched": v.stats.matched,
        "counterexamples": v.stats.counterexamples,
        "empty_scenarios": v.stats.empty_scenarios,
        "max_failures": v.stats.max_failures,
    }
    if timing:
        stats["wall_time"] = round(v.stats.wall_time, 6)
    out = {"assertion": v.assertion, "outcome": v.outcome.value, "statistics": stats,
           "counterexamples": [_cex_json(c) for c in v.counterexamples],
           "warnings": list(v.warnings)}
    if v.structural:
        out["violations"] = [_violation_json(x) for x in v.violations]
    return out


def _scenario_lines(sc: Scenario, indent: str) -> list[str]:
    failures = sc.failures()
    text = ", ".join(f"{f}={s}" for f, s in failures.items()) or "none"
    lines = [f"{indent}failures: {text}"]
    if sc.free_values:
        lines.append(f"{indent}free: " + ", ".join(f"{p}={v}" for p, v in sc.free_values.items()))
    return lines


def _port_table(a: Assignment, indent: str) -> list[str]:
    width = max((len(p) for p in a.port_status), default=0)
    return [f"{indent}{p:<{width}}  {a.port_status[p].value:<4}  {a.port_value[p]}"
            for p in a.port_status]


def render_check(model: Model, verdicts: list[Verdict], fmt: str = "text",
                 timing: bool = False) -> str:
    if fmt == "json":
        return _envelope(model.name, "check", [_verdict_json(v, timing) for v in verdicts])
    out = [f"failprop {__version__}: check {model.name}"]
    for v in verdicts:
        s = v.stats
        if v.structural:
            detail = "structure"
        else:
            detail = (f"scenarios={s.scenarios} solutions={s.solutions} matched={s.matched} "
                      f"counterexamples={s.counterexamples}")
            if s.max_failures is not None:
                detail += f" max_failures={s.max_failures}"
        if timing:
            detail += f" time={s.wall_time:.3f}s"
        out.append(f"[{v.outcome.value.upper()}] {v.assertion}  {detail}")
        for w in v.warnings:
            out.append(f"  warning: {w}")
        for x in v.violations:
            out.append(f"  violation: {x}")
        for k, c in enumerate(v.counterexamples, 1):
            out.append(f"  counterexample {k}/{s.counterexamples}")
            out.extend(_scenario_lines(c.scenario, "    "))
            out.append("    violated: " + ", ".join(str(e) for e in c.violated))
            out.append("    ports:")
            out.extend(_port_table(c.assignment, "      "))
    counts = {o: sum(v.outcome is o for v in verdicts) for o in Outcome}
    out.append(f"summary: {counts[Outcome.HOLDS]} holds, {counts[Outcome.FAILS]} fails, "
               f"{counts[Outcome.VACUOUS]} vacuous")
    return "\n".join(out) + "\n"


def render_validate(model_name: str, violations: list[Violation], fmt: str = "text",
                    summary: str = "") -> str:
    if fmt == "json":
        return _envelope(model_name, "validate",
                         [{"valid": not violations,
                           "violations": [_violation_json(v) for v in violations]}])
    if not violations:
        return f"ok: {model_name} {summary}".rstrip() + "\n"
    return "".join(f"{v}\n" for v in violations)


def render_run(model: Model, instance, fmt: str = "text") -> str:
    if fmt == "json":
        result = {"found": instance is not None}
        if instance is not None:
            sc, a = instance
            result["scenario"] = _scenario_json(sc)
            result["assignment"] = _assignment_json(a)
        return _envelope(model.name, "run", [result])
    if instance is None:
        return "no instance\n"
    sc, a = instance
    out = [f"instance of {model.name}"]
    out.extend(_scenario_lines(sc, "  "))
    out.append("  ports:")
    out.extend(_port_table(a, "    "))
    return "\n".join(out) + "\n"


def _cutset_json(c: CutSet) -> dict:
    return {"order": c.order,
            "failures": [{"function": f, "status": s.value} for f, s in c.failures],
            "valuations": [dict(v) for v in c.valuations]}


def render_cutsets(model: Model, cutsets: list[CutSet], condition, max_order: int,
                   fmt: str = "text") -> str:
    if fmt == "json":
        return _envelope(model.name, "cutsets", [{
            "condition": [str(e) for e in condition],
            "max_order": max_order,
            "cutsets": [_cutset_json(c) for c in cutsets],
        }])
    out = [f"failprop {__version__}: cutsets {model.name}",
           "condition: " + " and ".join(str(e) for e in condition),
           f"max order: {max_order}"]
    for order in range(1, max_order + 1):
        layer = [c for c in cutsets if c.order == order]
        out.append(f"order {order}: {len(layer)} cut set(s)")
        out.extend(f"  {c}" for c in layer)
    return "\n".join(out) + "\n"
