import itertools

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as hst

from failprop.errors import EngineError
from failprop.expr import Status, chain, eq, eval_expr, lit, st, val
from failprop.model import Flow, FunctionDecl, Transfer, build_model
from failprop.semantics import (
    all_scenarios,
    make_scenario,
    solution_count_is_one,
    solve,
)
from oracles import consistency_violations, enumerate_assignments, key, naive_assignments
from strategies import models

OK, Err, Lost = Status.OK, Status.Err, Status.Lost


def transfer(model, fname, port):
    return model.function_map[fname].transfers[port]


@pytest.mark.parametrize("own,sbas,expected", [
    (OK, Err, Err), (Lost, OK, Lost), (Err, OK, Err), (OK, OK, OK),
])
def test_compute_lpv_transfer(baseline, own, sbas, expected):
    expr = transfer(baseline, "ComputeLPV1", "oDeviation1").status
    env = {("ComputeLPV1", "status"): own, ("iSBAS1", "status"): sbas, ("iSBAS1", "value"): "v0"}
    assert eval_expr(expr, env) is expected


def test_acquire_follows_selection(baseline):
    expr = transfer(baseline, "Acquire1", "oSelected1").status
    env = {("Acquire1", "status"): OK, ("iSelection1", "value"): "v1",
           ("iSelection1", "status"): OK,
           ("iDeviation11", "status"): OK, ("iDeviation21", "status"): Lost}
    assert eval_expr(expr, env) is Lost
    env["iSelection1", "value"] = "v0"
    assert eval_expr(expr, env) is OK


def test_unresolved_reference_is_engine_error():
    with pytest.raises(EngineError):
        eval_expr(chain((eq(st("x"), lit(OK)), lit(OK)), default=lit(Err)), {})


def test_first_matching_branch_wins():
    c = chain((eq(st("F"), lit(OK)), lit(Err)), (eq(st("F"), lit(OK)), lit(Lost)), default=lit(OK))
    assert eval_expr(c, {("F", "status"): OK}) is Err
    assert eval_expr(c, {("F", "status"): Lost}) is OK


def series():
    f = FunctionDecl("F", (), ("oF",), {"oF": Transfer(chain(default=st("F")))})
    g = FunctionDecl("G", ("iG",), ("oG",), {"oG": Transfer(chain(
        (eq(st("G"), lit(OK)), st("iG")), default=st("G")))})
    return build_model("series", ["v0"], [f, g], [Flow("oF", "iG")])


def test_series_all_ok():
    m = series()
    [a] = solve(m, make_scenario(m))
    assert set(a.port_status.values()) == {OK}


def test_series_propagates_failure():
    m = series()
    [a] = solve(m, make_scenario(m, {"F": Lost}))
    assert a.port_status == {"oF": Lost, "iG": Lost, "oG": Lost}


def test_baseline_all_ok_unique_and_matches_brute_force(baseline):
    sc = make_scenario(baseline, free_values={"iPilot": "v1"})
    sols = solve(baseline, sc)
    assert len(sols) == 1
    a = sols[0]
    assert all(a.port_status[f"oSelected{i}"] is OK for i in (1, 2, 3))
    assert [key(x) for x in enumerate_assignments(baseline, sc)] == [key(a)]


def test_baseline_gps_err_loses_a_display(baseline):
    sc = make_scenario(baseline, {"GPS": Err}, {"iPilot": "v1"})
    [a] = solve(baseline, sc)
    assert any(a.port_status[f"oSelected{i}"] is not OK for i in (1, 2, 3))
    assert consistency_violations(baseline, sc, a) == []


def loop(anchored: bool):
    if anchored:
        t = Transfer(chain((eq(st("G"), lit(OK)), lit(OK)), default=st("i")))
    else:
        t = Transfer(chain(default=st("i")), chain(default=val("i")))
    g = FunctionDecl("G", ("i",), ("o",), {"o": t})
    return build_model("loop", ["v0", "v1"], [g], [Flow("o", "i")])


def test_unanchored_loop_has_many_solutions():
    m = loop(anchored=False)
    rep = solution_count_is_one(m)
    assert not rep.unique
    assert rep.solutions == 6 and rep.witness is not None
    assert len(solve(m, rep.witness)) == len(naive_assignments(m, rep.witness))


def test_anchored_loop_all_ok_unique():
    m = loop(anchored=True)
    assert len(solve(m, make_scenario(m))) == 1


def test_inconsistent_loop_gives_empty_list():
    # o is OK exactly when its own input is not OK
    t = Transfer(chain((eq(st("i"), lit(OK)), lit(Lost)), default=lit(OK)))
    g = FunctionDecl("G", ("i",), ("o",), {"o": t})
    m = build_model("liar", ["v0"], [g], [Flow("o", "i")])
    assert solve(m, make_scenario(m)) == []
    rep = solution_count_is_one(m)
    assert not rep.unique and rep.solutions == 0


def test_acyclic_models_are_unique(baseline, hardened):
    assert solution_count_is_one(baseline).unique
    assert solution_count_is_one(hardened).unique


def test_baseline_uniqueness_sweep_single_and_double_failures(baseline):
    # the full 3^16 x 2 space is out of reach; sweep every scenario with <= 2 failures
    names = [f.name for f in baseline.functions]
    scenarios = (
        make_scenario(baseline, dict(zip(combo, modes)), {"iPilot": v})
        for k in (0, 1, 2)
        for combo in itertools.combinations(names, k)
        for modes in itertools.product((Err, Lost), repeat=k)
        for v in baseline.values
    )
    rep = solution_count_is_one(baseline, scenarios)
    assert rep.unique
    assert rep.scenarios_checked == 2 * (1 + 16 * 2 + 120 * 4)


def test_make_scenario_rejects_unknown_names(baseline):
    with pytest.raises(KeyError):
        make_scenario(baseline, {"Nope": Err})


def test_all_scenarios_count():
    m = series()
    assert len(list(all_scenarios(m))) == 9


def canonical(m, a):
    order = [Status.OK, Status.Err, Status.Lost]
    return [(order.index(a.port_status[p]), m.values.index(a.port_value[p]))
            for p in sorted(m.ports)]


def _scenarios(m):
    return hst.sampled_from(list(itertools.islice(all_scenarios(m), 400)))


@settings(max_examples=120, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(hst.data())
def test_solve_matches_exhaustive_enumeration(data):
    m = data.draw(models(max_ports=8))
    sc = data.draw(_scenarios(m))
    got = solve(m, sc)
    assert [canonical(m, a) for a in got] == sorted(canonical(m, a) for a in got)
    assert {key(a) for a in got} == {key(a) for a in enumerate_assignments(m, sc)}
    assert len({key(a) for a in got}) == len(got)
    for a in got:
        assert consistency_violations(m, sc, a) == []


@settings(max_examples=40, deadline=None)
@given(hst.data())
def test_pruned_oracle_equals_full_product(data):
    m = data.draw(models(max_functions=3, max_ports=3))
    sc = data.draw(_scenarios(m))
    assert {key(a) for a in enumerate_assignments(m, sc)} == naive_assignments(m, sc)


@settings(max_examples=40, deadline=None)
@given(hst.data())
def test_solve_is_pure(data):
    m = data.draw(models())
    sc = data.draw(_scenarios(m))
    assert solve(m, sc) == solve(m, sc)


@settings(max_examples=40, deadline=None)
@given(models())
def test_acyclic_random_models_have_one_solution(m):
    if not m.graph.is_acyclic:
        return
    for sc in itertools.islice(all_scenarios(m), 50):
        assert len(solve(m, sc)) == 1
