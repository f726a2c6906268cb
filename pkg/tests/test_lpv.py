import itertools

import pytest

from failprop.checker import Outcome
from failprop.expr import Status, eval_expr
from failprop.lpv import SHIPPED, corpus, load_shipped, model_for, shipped_path
from failprop.model import validate_structure
from failprop.semantics import make_scenario, solve

OK, Err, Lost = Status.OK, Status.Err, Status.Lost


def test_counts(baseline, hardened):
    assert (len(baseline.functions), len(baseline.ports), len(baseline.flows)) == (16, 47, 30)
    assert (len(hardened.functions), len(hardened.ports), len(hardened.flows)) == (20, 57, 34)
    assert validate_structure(baseline) == [] == validate_structure(hardened)
    assert baseline.graph.is_acyclic and hardened.graph.is_acyclic
    assert baseline.free_ports == hardened.free_ports == ("iPilot",)


def test_hardened_extends_baseline(baseline, hardened):
    base = {f.name for f in baseline.functions}
    hard = {f.name for f in hardened.functions}
    assert hard - base == {"RNAV1", "RNAV2", "BaroAltimeter1", "BaroAltimeter2"}
    assert base <= hard
    changed = {f.name for f in baseline.functions
               if f != hardened.function_map[f.name]}
    assert changed == {"ComputeLPV1", "ComputeLPV2"}
    lpv = hardened.function_map["ComputeLPV1"]
    assert lpv.inputs == ("iSBAS1", "iRNAV1", "iBaroAltimeter1")
    assert lpv.outputs == ("oDeviation1", "LPV1_alarm")


# (own, gps, galileo) -> SBAS output status
SBAS = {
    (OK, OK, OK): OK,
    (OK, Err, OK): Lost, (OK, OK, Err): Lost,
    (OK, Lost, OK): OK, (OK, OK, Lost): OK,
    (OK, Err, Err): Err, (OK, Err, Lost): Err, (OK, Lost, Err): Err,
    (OK, Lost, Lost): Lost,
}


def test_sbas_consolidation(baseline):
    expr = baseline.function_map["ComputeSBAS1"].transfers["oSBAS1"].status
    for (own, gps, gal), want in SBAS.items():
        env = {("ComputeSBAS1", "status"): own, ("iGPS1", "status"): gps,
               ("iGalileo1", "status"): gal, ("iGPS1", "value"): "v0",
               ("iGalileo1", "value"): "v0"}
        assert eval_expr(expr, env) is want
    for own, gps, gal in itertools.product((Err, Lost), (OK, Err, Lost), (OK, Err, Lost)):
        env = {("ComputeSBAS1", "status"): own, ("iGPS1", "status"): gps,
               ("iGalileo1", "status"): gal}
        assert eval_expr(expr, env) is own


def test_monitor_raises_alarm_on_erroneous_lpv(baseline):
    sc = make_scenario(baseline, {"ComputeLPV2": Err})
    [a] = solve(baseline, sc)
    assert all(a.port_value[f"oDiscrepancy{i}"] == "v1" for i in (1, 2, 3))
    [a] = solve(baseline, make_scenario(baseline, {"ComputeLPV2": Lost}))
    assert all(a.port_value[f"oDiscrepancy{i}"] == "v0" for i in (1, 2, 3))


def test_crosscheck_resets_odd_display(baseline):
    [a] = solve(baseline, make_scenario(baseline, {"Acquire2": Err}))
    assert [a.port_value[f"oReset{i}"] for i in (1, 2, 3)] == ["v0", "v1", "v0"]


def test_selection_routes_lpv(baseline):
    for pilot, lost in (("v0", "ComputeLPV1"), ("v1", "ComputeLPV2")):
        [a] = solve(baseline, make_scenario(baseline, {lost: Lost}, {"iPilot": pilot}))
        assert {a.port_status[f"oSelected{i}"] for i in (1, 2, 3)} == {Lost}


def test_hardened_corrupted_gps_keeps_guidance(hardened):
    for pilot in hardened.values:
        [a] = solve(hardened, make_scenario(hardened, {"GPS": Err}, {"iPilot": pilot}))
        assert all(a.port_status[f"oSelected{i}"] is OK for i in (1, 2, 3))


def test_corpus_shape():
    entries = corpus()
    assert len(entries) == 13
    assert sum(e.model_id == "baseline" for e in entries) == 6
    assert [e for e in entries if e.expected is not Outcome.HOLDS] == [
        e for e in entries if (e.model_id, e.assertion) == ("baseline", "one_satellite_corrupted")]
    for e in entries:
        assert model_for(e.model_id).assertion(e.assertion).name == e.assertion


@pytest.mark.parametrize("model_id", SHIPPED)
def test_shipped_files_exist(model_id):
    assert shipped_path(model_id).is_file()
    assert load_shipped(model_id) == model_for(model_id)
