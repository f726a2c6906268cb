"""The LPV approach-guidance architecture, baseline and hardened.

GPS and Galileo feed two SBAS computations, each SBAS feeds one LPV
computation, and both LPV deviations reach three displays.  Each display
(``Acquire<i>``) shows the LPV output selected by the pilot, a monitor raises a
discrepancy when the two LPV outputs disagree with one of them erroneous, and a
crosscheck resets a display whose data differs from both other displays.

The hardened variant adds, for each LPV computation, an RNAV receiver and a
baro-altimeter as a dissimilar backup, and an alarm output.

Port naming: ``iDeviation<j><i>`` is LPV ``j`` as seen by display ``i``,
``iCompare<j><i>`` the same for monitor ``i``, and ``iCheck<i><k>`` is display
``k`` as seen by crosscheck ``i``.

Both models also ship as ``.fprop`` files in :mod:`failprop.data`; the files
and the constructors below must stay structurally equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from failprop.checker import Outcome
from failprop.dsl import parse_model
from failprop.expr import Status, all_of, any_of, chain, eq, ne, st, val
from failprop.model import (
    Assertion,
    Constraint,
    Equality,
    Flow,
    FunctionDecl,
    Model,
    Transfer,
    build_model,
)

OK, Err, Lost = Status.OK, Status.Err, Status.Lost
VALUES = ("v0", "v1")
DISPLAYS = (1, 2, 3)
LPVS = (1, 2)


def _source(name: str, out: str) -> FunctionDecl:
    return FunctionDecl(name, (), (out,), {out: Transfer(chain(default=st(name)))})


def _passthrough_status(fname: str):
    return chain(default=st(fname))


def _select_source() -> FunctionDecl:
    return FunctionDecl(
        "SelectSource", ("iPilot",), ("oSelection",),
        {"oSelection": Transfer(_passthrough_status("SelectSource"), chain(default=val("iPilot")))},
        frozenset({"iPilot"}),
    )


def _sbas(i: int) -> FunctionDecl:
    f, gps, gal = f"ComputeSBAS{i}", f"iGPS{i}", f"iGalileo{i}"
    status = chain(
        (eq(st(f), Lost), Lost),
        (eq(st(f), Err), Err),
        (all_of(eq(st(gps), OK), eq(st(gal), OK)), OK),
        (all_of(eq(st(gps), Err), eq(st(gal), OK)), Lost),
        (all_of(eq(st(gps), OK), eq(st(gal), Err)), Lost),
        (any_of(eq(st(gps), OK), eq(st(gal), OK)), OK),
        (any_of(eq(st(gps), Err), eq(st(gal), Err)), Err),
        default=Lost,
    )
    return FunctionDecl(f, (gps, gal), (f"oSBAS{i}",), {f"oSBAS{i}": Transfer(status)})


def _lpv_baseline(j: int) -> FunctionDecl:
    f, sbas = f"ComputeLPV{j}", f"iSBAS{j}"
    status = chain(
        (eq(st(f), OK), st(sbas)),
        (eq(st(f), Lost), Lost),
        default=Err,
    )
    return FunctionDecl(f, (sbas,), (f"oDeviation{j}",), {f"oDeviation{j}": Transfer(status)})


def _lpv_hardened(j: int) -> FunctionDecl:
    f, sbas, rnav, baro = f"ComputeLPV{j}", f"iSBAS{j}", f"iRNAV{j}", f"iBaroAltimeter{j}"
    status = chain(
        (eq(st(f), Lost), Lost),
        (eq(st(f), Err), Err),
        (eq(st(sbas), OK), OK),
        (all_of(eq(st(sbas), Lost), eq(st(rnav), OK), eq(st(baro), OK)), OK),
        (all_of(eq(st(sbas), Lost), any_of(eq(st(rnav), Lost), eq(st(baro), Lost))), Lost),
        (all_of(eq(st(sbas), Lost), any_of(eq(st(rnav), Err), eq(st(baro), Err))), Err),
        (all_of(eq(st(sbas), Err), any_of(eq(st(rnav), Lost), eq(st(baro), Lost))), Err),
        (all_of(eq(st(sbas), Err), eq(st(rnav), OK), eq(st(baro), OK)), Lost),
        (all_of(eq(st(sbas), Err), any_of(eq(st(rnav), Err), eq(st(baro), Err))), Lost),
        default=Err,
    )
    alarm = chain(
        (all_of(eq(st(f), OK), ne(st(sbas), Lost), ne(st(rnav), Lost), ne(st(baro), Lost),
                any_of(eq(st(sbas), Err), eq(st(rnav), Err), eq(st(baro), Err))), "v1"),
        (all_of(eq(st(f), OK), eq(st(sbas), Err), any_of(eq(st(rnav), OK), eq(st(baro), OK))),
         "v1"),
        (all_of(eq(st(f), OK), eq(st(sbas), Lost), any_of(eq(st(rnav), Lost), eq(st(baro), Lost))),
         "v1"),
        default="v0",
    )
    return FunctionDecl(
        f, (sbas, rnav, baro), (f"oDeviation{j}", f"LPV{j}_alarm"),
        {
            f"oDeviation{j}": Transfer(status),
            f"LPV{j}_alarm": Transfer(_passthrough_status(f), alarm),
        },
    )


def _acquire(i: int) -> FunctionDecl:
    f, sel, d1, d2 = f"Acquire{i}", f"iSelection{i}", f"iDeviation1{i}", f"iDeviation2{i}"
    status = chain(
        (all_of(eq(st(f), OK), eq(val(sel), "v0")), st(d1)),
        (all_of(eq(st(f), OK), eq(val(sel), "v1")), st(d2)),
        (eq(st(f), Lost), Lost),
        default=Err,
    )
    return FunctionDecl(f, (sel, d1, d2), (f"oSelected{i}",), {f"oSelected{i}": Transfer(status)})


def _monitor(i: int) -> FunctionDecl:
    f, a, b = f"Monitor{i}", f"iCompare1{i}", f"iCompare2{i}"
    value = chain(
        (all_of(eq(st(f), OK), ne(st(a), st(b)), any_of(eq(st(a), Err), eq(st(b), Err))), "v1"),
        default="v0",
    )
    out = f"oDiscrepancy{i}"
    return FunctionDecl(f, (a, b), (out,), {out: Transfer(_passthrough_status(f), value)})


def _crosscheck(i: int) -> FunctionDecl:
    f = f"Crosscheck{i}"
    own = f"iCheck{i}{i}"
    others = [f"iCheck{i}{k}" for k in DISPLAYS if k != i]
    value = chain(
        (all_of(eq(st(f), OK), ne(st(own), st(others[0])), ne(st(own), st(others[1]))), "v1"),
        default="v0",
    )
    inputs = tuple(f"iCheck{i}{k}" for k in DISPLAYS)
    out = f"oReset{i}"
    return FunctionDecl(f, inputs, (out,), {out: Transfer(_passthrough_status(f), value)})


def _flows(hardened: bool) -> list[Flow]:
    flows = [Flow("oSelection", f"iSelection{i}") for i in DISPLAYS]
    for j in LPVS:
        flows += [Flow("oGPS", f"iGPS{j}"), Flow("oGalileo", f"iGalileo{j}"),
                  Flow(f"oSBAS{j}", f"iSBAS{j}")]
        flows += [Flow(f"oDeviation{j}", f"iDeviation{j}{i}") for i in DISPLAYS]
        flows += [Flow(f"oDeviation{j}", f"iCompare{j}{i}") for i in DISPLAYS]
        if hardened:
            flows += [Flow(f"oRNAV{j}", f"iRNAV{j}"),
                      Flow(f"oBaroAltimeter{j}", f"iBaroAltimeter{j}")]
    for k in DISPLAYS:
        flows += [Flow(f"oSelected{k}", f"iCheck{i}{k}") for i in DISPLAYS]
    return flows


def _when(*eqs: Equality, others_ok: bool = True) -> Constraint:
    return Constraint(tuple(eqs), others_ok)


def _fs(name: str, s: Status) -> Equality:
    return Equality(name, "status", s)


def _pv(name: str, v: str) -> Equality:
    return Equality(name, "value", v)


DISPLAYS_OK = tuple(_fs(f"oSelected{i}", OK) for i in DISPLAYS)
ALARM = (_pv("LPV1_alarm", "v1"),)


def _baseline_assertions() -> list[Assertion]:
    return [
        Assertion("model_structure", structural=True),
        Assertion("one_computer_lost",
                  _when(_fs("ComputeLPV1", Lost), _pv("oSelection", "v1")), DISPLAYS_OK),
        Assertion("one_computer_erroneous", _when(_fs("ComputeLPV1", Err)),
                  tuple(_pv(f"oDiscrepancy{i}", "v1") for i in DISPLAYS)),
        Assertion("one_display_erroneous", _when(_fs("Acquire1", Err)),
                  (_pv("oReset1", "v1"),)),
        Assertion("one_satellite_corrupted", _when(_fs("GPS", Err)), DISPLAYS_OK),
        Assertion("one_satellite_lost", _when(_fs("GPS", Lost)), DISPLAYS_OK),
    ]


def _hardened_assertions() -> list[Assertion]:
    return [
        Assertion("one_satellite_corrupted", _when(_fs("GPS", Err)), DISPLAYS_OK),
        Assertion("one_satellite_lost", _when(_fs("GPS", Lost)), DISPLAYS_OK),
        Assertion("RNAV_lost", _when(_fs("RNAV1", Lost), _fs("RNAV2", Lost)), DISPLAYS_OK),
        Assertion("one_satellite_lost_one_satellite_corrupted",
                  _when(_fs("GPS", Err), _fs("Galileo", Lost)), ALARM),
        Assertion("one_satellite_lost_RNAV_lost",
                  _when(_fs("GPS", Lost), _fs("RNAV1", Lost)), DISPLAYS_OK),
        Assertion("one_satellite_corrupted_RNAV_lost",
                  _when(_fs("GPS", Err), _fs("RNAV1", Lost), _fs("RNAV2", Lost)), ALARM),
        Assertion("one_satellite_corrupted_one_satellite_lost_RNAV_lost",
                  _when(_fs("GPS", Err), _fs("Galileo", Lost), _fs("RNAV1", Lost),
                        _fs("RNAV2", Lost)), ALARM),
    ]


def _functions(hardened: bool) -> list[FunctionDecl]:
    fs = [_select_source(), _source("GPS", "oGPS"), _source("Galileo", "oGalileo")]
    fs += [_sbas(j) for j in LPVS]
    fs += [(_lpv_hardened if hardened else _lpv_baseline)(j) for j in LPVS]
    fs += [_acquire(i) for i in DISPLAYS]
    fs += [_monitor(i) for i in DISPLAYS]
    fs += [_crosscheck(i) for i in DISPLAYS]
    if hardened:
        fs += [_source(f"RNAV{j}", f"oRNAV{j}") for j in LPVS]
        fs += [_source(f"BaroAltimeter{j}", f"oBaroAltimeter{j}") for j in LPVS]
    return fs


def baseline_lpv_model() -> Model:
    return build_model("lpv_baseline", VALUES, _functions(False), _flows(False),
                       _baseline_assertions())


def hardened_lpv_model() -> Model:
    return build_model("lpv_hardened", VALUES, _functions(True), _flows(True),
                       _hardened_assertions())


# -- shipped files ----------------------------------------------------------

SHIPPED = {"baseline": "lpv_baseline.fprop", "hardened": "lpv_hardened.fprop"}


def shipped_path(model_id: str):
    """Filesystem path of a shipped ``.fprop`` file."""
    return resources.files("failprop").joinpath("data").joinpath(SHIPPED[model_id])


def load_shipped(model_id: str) -> Model:
    path = shipped_path(model_id)
    return parse_model(path.read_text(encoding="utf-8"), file=SHIPPED[model_id])


# -- corpus ---------------------------------------------------------------

@dataclass(frozen=True)
class CorpusEntry:
    model_id: str
    assertion: str
    expected: Outcome
    requirement: str


def corpus() -> list[CorpusEntry]:
    H, F = Outcome.HOLDS, Outcome.FAILS
    return [
        CorpusEntry("baseline", "model_structure", H, "structure"),
        CorpusEntry("baseline", "one_computer_lost", H, "Safety 1"),
        CorpusEntry("baseline", "one_computer_erroneous", H, "Safety 2"),
        CorpusEntry("baseline", "one_display_erroneous", H, "Safety 2"),
        CorpusEntry("baseline", "one_satellite_corrupted", F, "Attack 1"),
        CorpusEntry("baseline", "one_satellite_lost", H, "Attack 2"),
        CorpusEntry("hardened", "one_satellite_corrupted", H, "Attack 1"),
        CorpusEntry("hardened", "one_satellite_lost", H, "Attack 2"),
        CorpusEntry("hardened", "RNAV_lost", H, "Attack 3"),
        CorpusEntry("hardened", "one_satellite_lost_one_satellite_corrupted", H, "Attack 4"),
        CorpusEntry("hardened", "one_satellite_lost_RNAV_lost", H, "Attack 5"),
        CorpusEntry("hardened", "one_satellite_corrupted_RNAV_lost", H, "Attack 6"),
        CorpusEntry("hardened", "one_satellite_corrupted_one_satellite_lost_RNAV_lost", H,
                    "Attack 7"),
    ]


def model_for(model_id: str) -> Model:
    return {"baseline": baseline_lpv_model, "hardened": hardened_lpv_model}[model_id]()
