import json
import subprocess
import sys

import pytest

from failprop import __version__
from failprop.cli import RunConfig, cmd_check, main
from failprop.lpv import shipped_path

BASELINE = str(shipped_path("baseline"))
HARDENED = str(shipped_path("hardened"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", BASELINE)
    assert code == 0
    assert out.startswith("ok: lpv_baseline (16 functions, 47 ports, 30 flows")


def test_validate_dangling_flow(tmp_path, capsys):
    bad = tmp_path / "bad.fprop"
    bad.write_text(shipped_path("baseline").read_text().replace(
        "flow oSBAS1 -> iSBAS1", "flow oSBAS1 -> iNowhere"))
    code, out, _ = run(capsys, "validate", str(bad), "--format", "json")
    assert code == 1
    doc = json.loads(out)
    assert doc["results"][0]["valid"] is False
    assert any("iNowhere" in v["message"] for v in doc["results"][0]["violations"])


def test_validate_missing_file(capsys):
    code, _, err = run(capsys, "validate", "/nonexistent/model.fprop")
    assert code == 2 and "cannot read" in err


def test_validate_syntax_error(tmp_path, capsys):
    bad = tmp_path / "bad.fprop"
    bad.write_text("model m\nvalues { v0 }\nfunction {\n")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2 and "bad.fprop:3:" in err


def test_check_hardened_holds(capsys):
    code, out, _ = run(capsys, "check", HARDENED)
    assert code == 0
    assert out.count("[HOLDS]") == 7
    assert out.rstrip().endswith("summary: 7 holds, 0 fails, 0 vacuous")


def test_check_baseline_attack_json(capsys):
    code, out, _ = run(capsys, "check", BASELINE, "--assert", "one_satellite_corrupted",
                       "--format", "json")
    assert code == 1
    doc = json.loads(out)
    assert set(doc) == {"tool_version", "model", "command", "results"}
    assert (doc["tool_version"], doc["model"], doc["command"]) == (
        __version__, "lpv_baseline", "check")
    [r] = doc["results"]
    assert r["outcome"] == "Fails"
    assert r["statistics"]["counterexamples"] == len(r["counterexamples"]) == 2
    assert "wall_time" not in r["statistics"]
    cex = r["counterexamples"][0]
    assert cex["scenario"]["failures"] == {"GPS": "Err"}
    assert cex["assignment"]["oSelected1"]["status"] != "OK"


def test_check_unknown_assertion(capsys):
    code, _, err = run(capsys, "check", BASELINE, "--assert", "nope")
    assert code == 2 and "nope" in err


def test_check_timing_is_opt_in(capsys):
    _, out, _ = run(capsys, "check", HARDENED, "--assert", "RNAV_lost", "--timing")
    assert "time=" in out


def test_check_text_and_json_agree(capsys):
    _, text, _ = run(capsys, "check", BASELINE)
    _, js, _ = run(capsys, "check", BASELINE, "--format", "json")
    for r in json.loads(js)["results"]:
        assert f"[{r['outcome'].upper()}] {r['assertion']} " in text


def test_check_workers_env(monkeypatch, capsys):
    monkeypatch.setenv("FAILPROP_WORKERS", "2")
    code, out, _ = run(capsys, "check", BASELINE, "--assert", "one_satellite_lost")
    assert code == 0 and "[HOLDS] one_satellite_lost" in out


def test_run_instance_found_and_missing(capsys):
    code, out, _ = run(capsys, "run", BASELINE, "--where", "GPS.status = Err and others OK")
    assert code == 0 and "failures: GPS=Err" in out
    code, out, _ = run(capsys, "run", BASELINE, "--where",
                       "oGPS.status = Lost and others OK", "--format", "json")
    assert code == 1 and json.loads(out)["results"] == [{"found": False}]


def test_run_bad_constraint(capsys):
    code, _, err = run(capsys, "run", BASELINE, "--where", "Nope.status = Err")
    assert code == 2 and "--where" in err


def test_cutsets(capsys):
    cond = "oSelected1.status = OK and oSelected2.status = OK and oSelected3.status = OK"
    code, out, _ = run(capsys, "cutsets", BASELINE, "--condition", cond, "--format", "json")
    doc = json.loads(out)["results"][0]
    names = {f["function"] for c in doc["cutsets"] for f in c["failures"]}
    assert "ComputeLPV1" not in names and "ComputeLPV2" not in names
    assert code == (1 if doc["cutsets"] else 0)


def test_cutsets_order_zero_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["cutsets", BASELINE, "--condition", "oSelected1.status = OK", "--order", "0"])
    assert exc.value.code == 2


def test_no_assertions(tmp_path, capsys):
    m = tmp_path / "m.fprop"
    m.write_text("model m\nvalues { v0 }\nfunction F {\n  out o\n  transfer o.status = F.status\n}\n")
    code, _, err = run(capsys, "check", str(m))
    assert code == 2 and "no assertions" in err


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(paths=("x",), command="check", workers=0)
    assert RunConfig(paths=("x",), command="check", exhaustive=True).failure_bound is None


def test_cmd_check_direct(capsys):
    code = cmd_check(RunConfig(paths=(HARDENED,), command="check"), ("RNAV_lost",))
    assert code == 0 and "RNAV_lost" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "failprop", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout


def test_run_finds_lost_display(capsys):
    code, out, _ = run(capsys, "run", BASELINE, "--where", "oSelected1.status = Lost",
                       "--format", "json")
    [r] = json.loads(out)["results"]
    assert code == 0 and r["found"]
    assert r["assignment"]["oSelected1"]["status"] == "Lost"
