import csv
import json
import re
import subprocess
import sys

import pytest

from focusfocus import cli

COMMANDS = ["classify", "trace-fiber", "moment-image", "integrate", "obstruction", "selftest"]


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_outputs_two_focus_points(capsys):
    code, out, _ = run(["classify", "--system", "e3-form41", "--casimirs", "1,0"], capsys)
    pts = json.loads(out)
    assert code == 0 and [p["label"] for p in pts] == ["focus_focus"] * 2


def test_trace_fiber_json(tmp_path):
    path = tmp_path / "fiber.json"
    code = cli.main(["trace-fiber", "--casimirs", "1,0", "--moment", "1,0", "--n-points", "300", "--out", str(path)])
    js = json.loads(path.read_text())
    assert code == 0
    assert {"moment", "n_points", "n_components", "complexity", "points"} <= set(js)
    assert js["complexity"] == 2 and len(js["points"]) == 300


def test_trace_fiber_reports_empty_fibers(capsys):
    code, out, _ = run(["trace-fiber", "--moment=-1,0", "--n-points", "20", "--no-points"], capsys)
    js = json.loads(out)
    assert code == 0 and js["empty"] and js["n_points"] == 0


def test_moment_image_csv(capsys):
    code, out, _ = run(["moment-image", "--grid=-0.5:1.5:-1:1:3"], capsys)
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and len(rows) == 9
    assert set(rows[0]) == {"h", "f", "exists", "complexity"}
    assert all(r["exists"] == "false" for r in rows if float(r["h"]) < 0)


def test_integrate_writes_trajectory_and_drift(tmp_path):
    out = tmp_path / "traj.csv"
    code = cli.main(["integrate", "--x0", "0,8,4,1,0,0", "--dt", "0.01", "--t-end", "0.5", "--out", str(out)])
    lines = out.read_text().splitlines()
    drift = json.loads((tmp_path / "traj.csv.drift.json").read_text())
    assert code == 0 and lines[0] == "t,x1,x2,x3,x4,x5,x6" and len(lines) == 52
    assert {r["invariant"] for r in drift["drift"]} == {"H", "G", "f1", "f2"}


def test_obstruction_verdict(capsys):
    code, out, _ = run(["obstruction", "--manifold", "cp2", "--n", "2"], capsys)
    js = json.loads(out)
    assert code == 0 and js["status"] == "forbidden" and js["max_complexity"] == 1
    code, out, _ = run(["obstruction", "--descriptor", '{"kind": "e3_orbit", "m": 0}', "--n", "2"], capsys)
    assert json.loads(out)["condition"] == "m_equals_zero"


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "obstruction", "manifold": "s2xs2:1,1", "n": 2}))
    code, out, _ = run(["obstruction", "--config", str(cfg)], capsys)
    assert code == 0 and json.loads(out)["status"] == "conditional"


def test_config_with_system_descriptor(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"system": {"builtin": "canonical4"}, "n_restarts": 20}))
    code, out, _ = run(["classify", "--config", str(cfg)], capsys)
    assert code == 0 and json.loads(out)[0]["label"] == "focus_focus"


@pytest.mark.parametrize("argv", [
    ["classify", "--system", "nope"],
    ["trace-fiber", "--moment", "1"],
    ["moment-image", "--grid", "0:1:0:1"],
    ["integrate", "--x0", "1,1,1,1,1,1"],
    ["integrate", "--dt", "-1"],
    ["obstruction", "--manifold", "cp2"],
    ["obstruction", "--manifold", "klein", "--n", "2"],
])
def test_invalid_input_exits_2(argv, capsys):
    assert cli.main(argv) == cli.EXIT_INVALID


def test_bad_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"n_points": -3}))
    assert cli.main(["trace-fiber", "--config", str(cfg)]) == cli.EXIT_INVALID


def test_projection_failure_exits_3(capsys):
    argv = ["integrate", "--x0", "0,8,4,1,0,0", "--dt", "5", "--t-end", "50"]
    assert cli.main(argv) == cli.EXIT_NUMERICAL


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        cli.main(["bogus"])
    assert info.value.code == 2


@pytest.mark.parametrize("cmd", COMMANDS)
def test_help_names_the_module_operation(cmd):
    text = cli.build_parser()._subparsers._group_actions[0].choices[cmd].format_help()
    assert re.search(r"\b[a-z_]+\.[a-z_0-9]+\b", text)
    assert not re.search(r"Prop(osition)?\s*\d|Theorem\s*\d|§|Eq\.", text)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "focusfocus", "obstruction", "--manifold", "so4:0", "--n", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["status"] == "conditional"
