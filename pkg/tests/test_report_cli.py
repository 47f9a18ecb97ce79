import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ffcircle import cli
from ffcircle.config import loads
from ffcircle.errors import IdentityViolation, ValidationError
from ffcircle.report import ExperimentReport, emit, jsonable

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _run(tmp_path, argv):
    out = tmp_path / "out.txt"
    code = cli.main(argv + ["--out", str(out)])
    return code, (out.read_bytes() if out.exists() else b"")


def _write(tmp_path, text, name="exp.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# -- serialization ---------------------------------------------------------------

def test_jsonable_types():
    assert jsonable(Fraction(3, 4)) == "3/4"
    assert jsonable(Fraction(8, 1)) == "8"
    assert jsonable(np.int64(7)) == 7
    assert jsonable(1 / 3) == 0.333333333333
    assert jsonable({"a": (1, 2)}) == {"a": [1, 2]}
    with pytest.raises(TypeError):
        jsonable(object())


@given(st.dictionaries(st.text(min_size=1, max_size=5),
                       st.one_of(st.integers(-10**30, 10**30), st.booleans(), st.text(max_size=5)), max_size=6))
def test_json_round_trip(summary):
    r = ExperimentReport("count", {"p": 2}, summary, [{"k": 1, "count": 729}])
    back = json.loads(emit(r, "json"))
    assert back == {"command": "count", "config": {"p": 2}, "summary": summary, "table": [{"k": 1, "count": 729}]}


def test_integers_are_exact_in_json():
    r = ExperimentReport("count", {}, {"count": 3**50}, [])
    assert str(3**50).encode() in emit(r)


def test_mismatched_counts_refused():
    r = ExperimentReport("fourier", {}, {"count": 4, "fourier": 5}, [])
    with pytest.raises(IdentityViolation):
        emit(r)


def test_empty_report_is_valid():
    r = ExperimentReport("grid", {}, {}, [])
    assert json.loads(emit(r)) == {"command": "grid", "config": {}, "summary": {}, "table": []}
    assert emit(r, "csv") == b"\n"


def test_csv_summary_fallback():
    r = ExperimentReport("gate", {}, {"overall": True, "thresholds": {"A": 351}}, [])
    text = emit(r, "csv").decode().splitlines()
    assert text == ["key,value", "overall,True", "thresholds.A,351"]


# -- config validation -----------------------------------------------------------

def test_config_errors():
    with pytest.raises(ValidationError, match="field"):
        loads("[bundle]\ndegrees = [1]\n")
    with pytest.raises(ValidationError, match="exact integer"):
        loads("[field]\np = 2.0\n")
    with pytest.raises(ValidationError, match="one entry per variable"):
        loads("[field]\np = 3\n[bundle]\ndegrees=[1]\n[divisor]\npoints=[[0,1,1]]\n"
              "jets=[[[1]]]\n[equation]\nd=2\nn=2\n")
    with pytest.raises(ValidationError, match="irreducible"):
        loads("[field]\np = 2\n[bundle]\ndegrees=[2]\n[divisor]\npoints=[[0,[1,0,1],1]]\n")
    with pytest.raises(ValidationError, match="TOML"):
        loads("[field\n")


def test_config_reads_nodes_and_points():
    cfg = loads((CONFIGS / "nodal.toml").read_text())
    assert cfg.curve.genus == 0 and cfg.curve.n_components == 2
    assert cfg.divisor.degree == 1 and cfg.equation.n == 2


# -- commands --------------------------------------------------------------------

def test_linear_config(tmp_path):
    code, out = _run(tmp_path, ["fourier", "--config", str(CONFIGS / "linear.toml")])
    assert code == 0
    s = json.loads(out)["summary"]
    assert s["count"] == 4 and s["fourier"] == 4
    code, out = _run(tmp_path, ["arcs", "--config", str(CONFIGS / "linear.toml")])
    assert json.loads(out)["summary"]["minor_sum"] == [0]


def test_count_and_slope(tmp_path):
    code, out = _run(tmp_path, ["count", "--config", str(CONFIGS / "linear.toml")])
    data = json.loads(out)
    assert code == 0
    assert [r["count"] for r in data["table"]] == [4, 16]
    assert data["summary"]["dim_estimate"] == 2


def test_gate_config(tmp_path):
    code, out = _run(tmp_path, ["gate", "--config", str(CONFIGS / "gate_d5.toml")])
    s = json.loads(out)["summary"]
    assert code == 0 and s["overall"]
    assert s["thresholds"] == {"n_min": 14, "A": 351, "p_threshold": "1755"}


def test_modulidim_formula(tmp_path):
    code, out = _run(tmp_path, ["modulidim", "--config", str(CONFIGS / "moduli.toml")])
    assert code == 0
    assert json.loads(out)["summary"]["formula"]["expected_moduli_dim"] == 3510


def test_witness_config(tmp_path):
    code, out = _run(tmp_path, ["witness", "--config", str(CONFIGS / "witness.toml")])
    s = json.loads(out)["summary"]
    assert code == 0 and s["witnesses"] == 30 and s["all_verified"] and s["all_margins_positive"]


def test_singdim_sampled(tmp_path):
    path = _write(tmp_path, (CONFIGS / "nodal.toml").read_text().replace("[run]", "[run]\nsample = 5\nseed = 3"))
    code, out = _run(tmp_path, ["singdim", "--config", path, "--verbose"])
    data = json.loads(out)
    assert code == 0 and len(data["table"]) == 5 and data["summary"]["all_hold"]


def test_deterministic_across_workers(tmp_path):
    cfgs = [str(CONFIGS / "qsweep.toml"), str(CONFIGS / "nodal.toml")]
    for cmd, cfg in (("grid", cfgs[0]), ("fourier", cfgs[1]), ("count", cfgs[1])):
        _, one = _run(tmp_path, [cmd, "--config", cfg, "--workers", "1"])
        _, two = _run(tmp_path, [cmd, "--config", cfg, "--workers", "2"])
        assert one == two and one


def test_qsweep_table(tmp_path):
    code, out = _run(tmp_path, ["grid", "--config", str(CONFIGS / "qsweep.toml"), "--format", "csv"])
    lines = out.decode().splitlines()
    assert code == 0 and len(lines) == 5
    assert lines[0].startswith("q,d,n,e,b,curve,g,count,fourier")


def test_exit_validation(tmp_path):
    path = _write(tmp_path, "[field]\np = 4\n")
    assert cli.main(["count", "--config", path]) == 2
    assert cli.main(["gate", "--config", str(CONFIGS / "linear.toml")]) == 2
    assert cli.main(["count", "--config", str(tmp_path / "missing.toml")]) == 2


def test_exit_budget(tmp_path):
    assert cli.main(["count", "--config", str(CONFIGS / "nodal.toml"), "--budget", "10"]) == 3


def test_exit_identity(tmp_path, monkeypatch):
    real = cli.fourier_sweep

    def broken(*a, **kw):
        sw = real(*a, **kw)
        sw.count += 1
        return sw

    monkeypatch.setattr(cli, "fourier_sweep", broken)
    assert cli.main(["fourier", "--config", str(CONFIGS / "linear.toml"), "--out", str(tmp_path / "x")]) == 4


def test_timings_are_opt_in(tmp_path):
    _, out = _run(tmp_path, ["count", "--config", str(CONFIGS / "linear.toml")])
    assert "wall_seconds" not in json.loads(out)["summary"]
    _, out = _run(tmp_path, ["count", "--config", str(CONFIGS / "linear.toml"), "--timings"])
    assert "wall_seconds" in json.loads(out)["summary"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ffcircle", "gate", "--config", str(CONFIGS / "gate_d5.toml"),
                          "--format", "csv"], capture_output=True, text=True, check=True)
    assert res.stdout.startswith("key,value\noverall,True")
