import json
import subprocess
import sys

import pytest

from cstarmod.cli import main
from cstarmod.suites import SUITES, SuiteConfig, merge_all, run_range, run_suite


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_registry_names():
    assert len(SUITES) >= 12
    assert {"cauchy-schwarz", "linking-closure", "reflexivity", "k-of-a-iso"} <= set(SUITES)


@pytest.mark.parametrize("name", sorted(SUITES))
def test_every_suite_passes_briefly(name):
    assert run_suite(SuiteConfig(name, trials=3, seed=11)).ok
    assert run_suite(SuiteConfig(name, module="random", trials=3, seed=12)).ok


def test_config_validation():
    with pytest.raises(KeyError):
        SuiteConfig("nope")
    with pytest.raises(ValueError):
        SuiteConfig("cauchy-schwarz", trials=0)
    with pytest.raises(ValueError):
        SuiteConfig("cauchy-schwarz", seed=-1)


def test_merge_of_ranges_equals_single_run():
    cfg = SuiteConfig("theta-identities", module="random", trials=12, seed=3)
    whole = run_suite(cfg)
    parts = [run_range(cfg, 0, 5), run_range(cfg, 5, 9), run_range(cfg, 9, 12)]
    assert merge_all(parts).to_json() == whole.to_json()
    assert parts[2].merge(parts[0]).merge(parts[1]).to_json() == parts[0].merge(parts[1].merge(parts[2])).to_json()
    with pytest.raises(ValueError):
        parts[0].merge(run_range(cfg, 4, 6))


def test_verify_json_lines_and_determinism(capsys):
    argv = ["verify", "--suite", "cauchy-schwarz", "--trials", "20", "--seed", "5"]
    code, out1, _ = _run(capsys, *argv)
    _, out2, _ = _run(capsys, *argv)
    assert code == 0 and out1 == out2
    lines = [json.loads(l) for l in out1.splitlines()]
    summary = lines[-1]
    assert summary["event"] == "summary" and summary["verdict"] == "pass"
    assert summary["trials"] == 20 and summary["config"]["seed"] == 5
    assert "wall_time_s" not in summary
    assert {l["event"] for l in lines[:-1]} <= {"progress", "failure"}


def test_verify_timing_field(capsys):
    code, out, _ = _run(capsys, "verify", "--suite", "fullness", "--trials", "2", "--timing")
    assert code == 0 and "wall_time_s" in json.loads(out.splitlines()[-1])


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("CSTARMOD_SEED", "77")
    _, out, _ = _run(capsys, "verify", "--suite", "fullness", "--trials", "2")
    assert json.loads(out.splitlines()[-1])["config"]["seed"] == 77
    monkeypatch.setenv("CSTARMOD_SEED", "bad")
    code, _, err = _run(capsys, "verify", "--suite", "fullness", "--trials", "2")
    assert code == 2 and "CSTARMOD_SEED" in err


def test_tolerance_override_can_fail_a_run(capsys):
    code, out, _ = _run(capsys, "verify", "--suite", "adjoint-roundtrip", "--trials", "5", "--tol", "op=1e-300")
    summary = json.loads(out.splitlines()[-1])
    assert code == 1 and summary["verdict"] == "fail" and summary["exemplars"]
    assert summary["config"]["tolerances"]["op"] == 1e-300


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", "cauchy-schwarz", "--trials", "0"],
    ["verify", "--suite", "nope"],
    ["verify", "--suite", "cauchy-schwarz", "--module", "free(M2"],
    ["verify", "--suite", "cauchy-schwarz", "--algebra", "M2", "--module", "free(M3, rank=1)"],
    ["verify", "--suite", "cauchy-schwarz", "--module", "free(PP[0,1], rank=1)"],
    ["verify", "--suite", "cauchy-schwarz", "--tol", "bogus=1"],
    ["verify", "--suite", "cauchy-schwarz", "--seed", "-3"],
    ["demo", "nope"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    assert _run(capsys, *argv)[0] == 2


def test_text_format_and_out_file(capsys, tmp_path):
    path = tmp_path / "out.txt"
    code, out, _ = _run(capsys, "verify", "--suite", "fullness", "--trials", "3", "--format", "text",
                        "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("suite fullness: 3/3 trials passed")


def test_demo_and_list(capsys):
    code, out, _ = _run(capsys, "demo", "pythagoras-failure")
    assert code == 0 and "[FALSE]" not in out
    code, out, _ = _run(capsys, "demo", "pythagoras-failure", "--format", "json")
    assert json.loads(out)["demo_id"] == "pythagoras-failure"
    code, out, _ = _run(capsys, "list")
    assert code == 0 and "cauchy-schwarz" in out and "orthocomplement-trivial" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cstarmod", "list"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "linking-closure" in proc.stdout
