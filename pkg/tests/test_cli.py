"""Command-line tests: golden outputs, exit codes and output-file handling.

Regenerate the golden files with ``python tests/test_cli.py --regen``.
"""

import json
import math
import os
import subprocess
import sys
from pathlib import Path

import pytest

from sympolar.cli import main

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
GOLDEN = HERE / "golden"

CASES = {
    "williamson_identity": ["williamson", "williamson_identity.json"],
    "williamson_diag": ["williamson", "williamson_diag.json"],
    "williamson_random": ["williamson", "williamson_random.json"],
    "admissible_boundary": ["admissible", "covariance_boundary.json"],
    "admissible_sub": ["admissible", "covariance_sub.json"],
    "admissible_blob": ["admissible", "covariance_blob.json", "--planes", "32", "--seed", "7"],
    "dual_diag": ["dual", "ellipsoid_diag.json"],
    "dual_ball": ["dual", "ellipsoid_ball.json", "--hbar", "0.5"],
    "capacity_ball": ["capacity", "ellipsoid_ball.json"],
    "capacity_diag": ["capacity", "ellipsoid_diag.json"],
    "capacity_product": ["capacity", "product_dilated.json"],
    "capacity_state": ["capacity", "state_geometric.json"],
    "capacity_mixed": ["capacity", "state_mixed.json"],
    "state_gaussian": ["state", "state_gaussian.json"],
    "state_geometric": ["state", "state_geometric.json"],
    "state_mixed": ["state", "state_mixed.json"],
    "beam_harmonic": ["beam", "beam_harmonic.json"],
    "beam_quartic": ["beam", "beam_quartic.json"],
    "beam_quartic_short": ["beam", "beam_quartic.json", "--dt", "0.02", "--t-end", "0.5"],
}


def argv_for(case):
    cmd, fixture, *rest = CASES[case]
    return [cmd, str(FIXTURES / fixture), *rest]


def run_cli(argv, cwd=HERE.parent):
    env = dict(os.environ, SDK_LOG="warning")
    return subprocess.run(
        [sys.executable, "-m", "sympolar", *argv], capture_output=True, text=True, cwd=cwd, env=env, timeout=300
    )


@pytest.mark.parametrize("case", sorted(CASES))
def test_golden_output(case):
    res = run_cli(argv_for(case))
    assert res.returncode == 0, res.stderr
    assert res.stdout == (GOLDEN / f"{case}.json").read_text(encoding="utf-8")


def test_in_process_output_matches_subprocess(capsys):
    assert main(argv_for("capacity_diag")) == 0
    assert capsys.readouterr().out == (GOLDEN / "capacity_diag.json").read_text(encoding="utf-8")


def test_repeated_runs_are_identical():
    first = run_cli(argv_for("admissible_blob")).stdout
    assert first and run_cli(argv_for("admissible_blob")).stdout == first


def _load(case):
    return json.loads((GOLDEN / f"{case}.json").read_text(encoding="utf-8"))


def test_golden_contents_are_correct():
    assert _load("williamson_identity")["spectrum"] == [1.0, 1.0]
    assert _load("williamson_diag")["spectrum"] == [2.0]
    assert _load("capacity_ball")["capacity"] == pytest.approx(math.pi)
    # diag(4, 1, 1/2, 2) has both symplectic eigenvalues sqrt(2)
    assert _load("capacity_diag")["capacity"] == pytest.approx(math.pi / math.sqrt(2))
    assert _load("capacity_product")["capacity"] == pytest.approx(8.0)
    assert _load("capacity_state")["capacity"] == pytest.approx(4.0)
    boundary, sub, blob = _load("admissible_boundary"), _load("admissible_sub"), _load("admissible_blob")
    for key in ("spectrum", "inclusion", "positivity"):
        assert boundary["verdicts"][key] is True
        assert sub["verdicts"][key] is False
        assert blob["verdicts"][key] is True
    assert boundary["purity"] == pytest.approx(1.0)
    state = _load("state_geometric")
    assert state["johnIsQuantumBlob"] is True
    assert state["gaussianRoundtripResidual"] <= 1e-9
    assert _load("state_gaussian")["roundtripResidual"] <= 1e-9
    report = _load_lines("beam_harmonic")[-1]["report"]
    assert report["payloadShapeChange"] <= 1e-8
    assert report["centerDisplacement"] <= 1e-8


def _load_lines(case):
    text = (GOLDEN / f"{case}.json").read_text(encoding="utf-8")
    return [json.loads(line) for line in text.splitlines()]


def test_beam_output_is_json_lines():
    lines = _load_lines("beam_harmonic")
    assert len(lines) == 6
    assert [line["t"] for line in lines[:-1]] == pytest.approx([k * math.pi / 2 for k in range(5)])


def test_exit_code_parse_error():
    res = run_cli(["williamson", str(FIXTURES / "malformed.json")])
    assert res.returncode == 2 and res.stdout == ""
    assert "cannot read" in res.stderr


def test_exit_code_schema_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2, "rows": [[1, 0], [0, 1]]}')
    assert run_cli(["williamson", str(bad)]).returncode == 2
    bad.write_text('{"kind": "geometric"}')
    assert run_cli(["state", str(bad)]).returncode == 2
    assert run_cli(["williamson", str(tmp_path / "missing.json")]).returncode == 2


def test_exit_code_bad_flags():
    assert run_cli(["williamson", str(FIXTURES / "williamson_diag.json"), "--hbar", "-1"]).returncode == 2
    assert run_cli(["nosuchcommand", "x.json"]).returncode == 2


def test_exit_code_domain_error():
    res = run_cli(["williamson", str(FIXTURES / "williamson_not_pd.json")])
    assert res.returncode == 3 and res.stdout == ""
    assert "not positive definite" in res.stderr


def test_exit_code_numerical_error():
    res = run_cli(["beam", str(FIXTURES / "beam_blowup.json")])
    assert res.returncode == 4 and res.stdout == ""
    assert "BlowUpError" in res.stderr


def test_output_file_written_atomically(tmp_path):
    out = tmp_path / "report.json"
    res = run_cli([*argv_for("capacity_ball"), "--output", str(out)])
    assert res.returncode == 0 and res.stdout == ""
    assert out.read_text(encoding="utf-8") == (GOLDEN / "capacity_ball.json").read_text(encoding="utf-8")
    assert sorted(p.name for p in tmp_path.iterdir()) == ["report.json"]


def test_no_partial_write_on_error(tmp_path):
    out = tmp_path / "report.json"
    out.write_text("previous\n")
    res = run_cli(["beam", str(FIXTURES / "beam_blowup.json"), "-o", str(out)])
    assert res.returncode == 4
    assert out.read_text() == "previous\n"
    assert sorted(p.name for p in tmp_path.iterdir()) == ["report.json"]
    fresh = tmp_path / "new.json"
    assert run_cli(["williamson", str(FIXTURES / "williamson_not_pd.json"), "-o", str(fresh)]).returncode == 3
    assert not fresh.exists()


def regenerate():
    GOLDEN.mkdir(exist_ok=True)
    for case in sorted(CASES):
        res = run_cli(argv_for(case))
        if res.returncode != 0:
            raise SystemExit(f"{case}: exit {res.returncode}\n{res.stderr}")
        (GOLDEN / f"{case}.json").write_text(res.stdout, encoding="utf-8")
        print(f"wrote {case}")


if __name__ == "__main__":
    if "--regen" in sys.argv:
        regenerate()
