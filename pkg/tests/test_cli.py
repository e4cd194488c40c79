import csv
import io
import json
import math
from importlib import resources

import pytest

from fockoptics.cli import SWEEP_COLUMNS, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_header_and_maximum(capsys):
    code, out, _ = run(capsys, "sweep", "--builtin", "fig2", "--alpha", "0.1", "--steps", "64")
    assert code == 0
    assert out.splitlines()[0] == ",".join(SWEEP_COLUMNS)
    data = rows(out)
    assert len(data) == 64
    best = max(data, key=lambda r: float(r["p_double_v1v2"]))
    assert float(best["phi"]) == pytest.approx(math.pi / 2, abs=1e-11)


def test_sweep_single_row(capsys):
    code, out, _ = run(capsys, "sweep", "--steps", "1", "--phi-start", "0")
    (row,) = rows(out)
    assert float(row["phi"]) == 0
    assert sum(float(row[c]) for c in SWEEP_COLUMNS[1:]) <= 1 + 1e-11


def test_sweep_zero_alpha(capsys):
    _, out, _ = run(capsys, "sweep", "--alpha", "0", "--steps", "8")
    assert all(float(r["p_double_v1v2"]) == 0 for r in rows(out))


def test_sweep_twelve_significant_digits(capsys):
    _, out, _ = run(capsys, "sweep", "--steps", "3")
    for r in rows(out):
        for c in SWEEP_COLUMNS:
            assert len(r[c].replace("-", "").replace(".", "").lstrip("0").split("e")[0]) <= 12


def test_sweep_json(capsys):
    code, out, _ = run(capsys, "sweep", "--steps", "4", "--format", "json")
    doc = json.loads(out)
    assert list(doc) == ["config", "columns", "rows"]
    assert list(doc["rows"][0]) == list(SWEEP_COLUMNS)


def test_sweep_fig1(capsys):
    _, out, _ = run(capsys, "sweep", "--builtin", "fig1", "--steps", "5", "--condition", "none")
    assert all(float(r["p_ns_coincidence"]) == pytest.approx(0.5, abs=1e-12) for r in rows(out))


def test_sweep_file_needs_phase_mode(capsys, tmp_path):
    path = resources.files("fockoptics").joinpath("circuits", "fig2.circ")
    code, _, err = run(capsys, "sweep", "--circuit", str(path))
    assert code == 1 and "--phase-mode" in err
    code, out, _ = run(capsys, "sweep", "--circuit", str(path), "--phase-mode", "b", "--steps", "64")
    _, ref, _ = run(capsys, "sweep", "--builtin", "fig2", "--steps", "64")
    assert code == 0 and out == ref


def test_sample_fig1(capsys):
    code, out, _ = run(capsys, "sample", "--builtin", "fig1", "--shots", "100000", "--seed", "9")
    rec = json.loads(out)
    ns = rec["classes"]["ns_coincidence"]
    assert 49000 <= ns["count"] <= 51000
    assert ns["probability"] == pytest.approx(0.5)
    assert sum(v["count"] for v in rec["classes"].values()) == 100000


def test_sample_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "sample", "--shots", "2000", "--seed", "4", "-o", str(a))
    run(capsys, "sample", "--shots", "2000", "--seed", "4", "-o", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_zero_shots_is_config_error(capsys, tmp_path):
    out = tmp_path / "o.json"
    code, _, err = run(capsys, "sample", "--shots", "0", "-o", str(out))
    assert code == 1 and "shots" in err
    assert not out.exists()


@pytest.mark.parametrize("argv", [
    ["sweep", "--steps", "0"],
    ["sweep", "--alpha", "1.5"],
    ["sweep", "--builtin", "fig3"],
    ["sweep", "--phi-start", "banana"],
    ["sample", "--circuit", "/nonexistent.circ"],
    ["nosuchcommand"],
])
def test_config_errors_exit_one(capsys, argv):
    code = None
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_bad_circuit_file_reports_lines(capsys, tmp_path):
    path = tmp_path / "bad.circ"
    path.write_text("mode a\nbs a a\n")
    code, _, err = run(capsys, "state", "--circuit", str(path))
    assert code == 1 and "line 2" in err


def test_no_partial_output_on_error(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", "--alpha", "7", "-o", str(out))
    assert code == 1 and not out.exists()
    assert list(tmp_path.iterdir()) == []


def test_alpha_warning(capsys):
    code, _, err = run(capsys, "sweep", "--alpha", "0.5", "--steps", "1")
    assert code == 0 and "warning" in err


def test_state_pre_eve(capsys):
    code, out, _ = run(capsys, "state", "--builtin", "fig1", "--phi", "0", "--tap", "pre-eve")
    data = rows(out)
    assert code == 0 and len(data) == 4
    for r in data:
        assert math.hypot(float(r["re"]), float(r["im"])) == pytest.approx(0.5)
        assert float(r["probability"]) == pytest.approx(0.25)


def test_state_vacuum_circuit(capsys, tmp_path):
    path = tmp_path / "vac.circ"
    path.write_text("mode a\nmode b\n")
    code, out, _ = run(capsys, "state", "--circuit", str(path))
    (row,) = rows(out)
    assert row["occupied"] == "vacuum" and float(row["re"]) == 1 and float(row["probability"]) == 1


def test_state_fig2_matches_oracle(capsys):
    import numpy as np
    from fockoptics.experiments import build_fig2
    from fockoptics.oracle import simulate_dense
    code, out, _ = run(capsys, "state", "--builtin", "fig2", "--alpha", "0.1", "--phi", "pi/3", "--format", "json")
    doc = json.loads(out)
    psi = simulate_dense(build_fig2(math.pi / 3))
    nonzero = np.flatnonzero(np.abs(psi) >= 1e-14)
    assert len(doc["terms"]) == len(nonzero)
    modes = doc["modes"]
    for t in doc["terms"]:
        idx = sum(1 << (len(modes) - 1 - modes.index(m)) for m in t["occupied"])
        assert complex(t["re"], t["im"]) == pytest.approx(psi[idx], abs=1e-11)


def test_check_passes(capsys):
    code, out, _ = run(capsys, "check", "--oracle-cases", "10")
    assert code == 0 and "8/8 checks passed" in out


def test_check_catches_perturbed_splitter(capsys):
    code, out, _ = run(capsys, "check", "--oracle-cases", "2", "--perturb-bs", "1e-6")
    assert code == 2
    assert "[FAIL] beam splitter unitarity" in out


def test_check_oracle_subset_is_fast():
    import time
    from fockoptics.checks import run_checks
    t0 = time.perf_counter()
    results = run_checks(oracle_cases=20)
    oracle = next(r for r in results if r.name == "oracle equivalence")
    assert oracle.passed and oracle.seconds < 10
    assert time.perf_counter() - t0 < 30
