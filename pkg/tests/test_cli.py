import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from concurrence_bounds.cli import SCAN_HEADER, main
from concurrence_bounds.states import load_state, maximally_entangled, pure_density_matrix, save_state
from concurrence_bounds.tensor import pure_concurrence

QUICK = ["--restarts-lower", "3", "--restarts-upper", "2", "--evals", "800"]


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def parse_report(text):
    return dict(line.split(": ", 1) for line in text.strip().splitlines())


def test_gen_horodecki(tmp_path):
    path = tmp_path / "h.json"
    assert run(["gen", "horodecki", str(path), "--a", "0.3"])[0] == 0
    rho = load_state(path)
    assert np.trace(rho.matrix).real == pytest.approx(1, abs=1e-15)


def test_gen_maxent(tmp_path):
    path = tmp_path / "m.json"
    assert run(["gen", "maxent", str(path), "--n", "3"])[0] == 0
    rho = load_state(path)
    w, v = np.linalg.eigh(rho.matrix)
    from concurrence_bounds.linalg import StateVector

    assert pure_concurrence(StateVector((3, 3), v[:, -1])) == pytest.approx(math.sqrt(2 / 3), abs=1e-12)


def test_gen_random_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(["gen", "random", str(p), "--dims", "3,3", "--rank", "2", "--seed", "7"])[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_errors(tmp_path):
    assert run(["gen", "unicorn", str(tmp_path / "x.json")])[0] == 4
    assert run(["gen", "horodecki", str(tmp_path / "x.json")])[0] == 4
    assert run(["gen", "random", str(tmp_path / "x.json"), "--dims", "3x3"])[0] == 4
    assert run(["gen", "horodecki", str(tmp_path / "x.json"), "--a", "2"])[0] == 2


def test_bounds_bell(tmp_path):
    path = tmp_path / "bell.json"
    save_state(pure_density_matrix(maximally_entangled(2)), path)
    code, text = run(["bounds", str(path), "--out", str(tmp_path / "r.json")])
    assert code == 0
    rep = parse_report(text)
    assert float(rep["lower_optimized"]) == pytest.approx(0.70710678, abs=1e-8)
    assert float(rep["upper_optimized"]) == pytest.approx(0.70710678, abs=1e-8)
    payload = json.loads((tmp_path / "r.json").read_text())
    assert payload["upper_optimized"] == pytest.approx(math.sqrt(0.5), abs=1e-9)


def test_bounds_wootters_convention(tmp_path):
    path = tmp_path / "bell.json"
    save_state(pure_density_matrix(maximally_entangled(2)), path)
    code, text = run(["bounds", str(path), "--convention", "wootters"])
    assert code == 0
    assert float(parse_report(text)["lower_optimized"]) == pytest.approx(1, abs=1e-9)


def test_bounds_wootters_needs_qubits(tmp_path):
    path = tmp_path / "h.json"
    run(["gen", "horodecki", str(path), "--a", "0.5"])
    assert run(["bounds", str(path), "--convention", "wootters"])[0] == 4


def test_bounds_horodecki(tmp_path):
    path = tmp_path / "h.json"
    run(["gen", "horodecki", str(path), "--a", "0.5"])
    code, text = run(["bounds", str(path), *QUICK])
    assert code == 0
    rep = parse_report(text)
    assert rep["is_ppt"] == "true"
    assert float(rep["lower_algebraic"]) > 0


def test_bounds_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(["bounds", str(path)])[0] == 3


def test_bounds_invalid_state(tmp_path):
    path = tmp_path / "bad.json"
    m = np.eye(4) * 0.9 / 4
    path.write_text(json.dumps({"dims": [2, 2], "matrix": [[[x, 0.0] for x in row] for row in m]}))
    assert run(["bounds", str(path)])[0] == 2


def test_bounds_bad_embed(tmp_path):
    path = tmp_path / "h.json"
    run(["gen", "horodecki", str(path), "--a", "0.5"])
    assert run(["bounds", str(path), "--embed-n", "3"])[0] == 4


def test_bad_arguments_exit_4():
    with pytest.raises(SystemExit) as exc:
        main(["bounds"])
    assert exc.value.code == 4
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 4


def test_scan_shape_and_determinism():
    argv = ["scan", "--a-min", "0.2", "--a-max", "0.6", "--steps", "3", "--no-timing", *QUICK]
    code, first = run(argv)
    assert code == 0
    assert run(argv)[1] == first
    lines = first.strip().splitlines()
    assert lines[0] == SCAN_HEADER
    assert len(lines) == 4
    rows = [line.split(",") for line in lines[1:]]
    assert [r[0] for r in rows] == ["0.2", "0.4", "0.6"]
    for r in rows:
        lo_alg, lo, up = map(float, r[1:4])
        assert r[5] == "true"
        assert 0 < lo_alg <= lo <= up + 1e-9


def test_scan_bad_range():
    assert run(["scan", "--a-min", "0.8", "--a-max", "0.2"])[0] == 4
    assert run(["scan", "--steps", "1"])[0] == 4


def test_scan_to_file(tmp_path):
    out = tmp_path / "scan.csv"
    code, text = run(["scan", "--a-min", "0.3", "--a-max", "0.5", "--steps", "2", "--out", str(out), *QUICK])
    assert code == 0 and text == ""
    assert out.read_text().startswith(SCAN_HEADER)


def test_selfcheck_passes():
    code, text = run(["selfcheck", "--samples", "8"])
    assert code == 0
    assert text.count("PASS") == 7


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
def test_selfcheck_seed_robust(seed):
    assert run(["selfcheck", "--samples", "6", "--seed", str(seed)])[0] == 0


def test_selfcheck_detects_sign_fault():
    code, text = run(["selfcheck", "--samples", "6", "--inject-fault", "f-sign"])
    assert code == 1
    assert "FAIL capc-equivalence" in text


def test_console_entry_point(tmp_path):
    path = tmp_path / "bell.json"
    save_state(pure_density_matrix(maximally_entangled(2)), path)
    proc = subprocess.run(
        [sys.executable, "-m", "concurrence_bounds.cli", "bounds", str(path)],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert "upper_optimized: 0.707106781187" in proc.stdout
