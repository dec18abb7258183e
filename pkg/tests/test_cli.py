import json
import subprocess
import sys

import pytest

from cstarframes.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def gen(tmp_path, capsys, name, *argv):
    path = tmp_path / name
    code, _, err = run(capsys, "gen", *argv, "--out", str(path))
    assert code == 0, err
    return path


def test_bounds_standard_basis(tmp_path, capsys):
    path = gen(tmp_path, capsys, "sb.json", "--standard-basis", "--descriptor", "1")
    code, out, _ = run(capsys, "bounds", "--scenario", str(path))
    data = json.loads(out)
    assert code == 0
    assert data["lower"] == pytest.approx(1, abs=1e-12) and data["upper"] == pytest.approx(1, abs=1e-12)
    assert data["order"]["semantics"] == "order" and data["norm"]["semantics"] == "norm"
    assert data["is_frame"]


def test_bounds_three_vector(tmp_path, capsys):
    path = gen(tmp_path, capsys, "tv.json", "--fixture", "three-vector-c2")
    code, out, _ = run(capsys, "bounds", "--scenario", str(path))
    data = json.loads(out)
    assert (data["lower"], data["upper"]) == pytest.approx((1, 2), abs=1e-9)


def test_dual_and_riesz(tmp_path, capsys):
    path = gen(tmp_path, capsys, "f.json", "--seed", "4", "--d", "2", "--m", "2")
    code, out, _ = run(capsys, "riesz", "--scenario", str(path))
    assert code == 0 and json.loads(out) == {"frame": True, "riesz_type": True, "mu_complete": True}
    code, out, _ = run(capsys, "dual", "--scenario", str(path))
    assert code == 0 and "F" in json.loads(out)
    path = gen(tmp_path, capsys, "tv.json", "--fixture", "three-vector-c2")
    code, out, _ = run(capsys, "riesz", "--scenario", str(path))
    assert json.loads(out)["riesz_type"] is False


def test_verify_pert_d_fixture(tmp_path, capsys):
    path = gen(tmp_path, capsys, "pd.json", "--fixture", "pert-d")
    code, out, _ = run(capsys, "verify", "--theorem", "pert-d", "--scenario", str(path))
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "verified"
    assert data["predicted"]["lower"] == pytest.approx(0.64)
    assert data["measured"]["alpha"] == pytest.approx(0.02, abs=1e-12)


def test_verify_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "verify", "--theorem", "sum3", "--scenario", str(bad))
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "bounds", "--scenario", str(tmp_path / "missing.json"))
    assert code == 2


def test_verify_missing_frame_is_invalid(tmp_path, capsys):
    path = gen(tmp_path, capsys, "f.json")
    code, _, err = run(capsys, "verify", "--theorem", "pert-d", "--scenario", str(path))
    assert code == 2 and "needs frame" in err


def test_verify_hypothesis_violated(tmp_path, capsys):
    path = gen(tmp_path, capsys, "tv.json", "--fixture", "three-vector-c2")
    data = json.loads(path.read_text())
    data["G"] = data["F"]
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", "--theorem", "sum3", "--scenario", str(path))
    assert code == 1 and json.loads(out)["verdict"] == "hypothesis-violated"


def test_verify_generated(tmp_path, capsys):
    for th in ("sum3", "pert1", "R-S"):
        path = gen(tmp_path, capsys, f"{th}.json", "--theorem", th, "--seed", "2")
        code, out, _ = run(capsys, "verify", "--theorem", th, "--scenario", str(path))
        assert code == 0, out


def test_falsified_writes_reproducer(tmp_path, capsys, monkeypatch):
    from cstarframes import perturbation as P

    real = P.predict_sum_bounds
    monkeypatch.setattr(
        P, "predict_sum_bounds", lambda *a: type(real(*a))(real(*a).lower, real(*a).lower * 1.0001, "norm")
    )
    path = gen(tmp_path, capsys, "s.json", "--theorem", "sum3", "--seed", "1")
    rdir = tmp_path / "repro"
    code, out, _ = run(capsys, "verify", "--theorem", "sum3", "--scenario", str(path), "--reproducer-dir", str(rdir))
    assert code == 3
    files = list(rdir.glob("reproducer-sum3-*.json"))
    assert len(files) == 1 and json.loads(out)["reproducer"] == str(files[0])
    code, out, _ = run(capsys, "falsify", "--theorem", "sum3", "--trials", "3", "--reproducer-dir", str(rdir))
    assert code == 3 and len(json.loads(out)["reproducers"]) == 3


def test_falsify(capsys):
    code, out, _ = run(capsys, "falsify", "--theorem", "kernel", "--trials", "5", "--seed", "3")
    data = json.loads(out)
    assert code == 0 and data["counts"]["falsified"] == 0 and data["trials"] == 5
    code, _, err = run(capsys, "falsify", "--theorem", "nope", "--trials", "1")
    assert code == 2 and "unknown theorem" in err


def test_determinism_byte_identical(tmp_path, capsys):
    outs = []
    for i in range(2):
        p = gen(tmp_path, capsys, f"g{i}.json", "--theorem", "pert2", "--seed", "11")
        r = tmp_path / f"r{i}.json"
        assert main(["verify", "--theorem", "pert2", "--scenario", str(p), "--seed", "5", "--out", str(r)]) == 0
        outs.append((p.read_bytes(), r.read_bytes()))
    assert outs[0] == outs[1]
    a = run(capsys, "falsify", "--theorem", "pert-d", "--trials", "4", "--seed", "2")[1]
    b = run(capsys, "falsify", "--theorem", "pert-d", "--trials", "4", "--seed", "2", "--workers", "3")[1]
    assert a == b


def test_text_format(tmp_path, capsys):
    path = gen(tmp_path, capsys, "sb.json", "--standard-basis")
    code, out, _ = run(capsys, "bounds", "--scenario", str(path), "--format", "text")
    assert code == 0 and "lower 1" in out and "upper 1" in out


def test_tolerance_env(tmp_path, capsys, monkeypatch):
    path = gen(tmp_path, capsys, "sb.json", "--standard-basis")
    monkeypatch.setenv("CSF_TOL", "not-a-number")
    assert run(capsys, "riesz", "--scenario", str(path))[0] == 2
    monkeypatch.setenv("CSF_TOL", "-1")
    assert run(capsys, "riesz", "--scenario", str(path))[0] == 2
    monkeypatch.setenv("CSF_TOL", "1e-6")
    assert run(capsys, "riesz", "--scenario", str(path))[0] == 0
    # --tol wins over the environment
    assert run(capsys, "riesz", "--scenario", str(path), "--tol", "1e-8")[0] == 0
    assert run(capsys, "riesz", "--scenario", str(path), "--tol", "-1")[0] == 2


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["verify", "--theorem", "bogus", "--scenario", "x"]) == 2
    assert main(["gen", "--descriptor", "a,b"]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "cstarframes", "gen", "--standard-basis", "--descriptor", "1"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(proc.stdout)["descriptor"] == [1]
