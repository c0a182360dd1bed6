"""File formats, CSV contracts, CLI behavior, and verification suites."""
import json

import numpy as np
import pytest

from isocap import (
    FormatError,
    LatticeFunction,
    LatticeSet,
    Ledger,
    Objective,
    minimize,
    min_sym_diff_to_ball,
    r_alpha,
    read_config,
    read_function_file,
    read_set_file,
    run_fluctuation,
    run_suite,
    sym_diff_count,
    write_function_file,
    write_set_file,
)
from isocap.cli import main
from isocap.experiments import (
    CONVERGENCE_COLUMNS,
    FLUCTUATION_COLUMNS,
    ExperimentRecord,
    write_fluctuation_csv,
)
from conftest import random_connected_set


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def test_set_file_roundtrip(tmp_path, rng):
    X = random_connected_set(rng, 3, 17)
    path = tmp_path / "x.set"
    write_set_file(X, path)
    assert read_set_file(path) == X


def test_set_file_errors(tmp_path):
    p = tmp_path / "bad.set"
    p.write_text("")
    with pytest.raises(FormatError):
        read_set_file(p)
    p.write_text("3 2\n0 0 0\n")
    with pytest.raises(FormatError):
        read_set_file(p)  # wrong count
    p.write_text("3 2\n0 0 0\n0 0 0\n")
    with pytest.raises(FormatError):
        read_set_file(p)  # duplicates
    p.write_text("3 1\n0 0\n")
    with pytest.raises(FormatError):
        read_set_file(p)  # wrong arity
    p.write_text("x y\n")
    with pytest.raises(FormatError):
        read_set_file(p)


def test_function_file_roundtrip(tmp_path, rng):
    u = LatticeFunction.from_dict(
        {(0, 1): 0.25, (2, -3): 1.75, (-1, 0): 1e-9}, dim=2)
    path = tmp_path / "u.fn"
    write_function_file(u, path)
    v = read_function_file(path)
    assert v == u


def test_function_file_errors(tmp_path):
    p = tmp_path / "bad.fn"
    p.write_text("2 1\n0 0 notanumber\n")
    with pytest.raises(FormatError):
        read_function_file(p)
    p.write_text("2 2\n0 0 1.0\n0 0 2.0\n")
    with pytest.raises(FormatError):
        read_function_file(p)


def test_read_config(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("# comment\ntolerance = 1e-11\nmax_sweeps=25\nname= fast\nflag=true\n")
    cfg = read_config(p)
    assert cfg == {"tolerance": 1e-11, "max_sweeps": 25,
                   "name": "fast", "flag": True}
    p.write_text("justakey\n")
    with pytest.raises(FormatError):
        read_config(p)


# ---------------------------------------------------------------------------
# ledger and CSV contracts
# ---------------------------------------------------------------------------

def test_ledger_monotone(tmp_path):
    path = tmp_path / "ledger.json"
    led = Ledger(path)
    assert led.update(3, 2.0, 10, 5.0) == 5.0
    assert led.update(3, 2.0, 10, 7.0) == 5.0  # never increases
    assert led.update(3, 2.0, 10, 4.0) == 4.0
    led.save()
    led2 = Ledger(path)
    assert led2.best(3, 2.0, 10) == 4.0


def test_fluctuation_csv_schema(tmp_path):
    rec = ExperimentRecord(N=7, d=3, param=2.0, alphaN=0.0, PN=5.5,
                           rN=1.19, symDiff=0, boundValue=3.25,
                           ratio=0.0, seed=1)
    path = tmp_path / "f.csv"
    write_fluctuation_csv([rec], path)
    lines = path.read_text().splitlines()
    data = [ln for ln in lines if not ln.startswith("#")]
    assert data[0] == ",".join(FLUCTUATION_COLUMNS)
    assert data[1] == "7,3,2.0,0.0,5.5,1.19,0,3.25,0.0,1"
    # final comment row carries the empirical max ratio
    assert any(ln.startswith("# maxRatio=") for ln in lines)


def _strip_comments(text):
    return "\n".join(ln for ln in text.splitlines() if not ln.startswith("#"))


def test_convergence_cli_deterministic(tmp_path):
    out1 = tmp_path / "c1.csv"
    out2 = tmp_path / "c2.csv"
    args = ["convergence", "--p", "2.0", "--dim", "3", "--k", "2", "3"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    t1, t2 = out1.read_text(), out2.read_text()
    assert _strip_comments(t1) == _strip_comments(t2)
    data = _strip_comments(t1).splitlines()
    assert data[0] == ",".join(CONVERGENCE_COLUMNS)
    rows = [ln.split(",") for ln in data[1:]]
    assert len(rows) == 2
    # error column is |discreteValue - continuumTarget|
    for row in rows:
        assert float(row[4]) == pytest.approx(
            abs(float(row[2]) - float(row[3])), rel=1e-12)


def test_fluctuation_pipeline_small(tmp_path):
    led = Ledger(tmp_path / "ledger.json")
    recs = run_fluctuation([7, 12], d=3, seed=0, ledger=led,
                           max_sweeps=2, exchange_batch=5)
    assert [r.N for r in recs] == [7, 12]
    for r in recs:
        assert r.alphaN >= 0.0
        assert np.isfinite(r.boundValue) and r.boundValue > 0
        assert np.isfinite(r.ratio)
    # the exact ball count N=7 lands on (a translate of) the ball
    assert recs[0].symDiff <= 2
    with pytest.raises(Exception):
        run_fluctuation([12, 7])  # not nondecreasing


def test_fluctuation_triangle_consistency():
    """Two independent minimizers are close through the ball comparison."""
    N = 12
    obj = Objective(kind="p_cap", p=2.0, truncation=10.0)
    X = minimize(N, obj, d=3, seed=0, max_sweeps=2, exchange_batch=5).best_set
    Y = minimize(N, obj, d=3, seed=7, max_sweeps=2, exchange_batch=5).best_set
    rN = r_alpha(float(N), 3)
    zx, sx = min_sym_diff_to_ball(X, rN)
    zy, sy = min_sym_diff_to_ball(Y, rN)
    # compare in a common frame: translate Y's best center onto X's
    Yc = Y.translate(tuple(a - b for a, b in zip(zx, zy)))
    assert sym_diff_count(X, Yc) <= sx + sy


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_solve_roundtrip(tmp_path):
    setfile = tmp_path / "x.set"
    write_set_file(LatticeSet([(0, 0, 0), (1, 0, 0)]), setfile)
    out = tmp_path / "res.json"
    pot = tmp_path / "u.fn"
    code = main(["solve", "--set", str(setfile), "--mode", "relative",
                 "--R", "3.0", "--out", str(out),
                 "--dump-potential", str(pot)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["mode"] == "relative"
    assert payload["N"] == 2 and payload["d"] == 3
    assert payload["residual"] <= 1e-10
    u = read_function_file(pot)
    assert u((0, 0, 0)) == 1.0 and u((1, 0, 0)) == 1.0


def test_cli_solve_absolute_with_config(tmp_path, capsys):
    setfile = tmp_path / "x.set"
    write_set_file(LatticeSet([(0, 0, 0)]), setfile)
    cfg = tmp_path / "c.cfg"
    cfg.write_text("truncation_factor=3.0\n")
    assert main(["solve", "--set", str(setfile), "--p", "2.0",
                 "--config", str(cfg)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["value"] > 0
    assert payload["correctedValue"] < payload["value"]


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.set"
    bad.write_text("3 1\n0 0\n")
    assert main(["solve", "--set", str(bad)]) == 2
    good = tmp_path / "x.set"
    write_set_file(LatticeSet([(0, 0, 0)]), good)
    assert main(["solve", "--set", str(good), "--mode", "relative"]) == 2
    assert main(["fluctuation", "--N", "12", "7"]) == 2
    # infeasible constraint: set outside the surrounding ball
    far = tmp_path / "far.set"
    write_set_file(LatticeSet([(50, 0, 0)]), far)
    assert main(["solve", "--set", str(far), "--mode", "relative",
                 "--R", "2.0"]) == 1


def test_cli_minimize(tmp_path):
    out = tmp_path / "best.set"
    cfg = tmp_path / "fast.cfg"
    cfg.write_text("sweeps=2\nexchange_batch=5\n")
    code = main(["minimize", "--N", "9", "--dim", "3", "--seed", "0",
                 "--truncation", "8.0", "--config", str(cfg),
                 "--out", str(out)])
    assert code == 0
    X = read_set_file(out)
    assert len(X) == 9
    meta = json.loads((tmp_path / "best.set.json").read_text())
    assert meta["N"] == 9 and "value" in meta


def test_cli_verify(tmp_path):
    out = tmp_path / "verify.json"
    code = main(["verify", "--suite", "lattice", "--trials", "30",
                 "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["passed"] is True
    assert all(r["passed"] for r in rep["results"])


# ---------------------------------------------------------------------------
# verification suites and the mutation fixture
# ---------------------------------------------------------------------------

def test_run_suite_all_passes():
    rep = run_suite("all", seed=3, trials=40)
    assert rep.passed, [r.name for r in rep.results if not r.passed]


def test_run_suite_unknown():
    with pytest.raises(ValueError):
        run_suite("nope")


def test_mutation_broken_diag_kernel_fails():
    """A sign error in the diagonal kernel must break a property suite."""
    from isocap.energy import _common, _accurate_sum

    def broken_diag(w, v, p):
        w, v = _common(w, v)
        wp = np.pad(w, 1)
        vp = np.pad(v, 1)
        vertical = _accurate_sum(np.abs(wp - vp) ** p)
        shifted = _accurate_sum(np.abs(wp[:-1] - vp[1:]) ** p)  # wrong shift
        return vertical + shifted

    rep = run_suite("rearrangement", seed=0, trials=200,
                    kernels={"diag_1d": broken_diag})
    assert not rep.passed
    failing = {r.name for r in rep.results if not r.passed}
    assert "paired_line_inequalities" in failing
