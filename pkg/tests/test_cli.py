"""CLI subcommands, exit-code contract, and byte determinism."""
import json
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "selfcontract.cli"]


def run(args, cwd):
    return subprocess.run(CLI + args, capture_output=True, text=True, cwd=cwd)


@pytest.fixture
def workdir(tmp_path):
    cfg = tmp_path / "sim.cfg"
    cfg.write_text(
        "space = spider:3\n"
        "objective = dist\n"
        "objective.target = 1,1.0\n"
        "start = 2,1.0\n"
        "tau = 0.5\n"
        "steps = 6\n"
        "seed = 7\n"
        "out = run1\n"
    )
    r = run(["simulate", "--config", "sim.cfg"], tmp_path)
    assert r.returncode == 0, r.stderr
    return tmp_path


def test_simulate_outputs(workdir):
    assert (workdir / "run1.curve.json").exists()
    assert (workdir / "run1.interp.json").exists()
    assert (workdir / "run1.values.csv").exists()
    log = json.loads((workdir / "run1.log.json").read_text())
    assert log["seed"] == 7 and log["diagnostic"] is None
    values = (workdir / "run1.values.csv").read_text().splitlines()
    assert values[0] == "k,t,f"
    assert len(values) == 8  # header + 7 points


def test_simulate_unknown_objective(tmp_path):
    r = run(["simulate", "--space", "euclidean:2", "--objective", "nope",
             "--out", "x"], tmp_path)
    assert r.returncode == 2
    assert "unknown objective" in r.stderr


def test_verify_pass_and_exit_codes(workdir):
    r = run(["verify", "run1.curve.json",
             "--check", "self_contracted,stationarity,angle_estimate",
             "--out", "ver.json"], workdir)
    assert r.returncode == 0
    doc = json.loads((workdir / "ver.json").read_text())
    assert doc["passed"] and len(doc["reports"]) == 3

    r = run(["verify", "run1.curve.json", "--check", "bogus"], workdir)
    assert r.returncode == 2

    r = run(["verify", "missing.json"], workdir)
    assert r.returncode == 2


def test_verify_planted_violation(tmp_path):
    doc = {
        "schema_version": 1,
        "space": {"kind": "euclidean", "dim": 1, "tolerance": 1e-9},
        "mode": "discrete",
        "domain_end": 3.0,
        "samples": [{"t": 0.0, "p": [0.0]}, {"t": 1.0, "p": [3.0]},
                    {"t": 2.0, "p": [1.0]}],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    r = run(["verify", "bad.json", "--out", "rep.json"], tmp_path)
    assert r.returncode == 1
    rep = json.loads((tmp_path / "rep.json").read_text())
    witness = rep["reports"][0]["witness"]
    assert witness["t1"] == 0.0 and witness["t2"] == 1.0 and witness["t3"] == 2.0


def test_audit_pass_fail_unsupported(workdir):
    r = run(["audit", "run1.curve.json", "--bound", "tree", "--out", "aud"],
            workdir)
    assert r.returncode == 0
    rows = (workdir / "aud.csv").read_text().splitlines()
    assert rows[0].startswith("schema_version,bound,space")
    assert rows[1].split(",")[1] == "tree"

    r = run(["audit", "run1.curve.json", "--bound", "book"], workdir)
    assert r.returncode == 2

    r = run(["audit", "run1.curve.json", "--bound", "generic"], workdir)
    assert r.returncode == 0

    # a large --tol turns any finite ratio into a pass; exit still 0
    r = run(["audit", "run1.curve.json", "--bound", "tree", "--tol", "100"],
            workdir)
    assert r.returncode == 0


def test_counterexample_and_report(workdir):
    r = run(["counterexample", "--k", "5", "--out", "cex"], workdir)
    assert r.returncode == 0
    growth = (workdir / "cex.growth.csv").read_text().splitlines()
    assert growth[0] == "family,k,length,diam,ratio"
    assert len(growth) == 1 + 2 * 4  # two families, k = 2..5
    # ratios grow with unit slope in k
    orth = [line.split(",") for line in growth[1:] if line.startswith("orthonormal")]
    ratios = [float(row[4]) for row in orth]
    assert ratios == pytest.approx([1.0, 2.0, 3.0, 4.0], abs=1e-12)

    run(["audit", "run1.curve.json", "--bound", "tree", "--out", "aud"], workdir)
    r = run(["report", "aud.csv", "cex.growth.csv", "--out", "rep"], workdir)
    assert r.returncode == 0
    agg = (workdir / "rep.aggregate.csv").read_text().splitlines()
    assert agg[0] == "space,bound,n,n_passed,max_ratio,all_passed"
    assert agg[1].startswith("spider:3,tree,1,1,")
    plot = (workdir / "rep.plotdata.csv").read_text().splitlines()
    assert plot[0] == "family,k,ratio"
    assert len(plot) == 1 + 8


def test_report_empty_input(tmp_path):
    (tmp_path / "empty.csv").write_text("")
    r = run(["report", "empty.csv"], tmp_path)
    assert r.returncode == 2


def test_report_mixed_pass_fail_marks_fail(tmp_path):
    header = ("schema_version,bound,space,length,diam,width,bound_value,"
              "ratio,passed,seed,constants")
    rows = [
        header,
        '1,tree,spider:3,2.0,1.0,,10.0,0.2,1,0,{}',
        '1,tree,spider:3,20.0,1.0,,10.0,2.0,0,0,{}',
    ]
    (tmp_path / "rows.csv").write_text("\n".join(rows) + "\n")
    r = run(["report", "rows.csv", "--out", "agg"], tmp_path)
    assert r.returncode == 1
    agg = (tmp_path / "agg.aggregate.csv").read_text().splitlines()
    assert agg[1].endswith(",0")  # all_passed flag cleared


def test_byte_determinism(workdir):
    first = {}
    for name in ("run1.curve.json", "run1.interp.json", "run1.values.csv",
                 "run1.log.json"):
        first[name] = (workdir / name).read_bytes()
    r = run(["simulate", "--config", "sim.cfg"], workdir)
    assert r.returncode == 0
    for name, blob in first.items():
        assert (workdir / name).read_bytes() == blob

    run(["verify", "run1.curve.json", "--out", "v1.json", "--seed", "3"], workdir)
    v1 = (workdir / "v1.json").read_bytes()
    run(["verify", "run1.curve.json", "--out", "v1.json", "--seed", "3"], workdir)
    assert (workdir / "v1.json").read_bytes() == v1
