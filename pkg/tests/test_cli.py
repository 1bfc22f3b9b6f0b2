import json
import subprocess
import sys

import numpy as np
import pytest

from contstab import cli, powerlaw, tikhonov
from contstab.exceptions import ResolutionError


def run(*args, env=None):
    return subprocess.run([sys.executable, "-m", "contstab", *args], capture_output=True, text=True, env=env)


def call(capsys, *args):
    code = cli.main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exponent_default(capsys):
    code, out, _ = call(capsys, "exponent", "--annulus", "0.25,0.5", "--z", "0.75,0")
    assert code == 0
    header, row = out.splitlines()[:2]
    assert header == "z_re,z_im,gamma,stable_region"
    assert float(row.split(",")[2]) == pytest.approx(0.41504, abs=1e-5)


def test_exponent_json_stable_region(capsys):
    code, out, _ = call(capsys, "exponent", "--halfplane", "0.6", "--z", "0,1", "--format", "json")
    obj = json.loads(out)
    assert code == 0 and obj["stable_region"] is True and obj["gamma"] == 1.0
    assert obj["z"] == [0.0, 1.0] and obj["geometry"] == {"kind": "halfplane", "r": 0.6}


def test_exponent_ellipse(capsys):
    code, out, _ = call(capsys, "exponent", "--ellipse", "2", "--z", "0,0.5", "--format", "json")
    assert json.loads(out)["alpha"] == pytest.approx(0.3058, abs=1e-4)


@pytest.mark.parametrize("args", [
    ("exponent", "--annulus", "0.5,0.25"),
    ("exponent", "--z", "0.5,0"),
    ("exponent", "--z", "abc"),
    ("exponent", "--ellipse", "2", "--z", "0.5,0"),
    ("sweep", "--eps-range", "1e-3,1e-8,11"),
    ("sweep", "--eps-range", "1e-14,1e-3,11"),
    ("spectrum", "--nodes", "15"),
])
def test_invalid_input_exits_2(capsys, args):
    code, out, err = call(capsys, *args)
    assert code == 2
    assert "invalid input" in err


def test_argparse_errors_exit_2():
    assert run("exponent", "--format", "xml").returncode == 2


def test_sweep_header_and_footer(capsys):
    code, out, _ = call(capsys, "sweep")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "eps,bound,M_at_z,u_at_z,norm_H,norm_Gamma,eta_star_ratio"
    rows = [l for l in lines[1:] if not l.startswith("#")]
    assert len(rows) == 11
    data = np.array([[float(c) for c in r.split(",")] for r in rows])
    meta = dict(l[2:].split("=") for l in lines if l.startswith("#"))
    refit = powerlaw.fit_loglog(data[:, 0], data[:, 1]).slope
    assert float(meta["slope_bound"]) == pytest.approx(refit, abs=1e-12)
    # 17 significant digits survive the text round trip
    assert format(data[3, 1], ".17g") == rows[3].split(",")[1]


def test_sweep_json(capsys):
    code, out, _ = call(capsys, "sweep", "--halfplane", "0.6", "--z", "0,3", "--format", "json")
    obj = json.loads(out)
    assert obj["columns"][0] == "eps" and len(obj["rows"]) == 11
    assert obj["slopes"]["bound"] == pytest.approx(obj["gamma"], abs=0.02)


def test_sweep_numerical_failure_exit_3(capsys, monkeypatch):
    real = tikhonov.solve

    def flaky(g, z, eps, tol=1e-12):
        if eps < 1e-6:
            raise ResolutionError("series did not converge")
        return real(g, z, eps, tol)

    monkeypatch.setattr(tikhonov, "solve", flaky)
    code, out, err = call(capsys, "sweep")
    assert code == 3
    lines = out.splitlines()
    assert lines[0].endswith(",error")
    assert lines[-1].split(",")[-1].startswith("series did not converge")
    assert all(l.endswith(",") for l in lines[1:-1])
    assert "numerical failure" in err


def test_sweep_is_deterministic(tmp_path):
    a = run("sweep", "--out", str(tmp_path / "a.csv"))
    b = run("sweep", "--out", str(tmp_path / "b.csv"))
    assert a.returncode == b.returncode == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert b"\r" not in (tmp_path / "a.csv").read_bytes()


def test_threads_do_not_change_output(capsys, monkeypatch):
    _, single, _ = call(capsys, "sweep", "--eps-range", "1e-6,1e-3,6")
    monkeypatch.setenv("CONTSTAB_THREADS", "3")
    _, multi, _ = call(capsys, "sweep", "--eps-range", "1e-6,1e-3,6")
    assert single == multi


def test_bad_thread_count(capsys, monkeypatch):
    monkeypatch.setenv("CONTSTAB_THREADS", "zero")
    assert call(capsys, "exponent")[0] == 2


def test_spectrum_annulus(capsys):
    code, out, _ = call(capsys, "spectrum", "--annulus", "0.25,0.5", "--nodes", "256")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "index,mu_numeric,lambda_analytic,rel_err"
    idx, mu, lam, err = lines[1].split(",")
    assert idx == "0" and float(mu) == pytest.approx(np.pi, rel=1e-10) and float(err) < 1e-10


def test_spectrum_halfplane_rows(capsys):
    code, out, _ = call(capsys, "spectrum", "--halfplane", "0.6", "--format", "json")
    rows = json.loads(out)["rows"]
    for k, mu, lam, err in rows[:10]:
        assert mu == pytest.approx(9.0 ** -k / 3, rel=1e-10)


def test_spectrum_disk_proxy_metadata(capsys):
    code, out, _ = call(capsys, "spectrum", "--annulus", "1e-9,0.5")
    meta = dict(l[2:].split("=") for l in out.splitlines() if l.startswith("#"))
    assert float(meta["parfenov_rho_hat"]) == pytest.approx(0.5, abs=1e-6)


def test_spectrum_annulus_branch_metadata(capsys):
    code, out, _ = call(capsys, "spectrum", "--annulus", "0.2,0.5", "--nodes", "128", "--format", "json")
    rates = json.loads(out)["branch_rates"]
    assert rates["outer_rate"] == pytest.approx(0.25, rel=1e-8)
    assert rates["inner_rate"] == pytest.approx(0.16, rel=1e-8)


def test_maximizer_table(capsys, tmp_path):
    path = tmp_path / "m.json"
    code, _, _ = call(capsys, "maximizer", "--ellipse", "2", "--z", "0,0.5", "--eps", "1e-4",
                      "--grid", "8", "--format", "json", "--out", str(path))
    obj = json.loads(path.read_text())
    assert code == 0 and len(obj["rows"]) == 8
    assert obj["rows"][0][4] == pytest.approx(obj["M_at_z"], rel=1e-12)
    assert obj["polynomial_at_z"] > 0


def test_maximizer_halfplane_grid_stays_on_level_curve(capsys):
    code, out, _ = call(capsys, "maximizer", "--halfplane", "0.6", "--z", "0,3", "--grid", "6")
    pts = [complex(float(r.split(",")[0]), float(r.split(",")[1])) for r in out.splitlines()[1:7]]
    from contstab import HalfPlaneGeometry, exponent
    for p in pts:
        assert exponent(HalfPlaneGeometry(0.6), p) == pytest.approx(exponent(HalfPlaneGeometry(0.6), 3j), abs=1e-12)


def test_verify_default_passes():
    res = run("verify")
    assert res.returncode == 0, res.stdout
    assert all(l.startswith("PASS") for l in res.stdout.splitlines())


def test_verify_lemma_and_json(capsys):
    code, out, _ = call(capsys, "verify", "--lemma-a1", "2,1", "--json")
    obj = json.loads(out)
    assert code == 0 and obj["passed"]
    names = [c["name"] for c in obj["checks"]]
    assert "sum asymptotics slope 1" in names and "sum asymptotics slope 2" in names


def test_verify_negative_control(capsys):
    code, out, _ = call(capsys, "verify", "--slope-target", "0.9")
    assert code == 1
    assert "FAIL bound sweep slope" in out
