import math
import os
import pathlib

import pytest

import async_iter_lab as ail

CONFIGS = pathlib.Path(os.environ.get("AIL_CONFIG_DIR", pathlib.Path(__file__).resolve().parents[2] / "configs"))


def test_lemma1_rate():
    assert ail.lemma1_rate(0.5, 0.3, 3) == pytest.approx(0.8 ** 0.25, rel=1e-15)
    assert ail.lemma1_rate(0.5, 0.3, 0) == pytest.approx(0.8, rel=1e-15)
    with pytest.raises(ail.Error):
        ail.lemma1_rate(0.7, 0.3, 2)


def test_corollary1_bound():
    eta = math.log(0.8) / math.log(0.5)
    assert ail.corollary1_eta(0.5, 0.0, 0.0, 0.8) == pytest.approx(eta, rel=1e-14)
    assert ail.corollary1_bound(0.5, 0.0, 0.0, 0.8, 2) == pytest.approx(3.0 ** -eta, rel=1e-14)


def test_worst_case_trace_verifies_tight():
    V = ail.worst_case_trace(0.5, 0.3, 3, 1.0, 200)
    rho = ail.lemma1_rate(0.5, 0.3, 3)
    assert all(v <= rho ** k * (1 + 1e-12) for k, v in enumerate(V))
    delays = [min(k, 3) for k in range(len(V))]
    v = ail.verify_eq3(V, 0.5, 0.3, delays)
    assert v["pass"] and v["tight"]
    V[20] *= 2
    bad = ail.verify_eq3(V, 0.5, 0.3, delays)
    assert not bad["pass"] and bad["index"] == 20


def test_step_rules():
    assert ail.sgd_gamma("convex-max", 1.0, 0) == 1.0
    assert ail.sgd_gamma("sconvex-max", 1.0, 2) == pytest.approx(0.2, rel=1e-15)
    assert ail.piag_gamma_max(2.0, 3) == pytest.approx(1 / 14, rel=1e-15)
    g = 10 / 50 + math.sqrt(10 / 50)
    assert ail.arock_gamma(1.0, 10, 50) == pytest.approx(1 / (1 + 5 * g), rel=1e-14)
    assert ail.arock_rate(1.0, 0.5, 10, 50) == pytest.approx(1 - 0.75 / (50 * (1 + 6 * g)), rel=1e-14)


def test_config_round_trip_and_errors():
    text = (CONFIGS / "piag_theorem1.ini").read_text()
    canon = ail.parse_config(text)
    assert ail.parse_config(canon) == canon
    with pytest.raises(ail.Error, match="semantic"):
        ail.parse_config("[experiment]\nkind = run\nK = 0\n")


def test_run_config():
    out = ail.run_config((CONFIGS / "block_partial.ini").read_text())
    assert out["pass"] and out["verdict"] == "PASS"
    assert len(out["monitored"]) == len(out["bound"])
    assert all(m <= b for m, b in zip(out["monitored"], out["bound"]))
    rate = ail.run_config("[experiment]\nkind = rate\n\n[rate]\nlemma = 1\nq = 0.5\np = 0.3\ntau = 3\n")
    assert rate["pass"]


def test_execute_config_writes_files(tmp_path):
    rep = ail.execute_config((CONFIGS / "lemma1_worst_case.ini").read_text(), str(tmp_path))
    assert rep["pass"]
    assert (tmp_path / "trace.csv").exists()
    assert (tmp_path / "report.kv").exists()
