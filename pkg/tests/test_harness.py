import csv
import io
import json

import numpy as np
import pytest

from distillery.harness import (
    CSV_COLUMNS,
    GBDS_COLUMNS,
    ShareExperimentExhausted,
    check_example,
    classify_overlaps,
    emit_report,
    reproduce_example,
    run_share_experiment,
    worker_count,
)
from distillery.sampling import SampleConfig


def small(family, d, restriction="normal", n=60, seed=3, **kw):
    return SampleConfig(family, d, restriction, n, seed=seed, **kw)


def test_reproduce_example_values():
    rec = reproduce_example()
    assert rec["p_eps"] == pytest.approx(0.5, abs=1e-12)
    assert rec["p_coset"] == pytest.approx(0.3148, abs=5e-4)
    assert rec["f_out"] == pytest.approx(0.6296, abs=5e-3)
    assert rec["input_fidelity"] == pytest.approx(1 / 18)
    assert rec["overlap_omega_21"] == pytest.approx(5 / 9)
    assert check_example(rec) == []


def test_check_example_flags_mismatch():
    rec = reproduce_example()
    rec["correction"] = [0, 2]
    rec["f_out"] = 0.5
    assert len(check_example(rec)) == 2


def test_qubit_bds_fully_distillable():
    rep = run_share_experiment(small("bds_uniform", 2, n=200), ["fimax"])
    assert rep.share("fimax") == 1.0
    assert rep.sample_count == 200
    assert 0 < rep.acceptance_rate <= 1


def test_qubit_strict_is_empty_or_exhausted():
    with pytest.raises(ShareExperimentExhausted) as info:
        run_share_experiment(small("bds_uniform", 2, "strict", max_attempts=2000), ["fimax"])
    assert not info.value.report.complete
    assert info.value.report.sample_count == 0
    rep = run_share_experiment(small("pure_haar", 2, "strict"), ["fimax", "adgj", "dejmps"])
    assert all(rep.share(p) == 0 for p in rep.protocols)


def test_gbds_statistics():
    cfg = small("gbds", 3, gbds_bases=4, gbds_states_per_basis=15)
    rep = run_share_experiment(cfg, ["fimax", "adgj"])
    for p in rep.protocols:
        shares = rep.gbds_shares[p]
        st = rep.per_protocol[p]
        assert len(shares) == 4
        assert st["share_mean"] == pytest.approx(np.mean(shares))
        assert st["share_median"] == pytest.approx(np.median(shares))
        assert st["share_min"] <= st["share_mean"] <= st["share_max"]
        assert 0 <= st["share"] <= 1
    assert rep.sample_count == 60


def test_report_checks_present():
    rep = run_share_experiment(small("pure_haar", 3), ["fimax", "adgj", "bbpssw"])
    assert rep.checks == {"dichotomy_violations": 0, "superset_violations": 0}
    assert rep.share("fimax") >= rep.share("adgj") >= rep.share("bbpssw")


def test_unsupported_protocol_rejected():
    with pytest.raises(ValueError):
        run_share_experiment(small("pure_haar", 3), ["dejmps"])


def test_json_report_round_trip_and_determinism():
    cfg = small("bds_uniform", 3)
    a = emit_report(run_share_experiment(cfg, ["fimax", "p1p2"]))
    b = emit_report(run_share_experiment(cfg, ["fimax", "p1p2"]))
    assert a == b
    assert (json.dumps(json.loads(a), indent=2) + "\n").encode() == a


def test_csv_layout():
    rep = run_share_experiment(small("pure_haar", 2), ["fimax", "dejmps"])
    rows = list(csv.reader(io.StringIO(emit_report(rep, "csv").decode())))
    assert rows[0] == CSV_COLUMNS
    assert [r[3] for r in rows[1:]] == ["fimax", "dejmps"]
    rep = run_share_experiment(small("gbds", 2, gbds_bases=2, gbds_states_per_basis=10), ["fimax"])
    rows = list(csv.reader(io.StringIO(emit_report(rep, "csv").decode())))
    assert rows[0] == CSV_COLUMNS + GBDS_COLUMNS
    assert len(rows) == 2


def test_unknown_format():
    rep = run_share_experiment(small("pure_haar", 2, n=5), ["fimax"])
    with pytest.raises(ValueError):
        emit_report(rep, "xml")


def test_runtime_only_on_request():
    rep = run_share_experiment(small("pure_haar", 2, n=5), ["fimax"])
    assert "runtime" not in json.loads(emit_report(rep))
    assert json.loads(emit_report(rep, include_runtime=True))["runtime"] >= 0


def test_thread_count_does_not_change_results(monkeypatch):
    rng = np.random.default_rng(0)
    ov = rng.dirichlet(np.ones(9), size=150)
    one = classify_overlaps(ov, 3, ["fimax", "adgj"], workers=1)
    three = classify_overlaps(ov, 3, ["fimax", "adgj"], workers=3)
    for p in one:
        assert np.array_equal(one[p], three[p])
    monkeypatch.setenv("DISTILLERY_THREADS", "2")
    assert worker_count() == 2
