"""Verification suite plumbing: gates, determinism, report semantics."""

import json
import warnings

import numpy as np
import pytest

import nelsonlab.verify as verify
from nelsonlab.model import make_params
from nelsonlab.verify import (
    CHECK_IDS,
    BoundReport,
    Resolution,
    run_suite,
    suite_passed,
    suite_to_csv,
    suite_to_json,
)

SMALL = Resolution(n=8, L=10.0, n_radial=2, n_angular=1, n_max=1, tol=1e-10, maxit=200)


def by_id(reports):
    return {r.id: r for r in reports}


@pytest.fixture(scope="module")
def full_suite():
    params = make_params(0.3, 1.0, kappa=0.1, lam=10.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return run_suite(params)


# ---------------------------------------------------------------------------
# the reference run


def test_reference_suite_has_no_failures(full_suite):
    assert suite_passed(full_suite)
    assert all(r.status == "pass" or r.skipped for r in full_suite)


def test_reports_cover_all_checks_in_id_order(full_suite):
    ids = [r.id for r in full_suite]
    assert ids == sorted(ids)
    assert set(ids) == set(CHECK_IDS)


def test_energy_window_and_binding(full_suite):
    rep = by_id(full_suite)
    assert rep["energy.upper"].passed and rep["energy.upper"].slack >= 0.0
    assert rep["energy.lower"].passed
    assert rep["binding.positivity"].passed
    # the upper reference is the discrete atomic level on the same grid
    assert rep["energy.upper"].rhs == pytest.approx(
        rep["binding.positivity"].lhs * -1.0, rel=1e-12
    )


def test_identity_checks_are_machine_tight(full_suite):
    rep = by_id(full_suite)
    for cid in (
        "identity.pull_through",
        "identity.telescoping.res1",
        "identity.telescoping.res2",
    ):
        assert rep[cid].passed
        assert rep[cid].lhs < 1e-12


def test_moment_and_photon_checks_are_nonvacuous(full_suite):
    rep = by_id(full_suite)
    for cid in ("moment.abs_x", "moment.log", "moment.x_squared", "moment.exponential"):
        assert rep[cid].passed
        assert rep[cid].lhs > 0.0
    assert rep["localization.g_square"].lhs > 0.0
    assert rep["photons.total"].lhs > 0.0
    assert rep["photons.hard"].lhs + rep["photons.soft"].lhs == pytest.approx(
        rep["photons.total"].lhs, rel=1e-12
    )


def test_overlap_floor_is_skipped_at_moderate_charge(full_suite):
    rep = by_id(full_suite)
    assert rep["overlap.lower_bound"].skipped
    assert "G_IR" in rep["overlap.lower_bound"].status
    assert rep["overlap.markov"].passed
    assert rep["overlap.q_bound"].passed


# ---------------------------------------------------------------------------
# gates


def test_zero_charge_is_trivially_green():
    params = make_params(0.0, 1.0)
    reports = run_suite(params, SMALL)
    rep = by_id(reports)
    assert suite_passed(reports)
    assert rep["energy.upper"].slack == 0.0
    assert rep["energy.lower"].slack == 0.0
    assert rep["photons.total"].lhs == 0.0 and rep["photons.total"].rhs == 0.0
    assert rep["overlap.lower_bound"].passed
    assert rep["overlap.lower_bound"].lhs == 1.0  # overlap floor at e = 0
    assert abs(rep["overlap.lower_bound"].slack) < 1e-10
    for cid in ("moment.abs_x", "moment.log", "moment.x_squared", "moment.exponential"):
        assert rep[cid].skipped


def test_large_charge_reports_window_exit():
    params = make_params(1.2, 1.0)
    reports = run_suite(params, SMALL, selection=["energy", "photons", "moment"])
    assert len(reports) == 9
    for r in reports:
        assert r.skipped
        assert "C_UV" in r.status
        assert r.lhs is None and r.slack is None


def test_selection_filters_by_prefix():
    params = make_params(0.2, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        reports = run_suite(params, SMALL, selection=["photons"])
    assert [r.id for r in reports] == ["photons.hard", "photons.soft", "photons.total"]
    only = run_suite(params, SMALL, selection="overlap.markov")
    assert [r.id for r in only] == ["overlap.markov"]


# ---------------------------------------------------------------------------
# determinism and serialization


def test_suite_is_deterministic():
    params = make_params(0.25, 1.0)
    sel = ["energy", "binding", "photons", "moment", "overlap"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        a = run_suite(params, SMALL, selection=sel)
        b = run_suite(params, SMALL, selection=sel)
    assert len(a) == len(b)
    for ra, rb in zip(a, b):
        assert ra.to_dict() == rb.to_dict()  # bitwise, including floats


def test_json_is_deterministic_and_clean(full_suite):
    config = {"e": 0.3, "Z": 1.0}
    s1 = suite_to_json(full_suite, config)
    s2 = suite_to_json(full_suite, config)
    assert s1 == s2
    payload = json.loads(s1)
    assert payload["passed"] is True
    assert payload["config"] == config
    assert len(payload["reports"]) == len(full_suite)
    assert "NaN" not in s1 and "Infinity" not in s1


def test_csv_flattening(full_suite):
    text = suite_to_csv(full_suite)
    lines = text.strip().split("\n")
    assert lines[0] == "id,status,lhs,rhs,slack"
    assert len(lines) == len(full_suite) + 1
    # numeric cells round-trip at full precision
    row = dict(zip(("id", "status", "lhs", "rhs", "slack"), lines[1].split(",")))
    rep = by_id(full_suite)[row["id"]]
    if row["lhs"]:
        assert float(row["lhs"]) == rep.lhs


def test_check_errors_become_skips(monkeypatch):
    def boom(ctx):
        raise ValueError("synthetic fault")

    monkeypatch.setattr(verify, "_CHECKS", (("energy.upper", boom),))
    reports = run_suite(make_params(0.1, 1.0), SMALL)
    assert len(reports) == 1
    assert reports[0].skipped
    assert "synthetic fault" in reports[0].status
    assert not suite_passed(reports) is False  # skips never count as failures


def test_pass_threshold_semantics():
    ok = verify._checked("x", "", 1.0 + 5e-11, 1.0, {})
    assert ok.status == "pass"  # slack -5e-11 is inside the -1e-10 tolerance
    bad = verify._checked("x", "", 1.0 + 2e-10, 1.0, {})
    assert bad.status == "fail"
    assert not suite_passed([bad])
    scaled = verify._checked("x", "", 100.0 + 5e-9, 100.0, {})
    assert scaled.status == "pass"  # atol scales with |rhs|


def test_report_dataclass_shape():
    r = BoundReport("a.b", "anchor text", 1.0, 2.0, 1.0, "pass", {"e": 0.3}, "note")
    d = r.to_dict()
    assert set(d) == {"id", "anchor", "lhs", "rhs", "slack", "status", "params", "notes"}
    assert r.passed and not r.skipped
    assert Resolution().to_dict()["n"] == 16
