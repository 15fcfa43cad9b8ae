import pytest

from multidirac import verify
from multidirac.verify import Entry, report, run_scope, thread_count


def test_entry_expected_fail_counts_as_pass():
    assert Entry("x", "a", "fail", "fail").passed
    assert not Entry("x", "a", "pass", "fail").passed
    assert Entry("x", "a", "pass", "pass").to_dict()["passed"]


@pytest.mark.parametrize("raw", ["0", "-2", "many"])
def test_thread_count_rejects_bad_values(monkeypatch, raw):
    monkeypatch.setenv("MULTIDIRAC_THREADS", raw)
    with pytest.raises(ValueError):
        thread_count()


def test_thread_count_default(monkeypatch):
    monkeypatch.delenv("MULTIDIRAC_THREADS", raising=False)
    assert thread_count() >= 1
    monkeypatch.setenv("MULTIDIRAC_THREADS", "3")
    assert thread_count() == 3


def test_unknown_scope():
    with pytest.raises(ValueError):
        run_scope("everything")


def test_poisson_suite():
    entries = verify.poisson_suite(seed=1, pairs=20)
    assert [e.observed for e in entries] == ["pass"] * 3


def test_integrability_suite_outcomes():
    entries = {e.name: e for e in verify.integrability_suite(seed=0)}
    assert all(e.passed for e in entries.values())
    assert entries["defect vanishes for the perturbed witness"].observed == "fail"
    assert entries["multi-Courant bracket identity on random sections"].details["sections"] == 50


def test_thread_cap_does_not_change_results(monkeypatch):
    monkeypatch.setattr(verify, "SUITES", {"algebra": [], "dirac": [verify.poisson_suite],
                                           "integrability": [verify.integrability_suite]})
    monkeypatch.setenv("MULTIDIRAC_THREADS", "1")
    serial = [e.to_dict() for e in run_scope("all", 2)]
    monkeypatch.setenv("MULTIDIRAC_THREADS", "4")
    threaded = [e.to_dict() for e in run_scope("all", 2)]
    assert serial == threaded


def test_report_entries_carry_anchors():
    rep = report(verify.poisson_suite(0, 3), "dirac", 0)
    assert rep["passed"] and all(e["anchor"] for e in rep["entries"])


def test_graph_isotropy_suite_small():
    entries = verify.graph_isotropy_suite(seed=5, count=4, max_dim=5)
    assert all(e.passed for e in entries)
