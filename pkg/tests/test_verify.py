import json

from affwave import verify
from affwave.errors import NyquistViolation
from affwave.io import _jsonable


def test_suite_report_shape():
    r = verify.run_suite("qfactor")
    assert set(r) == {"suite", "passed", "tol", "measured"}
    json.dumps(_jsonable(r))


def test_numerical_failure_becomes_failed_result(monkeypatch):
    def boom(tol=None, fixtures=None):
        raise NyquistViolation("guard failed in test")

    monkeypatch.setitem(verify.SUITES, "qfactor", boom)
    r = verify.run_suite("qfactor")
    assert r["passed"] is False and "NyquistViolation" in r["error"]


def test_all_aggregates(monkeypatch):
    for name in list(verify.SUITES):
        monkeypatch.setitem(verify.SUITES, name, lambda tol=None, fixtures=None, n=name: verify._result(n, True, 0, {}))
    r = verify.run_suite("all")
    assert r["passed"] and len(r["results"]) == len(verify.SUITES)


def test_reports_are_reproducible():
    assert json.dumps(_jsonable(verify.run_suite("wigner"))) == json.dumps(_jsonable(verify.run_suite("wigner")))
