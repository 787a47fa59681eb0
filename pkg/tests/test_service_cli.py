import json

import httpx
import pytest
from fastapi.testclient import TestClient

from sbo import cli, service
from sbo.api import app
from sbo.odesolver import VerificationFailure

client = TestClient(app)


def _boom(*args, **kwargs):
    raise VerificationFailure("forced", {"where": "test"})


@pytest.fixture
def via_testclient(monkeypatch):
    """Route the CLI's httpx calls into the in-process app."""
    def post(url, json=None, timeout=None):
        path = "/" + url.split("/", 3)[3]
        return client.post(path, json=json)

    monkeypatch.setattr(httpx, "post", post)
    return ["--server", "http://sbo.test"]


# -- service layer ---------------------------------------------------------------


def test_service_classify_and_solve():
    rep = service.classify("2/3", "17/3", 2, 2)
    assert rep["dimension"] == 1 and rep["a"] == 5
    assert service.classify("1", "1/2", 1, 1)["dimension"] == 0
    out = service.solve("1/3", 3, 1, 1, "recurrence")
    assert out["dimension"] == 1 and out["branch"]["method"] == "recurrence"
    out = service.solve("1/3", 3, 1, 2)
    assert out["branch"]["exploratory"] is True
    out = service.solve("-1", 4, 3, 3, "closed")
    assert out["branch"]["renormalized"] is True and out["dimension"] == 1


@pytest.mark.parametrize("call", [
    lambda: service.classify("x", "1", 1, 1),
    lambda: service.classify("1", "2", 2, 1),
    lambda: service.solve("1", -1, 1, 1),
    lambda: service.solve("1", 2, 1, 0),
    lambda: service.solve("1", 2, 1, 2, "closed"),
    lambda: service.solve("1", 2, 1, 1, "magic"),
    lambda: service.emit_operator("1", "3/2", 1, 1),
    lambda: service.emit_operator("1", "3", 1, 1, "pdf"),
    lambda: service.apply({"N": 0, "terms": []}, {"N": 0}),
    lambda: service.scan({"lambdas": [], "a": 1, "N": 1}),
    lambda: service.scan({"lambdas": ["1"], "a": "x", "N": 1}),
    lambda: service.scan({"lambdas": ["1"], "a": 1, "N": 1, "m": "sideways"}),
    lambda: service.scan({"lambdas": ["1"], "a": 1, "N": 1, "colour": 2}),
])
def test_service_rejects_malformed_input(call):
    with pytest.raises(ValueError):
        call()


def test_service_scan():
    out = service.scan({"lambdas": ["1/3", "-1/2"], "a": [0, 2], "N": [0, 1], "include_degenerate": True})
    assert out["failures"] == 0 and out["count"] == len(out["points"])
    assert all(p["dimension"] == 1 for p in out["points"])
    # N = 0 appears once per (lambda, a); N = 1 twice
    assert {(p["N"], p["m"]) for p in out["points"]} == {(0, 0), (1, 1), (1, -1)}


def test_service_scan_reports_failures(monkeypatch):
    monkeypatch.setattr(service, "classify_report", _boom)
    out = service.scan({"lambdas": ["1"], "a": 1, "N": 1, "m": "plus"})
    assert out["failures"] == 1 and out["points"][0]["diagnostics"] == {"where": "test"}


# -- HTTP ------------------------------------------------------------------------


def test_http_endpoints():
    assert client.get("/health").json()["status"] == "ok"
    r = client.post("/classify", json={"lambda": "1/4", "nu": "13/4", "N": 1, "m": -1})
    assert r.status_code == 200 and r.json()["dimension"] == 1
    r = client.post("/solve", json={"lambda": "2/3", "a": 5, "N": 2, "m": 2})
    assert r.status_code == 200 and r.json()["dimension"] == 1
    r = client.post("/emit", json={"lambda": "1/3", "nu": "4/3", "N": 1, "m": 1, "format": "latex"})
    assert r.status_code == 200 and r.json()["order"] == 1
    op = client.post("/emit", json={"lambda": "1/3", "nu": "4/3", "N": 1, "m": 1}).json()["operator"]
    section = {"N": 1, "components": [[[[0, 0, 1], "1"]], [[[1, 0, 0], "1"]], []]}
    r = client.post("/apply", json={"operator": op, "section": section})
    assert r.status_code == 200 and r.json()["polynomial"] == [[[0, 0, 0], {"re": "5/3", "im": "0"}]]
    r = client.post("/scan", json={"grid": {"lambdas": ["1/2"], "a": 1, "N": 1}})
    assert r.status_code == 200 and r.json()["count"] == 2
    r = client.post("/verify", json={"suite": "appendix", "quick": True, "euler_factor": 2})
    assert r.status_code == 200 and r.json()["passed"]


@pytest.mark.parametrize("path,body", [
    ("/classify", {"lambda": "1/x", "nu": "1", "N": 1, "m": 1}),
    ("/classify", {"lambda": "1", "nu": "2", "N": 2, "m": 1}),
    ("/classify", {"nu": "2", "N": 1, "m": 1}),
    ("/solve", {"lambda": "1", "a": -1, "N": 1, "m": 1}),
    ("/emit", {"lambda": "1", "nu": "5/2", "N": 1, "m": 1}),
    ("/apply", {"operator": {"N": 1}, "section": {"N": 1, "components": []}}),
    ("/verify", {"suite": "nope"}),
])
def test_http_malformed_is_400(path, body):
    r = client.post(path, json=body)
    assert r.status_code == 400 and r.json()["error"] == "malformed input"


def test_http_verification_failure_is_409(monkeypatch):
    monkeypatch.setattr(service, "classify_report", _boom)
    r = client.post("/classify", json={"lambda": "1", "nu": "2", "N": 1, "m": 1})
    assert r.status_code == 409 and r.json()["diagnostics"] == {"where": "test"}


# -- CLI -------------------------------------------------------------------------


def test_cli_classify(capsys):
    assert cli.main(["classify", "--lambda", "-1/2", "--nu", "5/2", "--N", "1", "--m", "-1"]) == 0
    assert json.loads(capsys.readouterr().out)["dimension"] == 1
    assert cli.main(["classify", "--lambda", "1/0", "--nu", "1", "--N", "1", "--m", "1"]) == 2


def test_cli_emit_and_apply(tmp_path, capsys):
    assert cli.main(["emit", "--lambda", "1/3", "--nu", "4/3", "--N", "1", "--m", "1", "--format", "latex"]) == 0
    assert r"\otimes u_{1}^\vee" in capsys.readouterr().out
    assert cli.main(["emit", "--lambda", "1/3", "--nu", "4/3", "--N", "1", "--m", "1"]) == 0
    op = json.loads(capsys.readouterr().out)["operator"]
    (tmp_path / "op.json").write_text(json.dumps(op))
    (tmp_path / "f.json").write_text(json.dumps({"N": 1, "components": [[[[0, 0, 1], "3"]], [], []]}))
    assert cli.main(["apply", "--operator", str(tmp_path / "op.json"), "--section", str(tmp_path / "f.json")]) == 0
    assert json.loads(capsys.readouterr().out)["polynomial"] == [[[0, 0, 0], {"re": "2", "im": "0"}]]
    (tmp_path / "bad.json").write_text("{")
    assert cli.main(["apply", "--operator", str(tmp_path / "bad.json"), "--section", str(tmp_path / "f.json")]) == 2
    assert cli.main(["apply", "--operator", str(tmp_path / "missing.json"), "--section", "x"]) == 2


def test_cli_solve(capsys):
    assert cli.main(["solve", "--lambda", "-5", "--a", "7", "--N", "3", "--m", "3", "--method", "recurrence"]) == 0
    assert json.loads(capsys.readouterr().out)["branch"]["branch"] == "gamma_plus_zero"
    assert cli.main(["solve", "--lambda", "1", "--a", "two", "--N", "1", "--m", "1"]) == 2


def test_cli_scan(tmp_path, capsys, monkeypatch):
    grid = tmp_path / "grid.toml"
    grid.write_text('lambdas = ["1/3", "-7/2"]\na = [0, 3]\nN = 1\nm = "both"\n')
    assert cli.main(["scan", "--grid", str(grid)]) == 0
    assert json.loads(capsys.readouterr().out)["count"] == 16
    (tmp_path / "bad.toml").write_text("lambdas = [")
    assert cli.main(["scan", "--grid", str(tmp_path / "bad.toml")]) == 2
    monkeypatch.setattr(service, "classify_report", _boom)
    assert cli.main(["scan", "--grid", str(grid)]) == 1


def test_cli_verify(capsys):
    assert cli.main(["verify", "--suite", "appendix", "--quick"]) == 1
    out = capsys.readouterr().out
    assert out.startswith("FAIL appendix") and "euler" in out
    assert cli.main(["verify", "--suite", "appendix", "--quick", "--euler-factor", "2"]) == 0
    assert "PASS appendix" in capsys.readouterr().out


def test_cli_through_server(via_testclient, capsys, monkeypatch):
    args = via_testclient
    assert cli.main(args + ["classify", "--lambda", "2/3", "--nu", "17/3", "--N", "2", "--m", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["dimension"] == 1
    assert cli.main(args + ["classify", "--lambda", "2/3", "--nu", "1", "--N", "2", "--m", "1"]) == 2
    assert cli.main(args + ["solve", "--lambda", "1", "--a", "x", "--N", "1", "--m", "1"]) == 2
    monkeypatch.setattr(service, "classify_report", _boom)
    assert cli.main(args + ["classify", "--lambda", "1", "--nu", "2", "--N", "1", "--m", "1"]) == 1
    assert "forced" in capsys.readouterr().err
