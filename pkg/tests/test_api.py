import threading

import pytest
from fastapi.testclient import TestClient

from riskbench.service import RegisterStore, create_app
from riskbench.store import load


@pytest.fixture()
def seeded_store(tmp_path):
    return RegisterStore.open(tmp_path / "register.json", create=True, seed=True)


@pytest.fixture()
def client(seeded_store):
    return TestClient(create_app(seeded_store))


def test_get_register_snapshot(client):
    response = client.get("/api/v1/register")
    assert response.status_code == 200
    doc = response.json()
    assert doc["revision"] == 22
    assert len(doc["cases"]) == 7


def test_get_cases_and_single_case(client):
    cases = client.get("/api/v1/cases").json()["cases"]
    assert [c["case_id"] for c in cases] == [1, 2, 3, 4, 5, 6, 7]
    one = client.get("/api/v1/cases/3").json()["case"]
    assert one["assessment"]["rating"] == "C"
    assert one["status"]["text"] == "at Evaluation, next Treatment"
    assert one["status"]["next_step"] == "Treatment"


def test_get_unknown_case_is_404(client):
    response = client.get("/api/v1/cases/99")
    assert response.status_code == 404
    assert response.json()["code"] == "UnknownCase"


def test_whatif_seed(client):
    response = client.get("/api/v1/whatif", params={"case": 1, "likelihood": "VH", "severity": "C"})
    assert response.status_code == 200
    body = response.json()
    assert body["rating"] == "C"
    assert body["current_rating"] == "H"
    # read-only: revision unchanged
    assert client.get("/api/v1/register").json()["revision"] == 22


def test_whatif_accepts_full_names(client):
    body = client.get(
        "/api/v1/whatif", params={"case": 1, "likelihood": "very-high", "severity": "critical"}
    ).json()
    assert body["rating"] == "C"


def test_step_order_violation_is_422(client):
    revision = client.get("/api/v1/register").json()["revision"]
    created = client.post(
        "/api/v1/cases",
        json={
            "locus": "G",
            "asset": "spare radio",
            "risk_type": "E",
            "description": "untested firmware",
            "consequence": "link loss",
            "documentation": "profiled",
            "revision": revision,
        },
    )
    assert created.status_code == 201
    case_id = created.json()["case"]["case_id"]
    response = client.post(
        f"/api/v1/cases/{case_id}/steps/evaluation",
        json={"decision": "avoid", "solution": "replace", "documentation": "why"},
    )
    assert response.status_code == 422
    body = response.json()
    assert body["code"] == "StepOrderViolation"
    assert body["details"]["expected"] == "Assessment"


def test_documentation_required_is_422(client):
    response = client.post(
        "/api/v1/cases/5/steps/evaluation",
        json={"decision": "mitigate", "solution": "train staff", "documentation": "  "},
    )
    assert response.status_code == 422
    assert response.json()["code"] == "DocumentationRequired"


def test_assessment_step_returns_rating(client):
    revision = client.get("/api/v1/register").json()["revision"]
    created = client.post(
        "/api/v1/cases",
        json={
            "locus": "A",
            "asset": "airframe",
            "risk_type": "I",
            "description": "stress cracks",
            "consequence": "airframe loss",
            "documentation": "profiled",
            "revision": revision,
        },
    ).json()
    case_id = created["case"]["case_id"]
    response = client.post(
        f"/api/v1/cases/{case_id}/steps/assessment",
        json={
            "vulnerability": "fatigue",
            "threat": "crash",
            "threat_agent": "wear",
            "impact": "A",
            "likelihood": "L",
            "severity": "C",
            "documentation": "measured",
            "revision": created["revision"],
        },
    )
    assert response.status_code == 200
    assert response.json()["rating"] == "M"


def test_put_non_monotone_matrix_is_422(client):
    matrix = client.get("/api/v1/matrix").json()["matrix"]
    matrix["cells"][0] = "L"  # (VH, C) dropped to L
    response = client.put("/api/v1/matrix", json={"matrix": matrix})
    assert response.status_code == 422
    body = response.json()
    assert body["code"] == "InvalidMatrix"
    codes = [v["code"] for v in body["details"]["violations"]]
    assert "MonotonicityViolation" in codes


def test_put_matrix_recomputes_and_reports_changes(client):
    matrix = client.get("/api/v1/matrix").json()["matrix"]
    # raise the whole M column (severity index 2 within each row of 4)
    cells = matrix["cells"]
    for row in range(5):
        cells[row * 4 + 2] = "C" if row < 2 else cells[row * 4 + 2]
    response = client.put("/api/v1/matrix", json={"matrix": matrix, "name": "raised"})
    assert response.status_code == 200
    body = response.json()
    assert body["matrix"]["version"] == 2
    changed = {c["case_id"]: (c["old"], c["new"]) for c in body["changes"]}
    assert changed[1] == ("H", "C")
    assert changed[2] == ("H", "C")


def test_stale_revision_conflict(client):
    revision = client.get("/api/v1/register").json()["revision"]
    payload = {
        "locus": "G",
        "asset": "x",
        "risk_type": "E",
        "description": "d",
        "consequence": "c",
        "documentation": "doc",
        "revision": revision,
    }
    first = client.post("/api/v1/cases", json=payload)
    assert first.status_code == 201
    second = client.post("/api/v1/cases", json=dict(payload, asset="y"))
    assert second.status_code == 409
    body = second.json()
    assert body["code"] == "StaleRevision"
    assert body["details"]["current"] == first.json()["revision"]


def test_racing_mutations_one_wins(seeded_store):
    client = TestClient(create_app(seeded_store))
    revision = client.get("/api/v1/register").json()["revision"]
    results = []

    def fire(asset):
        payload = {
            "locus": "G",
            "asset": asset,
            "risk_type": "E",
            "description": "d",
            "consequence": "c",
            "documentation": "doc",
            "revision": revision,
        }
        results.append(client.post("/api/v1/cases", json=payload).status_code)

    threads = [threading.Thread(target=fire, args=(f"asset-{n}",)) for n in range(2)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(results) == [201, 409]


def test_ties_endpoint(client):
    body = client.get("/api/v1/ties").json()
    assert body["groups"] == [{"rating": "C", "cases": [3, 7]}]
    body = client.get("/api/v1/ties", params={"levels": "C,H"}).json()
    assert body["groups"] == [
        {"rating": "C", "cases": [3, 7]},
        {"rating": "H", "cases": [1, 2]},
    ]


def test_ahp_flow_over_http(client):
    created = client.post(
        "/api/v1/ahp/sessions", json={"cases": [3, 7], "criteria": ["urgency"]}
    )
    assert created.status_code == 201
    session = created.json()["session"]
    assert session["status"] == "Draft"
    sid = session["session_id"]

    judged = client.put(
        f"/api/v1/ahp/sessions/{sid}/judgments",
        json={"matrix": "urgency", "i": 1, "j": 2, "value": "3"},
    )
    assert judged.status_code == 200
    assert judged.json()["session"]["alternative_matrices"][0]["judgments"] == [
        {"i": 1, "j": 2, "value": "3"}
    ]
    preview = judged.json()["session"]["consistency_preview"]
    assert preview["urgency"]["cr"] == 0.0  # 2x2 matrices are consistent by definition
    assert preview["urgency"]["acceptable"] is True

    completed = client.post(f"/api/v1/ahp/sessions/{sid}/complete", json={})
    assert completed.status_code == 200
    result = completed.json()["session"]["result"]
    assert [r["case_id"] for r in result["ranking"]] == [3, 7]
    assert result["ranking"][0]["score"] == pytest.approx(0.75, abs=1e-9)

    fetched = client.get(f"/api/v1/ahp/sessions/{sid}").json()["session"]
    assert fetched["status"] == "Complete"


def test_ahp_errors_over_http(client):
    response = client.post("/api/v1/ahp/sessions", json={"cases": [1, 3], "criteria": ["x"]})
    assert response.status_code == 422
    assert response.json()["code"] == "NotATieGroup"

    created = client.post("/api/v1/ahp/sessions", json={"cases": [3, 7], "criteria": ["x"]})
    sid = created.json()["session"]["session_id"]
    bad_value = client.put(
        f"/api/v1/ahp/sessions/{sid}/judgments",
        json={"matrix": "x", "i": 1, "j": 2, "value": "12"},
    )
    assert bad_value.status_code == 422
    assert bad_value.json()["code"] == "InvalidJudgment"

    incomplete = client.post(f"/api/v1/ahp/sessions/{sid}/complete", json={})
    assert incomplete.status_code == 422
    assert incomplete.json()["code"] == "SessionIncomplete"

    missing = client.get("/api/v1/ahp/sessions/99")
    assert missing.status_code == 404
    assert missing.json()["code"] == "UnknownSession"


def test_iteration_endpoints(client):
    close = client.post("/api/v1/iterations/close", json={})
    assert close.status_code == 422
    assert close.json()["code"] == "IncompleteCases"

    overrides = [{"case_id": cid, "justification": "carry to next cycle"} for cid in range(1, 8)]
    closed = client.post("/api/v1/iterations/close", json={"overrides": overrides})
    assert closed.status_code == 200
    assert closed.json()["iteration"]["closed_at"] is not None
    assert len(closed.json()["iteration"]["carryover"]) == 7

    reopen = client.post("/api/v1/iterations", json={"cadence_days": 60})
    assert reopen.status_code == 201
    assert reopen.json()["warning"] is not None
    assert reopen.json()["iteration"]["index"] == 2

    summary = client.get("/api/v1/iterations/1/summary")
    assert summary.status_code == 200
    assert summary.json()["summary"]["carryover"][0]["justification"] == "carry to next cycle"

    again = client.post("/api/v1/iterations", json={"cadence_days": 21})
    assert again.status_code == 422
    assert again.json()["code"] == "IterationAlreadyOpen"


def test_reports_endpoint_formats(client):
    json_report = client.get("/api/v1/reports/profile").json()
    assert len(json_report["rows"]) == 7
    csv_report = client.get("/api/v1/reports/assessment", params={"format": "csv"})
    assert csv_report.headers["content-type"].startswith("text/csv")
    assert "Lack of QoS" in csv_report.text
    md_report = client.get("/api/v1/reports/evaluation", params={"format": "md"})
    assert md_report.text.startswith("| Case #")
    heat = client.get("/api/v1/reports/heatmap").json()
    assert heat["total"] == 7
    md_heat = client.get("/api/v1/reports/heatmap", params={"format": "md"})
    assert "1 (C)" in md_heat.text
    bad = client.get("/api/v1/reports/profile", params={"format": "xml"})
    assert bad.status_code == 400


def test_audit_verify_endpoint(client):
    body = client.get("/api/v1/audit/verify").json()
    assert body["ok"] is True
    assert body["entries"] == 22


def test_mutations_persist_to_file(seeded_store, tmp_path):
    client = TestClient(create_app(seeded_store))
    client.post(
        "/api/v1/cases",
        json={
            "locus": "G",
            "asset": "persisted",
            "risk_type": "E",
            "description": "d",
            "consequence": "c",
            "documentation": "doc",
        },
    )
    reloaded = load(seeded_store.path)
    assert reloaded.revision == 23
    assert reloaded.case(8).profile.asset == "persisted"


def test_error_body_shape(client):
    response = client.post(
        "/api/v1/cases",
        json={
            "locus": "G",
            "asset": " ",
            "risk_type": "E",
            "description": "d",
            "consequence": "c",
            "documentation": "doc",
        },
    )
    assert response.status_code == 422
    body = response.json()
    assert set(body) == {"code", "message", "details"}
    assert body["code"] == "InvalidProfile"
    assert body["details"]["violations"][0]["field"] == "asset"
