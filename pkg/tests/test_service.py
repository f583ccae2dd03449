"""Session service tests over the in-process HTTP client."""

import json
import time

import pytest
from fastapi.testclient import TestClient

from driftaudit.io import make_brightness_dataset
from driftaudit.service import create_app

ANSWERS = {
    "task_kind": "binary",
    "classes_imbalanced": "no",
    "imbalance_compensation_requested": "no",
    "confusion_costs_unequal": "no",
    "error_preference": "none",
    "calibration_requested": "no",
    "calibration_comparison": "no",
    "overall_probabilistic_score": "no",
    "high_imbalance_for_thresholding": "no",
    "equipment_variability": "none",
    "compression_practices": "none",
    "illumination_variability": "high",
    "demographic_variability": "none",
    "notes": "service walkthrough",
}


@pytest.fixture(scope="module")
def manifest(tmp_path_factory):
    root = tmp_path_factory.mktemp("svcdata")
    return str(make_brightness_dataset(root, n=60, seed=2))


@pytest.fixture()
def client(tmp_path):
    app = create_app(workdir=str(tmp_path / "sessions"))
    with TestClient(app) as tc:
        yield tc


def base_config(manifest, **overrides):
    config = {
        "model": "toy:brightness",
        "data": manifest,
        "backend": "rubric",
        "sample_frac": 1.0,
        "seed": 4,
    }
    config.update(overrides)
    return config


def wait_until(predicate, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        value = predicate()
        if value:
            return value
        time.sleep(0.05)
    raise AssertionError("condition not reached in time")


class TestSessions:
    def test_create_returns_201_and_id(self, client, manifest):
        resp = client.post("/sessions", json=base_config(manifest, answers=ANSWERS))
        assert resp.status_code == 201
        assert resp.json()["session_id"]

    def test_unknown_session_is_404(self, client):
        assert client.get("/sessions/nope").status_code == 404

    def test_results_409_before_audit(self, client, manifest):
        # No canned answers: the worker blocks on the first question.
        resp = client.post("/sessions", json=base_config(manifest))
        sid = resp.json()["session_id"]
        wait_until(lambda: client.get(f"/sessions/{sid}").json()["pending_question"])
        assert client.get(f"/sessions/{sid}/results").status_code == 409
        assert client.get(f"/sessions/{sid}/report").status_code == 409

    def test_answer_without_pending_question_is_409(self, client, manifest):
        resp = client.post("/sessions", json=base_config(manifest, answers=ANSWERS))
        sid = resp.json()["session_id"]
        wait_until(lambda: client.get(f"/sessions/{sid}").json()["done"])
        assert client.post(f"/sessions/{sid}/answers", json={"text": "yes"}).status_code == 409

    def test_interactive_answer_flow(self, client, manifest):
        resp = client.post("/sessions", json=base_config(manifest))
        sid = resp.json()["session_id"]
        question = wait_until(
            lambda: client.get(f"/sessions/{sid}").json()["pending_question"]
        )
        assert "binary" in question.lower() or "?" in question
        events_before = client.get(f"/sessions/{sid}").json()["events"]
        assert client.post(f"/sessions/{sid}/answers", json={"text": "binary"}).status_code == 200

        def next_event():
            snapshot = client.get(f"/sessions/{sid}").json()
            if snapshot["events"] > events_before:
                return snapshot
            return None

        snapshot = wait_until(next_event)
        # After an answer the stream continues with another question or a
        # phase-complete event; either way the session advances.
        assert snapshot["pending_question"] != question or snapshot["done"]

    def test_full_rubric_walkthrough(self, client, manifest):
        resp = client.post("/sessions", json=base_config(manifest, answers=ANSWERS))
        sid = resp.json()["session_id"]
        snapshot = wait_until(
            lambda: (s := client.get(f"/sessions/{sid}").json())["done"] and s
        )
        assert snapshot["error"] is None
        assert snapshot["phase"] == "qa"

        results = client.get(f"/sessions/{sid}/results")
        assert results.status_code == 200
        payload = results.json()
        assert any(r["label"] == "BASELINE" for r in payload["rows"])
        assert payload["columns"]

        report = client.get(f"/sessions/{sid}/report")
        assert report.status_code == 200
        assert "# Model audit report" in report.json()["markdown"]

        qa = client.post(f"/sessions/{sid}/questions", json={"text": "What hurt most?"})
        assert qa.status_code == 200
        assert qa.json()["answer"]

    def test_question_before_qa_phase_is_409(self, client, manifest):
        resp = client.post("/sessions", json=base_config(manifest))
        sid = resp.json()["session_id"]
        wait_until(lambda: client.get(f"/sessions/{sid}").json()["pending_question"])
        assert (
            client.post(f"/sessions/{sid}/questions", json={"text": "early"}).status_code
            == 409
        )

    def test_event_stream_replay(self, client, manifest):
        resp = client.post("/sessions", json=base_config(manifest, answers=ANSWERS))
        sid = resp.json()["session_id"]
        wait_until(lambda: client.get(f"/sessions/{sid}").json()["done"])
        with client.stream("GET", f"/sessions/{sid}/events", params={"after": -1}) as stream:
            body = "".join(chunk for chunk in stream.iter_text())
        events = [
            json.loads(line[len("data: "):])
            for line in body.splitlines()
            if line.startswith("data: ")
        ]
        assert events, "stream replayed no events"
        assert all(e["v"] == 1 for e in events)
        assert [e["seq"] for e in events] == sorted(e["seq"] for e in events)
        assert events[-1]["type"] == "completed"
        kinds = {e["type"] for e in events}
        assert {"message", "progress", "phase"} <= kinds

        # Reconnect from the middle: replay only the tail.
        cut = events[len(events) // 2]["seq"]
        with client.stream(
            "GET", f"/sessions/{sid}/events", params={"after": cut}
        ) as stream:
            tail = "".join(chunk for chunk in stream.iter_text())
        tail_events = [
            json.loads(line[len("data: "):])
            for line in tail.splitlines()
            if line.startswith("data: ")
        ]
        assert tail_events[0]["seq"] == cut + 1

    def test_error_event_keeps_service_up(self, client, manifest):
        bad = base_config(manifest, answers=ANSWERS, model="mystery:thing")
        sid = client.post("/sessions", json=bad).json()["session_id"]
        snapshot = wait_until(
            lambda: (s := client.get(f"/sessions/{sid}").json())["done"] and s
        )
        assert snapshot["error"]
        # New sessions still work after one failed.
        ok = client.post("/sessions", json=base_config(manifest, answers=ANSWERS))
        assert ok.status_code == 201
