"""HTTP session service: a thin adapter exposing audits to the web console.

One audit session per id; each session's pipeline runs on its own worker
thread and publishes versioned events (messages, questions, progress,
completion) on a single server-push stream. All state transitions are plain
orchestrator/audit calls; no business logic lives here.
"""

from __future__ import annotations

import json
import queue
import tempfile
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .audit import AuditPlan, results_json_payload, results_markdown, run_audit, write_results_csv
from .errors import DriftAuditError
from .io import load_dataset, make_adapter
from .orchestrator import (
    CannedDriver,
    DebateTranscript,
    DialogueDriver,
    answer_question,
    make_backend,
    run_analysis_phase,
    run_metric_phase,
    run_shift_phase,
    save_transcript,
)
from .report import render_report, serialize_pipeline

EVENT_VERSION = 1
ANSWER_TIMEOUT_S = 900.0

PHASE_ORDER = ("fingerprint", "metrics", "shifts", "audit", "analysis", "qa")


class SessionConfig(BaseModel):
    model: str
    data: str
    backend: str = "rubric"
    endpoint: str | None = None
    answers: dict[str, str] | None = None
    sample_frac: float = 0.1
    seed: int = 0
    parallelism: int = 1


class AnswerBody(BaseModel):
    text: str


class QuestionBody(BaseModel):
    text: str


class Session:
    def __init__(self, session_id: str, config: SessionConfig, workdir: Path):
        self.id = session_id
        self.config = config
        self.out_dir = workdir / session_id
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.condition = threading.Condition()
        self.qa_lock = threading.Lock()
        self.events: list[dict] = []
        self.answer_queue: "queue.Queue[str]" = queue.Queue()
        self.pending_question: str | None = None
        self.phase = "fingerprint"
        self.progress = 0.0
        self.done = False
        self.error: str | None = None
        self.results = None
        self.report = None
        self.transcript: DebateTranscript | None = None
        self.backend = None

    def push(self, event: dict) -> None:
        with self.condition:
            event = {"v": EVENT_VERSION, "seq": len(self.events), **event}
            self.events.append(event)
            self.condition.notify_all()

    def set_phase(self, phase: str) -> None:
        self.phase = phase
        self.push({"type": "phase", "phase": phase, "status": "started"})

    def snapshot(self) -> dict:
        return {
            "session_id": self.id,
            "phase": self.phase,
            "pending_question": self.pending_question,
            "progress": self.progress,
            "done": self.done,
            "error": self.error,
            "events": len(self.events),
        }


class StreamingTranscript(DebateTranscript):
    """Transcript that mirrors every appended message onto the event stream."""

    def __init__(self, backend_identity: str, session: Session):
        super().__init__(backend_identity)
        self._session = session

    def append(self, role, phase, text, tags=None):
        msg = super().append(role, phase, text, tags)
        self._session.push(
            {"type": "message", "role": role, "phase": phase, "text": text}
        )
        return msg


class ServiceDriver(DialogueDriver):
    """Blocks the session worker on the next POSTed answer."""

    def __init__(self, session: Session, fallback: CannedDriver | None):
        self._session = session
        self._fallback = fallback

    def answer(self, question: str, phase: str) -> str:
        if self._fallback is not None:
            return self._fallback.answer(question, phase)
        self._session.pending_question = question
        self._session.push({"type": "question", "phase": phase, "text": question})
        try:
            text = self._session.answer_queue.get(timeout=ANSWER_TIMEOUT_S)
        except queue.Empty:
            raise DriftAuditError("timed out waiting for an answer") from None
        self._session.pending_question = None
        return text


def _session_worker(session: Session) -> None:
    config = session.config
    try:
        backend = make_backend(config.backend, endpoint=config.endpoint)
        session.backend = backend
        transcript = StreamingTranscript(backend.identity, session)
        session.transcript = transcript
        fallback = CannedDriver(config.answers) if config.answers else None
        driver = ServiceDriver(session, fallback)

        session.set_phase("fingerprint")
        specs, fingerprint, transcript = run_metric_phase(backend, driver, transcript)
        session.push({"type": "phase", "phase": "metrics", "status": "complete"})

        session.set_phase("shifts")
        plan, profile, transcript = run_shift_phase(backend, driver, fingerprint, transcript)
        session.push({"type": "phase", "phase": "shifts", "status": "complete"})

        session.set_phase("audit")
        dataset = load_dataset(config.data)
        adapter = make_adapter(config.model, dataset.task_kind, dataset.num_classes)
        audit_plan = AuditPlan(
            metric_specs=specs,
            shift_plan=plan,
            sample_frac=config.sample_frac,
            base_seed=config.seed,
            parallelism=config.parallelism,
        )

        def progress(done, total):
            session.progress = done / total
            session.push({"type": "progress", "fraction": session.progress})

        session.results = run_audit(audit_plan, dataset, adapter, progress=progress)
        session.push({"type": "phase", "phase": "audit", "status": "complete"})

        session.set_phase("analysis")
        draft, transcript = run_analysis_phase(backend, session.results, transcript)
        session.report = render_report(session.results, draft, "transcript.jsonl")
        session.push({"type": "phase", "phase": "analysis", "status": "complete"})

        write_results_csv(session.results, session.out_dir / "results.csv")
        (session.out_dir / "results.md").write_text(
            results_markdown(session.results) + "\n"
        )
        (session.out_dir / "report.md").write_text(session.report.to_markdown() + "\n")
        (session.out_dir / "pipeline.spec").write_text(
            serialize_pipeline(session.report.section3_mitigation_pipeline)
        )
        save_transcript(session.out_dir / "transcript.jsonl", transcript,
                        config.model_dump())

        session.phase = "qa"
        session.done = True
        session.push({"type": "completed", "artifacts": str(session.out_dir)})
    except Exception as exc:  # surfaced as an error event; the service stays up
        session.error = str(exc)
        session.done = True
        session.push({"type": "error", "message": str(exc)})


def create_app(workdir: str | None = None) -> FastAPI:
    app = FastAPI(title="driftaudit session service")
    root = Path(workdir) if workdir else Path(tempfile.mkdtemp(prefix="driftaudit-"))
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> Session:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    @app.post("/sessions", status_code=201)
    def create_session(config: SessionConfig):
        session_id = uuid.uuid4().hex[:12]
        session = Session(session_id, config, root)
        with registry_lock:
            sessions[session_id] = session
        thread = threading.Thread(target=_session_worker, args=(session,), daemon=True)
        thread.start()
        return {"session_id": session_id}

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        return get_session(session_id).snapshot()

    @app.post("/sessions/{session_id}/answers")
    def post_answer(session_id: str, body: AnswerBody):
        session = get_session(session_id)
        if session.pending_question is None:
            raise HTTPException(status_code=409, detail="no question is pending")
        if not body.text.strip():
            raise HTTPException(status_code=422, detail="answer must be non-empty")
        session.answer_queue.put(body.text)
        return {"ok": True}

    @app.post("/sessions/{session_id}/questions")
    def post_question(session_id: str, body: QuestionBody):
        session = get_session(session_id)
        if not session.done or session.error or session.phase != "qa":
            raise HTTPException(status_code=409, detail="session is not in the qa phase")
        with session.qa_lock:
            reply = answer_question(session.backend, session.transcript, body.text)
        return {"answer": reply}

    @app.get("/sessions/{session_id}/results")
    def get_results(session_id: str):
        session = get_session(session_id)
        if session.results is None:
            raise HTTPException(status_code=409, detail="audit has not completed")
        return Response(
            content=results_json_payload(session.results), media_type="application/json"
        )

    @app.get("/sessions/{session_id}/report")
    def get_report(session_id: str):
        session = get_session(session_id)
        if session.report is None:
            raise HTTPException(status_code=409, detail="report is not ready")
        return {"markdown": session.report.to_markdown()}

    @app.get("/sessions/{session_id}/events")
    def get_events(session_id: str, after: int = -1):
        session = get_session(session_id)

        def stream():
            cursor = after + 1
            while True:
                with session.condition:
                    while cursor >= len(session.events):
                        if session.done and cursor >= len(session.events):
                            return
                        session.condition.wait(timeout=1.0)
                    batch = session.events[cursor:]
                    cursor = len(session.events)
                for event in batch:
                    yield f"id: {event['seq']}\ndata: {json.dumps(event)}\n\n"
                    if event["type"] in ("completed", "error"):
                        return

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app
