"""Interim-monitoring service: event-sourced sessions over HTTP.

A session is an append-only log of outcome events folded onto a design's
pair of posteriors.  The fold is deterministic, so replaying a session
file reproduces the in-memory state exactly; the log is line-delimited
JSON, one file per session, human-auditable.  The HTTP API surfaces the
stopping rule for the monitoring committee: every state response carries
both posterior tails, the current decision, and the design's thresholds.

Write concurrency is a single logical writer per session, enforced by
sequence-number compare-and-append; reads snapshot under the same lock.
What-if queries (predictive utility of continuing) never mutate state and
run on a bounded worker pool.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import replace
from pathlib import Path

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .designdoc import SCHEMA_VERSION, DesignValidationError, design_from_dict, design_to_dict
from .engine import (
    DecisionKind,
    TailTables,
    TrialData,
    TrialDesign,
    assign_next,
    interim_decision,
    predictive_cumulative_utility,
)
from .errors import UsageError
from .mc import RngSpec
from .posterior import CONTROL, EXPERIMENTAL

__all__ = ["TrialSession", "SessionStore", "create_app"]


class SessionConflict(Exception):
    pass


class TrialSession:
    """One monitored trial: a design plus the deterministic fold of its log."""

    def __init__(self, session_id: str, design: TrialDesign, design_doc: dict,
                 assignment_seed: int = 0):
        self.session_id = session_id
        self.design = design
        self.design_doc = design_doc
        self.assignment_seed = assignment_seed
        self.assignment_rng = RngSpec(assignment_seed)
        self.tables = TailTables(design)
        self.data = TrialData()
        self.events: list[dict] = []
        self.trajectory: list[tuple[int, float, float]] = []
        self.status = "open"
        self.decision: dict | None = None
        self.lock = threading.Lock()

    @property
    def seq(self) -> int:
        return len(self.events)

    def current_tails(self) -> tuple[float, float]:
        counts = self.data.counts()
        return self.tables.efficacy_tail(counts), self.tables.futility_tail(counts)

    def fold(self, event: dict) -> None:
        """Apply one outcome event; evaluate the stopping rule on schedule."""
        self.data.append(event["arm"], event["outcome"])
        self.events.append(event)
        eff, fut = self.current_tails()
        self.trajectory.append((self.data.n, eff, fut))
        if self.design.schedule.is_interim(self.data.n, self.design.burn_in):
            decision = interim_decision(self.design, self.data, self.tables)
            if decision.kind is not DecisionKind.CONTINUE:
                self.status = "stopped"
                self.decision = {
                    "kind": decision.kind.value,
                    "n": decision.n,
                    "efficacy_tail": decision.efficacy_tail,
                    "futility_tail": decision.futility_tail,
                }

    def state(self) -> dict:
        eff, fut = self.current_tails()
        d = self.design
        return {
            "session_id": self.session_id,
            "status": self.status,
            "seq": self.seq,
            "n": self.data.n,
            "efficacy_tail": eff,
            "futility_tail": fut,
            "decision": self.decision or {
                "kind": "continue", "n": self.data.n,
                "efficacy_tail": eff, "futility_tail": fut,
            },
            "eps_e": d.eps_e,
            "eps_f": d.eps_f,
            "delta": d.delta,
            "n_max": d.n_max,
            "horizon": d.horizon,
            "utilities": {
                "gain_efficacy": d.utilities.gain_efficacy,
                "gain_futility": d.utilities.gain_futility,
                "loss_efficacy": d.utilities.loss_efficacy,
                "loss_futility": d.utilities.loss_futility,
                "cost_per_patient": d.utilities.cost_per_patient,
                "inconclusive_value": d.utilities.inconclusive_value,
            },
            "counts": {
                "successes_control": self.data.s0,
                "failures_control": self.data.f0,
                "successes_experimental": self.data.s1,
                "failures_experimental": self.data.f1,
            },
            "next_assignment": assign_next(self.data, self.assignment_rng)
            if self.status == "open" else None,
            "trajectory": [[n, e, f] for n, e, f in self.trajectory],
        }


class SessionStore:
    """All live sessions, optionally persisted one JSONL file per session."""

    def __init__(self, directory=None):
        self.directory = Path(directory) if directory is not None else None
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, TrialSession] = {}
        self._lock = threading.Lock()
        if self.directory is not None:
            for path in sorted(self.directory.glob("*.jsonl")):
                session = self._replay_file(path)
                self.sessions[session.session_id] = session

    def _path(self, session_id: str) -> Path | None:
        if self.directory is None:
            return None
        return self.directory / f"{session_id}.jsonl"

    def _replay_file(self, path: Path) -> TrialSession:
        with open(path) as fh:
            lines = [json.loads(line) for line in fh if line.strip()]
        head = lines[0]
        if head.get("type") != "created":
            raise UsageError(f"{path}: first record must be the creation event")
        session = TrialSession(
            head["session_id"],
            design_from_dict(head["design"]),
            head["design"],
            assignment_seed=head.get("assignment_seed", 0),
        )
        for event in lines[1:]:
            if event.get("type") != "outcome":
                continue
            session.fold(event)
        return session

    def _append(self, session: TrialSession, record: dict) -> None:
        path = self._path(session.session_id)
        if path is None:
            return
        with open(path, "a") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def create(self, design_doc: dict, assignment_seed: int = 0,
               session_id: str | None = None) -> TrialSession:
        design = design_from_dict(design_doc)
        session_id = session_id or uuid.uuid4().hex
        with self._lock:
            if session_id in self.sessions:
                raise SessionConflict(f"session {session_id} already exists")
            session = TrialSession(session_id, design, design_to_dict(design),
                                   assignment_seed=assignment_seed)
            self.sessions[session_id] = session
        self._append(session, {
            "type": "created",
            "session_id": session_id,
            "schema_version": SCHEMA_VERSION,
            "design": session.design_doc,
            "assignment_seed": assignment_seed,
        })
        return session

    def get(self, session_id: str) -> TrialSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise KeyError(session_id)
        return session

    def post_outcome(self, session_id: str, seq: int, outcome: int,
                     arm: str | None = None, patient_index: int | None = None,
                     recorded_by: str = "", timestamp: float | None = None) -> dict:
        """Compare-and-append one outcome; duplicates are rejected unchanged."""
        session = self.get(session_id)
        with session.lock:
            if session.status != "open":
                raise SessionConflict("session is stopped; no further outcomes accepted")
            expected = session.seq + 1
            if seq != expected:
                raise SessionConflict(
                    f"sequence conflict: expected seq {expected}, got {seq}"
                )
            server_assigned = arm is None
            if server_assigned:
                arm = assign_next(session.data, session.assignment_rng)
            if patient_index is not None and patient_index != session.data.n + 1:
                raise SessionConflict(
                    f"patient_index {patient_index} inconsistent; next is {session.data.n + 1}"
                )
            event = {
                "type": "outcome",
                "seq": seq,
                "timestamp": timestamp if timestamp is not None else time.time(),
                "patient_index": session.data.n + 1,
                "arm": arm,
                "outcome": outcome,
                "recorded_by": recorded_by,
                "assigned_by_server": server_assigned,
            }
            session.fold(event)
            self._append(session, event)
            return session.state()


# ---------------------------------------------------------------------------
# HTTP layer
# ---------------------------------------------------------------------------

class CreateSessionBody(BaseModel):
    design: dict
    assignment_seed: int = 0
    session_id: str | None = None


class OutcomeBody(BaseModel):
    seq: int = Field(ge=1)
    outcome: int = Field(ge=0, le=1)
    arm: str | None = None
    patient_index: int | None = None
    recorded_by: str = ""


class WhatIfBody(BaseModel):
    seed: int = Field(ge=0)
    horizon: int | None = Field(default=None, ge=1)
    forward_reps: int | None = Field(default=None, ge=1)


def create_app(store: SessionStore | None = None, token: str | None = None,
               whatif_cap: int = 1000, frontend_dist=None) -> FastAPI:
    """Build the monitoring API around a session store.

    `token`, when set, must be presented as a bearer token on every
    request.  `whatif_cap` bounds the synchronous forward-simulation size;
    `frontend_dist` optionally mounts a built cockpit UI at /ui.
    """
    store = store or SessionStore()
    app = FastAPI(title="seqtrial interim monitoring", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    whatif_slots = threading.Semaphore(2)

    def auth(request: Request):
        if token is not None and request.headers.get("authorization") != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or invalid token")

    @app.middleware("http")
    async def add_schema_header(request, call_next):
        response = await call_next(request)
        response.headers["X-Schema-Version"] = str(SCHEMA_VERSION)
        return response

    @app.exception_handler(DesignValidationError)
    async def design_error(request, exc: DesignValidationError):
        return JSONResponse(status_code=422, content={"detail": str(exc), "path": exc.path})

    def get_session(session_id: str) -> TrialSession:
        try:
            return store.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")

    @app.post("/sessions", status_code=201)
    def api_create_session(body: CreateSessionBody, _=Depends(auth)):
        try:
            session = store.create(body.design, assignment_seed=body.assignment_seed,
                                   session_id=body.session_id)
        except SessionConflict as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return session.state()

    @app.post("/sessions/{session_id}/outcomes")
    def api_post_outcome(session_id: str, body: OutcomeBody, _=Depends(auth)):
        get_session(session_id)
        if body.arm is not None and body.arm not in (CONTROL, EXPERIMENTAL):
            raise HTTPException(
                status_code=422,
                detail=[{"loc": ["body", "arm"], "msg": f"arm must be {CONTROL!r} or {EXPERIMENTAL!r}"}],
            )
        try:
            return store.post_outcome(
                session_id, seq=body.seq, outcome=body.outcome, arm=body.arm,
                patient_index=body.patient_index, recorded_by=body.recorded_by,
            )
        except SessionConflict as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    @app.get("/sessions/{session_id}/state")
    def api_get_state(session_id: str, _=Depends(auth)):
        session = get_session(session_id)
        with session.lock:
            return session.state()

    @app.post("/sessions/{session_id}/whatif")
    def api_whatif(session_id: str, body: WhatIfBody, _=Depends(auth)):
        session = get_session(session_id)
        design = session.design
        if body.horizon is not None:
            if body.horizon > design.n_max:
                raise HTTPException(status_code=422, detail=[{
                    "loc": ["body", "horizon"],
                    "msg": f"horizon must not exceed n_max = {design.n_max}",
                }])
            design = replace(design, horizon=body.horizon)
        reps = min(body.forward_reps or design.forward_reps, whatif_cap)
        with session.lock:
            if session.status != "open":
                raise HTTPException(status_code=409, detail="session is stopped")
            data = session.data.copy()
        with whatif_slots:
            pcu = predictive_cumulative_utility(
                design, data, RngSpec(body.seed), tables=session.tables, reps=reps
            )
        return {
            "value": pcu.value,
            "std_error": pcu.std_error,
            "stop_prob_efficacy": pcu.stop_prob_efficacy,
            "stop_prob_futility": pcu.stop_prob_futility,
            "expected_duration": pcu.expected_duration,
            "forward_reps": pcu.forward_reps,
            "seed": body.seed,
            "horizon": design.horizon,
            "at_n": data.n,
            "would_stop_inconclusive": pcu.value < 0.0,
            "eps_e": design.eps_e,
            "eps_f": design.eps_f,
            "delta": design.delta,
        }

    @app.get("/sessions/{session_id}/log")
    def api_get_log(session_id: str, _=Depends(auth)):
        session = get_session(session_id)
        with session.lock:
            return {
                "session_id": session.session_id,
                "events": list(session.events),
                "eps_e": session.design.eps_e,
                "eps_f": session.design.eps_f,
                "delta": session.design.delta,
            }

    if frontend_dist is not None and Path(frontend_dist).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(frontend_dist), html=True), name="ui")

    return app
