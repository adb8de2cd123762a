"""HTTP front end: one dialog session per id, JSON in and out.

Turns within a session are serialized by a per-session lock; distinct
sessions run concurrently.  All errors come back in a uniform envelope
``{"error": {"code", "message"}}``.
"""

from __future__ import annotations

import threading
import uuid

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .dialog import DialogEngine, DialogState, SystemAction
from .drs import box_text
from .errors import DialogError, UnknownSessionError


class UtteranceBody(BaseModel):
    text: str


class SessionStore:
    def __init__(self, engine: DialogEngine):
        self.engine = engine
        self._lock = threading.Lock()
        self._sessions: dict[str, tuple[DialogState, threading.Lock]] = {}

    def create(self) -> str:
        sid = uuid.uuid4().hex
        with self._lock:
            self._sessions[sid] = (self.engine.fresh_state(), threading.Lock())
        return sid

    def state(self, sid: str) -> DialogState:
        with self._lock:
            entry = self._sessions.get(sid)
        if entry is None:
            raise UnknownSessionError(sid)
        return entry[0]

    def utterance(self, sid: str, text: str) -> tuple[DialogState, SystemAction]:
        with self._lock:
            entry = self._sessions.get(sid)
        if entry is None:
            raise UnknownSessionError(sid)
        state, turn_lock = entry
        with turn_lock:
            # re-read inside the lock so concurrent turns stack up cleanly
            with self._lock:
                state = self._sessions[sid][0]
            new_state, action = self.engine.interpret_turn(text, state)
            with self._lock:
                self._sessions[sid] = (new_state, turn_lock)
        return new_state, action


def _goals_json(state: DialogState) -> list[dict]:
    out = []
    for goal in state.agenda:
        for var, sort in goal.var_sorts.items():
            out.append({"role": goal.origin_role, "var": var, "sort": sort})
    return out


def _shared_json(state: DialogState) -> dict:
    return {
        "universe": sorted(state.shared.universe),
        "plus": {
            pred: sorted(list(t) for t in tuples)
            for pred, tuples in sorted(state.shared.plus.items())
        },
        "minus": {
            pred: sorted(list(t) for t in tuples)
            for pred, tuples in sorted(state.shared.minus.items())
        },
    }


def state_json(sid: str, state: DialogState) -> dict:
    return {
        "sessionId": sid,
        "turn": state.turn,
        "userConst": state.user_const,
        "focusTarget": state.focus.target if state.focus else None,
        "openGoals": _goals_json(state),
        "shared": _shared_json(state),
        "history": [
            {"turn": r.turn, "speaker": r.speaker, "act": r.act, "text": r.text}
            for r in state.history
        ],
    }


def create_app(engine: DialogEngine) -> FastAPI:
    app = FastAPI(title="dialog service")
    store = SessionStore(engine)
    app.state.store = store

    @app.exception_handler(UnknownSessionError)
    async def unknown_session(request, exc: UnknownSessionError):
        return JSONResponse(
            status_code=404,
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.exception_handler(DialogError)
    async def dialog_error(request, exc: DialogError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error(request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "ValidationError", "message": str(exc)}},
        )

    @app.post("/session")
    async def create_session():
        return {"sessionId": store.create()}

    @app.post("/session/{sid}/utterance")
    async def utterance(sid: str, body: UtteranceBody):
        state, action = store.utterance(sid, body.text)
        return {
            "act": action.act,
            "text": action.text,
            "openGoals": _goals_json(state),
            "drsBox": box_text(state.last_drs) if state.last_drs else "",
        }

    @app.get("/session/{sid}/state")
    async def session_state(sid: str):
        return state_json(sid, store.state(sid))

    return app
