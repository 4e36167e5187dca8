"""HTTP session service: explore strategies on a quasicone step by step.

Sessions hold a strategy state plus an undo stack.  Every payload embeds
matrices in the canonical serialization format; all engine math happens
server side so clients can stay arithmetic-free.
"""
from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import quasicone as qc
from . import strategy as st
from .roots import all_indices, coords_to_signed_nu


class CreateSession(BaseModel):
    matrix: dict | None = None
    residual: dict | None = None


class ApplyMove(BaseModel):
    root: int
    exponent: int | None = None


@dataclass
class Session:
    id: str
    origin: str
    initial: qc.QuasiconeMatrix
    states: list[st.StrategyState] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def current(self) -> st.StrategyState:
        return self.states[-1]


def _matrix_doc(c: qc.QuasiconeMatrix) -> dict:
    return json.loads(qc.dumps(c))


def _state_doc(session: Session) -> dict:
    state = session.current
    c = state.matrix
    return {
        "id": session.id,
        "matrix": _matrix_doc(c),
        "defect": qc.defect(c) if c.is_finite() else None,
        "gap": list(qc.gap(c)),
        "offset": {
            "classical": coords_to_signed_nu(state.classical),
            "delta": state.delta,
        },
        "history_length": len(state.trace),
        "trace": st.format_trace(state),
        "initial_defect": qc.defect(session.initial),
        "success": st.succeeded(session.initial, state),
    }


def _move_doc(state: st.StrategyState, root: int) -> dict:
    doc: dict = {"root": root}
    try:
        doc["auto_exponent"] = st.auto_exponent(state, root)
    except st.StrategyError as err:
        doc.update(auto_exponent=None, legality=False, error=err.kind)
        return doc
    try:
        nxt = st.apply_step(state, root)
        out = nxt.matrix
        doc.update(
            legality=True,
            predicted_defect=qc.defect(out) if out.is_finite() else None,
            predicted_gap=list(qc.gap(out)),
        )
    except st.StrategyError as err:
        doc.update(legality=False, error=err.kind)
    return doc


def create_app(
    reports_dir: str | Path = "reports", static_dir: str | Path | None = None
) -> FastAPI:
    app = FastAPI(title="quasicone explorer service")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    reports = Path(reports_dir)

    def _session(session_id: str) -> Session:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def _residual_keys(rank: int) -> list[str]:
        path = reports / f"rank{rank}.json"
        if not path.exists():
            raise HTTPException(
                status_code=404, detail=f"no search report for rank {rank}"
            )
        return json.loads(path.read_text())["residual"]

    @app.post("/api/sessions")
    def create_session(body: CreateSession):
        if (body.matrix is None) == (body.residual is None):
            raise HTTPException(
                status_code=422, detail="provide exactly one of matrix or residual"
            )
        if body.matrix is not None:
            try:
                matrix = qc.loads(json.dumps(body.matrix))
            except ValueError as err:
                raise HTTPException(status_code=422, detail=str(err)) from None
            origin = "matrix"
        else:
            try:
                rank = int(body.residual["rank"])
                index = int(body.residual["index"])
            except (KeyError, TypeError, ValueError):
                raise HTTPException(
                    status_code=422, detail="residual needs rank and index"
                ) from None
            keys = _residual_keys(rank)
            if not 0 <= index < len(keys):
                raise HTTPException(status_code=422, detail="residual index out of range")
            matrix = qc.loads(keys[index])
            origin = f"residual:{rank}:{index}"
        session = Session(
            id=secrets.token_hex(8),
            origin=origin,
            initial=matrix,
            states=[st.initial_state(matrix, -1)],
        )
        with registry_lock:
            sessions[session.id] = session
        return {"id": session.id}

    @app.get("/api/sessions/{session_id}/state")
    def get_state(session_id: str):
        session = _session(session_id)
        with session.lock:
            return _state_doc(session)

    @app.get("/api/sessions/{session_id}/moves")
    def get_moves(session_id: str):
        session = _session(session_id)
        with session.lock:
            state = session.current
            moves = []
            for nu in all_indices(state.matrix.rank):
                for root in (nu, -nu):
                    moves.append(_move_doc(state, root))
            return {"moves": moves}

    @app.post("/api/sessions/{session_id}/apply")
    def apply_move(session_id: str, body: ApplyMove):
        session = _session(session_id)
        with session.lock:
            try:
                nxt = st.apply_step(session.current, body.root, body.exponent)
            except st.StrategyError as err:
                return JSONResponse(
                    status_code=422,
                    content={"kind": err.kind, "message": str(err)},
                )
            except ValueError as err:
                raise HTTPException(status_code=422, detail=str(err)) from None
            session.states.append(nxt)
            return _state_doc(session)

    @app.post("/api/sessions/{session_id}/undo")
    def undo(session_id: str):
        session = _session(session_id)
        with session.lock:
            if len(session.states) == 1:
                raise HTTPException(status_code=409, detail="history is empty")
            session.states.pop()
            return _state_doc(session)

    @app.get("/api/residual")
    def residual(rank: int):
        keys = _residual_keys(rank)
        return {
            "rank": rank,
            "residual": [
                {
                    "index": i,
                    "matrix": json.loads(key),
                    "defect": qc.defect(qc.loads(key)),
                }
                for i, key in enumerate(keys)
            ],
        }

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
