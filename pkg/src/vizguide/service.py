"""HTTP session service around the conversation engine.

One process holds many sessions; each session serializes its mutations
behind a lock, so concurrent requests to one session apply in arrival
order while different sessions never block each other. Every mutating
response embeds the fresh recommendation list, so clients never hold a
stale suggestion.

Engine refusals (unsupported utterances, nothing to undo, bad shelf
combinations) come back as HTTP 200 with an ``error`` field and an
unchanged state: they are conversation feedback, not transport failures.
404 is reserved for unknown sessions and recommendation ids, 422 for
request bodies that fail validation.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field, field_validator

from .charts import Agg, Filter, chart_data
from .profiling import FIXTURE_NAMES, Dataset, load_dataset, load_fixture
from .reco import K_FOLLOWUP_DEFAULT, K_NEW_DEFAULT, recommend, similar
from .replay import ScriptError, run_script, validate_script
from .state import ContextState, StateError

SORT_ORDERS = ("ascending", "descending")


class Session:
    def __init__(
        self,
        sid: str,
        dataset: Dataset,
        seed,
        k_followup: int,
        k_new: int,
        csv_text: Optional[str] = None,
    ):
        self.id = sid
        self.dataset = dataset
        self.csv_text = csv_text  # retained only for uploads, for persistence
        self.seed = seed
        self.k_followup = k_followup
        self.k_new = k_new
        self.created = time.time()
        self.state = ContextState(dataset)
        self.lock = threading.Lock()

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "seed": self.seed,
            "k_followup": self.k_followup,
            "k_new": self.k_new,
            "created": self.created,
            "state": self.state.to_dict(),
        }
        if self.csv_text is not None:
            out["csv"] = self.csv_text
            out["dataset_name"] = self.dataset.name
        else:
            out["fixture"] = self.dataset.name
        return out

    @classmethod
    def from_json(cls, payload: dict) -> "Session":
        if "csv" in payload:
            dataset = load_dataset(payload["csv"], payload["dataset_name"])
            csv_text = payload["csv"]
        else:
            dataset = load_fixture(payload["fixture"])
            csv_text = None
        session = cls(
            payload["id"],
            dataset,
            payload["seed"],
            payload["k_followup"],
            payload["k_new"],
            csv_text=csv_text,
        )
        session.created = payload["created"]
        session.state = ContextState.from_dict(payload["state"], dataset)
        return session


class SessionStore:
    def __init__(self, persist_dir: Optional[Path] = None):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._persist_dir = persist_dir
        if persist_dir is not None:
            persist_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(persist_dir.glob("*.json")):
                session = Session.from_json(
                    json.loads(path.read_text(encoding="utf-8"))
                )
                self._sessions[session.id] = session

    def add(self, session: Session) -> None:
        with self._lock:
            self._sessions[session.id] = session
        self.save(session)

    def get(self, sid: str) -> Session:
        with self._lock:
            session = self._sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid!r}")
        return session

    def save(self, session: Session) -> None:
        if self._persist_dir is None:
            return
        path = self._persist_dir / f"{session.id}.json"
        path.write_text(json.dumps(session.to_json()), encoding="utf-8")


class CreateSessionBody(BaseModel):
    dataset: Optional[str] = None
    csv: Optional[str] = None
    name: str = "upload"
    seed: int = 0
    k_followup: int = Field(default=K_FOLLOWUP_DEFAULT, ge=0, le=10)
    k_new: int = Field(default=K_NEW_DEFAULT, ge=0, le=10)


class UtteranceBody(BaseModel):
    text: str = Field(min_length=1, max_length=2000)


class EncodingsBody(BaseModel):
    x: Optional[str] = None
    y: Optional[str] = None
    color: Optional[str] = None
    aggregation: Optional[str] = None
    sort: Optional[str] = None
    filters: Optional[list[dict]] = None

    @field_validator("aggregation")
    @classmethod
    def _check_aggregation(cls, v):
        if v is not None and v not in [a.value for a in Agg]:
            raise ValueError(f"aggregation must be one of {[a.value for a in Agg]}")
        return v

    @field_validator("sort")
    @classmethod
    def _check_sort(cls, v):
        if v is not None and v not in SORT_ORDERS:
            raise ValueError(f"sort must be one of {list(SORT_ORDERS)}")
        return v


class SelectionBody(BaseModel):
    row_ids: list[int] = Field(default_factory=list)


def create_app(persist_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="vizguide", version="0.1.0")
    # browser clients are served from their own origin; the API is open
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(Path(persist_dir) if persist_dir else None)
    app.state.store = store

    def view(session: Session, result=None, error: Optional[str] = None) -> dict:
        state = session.state
        chart = state.chart
        return {
            "session": session.id,
            "dataset": state.dataset.name,
            "error": error,
            "transition": (
                result.transition.value
                if result is not None and result.transition is not None
                else None
            ),
            "messages": list(result.messages) if result is not None else [],
            "computed": result.computed if result is not None else None,
            "diagnostics": (
                [d.to_dict() for d in result.parsed.diagnostics]
                if result is not None and result.parsed is not None
                else []
            ),
            "chart": chart.to_dict() if chart is not None else None,
            "chart_data": (
                chart_data(state.dataset, chart) if chart is not None else None
            ),
            "state": state.to_dict(),
            "recommendations": recommend(
                state, session.seed, session.k_followup, session.k_new
            ),
            # attribute panel data; rebuilding a page needs no second call
            "profile": state.dataset.to_profile_dict(),
        }

    def mutate(sid: str, fn) -> dict:
        session = store.get(sid)
        with session.lock:
            try:
                result = fn(session)
            except StateError as exc:
                return view(session, None, error=str(exc))
            store.save(session)
            return view(session, result)

    @app.get("/")
    def root():
        return {"service": "vizguide", "version": app.version}

    @app.get("/datasets")
    def datasets():
        return {"datasets": list(FIXTURE_NAMES)}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if (body.dataset is None) == (body.csv is None):
            raise HTTPException(
                status_code=422,
                detail="provide exactly one of 'dataset' (fixture name) or 'csv'",
            )
        if body.csv is not None:
            try:
                dataset = load_dataset(body.csv, body.name)
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=f"csv: {exc}") from exc
            csv_text = body.csv
        else:
            if body.dataset not in FIXTURE_NAMES:
                raise HTTPException(
                    status_code=422,
                    detail=f"dataset: unknown fixture {body.dataset!r}, "
                    f"expected one of {list(FIXTURE_NAMES)}",
                )
            dataset = load_fixture(body.dataset)
            csv_text = None
        session = Session(
            uuid.uuid4().hex[:12],
            dataset,
            body.seed,
            body.k_followup,
            body.k_new,
            csv_text=csv_text,
        )
        store.add(session)
        return view(session)

    @app.post("/sessions/{sid}/utterances")
    def post_utterance(sid: str, body: UtteranceBody):
        return mutate(sid, lambda s: s.state.apply_utterance(body.text))

    @app.post("/sessions/{sid}/recommendations/{rid}/select")
    def select_recommendation(sid: str, rid: str):
        session = store.get(sid)
        with session.lock:
            recs = recommend(
                session.state, session.seed, session.k_followup, session.k_new
            )
            ordered = recs["deictics"] + recs["followups"] + recs["new_inquiries"]
            match = [r for r in ordered if r["id"] == rid]
            if not match:
                raise HTTPException(
                    status_code=404, detail=f"unknown recommendation {rid!r}"
                )
            try:
                result = session.state.apply_utterance(
                    match[0]["text"], source="recommendation", intent_confidence=1.0
                )
            except StateError as exc:
                return view(session, None, error=str(exc))
            store.save(session)
            payload = view(session, result)
            payload["selected"] = match[0]
            return payload

    @app.get("/sessions/{sid}/recommendations/{rid}/similar")
    def similar_recommendations(sid: str, rid: str):
        session = store.get(sid)
        with session.lock:
            alternates = similar(
                session.state,
                rid,
                session.seed,
                k_followup=session.k_followup,
                k_new=session.k_new,
            )
        if alternates is None:
            raise HTTPException(
                status_code=404, detail=f"unknown recommendation {rid!r}"
            )
        return {"session": session.id, "similar": alternates}

    @app.put("/sessions/{sid}/encodings")
    def put_encodings(sid: str, body: EncodingsBody):
        def apply(session: Session):
            filters = (
                [Filter.from_dict(f) for f in body.filters]
                if body.filters is not None
                else None
            )
            return session.state.apply_encodings(
                x=body.x,
                y=body.y,
                color=body.color,
                aggregation=Agg(body.aggregation) if body.aggregation else None,
                filters=filters,
                sort=body.sort,
            )

        return mutate(sid, apply)

    @app.post("/sessions/{sid}/selection")
    def post_selection(sid: str, body: SelectionBody):
        return mutate(sid, lambda s: s.state.apply_selection(body.row_ids))

    @app.post("/sessions/{sid}/undo")
    def post_undo(sid: str):
        return mutate(sid, lambda s: s.state.undo())

    @app.get("/sessions/{sid}/state")
    def get_state(sid: str):
        session = store.get(sid)
        with session.lock:
            return view(session)

    @app.get("/sessions/{sid}/recommendations")
    def get_recommendations(sid: str):
        session = store.get(sid)
        with session.lock:
            return {
                "session": session.id,
                "recommendations": recommend(
                    session.state, session.seed, session.k_followup, session.k_new
                ),
            }

    @app.post("/replay")
    def post_replay(script: dict):
        try:
            validate_script(script)
        except ScriptError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        try:
            return run_script(script)
        except (ValueError, FileNotFoundError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    return app
