"""Pairwise human-evaluation service: blind A/B sessions over HTTP.

Sessions present each item's two candidate translations in a seeded random
left/right order, never exposing system labels.  Every event (session
creation, judgment) is appended to a JSON-lines log and fsynced before the
request is acknowledged, so the full service state can be replayed from the
log after a crash.  Scoring follows the 1 / 0.5 / 0 rule: a win is one
point, a tie is half a point to each side.
"""

import hashlib
import json
import os
import random
import threading
import time
import warnings
from dataclasses import dataclass, field

CHOICES = ("first", "second", "tie")


class EvalError(ValueError):
    pass


class DuplicateError(EvalError):
    """Session or judgment that already exists."""


class UnknownSessionError(EvalError):
    pass


@dataclass
class EvalSession:
    session_id: str
    label_a: str
    label_b: str
    seed: int
    # (source, translation by A, translation by B) per item
    items: list[tuple[str, str, str]]
    a_left: list[bool]  # presentation order per item
    # judgments: (item index, annotator) -> resolved choice in {A, B, tie}
    judgments: dict[tuple[int, str], str] = field(default_factory=dict)


@dataclass
class Tally:
    points_a: float
    points_b: float
    count: int


def _session_id(label_a: str, label_b: str, seed: int, items) -> str:
    digest = hashlib.sha256(json.dumps(
        [label_a, label_b, seed, items], ensure_ascii=False,
        sort_keys=True).encode("utf-8")).hexdigest()
    return digest[:16]


class EvalStore:
    """Sessions plus the append-only event log; safe for concurrent use."""

    def __init__(self, log_path):
        self.log_path = log_path
        self.sessions: dict[str, EvalSession] = {}
        self._lock = threading.Lock()
        self._log = open(log_path, "a", encoding="utf-8")

    def close(self):
        self._log.close()

    def _append(self, record: dict) -> None:
        self._log.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
        self._log.flush()
        os.fsync(self._log.fileno())

    def create_session(self, label_a: str, label_b: str, items, seed: int) -> str:
        items = [tuple(item) for item in items]
        if not items:
            raise EvalError("empty item list")
        for item in items:
            if len(item) != 3 or not all(isinstance(x, str) and x for x in item):
                raise EvalError("each item needs non-empty source and two candidates")
        session_id = _session_id(label_a, label_b, seed, items)
        rnd = random.Random(seed)
        a_left = [rnd.random() < 0.5 for _ in items]
        with self._lock:
            if session_id in self.sessions:
                raise DuplicateError("duplicate session id %s" % session_id)
            session = EvalSession(session_id, label_a, label_b, seed,
                                  items, a_left)
            self._append({"kind": "session", "session_id": session_id,
                          "label_a": label_a, "label_b": label_b,
                          "seed": seed, "items": [list(i) for i in items],
                          "a_left": a_left})
            self.sessions[session_id] = session
        return session_id

    def _get(self, session_id: str) -> EvalSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSessionError("unknown session %s" % session_id)
        return session

    def next_item(self, session_id: str, annotator: str):
        """Lowest-index item this annotator has not judged, or None when done.

        The payload never carries system labels: only the item index, the
        source, and the two candidates in presentation order.
        """
        with self._lock:
            session = self._get(session_id)
            for index, (source, a, b) in enumerate(session.items):
                if (index, annotator) in session.judgments:
                    continue
                left, right = (a, b) if session.a_left[index] else (b, a)
                return {"index": index, "source": source,
                        "left": left, "right": right}
            return None

    def submit_judgment(self, session_id: str, index: int, annotator: str,
                        choice: str) -> str:
        """Record one judgment; returns the resolved system choice."""
        if choice not in CHOICES:
            raise EvalError("choice must be one of %s" % (CHOICES,))
        with self._lock:
            session = self._get(session_id)
            if not 0 <= index < len(session.items):
                raise EvalError("item index %d out of range" % index)
            if (index, annotator) in session.judgments:
                raise DuplicateError("annotator %r already judged item %d"
                                     % (annotator, index))
            if choice == "tie":
                resolved = "tie"
            elif choice == "first":
                resolved = "A" if session.a_left[index] else "B"
            else:
                resolved = "B" if session.a_left[index] else "A"
            self._append({"kind": "judgment", "session_id": session_id,
                          "index": index, "annotator": annotator,
                          "choice": choice, "resolved": resolved,
                          "ts": time.time()})
            session.judgments[(index, annotator)] = resolved
        return resolved

    def tally(self, session_id: str) -> Tally:
        with self._lock:
            session = self._get(session_id)
            wins_a = sum(1 for r in session.judgments.values() if r == "A")
            wins_b = sum(1 for r in session.judgments.values() if r == "B")
            ties = sum(1 for r in session.judgments.values() if r == "tie")
        return Tally(points_a=wins_a + 0.5 * ties,
                     points_b=wins_b + 0.5 * ties,
                     count=wins_a + wins_b + ties)

    @classmethod
    def replay(cls, log_path) -> "EvalStore":
        """Rebuild the store from its log.

        A corrupt final record is dropped (and physically truncated) with a
        warning; corruption anywhere earlier is an error.
        """
        records = []
        good_bytes = 0
        corrupt = None
        with open(log_path, "rb") as f:
            raw = f.read()
        lines = raw.split(b"\n")
        # a well-formed log ends with LF, so the final element is empty
        trailing = lines.pop() if lines else b""
        if trailing:
            corrupt = "unterminated final record"
        for lineno, line in enumerate(lines, 1):
            if not line.strip():
                good_bytes += len(line) + 1
                continue
            try:
                record = json.loads(line.decode("utf-8"))
                if record.get("kind") not in ("session", "judgment"):
                    raise ValueError("unknown record kind")
            except (ValueError, UnicodeDecodeError) as exc:
                if lineno == len(lines) and not trailing:
                    corrupt = "corrupt final record: %s" % exc
                    break
                raise EvalError("corrupt record at line %d: %s" % (lineno, exc))
            records.append(record)
            good_bytes += len(line) + 1
        if corrupt:
            warnings.warn("truncating event log: %s" % corrupt)
            with open(log_path, "r+b") as f:
                f.truncate(good_bytes)
        store = cls.__new__(cls)
        store.log_path = log_path
        store.sessions = {}
        store._lock = threading.Lock()
        store._log = open(log_path, "a", encoding="utf-8")
        for record in records:
            if record["kind"] == "session":
                session = EvalSession(record["session_id"], record["label_a"],
                                      record["label_b"], record["seed"],
                                      [tuple(i) for i in record["items"]],
                                      record["a_left"])
                store.sessions[session.session_id] = session
            else:
                session = store.sessions.get(record["session_id"])
                if session is None:
                    raise EvalError("judgment for unknown session %s"
                                    % record["session_id"])
                session.judgments[(record["index"], record["annotator"])] = \
                    record["resolved"]
        return store


# --- HTTP layer --------------------------------------------------------------

from typing import Literal

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field


class ItemIn(BaseModel):
    source: str
    a: str
    b: str


class SessionIn(BaseModel):
    label_a: str
    label_b: str
    seed: int = 0
    items: list[ItemIn] = Field(default_factory=list)


class JudgmentIn(BaseModel):
    index: int
    annotator: str
    choice: Literal["first", "second", "tie"]


def create_app(store: EvalStore) -> FastAPI:
    """FastAPI app exposing the pairwise-evaluation protocol."""
    app = FastAPI(title="pairwise evaluation service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionIn):
        try:
            session_id = store.create_session(
                body.label_a, body.label_b,
                [(i.source, i.a, i.b) for i in body.items], body.seed)
        except DuplicateError as exc:
            raise HTTPException(409, str(exc))
        except EvalError as exc:
            raise HTTPException(400, str(exc))
        return {"session_id": session_id}

    @app.get("/sessions/{session_id}/next")
    def next_item(session_id: str, annotator: str):
        try:
            item = store.next_item(session_id, annotator)
        except UnknownSessionError as exc:
            raise HTTPException(404, str(exc))
        if item is None:
            return Response(status_code=204)
        return item

    @app.post("/sessions/{session_id}/judgments", status_code=201)
    def submit_judgment(session_id: str, body: JudgmentIn):
        try:
            store.submit_judgment(session_id, body.index, body.annotator,
                                  body.choice)
        except UnknownSessionError as exc:
            raise HTTPException(404, str(exc))
        except DuplicateError as exc:
            raise HTTPException(409, str(exc))
        except EvalError as exc:
            raise HTTPException(400, str(exc))
        return {}

    @app.get("/sessions/{session_id}/tally")
    def tally(session_id: str):
        try:
            t = store.tally(session_id)
        except UnknownSessionError as exc:
            raise HTTPException(404, str(exc))
        return {"points_a": t.points_a, "points_b": t.points_b,
                "count": t.count}

    return app


def serve(log_path, host: str = "127.0.0.1", port: int = 8080):
    """Run the service, resuming from an existing log when present."""
    import uvicorn
    if os.path.exists(log_path) and os.path.getsize(log_path) > 0:
        store = EvalStore.replay(log_path)
    else:
        store = EvalStore(log_path)
    uvicorn.run(create_app(store), host=host, port=port, log_level="info")
