"""HTTP facade for the inpainting UI.

Sessions are in-memory: each binds a melody model and a chord model
(trained from corpora in the configured corpus directory) to a bar/slot
grid. The sheet is a grid of cells, one token per slot per track; pinned
cells compile to unary constraints when a region is regenerated, and the
cells adjacent to the region seed the Markov context on both sides.

Errors are JSON {code, message, detail}; infeasible inpaints are HTTP 409.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import model as model_mod
from .errors import Infeasible, StylechainError
from .harmonizer import chord_tone_compatibility
from .tokens import LeadSheet, Token, parse_corpus
from .trellis import UnaryConstraint, build_trellis

TRACKS = ("melody", "chords")


class CreateSession(BaseModel):
    melody_corpus: str
    chord_corpus: str
    order: int = 1
    bars: int = 4
    ticks_per_bar: int = 8
    slots_per_bar: int = 2
    seed: int = 0


class PinChange(BaseModel):
    track: str
    slot: int
    pinned: bool


class PinUpdate(BaseModel):
    pins: list[PinChange]


class InpaintRequest(BaseModel):
    track: str
    start: int
    end: int
    count: int = Field(default=3, ge=1, le=16)
    seed: int = 0


class AcceptRequest(BaseModel):
    candidate: int


class Session:
    def __init__(self, sid, melody_model, chord_model, bars, ticks_per_bar,
                 slots_per_bar, seed):
        self.id = sid
        self.models = {"melody": melody_model, "chords": chord_model}
        self.bars = bars
        self.ticks_per_bar = ticks_per_bar
        self.slots_per_bar = slots_per_bar
        self.n_slots = bars * slots_per_bar
        self.lock = threading.Lock()
        self.pins = set()  # (track, slot)
        self.history = []
        self.pending = None  # (track, start, end, [candidate cell id lists])
        self.cells = {}
        for idx, track in enumerate(TRACKS):
            t = build_trellis(self.models[track], self.n_slots)
            self.cells[track] = list(t.sample_ids(1, (seed, idx))[0])

    def sheet_dict(self):
        return {
            track: [str(self.models[track].alphabet[tid]) for tid in self.cells[track]]
            for track in TRACKS
        }

    def state_dict(self):
        return {
            "id": self.id,
            "bars": self.bars,
            "ticks_per_bar": self.ticks_per_bar,
            "slots_per_bar": self.slots_per_bar,
            "sheet": self.sheet_dict(),
            "pins": sorted([list(p) for p in self.pins]),
            "history_length": len(self.history),
        }

    def to_leadsheet(self) -> LeadSheet:
        ticks_per_slot = self.ticks_per_bar // self.slots_per_bar
        melody = []
        for slot, tid in enumerate(self.cells["melody"]):
            tok = self.models["melody"].alphabet[tid]
            if tok.duration > ticks_per_slot:
                # clamp so slot-grid notes never overlap on export
                tok = Token(kind="note", pitch=tok.pitch, duration=ticks_per_slot)
            melody.append((slot * ticks_per_slot, tok))
        chords = [
            (slot * ticks_per_slot, self.models["chords"].alphabet[tid])
            for slot, tid in enumerate(self.cells["chords"])
        ]
        return LeadSheet(
            ticks_per_bar=self.ticks_per_bar,
            bars=self.bars,
            melody=tuple(melody),
            chords=tuple(chords),
        )


def _error(status, code, message, detail=None):
    return HTTPException(
        status_code=status,
        detail={"code": code, "message": message, "detail": detail},
    )


def create_app(corpus_dir, static_dir: Optional[str] = None) -> FastAPI:
    corpus_dir = Path(corpus_dir)
    app = FastAPI(title="stylechain inpainting service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, Session] = {}

    def get_session(sid) -> Session:
        if sid not in sessions:
            raise _error(404, "unknown_session", f"no session {sid}")
        return sessions[sid]

    def load_model(corpus_name, order):
        path = corpus_dir / corpus_name
        if not path.is_file():
            raise _error(422, "unknown_corpus", f"no corpus file {corpus_name}")
        corpus = parse_corpus(path.read_text(encoding="utf-8"))
        return model_mod.estimate(corpus, order)

    @app.post("/sessions")
    def create_session(body: CreateSession):
        melody_model = load_model(body.melody_corpus, body.order)
        chord_model = load_model(body.chord_corpus, body.order)
        for tok in melody_model.alphabet:
            if tok.kind != "note":
                raise _error(422, "bad_corpus", "melody corpus must contain only notes")
        for tok in chord_model.alphabet:
            if tok.kind != "chord":
                raise _error(422, "bad_corpus", "chord corpus must contain only chords")
        sid = uuid.uuid4().hex
        try:
            sessions[sid] = Session(
                sid, melody_model, chord_model, body.bars, body.ticks_per_bar,
                body.slots_per_bar, body.seed,
            )
        except (Infeasible, StylechainError, ValueError) as exc:
            raise _error(422, "bad_session", str(exc))
        return sessions[sid].state_dict()

    @app.get("/sessions/{sid}")
    def get_state(sid: str):
        return get_session(sid).state_dict()

    @app.put("/sessions/{sid}/pins")
    def put_pins(sid: str, body: PinUpdate):
        session = get_session(sid)
        with session.lock:
            for change in body.pins:
                if change.track not in TRACKS:
                    raise _error(422, "bad_pin", f"unknown track {change.track!r}")
                if not (0 <= change.slot < session.n_slots):
                    raise _error(422, "bad_pin", f"slot {change.slot} out of range")
                key = (change.track, change.slot)
                if change.pinned:
                    session.pins.add(key)
                else:
                    session.pins.discard(key)
            return session.state_dict()

    def _inpaint_unary(session, track, start, end):
        model = session.models[track]
        unary = {}
        for slot in range(start, end):
            pos = slot - start
            if (track, slot) in session.pins:
                unary[pos] = frozenset({session.cells[track][slot]})
        if track == "chords":
            # pinned melody notes impose chord compatibility on their slot
            melody_model = session.models["melody"]
            for slot in range(start, end):
                if ("melody", slot) not in session.pins:
                    continue
                note_tok = melody_model.alphabet[session.cells["melody"][slot]]
                pc = note_tok.pitch % 12
                compatible = frozenset(
                    tid for tid, tok in enumerate(model.alphabet)
                    if chord_tone_compatibility(pc, tok)
                )
                pos = slot - start
                allowed = unary.get(pos, compatible) & compatible if pos in unary else compatible
                if not allowed:
                    raise Infeasible(
                        f"no chord compatible with the pinned melody at slot {slot}",
                        family="compatibility", detail={"slot": slot},
                    )
                unary[pos] = allowed
        return unary

    @app.post("/sessions/{sid}/inpaint")
    def inpaint(sid: str, body: InpaintRequest):
        session = get_session(sid)
        if body.track not in TRACKS:
            raise _error(422, "bad_track", f"unknown track {body.track!r}")
        if not (0 <= body.start < body.end <= session.n_slots):
            raise _error(422, "bad_range", "slot range out of bounds")
        with session.lock:
            model = session.models[body.track]
            cells = session.cells[body.track]
            k = model.order
            start, end = body.start, body.end

            # right-boundary continuity: regenerate through the next k cells,
            # pinned to their current values, then drop them
            tail = min(k, session.n_slots - end)
            n = (end + tail) - start
            try:
                unary_map = _inpaint_unary(session, body.track, start, end)
                unary = [UnaryConstraint(pos, allowed) for pos, allowed in unary_map.items()]
                for j in range(tail):
                    unary.append(
                        UnaryConstraint(end - start + j, frozenset({cells[end + j]}))
                    )
                seed_context = tuple(cells[start - k:start]) if start >= k else None
                if seed_context is not None and seed_context not in model.transition_counts:
                    seed_context = None
                if seed_context is None and n < k:
                    raise _error(422, "bad_range", f"region shorter than model order {k}")
                trellis = build_trellis(model, n, unary=unary, seed_context=seed_context)
            except Infeasible as exc:
                raise _error(409, "infeasible", str(exc),
                             detail=exc.detail if exc.detail else {"family": exc.family})

            candidates = []
            seen = set()
            for i in range(body.count):
                ids = tuple(trellis.sample_ids(1, (body.seed, i))[0][: end - start])
                if ids in seen:
                    continue
                seen.add(ids)
                candidates.append(list(ids))
            session.pending = (body.track, start, end, candidates)
            return {
                "track": body.track,
                "start": start,
                "end": end,
                "candidates": [
                    {"cells": [str(model.alphabet[tid]) for tid in ids]}
                    for ids in candidates
                ],
            }

    @app.post("/sessions/{sid}/accept")
    def accept(sid: str, body: AcceptRequest):
        session = get_session(sid)
        with session.lock:
            if session.pending is None:
                raise _error(422, "no_pending", "no inpaint candidates to accept")
            track, start, end, candidates = session.pending
            if not (0 <= body.candidate < len(candidates)):
                raise _error(422, "bad_candidate", "candidate index out of range")
            ids = candidates[body.candidate]
            session.cells[track][start:end] = ids
            session.pending = None
            session.history.append(session.sheet_dict())
            return session.state_dict()

    @app.get("/sessions/{sid}/export")
    def export(sid: str):
        session = get_session(sid)
        with session.lock:
            return JSONResponse(content=session.to_leadsheet().to_dict())

    @app.get("/sessions/{sid}/history")
    def history(sid: str):
        session = get_session(sid)
        return {"history": session.history}

    if static_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static_dir = bundled if bundled.is_dir() else None
    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
