import json

import pytest
from fastapi.testclient import TestClient

from stylechain.service import create_app
from stylechain.tokens import LeadSheet

MELODY_CORPUS = """\
C4:2 E4:2 G4:2 E4:2 C4:2 D4:2
E4:2 G4:2 C4:2 D4:2 E4:2 C4:2
G4:2 E4:2 D4:2 C4:2 E4:2 G4:2
"""

CHORD_CORPUS = """\
Cmaj Amin Gdom7 Cmaj
Amin Gdom7 Cmaj Amin
Gdom7 Cmaj Amin Gdom7
"""

# melody corpus for the infeasible case: includes an F# that no chord in
# CHORD_CORPUS is compatible with
SPIKY_CORPUS = """\
C4:2 F#4:2 C4:2 E4:2 F#4:2 C4:2
F#4:2 C4:2 E4:2 C4:2 F#4:2 E4:2
"""


@pytest.fixture
def client(tmp_path):
    (tmp_path / "melody.txt").write_text(MELODY_CORPUS)
    (tmp_path / "chords.txt").write_text(CHORD_CORPUS)
    (tmp_path / "spiky.txt").write_text(SPIKY_CORPUS)
    app = create_app(tmp_path, static_dir=None)
    return TestClient(app)


def make_session(client, melody="melody.txt", **kw):
    body = {"melody_corpus": melody, "chord_corpus": "chords.txt",
            "order": 1, "bars": 4, "ticks_per_bar": 8, "slots_per_bar": 2,
            "seed": 11}
    body.update(kw)
    r = client.post("/sessions", json=body)
    assert r.status_code == 200, r.text
    return r.json()


def test_create_and_get(client):
    state = make_session(client)
    sid = state["id"]
    assert len(state["sheet"]["melody"]) == 8
    assert len(state["sheet"]["chords"]) == 8
    r = client.get(f"/sessions/{sid}")
    assert r.status_code == 200
    assert r.json()["sheet"] == state["sheet"]


def test_unknown_session_404(client):
    assert client.get("/sessions/nope").status_code == 404


def test_malformed_pins_422(client):
    sid = make_session(client)["id"]
    r = client.put(f"/sessions/{sid}/pins",
                   json={"pins": [{"track": "drums", "slot": 0, "pinned": True}]})
    assert r.status_code == 422
    r = client.put(f"/sessions/{sid}/pins",
                   json={"pins": [{"track": "melody", "slot": 99, "pinned": True}]})
    assert r.status_code == 422


def test_inpaint_respects_pins_and_is_deterministic(client):
    state = make_session(client)
    sid = state["id"]
    pinned_value = state["sheet"]["melody"][1]
    client.put(f"/sessions/{sid}/pins",
               json={"pins": [{"track": "melody", "slot": 1, "pinned": True}]})
    body = {"track": "melody", "start": 0, "end": 4, "count": 3, "seed": 42}
    r1 = client.post(f"/sessions/{sid}/inpaint", json=body)
    assert r1.status_code == 200
    c1 = r1.json()["candidates"]
    assert 1 <= len(c1) <= 3
    for cand in c1:
        assert cand["cells"][1] == pinned_value
    r2 = client.post(f"/sessions/{sid}/inpaint", json=body)
    assert r2.json()["candidates"] == c1


def test_fully_pinned_region_single_candidate(client):
    state = make_session(client)
    sid = state["id"]
    pins = [{"track": "melody", "slot": s, "pinned": True} for s in range(4)]
    client.put(f"/sessions/{sid}/pins", json={"pins": pins})
    r = client.post(f"/sessions/{sid}/inpaint",
                    json={"track": "melody", "start": 0, "end": 4, "count": 3,
                          "seed": 1})
    assert r.status_code == 200
    cands = r.json()["candidates"]
    assert len(cands) == 1
    assert cands[0]["cells"] == state["sheet"]["melody"][:4]


def test_accept_updates_sheet_and_history(client):
    state = make_session(client)
    sid = state["id"]
    r = client.post(f"/sessions/{sid}/inpaint",
                    json={"track": "chords", "start": 0, "end": 4, "count": 3,
                          "seed": 3})
    cands = r.json()["candidates"]
    r = client.post(f"/sessions/{sid}/accept", json={"candidate": 0})
    assert r.status_code == 200
    new_state = r.json()
    assert new_state["sheet"]["chords"][:4] == cands[0]["cells"]
    assert new_state["history_length"] == 1
    # stale accept
    assert client.post(f"/sessions/{sid}/accept",
                       json={"candidate": 0}).status_code == 422


def test_infeasible_pinned_melody_409(client):
    state = make_session(client, melody="spiky.txt")
    sid = state["id"]
    # find an F# cell and pin it
    slot = state["sheet"]["melody"].index(
        next(c for c in state["sheet"]["melody"] if c.startswith("F#"))
    )
    client.put(f"/sessions/{sid}/pins",
               json={"pins": [{"track": "melody", "slot": slot, "pinned": True}]})
    start = max(0, slot - 1)
    r = client.post(f"/sessions/{sid}/inpaint",
                    json={"track": "chords", "start": start,
                          "end": min(8, slot + 2), "count": 2, "seed": 0})
    assert r.status_code == 409
    detail = r.json()["detail"]
    assert detail["detail"]["slot"] == slot


def test_export_schema_valid(client):
    sid = make_session(client)["id"]
    r = client.post(f"/sessions/{sid}/inpaint",
                    json={"track": "melody", "start": 2, "end": 6, "count": 2,
                          "seed": 9})
    assert r.status_code == 200
    client.post(f"/sessions/{sid}/accept", json={"candidate": 0})
    r = client.get(f"/sessions/{sid}/export")
    assert r.status_code == 200
    sheet = LeadSheet.from_dict(r.json())  # raises if schema-invalid
    assert sheet.bars == 4


def test_scripted_session_round_trip(client):
    """create -> pin -> inpaint K=3 -> accept -> export, pins preserved."""
    state = make_session(client)
    sid = state["id"]
    pinned = state["sheet"]["melody"][0]
    client.put(f"/sessions/{sid}/pins",
               json={"pins": [{"track": "melody", "slot": 0, "pinned": True}]})
    r = client.post(f"/sessions/{sid}/inpaint",
                    json={"track": "melody", "start": 0, "end": 8, "count": 3,
                          "seed": 17})
    assert r.status_code == 200
    for cand in r.json()["candidates"]:
        assert cand["cells"][0] == pinned
    r = client.post(f"/sessions/{sid}/accept", json={"candidate": 0})
    assert r.json()["sheet"]["melody"][0] == pinned
    exported = LeadSheet.from_dict(client.get(f"/sessions/{sid}/export").json())
    assert str(exported.melody[0][1]).startswith(pinned.split(":")[0])
