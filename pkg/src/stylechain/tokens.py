"""Token alphabets, sequences, lead sheets and corpus file parsing.

Corpus files are UTF-8 text, one training sequence per line, tokens
separated by whitespace. Lines starting with ``#`` are comments.

Token syntax:

* note   ``<letter><accidental?><octave>:<duration>``   e.g. ``F#3:4``
* chord  ``<pitch-class><quality>``                     e.g. ``Cmaj``, ``Adom7``
* label  any other bare word

A word containing ``:`` must parse as a note, otherwise it is rejected
(labels never contain colons).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import EmptyCorpus, MalformedToken

CHORD_QUALITIES = ("maj", "min", "dom7", "min7", "maj7", "dim", "aug")

# chord tones as semitone offsets from the root
CHORD_TONES = {
    "maj": (0, 4, 7),
    "min": (0, 3, 7),
    "dom7": (0, 4, 7, 10),
    "min7": (0, 3, 7, 10),
    "maj7": (0, 4, 7, 11),
    "dim": (0, 3, 6),
    "aug": (0, 4, 8),
}

_LETTER_PC = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
_PC_NAME = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"]

_NOTE_RE = re.compile(r"^([A-G])([#b]?)(-?\d+):(-?\d+)$")
_CHORD_RE = re.compile(r"^([A-G])([#b]?)(%s)$" % "|".join(CHORD_QUALITIES))


@dataclass(frozen=True)
class Token:
    """Atomic sequence symbol: a note, a chord symbol or an opaque label.

    Tokens compare by value; the unused fields of a kind are always None so
    equality is field-wise.
    """

    kind: str
    pitch: Optional[int] = None
    duration: Optional[int] = None
    root: Optional[int] = None
    quality: Optional[str] = None
    text: Optional[str] = None

    def __post_init__(self):
        if self.kind == "note":
            if not (0 <= self.pitch <= 127):
                raise ValueError(f"pitch {self.pitch} out of [0, 127]")
            if self.duration < 1:
                raise ValueError(f"duration {self.duration} must be >= 1")
        elif self.kind == "chord":
            if not (0 <= self.root <= 11):
                raise ValueError(f"chord root {self.root} out of [0, 11]")
            if self.quality not in CHORD_QUALITIES:
                raise ValueError(f"unknown chord quality {self.quality!r}")
        elif self.kind == "label":
            if not self.text:
                raise ValueError("label text must be non-empty")
        else:
            raise ValueError(f"unknown token kind {self.kind!r}")

    def __str__(self):
        if self.kind == "note":
            octave = self.pitch // 12 - 1
            return f"{_PC_NAME[self.pitch % 12]}{octave}:{self.duration}"
        if self.kind == "chord":
            return f"{_PC_NAME[self.root]}{self.quality}"
        return self.text

    @property
    def ticks(self) -> int:
        """Duration in ticks; non-note tokens count as 1 tick."""
        return self.duration if self.kind == "note" else 1


def note(pitch: int, duration: int) -> Token:
    return Token(kind="note", pitch=pitch, duration=duration)


def chord(root: int, quality: str) -> Token:
    return Token(kind="chord", root=root, quality=quality)


def label(text: str) -> Token:
    return Token(kind="label", text=text)


def chord_pitch_classes(tok: Token) -> frozenset:
    """Pitch classes sounded by a chord token."""
    if tok.kind != "chord":
        raise ValueError("not a chord token")
    return frozenset((tok.root + off) % 12 for off in CHORD_TONES[tok.quality])


def parse_token(word: str, line: int = 0, column: int = 0) -> Token:
    m = _NOTE_RE.match(word)
    if m:
        letter, acc, octave, dur = m.groups()
        pc = _LETTER_PC[letter] + (1 if acc == "#" else -1 if acc == "b" else 0)
        pitch = (int(octave) + 1) * 12 + pc
        if not (0 <= pitch <= 127):
            raise MalformedToken(line, column, word, "pitch out of MIDI range")
        if int(dur) < 1:
            raise MalformedToken(line, column, word, "duration must be >= 1")
        return Token(kind="note", pitch=pitch, duration=int(dur))
    if ":" in word:
        raise MalformedToken(line, column, word, "colon only allowed in note tokens")
    m = _CHORD_RE.match(word)
    if m:
        letter, acc, quality = m.groups()
        pc = (_LETTER_PC[letter] + (1 if acc == "#" else -1 if acc == "b" else 0)) % 12
        return Token(kind="chord", root=pc, quality=quality)
    return Token(kind="label", text=word)


class Alphabet:
    """Dense integer ids for tokens, assigned in first-appearance order.

    The id order is the global tie-breaking order used by all downstream
    search and sampling code.
    """

    def __init__(self, tokens: Iterable[Token] = ()):
        self._tokens: list[Token] = []
        self._ids: dict[Token, int] = {}
        for tok in tokens:
            self.add(tok)

    def add(self, tok: Token) -> int:
        if tok in self._ids:
            return self._ids[tok]
        idx = len(self._tokens)
        self._tokens.append(tok)
        self._ids[tok] = idx
        return idx

    def id_of(self, tok: Token) -> int:
        return self._ids[tok]

    def __contains__(self, tok: Token) -> bool:
        return tok in self._ids

    def __getitem__(self, idx: int) -> Token:
        return self._tokens[idx]

    def __len__(self) -> int:
        return len(self._tokens)

    def __iter__(self):
        return iter(self._tokens)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self._tokens == other._tokens

    def encode(self, tokens: Iterable[Token]) -> tuple:
        return tuple(self._ids[t] for t in tokens)

    def decode(self, ids: Iterable[int]) -> tuple:
        return tuple(self._tokens[i] for i in ids)


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple
    alphabet_id: Optional[str] = None

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    def __str__(self):
        return " ".join(str(t) for t in self.tokens)


@dataclass(frozen=True)
class Corpus:
    sequences: tuple
    alphabet: Alphabet

    def __post_init__(self):
        for seq in self.sequences:
            for tok in seq:
                if tok not in self.alphabet:
                    raise ValueError(f"token {tok} missing from alphabet")


def parse_corpus(text: str) -> Corpus:
    """Parse corpus-file content into one TokenSequence per non-empty line."""
    sequences = []
    alphabet = Alphabet()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        toks = []
        col = 0
        for word in line.split():
            col = line.index(word, col)
            tok = parse_token(word, lineno, col + 1)
            alphabet.add(tok)
            toks.append(tok)
            col += len(word)
        sequences.append(TokenSequence(tuple(toks)))
    if not sequences:
        raise EmptyCorpus("corpus contains no sequences")
    return Corpus(tuple(sequences), alphabet)


def serialize_corpus(corpus: Corpus) -> str:
    return "\n".join(str(seq) for seq in corpus.sequences) + "\n"


@dataclass(frozen=True)
class LeadSheet:
    """Timed melody track plus chord track over a fixed bar grid.

    Both tracks are lists of (onset_tick, Token) with strictly increasing
    onsets; melody note spans must not overlap.
    """

    ticks_per_bar: int
    bars: int
    melody: tuple = ()
    chords: tuple = ()

    def __post_init__(self):
        if self.ticks_per_bar < 1 or self.bars < 1:
            raise ValueError("ticks_per_bar and bars must be positive")
        total = self.bars * self.ticks_per_bar
        for name, track in (("melody", self.melody), ("chords", self.chords)):
            prev = -1
            for onset, tok in track:
                if onset <= prev:
                    raise ValueError(f"{name} onsets must be strictly increasing")
                if not (0 <= onset < total):
                    raise ValueError(f"{name} onset {onset} outside the sheet")
                prev = onset
        prev_end = 0
        for onset, tok in self.melody:
            if tok.kind != "note":
                raise ValueError("melody track may only contain notes")
            if onset < prev_end:
                raise ValueError(f"melody note at tick {onset} overlaps the previous note")
            prev_end = onset + tok.duration
        for onset, tok in self.chords:
            if tok.kind != "chord":
                raise ValueError("chord track may only contain chords")

    def to_dict(self) -> dict:
        return {
            "ticks_per_bar": self.ticks_per_bar,
            "bars": self.bars,
            "melody": [{"onset": o, "token": str(t)} for o, t in self.melody],
            "chords": [{"onset": o, "token": str(t)} for o, t in self.chords],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "LeadSheet":
        def track(items):
            return tuple((int(e["onset"]), parse_token(e["token"])) for e in items)

        return cls(
            ticks_per_bar=int(data["ticks_per_bar"]),
            bars=int(data["bars"]),
            melody=track(data.get("melody", [])),
            chords=track(data.get("chords", [])),
        )

    @classmethod
    def from_json(cls, text: str) -> "LeadSheet":
        return cls.from_dict(json.loads(text))


def leadsheet_to_sequences(ls: LeadSheet):
    """Flatten both tracks in onset order, discarding onsets."""
    melody = TokenSequence(tuple(tok for _, tok in ls.melody))
    chords = TokenSequence(tuple(tok for _, tok in ls.chords))
    return melody, chords
