"""Chord-track generation against a fixed melody.

Melody note onsets pin their chord-grid slot to compatible chords; slots
without onsets are left free, so the trellis fills them with passing
chords. An optional chord-pair bias reweights consecutive chord pairs
(e.g. the "sadness" major -> minor-up-4-semitones pattern).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import GridMismatch, Infeasible
from .tokens import LeadSheet, Token, chord, chord_pitch_classes
from .trellis import UnaryConstraint, build_trellis


def chord_tone_compatibility(pitch_class: int, chord_token: Token) -> bool:
    """Default rule: the melody pitch class is a chord tone."""
    return pitch_class in chord_pitch_classes(chord_token)


def interval_compatibility(allowed_intervals) -> Callable:
    """Rule allowing a configurable set of intervals above the chord root,
    for tension-tolerant harmonization."""
    allowed = frozenset(allowed_intervals)

    def rule(pitch_class: int, chord_token: Token) -> bool:
        return (pitch_class - chord_token.root) % 12 in allowed

    return rule


@dataclass
class HarmonizationSpec:
    slots_per_bar: int = 2
    compatibility: Callable = chord_tone_compatibility
    pair_bias: Optional[dict] = None  # (Token, Token) -> weight >= 0


def sadness_bias_table(weight: float) -> dict:
    """Boost every major chord followed by the minor chord 4 semitones up."""
    if not (weight >= 0) or weight != weight or weight == float("inf"):
        raise ValueError("weight must be finite and >= 0")
    return {
        (chord(x, "maj"), chord((x + 4) % 12, "min")): weight for x in range(12)
    }


def harmonize(chord_model, melody_sheet: LeadSheet, spec: HarmonizationSpec,
              seed) -> LeadSheet:
    """One chord per grid slot; onset slots constrained to compatible chords."""
    for tok in chord_model.alphabet:
        if tok.kind != "chord":
            raise ValueError("chord model alphabet must contain only chords")
    if melody_sheet.ticks_per_bar % spec.slots_per_bar != 0:
        raise GridMismatch(
            f"slots_per_bar {spec.slots_per_bar} does not divide "
            f"ticks_per_bar {melody_sheet.ticks_per_bar}"
        )
    ticks_per_slot = melody_sheet.ticks_per_bar // spec.slots_per_bar
    n_slots = melody_sheet.bars * spec.slots_per_bar

    slot_allowed = {}
    for onset, note_tok in melody_sheet.melody:
        slot = onset // ticks_per_slot
        pc = note_tok.pitch % 12
        allowed = frozenset(
            tid for tid, tok in enumerate(chord_model.alphabet)
            if spec.compatibility(pc, tok)
        )
        if slot in slot_allowed:
            allowed &= slot_allowed[slot]
        if not allowed:
            raise Infeasible(
                f"no chord in the model alphabet is compatible with the "
                f"melody at slot {slot}",
                family="compatibility", detail={"slot": slot},
            )
        slot_allowed[slot] = allowed

    unary = [UnaryConstraint(slot, allowed) for slot, allowed in slot_allowed.items()]
    pair_bias = None
    if spec.pair_bias is not None:
        pair_bias = {}
        for (a, b), w in spec.pair_bias.items():
            if a in chord_model.alphabet and b in chord_model.alphabet:
                pair_bias[(chord_model.alphabet.id_of(a), chord_model.alphabet.id_of(b))] = w

    trellis = build_trellis(chord_model, n_slots, unary=unary, pair_bias=pair_bias)
    chords_seq = trellis.sample(seed)
    chord_track = tuple(
        (slot * ticks_per_slot, tok) for slot, tok in enumerate(chords_seq)
    )
    return LeadSheet(
        ticks_per_bar=melody_sheet.ticks_per_bar,
        bars=melody_sheet.bars,
        melody=melody_sheet.melody,
        chords=chord_track,
    )
