"""Constraint-set file loading (JSON).

Schema:
  {
    "unary":        [{"position": int, "allowed": [token strings]}],
    "bias":         [{"position": int, "weights": {token string: weight}}],
    "alldifferent": bool,
    "meter":        {"total": int, "checkpoints": [int]},
    "max_order":    int
  }

Binary equality constraints between positions are rejected: exact
generation under them is #P-complete, so the engine deliberately does not
attempt it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .automata import MaxOrderSpec, MeterSpec
from .errors import UnsupportedConstraint
from .tokens import parse_token
from .trellis import BiasField, UnaryConstraint

_REJECTED_KEYS = ("binary_equal", "binary_equality", "equal_positions")


@dataclass
class ConstraintSet:
    unary: list = field(default_factory=list)
    bias: Optional[BiasField] = None
    alldifferent: bool = False
    meter: Optional[MeterSpec] = None
    max_order: Optional[int] = None


def load_constraint_set(data: dict, alphabet) -> ConstraintSet:
    for key in _REJECTED_KEYS:
        if key in data:
            raise UnsupportedConstraint(
                "binary equality constraints between positions are not "
                "supported: exact counting/sampling under them is "
                "#P-complete, so this engine rejects them up front"
            )
    unary = []
    for entry in data.get("unary", ()):
        allowed = frozenset(
            alphabet.id_of(parse_token(s)) for s in entry["allowed"]
        )
        unary.append(UnaryConstraint(int(entry["position"]), allowed))
    bias = None
    if data.get("bias"):
        weights = {}
        for entry in data["bias"]:
            table = {
                alphabet.id_of(parse_token(tok)): float(w)
                for tok, w in entry["weights"].items()
            }
            weights[int(entry["position"])] = table
        bias = BiasField(weights)
    meter = None
    if data.get("meter"):
        meter = MeterSpec(
            total=int(data["meter"]["total"]),
            checkpoints=tuple(data["meter"].get("checkpoints", ())),
        )
    return ConstraintSet(
        unary=unary,
        bias=bias,
        alldifferent=bool(data.get("alldifferent", False)),
        meter=meter,
        max_order=int(data["max_order"]) if data.get("max_order") else None,
    )


def load_constraint_file(path, alphabet) -> ConstraintSet:
    with open(path, encoding="utf-8") as fh:
        return load_constraint_set(json.load(fh), alphabet)
