"""Continuator-style batch responses: continuation, variation, answer.

Each mode compiles to unary constraints on a trellis over the given model;
continuation additionally seeds the generation context with the input's
final tokens so the junction has positive model probability.
"""

from __future__ import annotations

import warnings

from .errors import Infeasible, UnknownToken
from .tokens import TokenSequence
from .trellis import UnaryConstraint, build_trellis

MODES = ("continuation", "variation", "answer")


def _interior_allowed(model):
    excluded = model.terminal | model.initial_only
    allowed = frozenset(range(len(model.alphabet))) - excluded
    return allowed


def respond(model, input_seq, mode, length=None, seed=None, strict=False) -> TokenSequence:
    """Generate a response phrase to `input_seq` in the given mode."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    tokens = list(input_seq)
    if not tokens:
        raise ValueError("input phrase is empty")
    ids = []
    for pos, tok in enumerate(tokens):
        if tok not in model.alphabet:
            raise UnknownToken(pos, tok)
        ids.append(model.alphabet.id_of(tok))
    n = length if length is not None else len(ids)
    k = model.order

    pinned = {}
    if mode == "continuation":
        pinned[n - 1] = model.terminal
    elif mode == "variation":
        pinned[0] = frozenset({ids[0]})
        pinned[n - 1] = frozenset({ids[-1]})
    else:  # answer: continuation resolving back to the input's first note
        pinned[n - 1] = frozenset({ids[0]})

    unary = [UnaryConstraint(pos, frozenset(allowed)) for pos, allowed in pinned.items()]
    interior = _interior_allowed(model)
    if not interior:
        raise Infeasible(
            "every alphabet token is terminal or initial-only; no interior "
            "tokens available", family="unary",
        )
    for pos in range(n - 1):
        if pos not in pinned:
            unary.append(UnaryConstraint(pos, interior))

    seed_context = None
    if mode in ("continuation", "answer"):
        ctx = tuple(ids[-k:])
        if len(ctx) == k and ctx in model.transition_counts:
            seed_context = ctx
        elif strict:
            raise Infeasible(
                "input's final context was never observed by the model",
                family="markov",
            )
        else:
            warnings.warn(
                "input context unseen by the model; falling back to the "
                "initial distribution",
                stacklevel=2,
            )
    if n < k and seed_context is None:
        raise ValueError(f"response length {n} < model order {k}")

    trellis = build_trellis(model, n, unary=unary, seed_context=seed_context)
    return trellis.sample(seed)
