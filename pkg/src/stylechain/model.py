"""Fixed-order Markov model estimation, walks and scoring.

Probabilities are count-proportional with no smoothing: an unseen
transition has probability zero, which is what the constraint filtering
downstream relies on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DeadEnd, OrderNotPositive, SequenceTooShort, UnknownToken
from .tokens import Alphabet, Corpus, TokenSequence, parse_token

MODEL_SCHEMA = "stylechain-model/1"


@dataclass(frozen=True)
class MarkovModel:
    """Maximum-likelihood transition/initial/terminal statistics.

    `transition_counts` maps a length-`order` context (tuple of token ids)
    to {next token id: count}; `initial_counts` maps contexts observed at
    sequence starts to counts. Probabilities are derived from the counts on
    demand, so dump/reload is bit-exact.
    """

    order: int
    alphabet: Alphabet
    transition_counts: dict
    initial_counts: dict
    terminal: frozenset
    initial_only: frozenset

    # -- probabilities -------------------------------------------------

    def successors(self, context: tuple) -> list:
        """(token id, probability) pairs for a context, in token-id order."""
        counts = self.transition_counts.get(context)
        if not counts:
            return []
        total = sum(counts.values())
        return [(tid, c / total) for tid, c in sorted(counts.items())]

    def transition_prob(self, context: tuple, tid: int) -> float:
        counts = self.transition_counts.get(context)
        if not counts or tid not in counts:
            return 0.0
        return counts[tid] / sum(counts.values())

    def initial_items(self) -> list:
        total = sum(self.initial_counts.values())
        return [(ctx, c / total) for ctx, c in sorted(self.initial_counts.items())]

    def initial_prob(self, context: tuple) -> float:
        c = self.initial_counts.get(context, 0)
        if c == 0:
            return 0.0
        return c / sum(self.initial_counts.values())

    def max_transition_prob(self) -> float:
        """Largest single-step transition probability over all contexts."""
        best = 0.0
        for ctx in self.transition_counts:
            for _, p in self.successors(ctx):
                if p > best:
                    best = p
        return best

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema": MODEL_SCHEMA,
            "order": self.order,
            "alphabet": [str(t) for t in self.alphabet],
            "transitions": [
                {"context": list(ctx), "counts": sorted(counts.items())}
                for ctx, counts in sorted(self.transition_counts.items())
            ],
            "initial": [
                {"context": list(ctx), "count": c}
                for ctx, c in sorted(self.initial_counts.items())
            ],
            "terminal": sorted(self.terminal),
            "initial_only": sorted(self.initial_only),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "MarkovModel":
        if data.get("schema") != MODEL_SCHEMA:
            raise ValueError(f"unsupported model schema {data.get('schema')!r}")
        alphabet = Alphabet(parse_token(s) for s in data["alphabet"])
        return cls(
            order=data["order"],
            alphabet=alphabet,
            transition_counts={
                tuple(e["context"]): {tid: c for tid, c in e["counts"]}
                for e in data["transitions"]
            },
            initial_counts={tuple(e["context"]): e["count"] for e in data["initial"]},
            terminal=frozenset(data["terminal"]),
            initial_only=frozenset(data["initial_only"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "MarkovModel":
        return cls.from_dict(json.loads(text))


def estimate(corpus: Corpus, order: int) -> MarkovModel:
    """Estimate a fixed-order model by maximum likelihood (raw counts)."""
    if order < 1:
        raise OrderNotPositive(f"order must be >= 1, got {order}")
    for idx, seq in enumerate(corpus.sequences):
        if len(seq) < order + 1:
            raise SequenceTooShort(idx, len(seq), order)

    transition_counts: dict = {}
    initial_counts: dict = {}
    terminal = set()
    starts = set()
    seen_later = set()
    for seq in corpus.sequences:
        ids = corpus.alphabet.encode(seq)
        initial_counts[ids[:order]] = initial_counts.get(ids[:order], 0) + 1
        for i in range(order, len(ids)):
            ctx = ids[i - order : i]
            counts = transition_counts.setdefault(ctx, {})
            counts[ids[i]] = counts.get(ids[i], 0) + 1
        terminal.add(ids[-1])
        starts.add(ids[0])
        seen_later.update(ids[1:])
    return MarkovModel(
        order=order,
        alphabet=corpus.alphabet,
        transition_counts=transition_counts,
        initial_counts=initial_counts,
        terminal=frozenset(terminal),
        initial_only=frozenset(starts - seen_later),
    )


def random_walk(model: MarkovModel, length: int, seed) -> TokenSequence:
    """Unconstrained random walk: initial draw, then per-context draws."""
    if length < model.order:
        raise ValueError(f"length {length} < order {model.order}")
    rng = np.random.default_rng(seed)
    items = model.initial_items()
    probs = [p for _, p in items]
    ctx = items[rng.choice(len(items), p=probs)][0]
    ids = list(ctx)
    while len(ids) < length:
        succ = model.successors(tuple(ids[-model.order :]))
        if not succ:
            raise DeadEnd(len(ids), model.alphabet.decode(ids[-model.order :]))
        probs = [p for _, p in succ]
        ids.append(succ[rng.choice(len(succ), p=probs)][0])
    return TokenSequence(model.alphabet.decode(ids))


def sequence_logprob(model: MarkovModel, seq) -> float:
    """log p(prefix) + sum of log transition probs; -inf on any zero factor."""
    tokens = list(seq)
    if len(tokens) < model.order:
        raise ValueError(f"sequence shorter than order {model.order}")
    ids = []
    for pos, tok in enumerate(tokens):
        if tok not in model.alphabet:
            raise UnknownToken(pos, tok)
        ids.append(model.alphabet.id_of(tok))
    p0 = model.initial_prob(tuple(ids[: model.order]))
    if p0 == 0.0:
        return -math.inf
    total = math.log(p0)
    for i in range(model.order, len(ids)):
        p = model.transition_prob(tuple(ids[i - model.order : i]), ids[i])
        if p == 0.0:
            return -math.inf
        total += math.log(p)
    return total
