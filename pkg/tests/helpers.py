"""Shared oracles for the test suite.

Everything here is deliberately naive (full enumeration over the token
space) so it stays independent of the trellis code paths it checks.
"""

import itertools

import numpy as np

from stylechain.model import MarkovModel
from stylechain.tokens import Alphabet, label


def make_model(n_tokens, order, transition_counts, initial_counts,
               terminal=(), initial_only=()):
    """Model over single-letter label tokens a, b, c, ... from raw counts."""
    alpha = Alphabet(label(chr(97 + i)) for i in range(n_tokens))
    return MarkovModel(
        order=order,
        alphabet=alpha,
        transition_counts={tuple(k): dict(v) for k, v in transition_counts.items()},
        initial_counts={tuple(k): v for k, v in initial_counts.items()},
        terminal=frozenset(terminal),
        initial_only=frozenset(initial_only),
    )


def random_model(rng, n_tokens, order):
    """Random sparse model with skewed counts and some hard zeros."""
    trans = {}
    for ctx in itertools.product(range(n_tokens), repeat=order):
        succ = rng.choice(n_tokens, size=rng.integers(1, n_tokens + 1), replace=False)
        counts = {int(t): int(rng.integers(1, 20)) ** 2 for t in succ}
        if rng.random() < 0.3 and len(counts) > 1:
            counts.pop(int(succ[0]))
        trans[ctx] = counts
    ctxs = list(itertools.product(range(n_tokens), repeat=order))
    n_init = rng.integers(1, min(4, len(ctxs)) + 1)
    init = {
        ctxs[i]: int(rng.integers(1, 10))
        for i in rng.choice(len(ctxs), size=n_init, replace=False)
    }
    return make_model(n_tokens, order, trans, init)


def sequence_prob(model, ids):
    """Plain product-of-factors probability of a full id tuple."""
    p = model.initial_prob(tuple(ids[: model.order]))
    for i in range(model.order, len(ids)):
        if p == 0.0:
            return 0.0
        p *= model.transition_prob(tuple(ids[i - model.order : i]), ids[i])
    return p


def brute_force_feasible(model, length, unary=(), predicate=None):
    """{id tuple: probability} over every positive-probability sequence of
    the given length satisfying the unary constraints (and an optional
    extra predicate)."""
    allowed = {}
    for c in unary:
        allowed[c.position] = (
            allowed[c.position] & c.allowed if c.position in allowed else c.allowed
        )
    out = {}
    for ids in itertools.product(range(len(model.alphabet)), repeat=length):
        if any(ids[p] not in a for p, a in allowed.items()):
            continue
        if predicate is not None and not predicate(ids):
            continue
        p = sequence_prob(model, ids)
        if p > 0.0:
            out[ids] = p
    return out


def total_variation(empirical_counts, exact, n_samples):
    z = sum(exact.values())
    tv = 0.5 * sum(
        abs(empirical_counts.get(s, 0) / n_samples - p / z) for s, p in exact.items()
    )
    tv += 0.5 * sum(
        v / n_samples for s, v in empirical_counts.items() if s not in exact
    )
    return tv


def random_unary(rng, length, n_tokens, p_constrained=0.3):
    from stylechain.trellis import UnaryConstraint

    unary = []
    for pos in range(length):
        if rng.random() < p_constrained:
            k = int(rng.integers(1, n_tokens))
            allowed = frozenset(
                int(x) for x in rng.choice(n_tokens, size=k, replace=False)
            )
            unary.append(UnaryConstraint(pos, allowed))
    return unary
