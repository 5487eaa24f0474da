import math
from collections import Counter

import numpy as np
import pytest

from stylechain.errors import DeadEnd, OrderNotPositive, SequenceTooShort, UnknownToken
from stylechain.model import MarkovModel, estimate, random_walk, sequence_logprob
from stylechain.tokens import label, parse_corpus


def test_estimate_deterministic_chain():
    m = estimate(parse_corpus("a b a b"), 1)
    a = m.alphabet.id_of(label("a"))
    b = m.alphabet.id_of(label("b"))
    assert m.transition_prob((a,), b) == 1.0
    assert m.transition_prob((b,), a) == 1.0
    assert m.initial_prob((a,)) == 1.0
    assert m.terminal == {b}


def test_estimate_split_counts():
    m = estimate(parse_corpus("a a b"), 1)
    a = m.alphabet.id_of(label("a"))
    b = m.alphabet.id_of(label("b"))
    assert m.transition_prob((a,), a) == 0.5
    assert m.transition_prob((a,), b) == 0.5


def test_estimate_too_short():
    with pytest.raises(SequenceTooShort):
        estimate(parse_corpus("a b"), 2)
    with pytest.raises(OrderNotPositive):
        estimate(parse_corpus("a b"), 0)


def test_probability_vectors_sum_to_one():
    m = estimate(parse_corpus("a a b a c\nb a a c b\nc a b a a"), 1)
    for ctx in m.transition_counts:
        assert math.isclose(sum(p for _, p in m.successors(ctx)), 1.0, abs_tol=1e-9)


def test_walk_deterministic_chain():
    m = estimate(parse_corpus("a b a b"), 1)
    assert str(random_walk(m, 4, 123)) == "a b a b"


def test_walk_length_equals_order():
    m = estimate(parse_corpus("a b a b"), 2)
    out = random_walk(m, 2, 0)
    assert len(out) == 2


def test_walk_dead_end():
    # context c has no successors
    m = estimate(parse_corpus("a b c"), 1)
    with pytest.raises(DeadEnd):
        for seed in range(50):
            random_walk(m, 5, seed)


def test_logprob_examples():
    m = estimate(parse_corpus("a b a b"), 1)
    assert sequence_logprob(m, [label("a"), label("b"), label("a"), label("b")]) == 0.0
    assert sequence_logprob(m, [label("a"), label("a")]) == -math.inf

    m2 = estimate(parse_corpus("a a b"), 1)
    # initial 1.0, then p(a|a)=0.5, p(b|a)=0.5
    got = sequence_logprob(m2, [label("a"), label("a"), label("b")])
    assert math.isclose(got, math.log(0.25), rel_tol=1e-12)


def test_logprob_unknown_token():
    m = estimate(parse_corpus("a b a b"), 1)
    with pytest.raises(UnknownToken):
        sequence_logprob(m, [label("a"), label("z")])


def test_walks_always_positive_probability():
    m = estimate(parse_corpus("a a b a c a\nb c a b a a\nc a a b c b"), 1)
    for seed in range(200):
        try:
            seq = random_walk(m, 6, seed)
        except DeadEnd:
            continue
        assert sequence_logprob(m, seq) > -math.inf


def test_walk_empirical_frequencies_match_transitions():
    m = estimate(parse_corpus("a a b a c a b b\nb c a b a a c a\nc a a b c b a b"), 1)
    counts = {ctx: Counter() for ctx in m.transition_counts}
    steps = 0
    seed = 0
    while steps < 100_000:
        seq = random_walk(m, 50, seed)
        ids = m.alphabet.encode(seq)
        for i in range(1, len(ids)):
            counts[(ids[i - 1],)][ids[i]] += 1
            steps += 1
        seed += 1
    for ctx, c in counts.items():
        total = sum(c.values())
        if total < 2000:
            continue
        tv = 0.5 * sum(
            abs(c.get(tid, 0) / total - p) for tid, p in m.successors(ctx)
        )
        assert tv < 0.01


def test_json_round_trip_bit_exact():
    m = estimate(parse_corpus("a a b a c\nb a a c b\nc a b a a"), 2)
    m2 = MarkovModel.from_json(m.to_json())
    assert m2.order == m.order
    assert m2.transition_counts == m.transition_counts
    assert m2.initial_counts == m.initial_counts
    assert m2.terminal == m.terminal
    assert m2.initial_only == m.initial_only
    assert list(m2.alphabet) == list(m.alphabet)


def test_rejects_unknown_schema():
    with pytest.raises(ValueError):
        MarkovModel.from_json('{"schema": "nope/9"}')
