import math

import pytest

from stylechain.continuator import respond
from stylechain.errors import Infeasible, UnknownToken
from stylechain.model import estimate, sequence_logprob
from stylechain.tokens import label, parse_corpus

CORPUS = """\
a c d c a d b
a d c c d a b
c a d d c a b
"""


@pytest.fixture
def model():
    # terminal = {b}, initial-only = set() is not true here: a and c start,
    # both also appear later; so interior tokens are everything but b.
    return estimate(parse_corpus(CORPUS), 1)


def toks(s):
    return [label(w) for w in s.split()]


def test_continuation_ends_terminal(model):
    b = model.alphabet.id_of(label("b"))
    for seed in range(20):
        out = respond(model, toks("a c d"), "continuation", length=4, seed=seed)
        assert model.alphabet.id_of(out[-1]) == b


def test_variation_pins_endpoints(model):
    for seed in range(20):
        out = respond(model, toks("a d a"), "variation", seed=seed)
        assert str(out[0]) == "a"
        assert str(out[-1]) == "a"


def test_answer_ends_with_input_start(model):
    for seed in range(20):
        out = respond(model, toks("c a d"), "answer", seed=seed)
        assert str(out[-1]) == "c"


def test_interior_tokens_never_terminal(model):
    for seed in range(20):
        out = respond(model, toks("a c d c"), "continuation", seed=seed)
        ids = model.alphabet.encode(out)
        for tid in ids[:-1]:
            assert tid not in model.terminal


def test_continuation_junction_has_positive_probability(model):
    phrase = toks("a c d")
    for seed in range(20):
        out = respond(model, phrase, "continuation", seed=seed)
        joint = phrase + list(out)
        assert sequence_logprob(model, joint) > -math.inf


def test_unknown_token_rejected(model):
    with pytest.raises(UnknownToken):
        respond(model, toks("a z"), "continuation", seed=0)


def test_unseen_context_fallback_and_strict():
    # token e only ever ends sequences: context (e) has no transitions
    m = estimate(parse_corpus("a c d c a e\nc a d a c e\nd c a d a b"), 1)
    phrase = [label("a"), label("e")]
    with pytest.warns(UserWarning):
        out = respond(m, phrase, "continuation", seed=0)
    assert len(out) == 2
    with pytest.raises(Infeasible):
        respond(m, phrase, "continuation", seed=0, strict=True)


def test_bad_mode(model):
    with pytest.raises(ValueError):
        respond(model, toks("a"), "remix", seed=0)
