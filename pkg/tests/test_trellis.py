import itertools
import math
from collections import Counter

import numpy as np
import pytest

from stylechain._kernels import available_backends
from stylechain.errors import Infeasible
from stylechain.model import sequence_logprob
from stylechain.trellis import (
    BiasField,
    UnaryConstraint,
    build_trellis,
    solve_alldifferent,
)

from helpers import (
    brute_force_feasible,
    make_model,
    random_model,
    random_unary,
    total_variation,
)


@pytest.fixture
def half_model():
    # p(a|a)=0.5, p(b|a)=0.5, p(a|b)=1.0, uniform initial over {a,b}
    return make_model(
        2, 1,
        transition_counts={(0,): {0: 1, 1: 1}, (1,): {0: 2}},
        initial_counts={(0,): 1, (1,): 1},
    )


def test_partition_spec_example(half_model):
    t = build_trellis(half_model, 3, unary=[UnaryConstraint(2, frozenset({1}))])
    # valid strings ending in b: aab (0.125), bab (0.25)
    assert math.isclose(t.partition, 0.375, rel_tol=1e-12)
    assert set(ids for ids, _ in t.enumerate_sequences()) == {(0, 0, 1), (1, 0, 1)}


def test_partition_unconstrained_is_one(half_model):
    t = build_trellis(half_model, 3)
    assert math.isclose(t.partition, 1.0, rel_tol=1e-12)


def test_forced_dead_transition_infeasible(half_model):
    # p(b|b) = 0
    with pytest.raises(Infeasible):
        build_trellis(half_model, 3, unary=[
            UnaryConstraint(0, frozenset({1})), UnaryConstraint(1, frozenset({1})),
        ])


def test_sampling_conditional_distribution(half_model):
    t = build_trellis(half_model, 3, unary=[UnaryConstraint(2, frozenset({1}))])
    counts = Counter(map(tuple, t.sample_ids(60_000, 9)))
    assert abs(counts[(0, 0, 1)] / 60_000 - 1 / 3) < 0.01
    assert abs(counts[(1, 0, 1)] / 60_000 - 2 / 3) < 0.01


def test_fully_pinned_returns_sequence(half_model):
    t = build_trellis(half_model, 3, unary=[
        UnaryConstraint(0, frozenset({1})),
        UnaryConstraint(1, frozenset({0})),
        UnaryConstraint(2, frozenset({0})),
    ])
    for seed in range(5):
        assert str(t.sample(seed)) == "b a a"


def test_bias_doubles_token_weight(half_model):
    bias = BiasField({0: {0: 2.0}})
    t = build_trellis(half_model, 3, unary=[UnaryConstraint(2, frozenset({1}))],
                      bias=bias)
    # P(aab) = 0.125*2 / (0.125*2 + 0.25) = 0.5
    counts = Counter(map(tuple, t.sample_ids(60_000, 4)))
    assert abs(counts[(0, 0, 1)] / 60_000 - 0.5) < 0.01


def test_most_probable_spec_example(half_model):
    t = build_trellis(half_model, 3, unary=[UnaryConstraint(2, frozenset({1}))])
    seq, lp = t.most_probable()
    assert str(seq) == "b a b"
    assert math.isclose(lp, math.log(0.25), rel_tol=1e-12)


def test_most_probable_deterministic_chain():
    m = make_model(2, 1, {(0,): {1: 1}, (1,): {0: 1}}, {(0,): 1})
    t = build_trellis(m, 4)
    seq, lp = t.most_probable()
    assert str(seq) == "a b a b"
    assert lp == 0.0


def test_exactness_random_instances():
    rng = np.random.default_rng(7)
    done = 0
    while done < 25:
        order = int(rng.integers(1, 3))
        n_tokens = int(rng.integers(2, 5))
        n = int(rng.integers(order + 1, 9))
        model = random_model(rng, n_tokens, order)
        unary = random_unary(rng, n, n_tokens)
        exact = brute_force_feasible(model, n, unary)
        if not exact:
            with pytest.raises(Infeasible):
                build_trellis(model, n, unary=unary)
            continue
        if len(exact) > 500:
            continue
        t = build_trellis(model, n, unary=unary)
        got = {ids: math.exp(w) for ids, w in t.enumerate_sequences()}
        assert set(got) == set(exact)
        z = sum(exact.values())
        assert abs(t.partition - z) <= 1e-9 * z
        for ids, p in exact.items():
            assert math.isclose(got[ids], p, rel_tol=1e-9)
        assert t.count_paths() == len(exact)
        done += 1


def test_constraint_soundness_sampled_outputs():
    rng = np.random.default_rng(11)
    model = random_model(rng, 4, 1)
    unary = random_unary(rng, 6, 4, p_constrained=0.5)
    try:
        t = build_trellis(model, 6, unary=unary)
    except Infeasible:
        pytest.skip("instance infeasible")
    allowed = {c.position: c.allowed for c in unary}
    for row in t.sample_ids(500, 3):
        for pos, a in allowed.items():
            assert row[pos] in a
        seq = model.alphabet.decode(row)
        assert sequence_logprob(model, seq) > -math.inf


def test_bias_monotonicity_exact_marginals():
    rng = np.random.default_rng(13)
    for _ in range(10):
        model = random_model(rng, 3, 1)
        n = 5
        try:
            base = build_trellis(model, n)
        except Infeasible:
            continue
        pos = int(rng.integers(0, n))
        tid = int(rng.integers(0, 3))
        before = base.marginals()[pos].get(tid, 0.0)
        boosted = build_trellis(model, n, bias=BiasField({pos: {tid: 3.0}}))
        after = boosted.marginals()[pos].get(tid, 0.0)
        assert after >= before - 1e-12


def test_marginals_sum_to_one(half_model):
    t = build_trellis(half_model, 3, unary=[UnaryConstraint(2, frozenset({1}))])
    for table in t.marginals():
        assert math.isclose(sum(table.values()), 1.0, rel_tol=1e-9)


def test_backends_agree(half_model):
    t = build_trellis(half_model, 4)
    outputs = {}
    for name, fn in available_backends().items():
        csr = t._build_csr()
        rng = np.random.default_rng(99)
        uniforms = rng.random((1000, t.steps + 1))
        out = np.empty((1000, t.length), dtype=np.int64)
        fn(csr["entry_cum"], csr["entry_node"], csr["entry_prefix"],
           csr["indptr"], csr["arc_cum"], csr["arc_token"], csr["arc_next"],
           uniforms, out)
        outputs[name] = out.copy()
    vals = list(outputs.values())
    for other in vals[1:]:
        assert np.array_equal(vals[0], other)


def test_seeded_context_generation():
    m = make_model(2, 1, {(0,): {0: 1, 1: 1}, (1,): {0: 2}}, {(0,): 1})
    t = build_trellis(m, 3, seed_context=(1,))
    # all length-3 continuations of context b: must start with a
    for ids, _ in t.enumerate_sequences():
        assert ids[0] == 0


# -- all-different -------------------------------------------------------


def brute_alldiff(model, length, unary=(), maximize=True):
    exact = brute_force_feasible(
        model, length, unary, predicate=lambda ids: len(set(ids)) == len(ids)
    )
    if not exact:
        return None
    if maximize:
        best = max(exact.values())
        return {ids for ids, p in exact.items() if math.isclose(p, best, rel_tol=1e-12)}
    return set(exact)


def test_alldifferent_matches_brute_force():
    rng = np.random.default_rng(21)
    done = 0
    while done < 20:
        n_tokens = int(rng.integers(3, 5))
        order = 1
        n = int(rng.integers(2, n_tokens + 1))
        model = random_model(rng, n_tokens, order)
        unary = random_unary(rng, n, n_tokens, p_constrained=0.2)
        optima = brute_alldiff(model, n, unary, maximize=True)
        if optima is None:
            with pytest.raises(Infeasible):
                solve_alldifferent(model, n, unary=unary, maximize=True)
            continue
        got = solve_alldifferent(model, n, unary=unary, maximize=True)
        assert tuple(model.alphabet.encode(got)) in optima
        done += 1


def test_alldifferent_pigeonhole():
    m = make_model(3, 1, {(0,): {1: 1}, (1,): {2: 1}, (2,): {0: 1}}, {(0,): 1})
    with pytest.raises(Infeasible):
        solve_alldifferent(m, 4)


def test_alldifferent_length_one_pinned():
    m = make_model(2, 1, {(0,): {1: 1}, (1,): {0: 1}}, {(0,): 1, (1,): 1})
    got = solve_alldifferent(m, 1, unary=[UnaryConstraint(0, frozenset({1}))],
                             maximize=True)
    assert str(got) == "b"


def test_alldifferent_random_mode_feasible_and_distinct():
    rng = np.random.default_rng(5)
    model = random_model(rng, 4, 1)
    for seed in range(20):
        try:
            got = solve_alldifferent(model, 3, seed=seed)
        except Infeasible:
            continue
        ids = model.alphabet.encode(got)
        assert len(set(ids)) == len(ids)
        assert sequence_logprob(model, got) > -math.inf
