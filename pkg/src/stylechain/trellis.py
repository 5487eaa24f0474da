"""Exact constrained inference over finite-length Markov sequences.

The trellis is a layered product graph: one layer per emitted position,
nodes are (Markov context, automaton states) pairs. Construction first
removes every zero-probability arc (filtering), then a backward pass sums
completion weights per node so that forward sampling is exactly the model
distribution conditioned on the constraints.

All weights live in log space; impossibility is represented by node/arc
absence, never by sentinel floats read from data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import Infeasible
from .model import MarkovModel
from .tokens import TokenSequence

NEG_INF = -math.inf


def _logsumexp(values):
    m = max(values, default=NEG_INF)
    if m == NEG_INF:
        return NEG_INF
    return m + math.log(sum(math.exp(v - m) for v in values))


@dataclass(frozen=True)
class UnaryConstraint:
    """Restrict one sequence position to a set of allowed token ids."""

    position: int
    allowed: frozenset

    def __post_init__(self):
        if not self.allowed:
            raise ValueError("allowed set must be non-empty")
        if self.position < 0:
            raise ValueError("position must be >= 0")


class BiasField:
    """Per-position multiplicative token weights (default weight 1)."""

    def __init__(self, weights: dict):
        # weights: position -> {token id: weight >= 0}
        for pos, table in weights.items():
            if all(w <= 0 for w in table.values()) and table:
                # fine as long as some unmentioned token keeps default 1;
                # an explicit all-zero position over the full alphabet is
                # caught at trellis build time (Infeasible).
                pass
            for w in table.values():
                if w < 0 or not math.isfinite(w):
                    raise ValueError("bias weights must be finite and >= 0")
        self.weights = weights

    def log_weight(self, position: int, tid: int) -> float:
        w = self.weights.get(position, {}).get(tid, 1.0)
        return math.log(w) if w > 0 else NEG_INF


def _log_pair(pair_bias, prev_tid, tid):
    if pair_bias is None:
        return 0.0
    w = pair_bias.get((prev_tid, tid), 1.0)
    return math.log(w) if w > 0 else NEG_INF


class Trellis:
    """Filtered product graph with backward completion weights.

    Attributes of interest:
      length         total emitted sequence length
      layers         per transition layer, the list of live nodes
      log_partition  log of the total constrained probability mass
    """

    def __init__(self, model, length, unary=(), bias=None, dfas=(), pair_bias=None,
                 seed_context=None):
        self.model = model
        self.length = length
        self.dfas = tuple(dfas)
        k = model.order
        if seed_context is None and length < k:
            raise ValueError(f"length {length} < model order {k}")

        allowed = {}
        for c in unary:
            if c.position >= length:
                raise ValueError(f"unary constraint position {c.position} >= length {length}")
            allowed[c.position] = (
                allowed[c.position] & c.allowed if c.position in allowed else c.allowed
            )

        def log_bias(pos, tid):
            if pos in allowed and tid not in allowed[pos]:
                return NEG_INF
            return bias.log_weight(pos, tid) if bias is not None else 0.0

        starts = tuple(d.start for d in self.dfas)

        def dfa_step(dstates, tid):
            out = []
            for d, s in zip(self.dfas, dstates):
                s2 = d.step(s, tid)
                if s2 is None:
                    return None
                out.append(s2)
            return tuple(out)

        # entry nodes: (context, dfa states), entry log-weight, emitted prefix
        entries = {}
        if seed_context is not None:
            self.prefix_len = 0
            entries[(tuple(seed_context), starts)] = (0.0, ())
        else:
            self.prefix_len = k
            for ctx, p in model.initial_items():
                w = math.log(p)
                dstates = starts
                prev = None
                ok = True
                for pos, tid in enumerate(ctx):
                    w += log_bias(pos, tid)
                    w += _log_pair(pair_bias, prev, tid) if prev is not None else 0.0
                    if w == NEG_INF:
                        ok = False
                        break
                    dstates = dfa_step(dstates, tid)
                    if dstates is None:
                        ok = False
                        break
                    prev = tid
                if ok:
                    entries[(ctx, dstates)] = (w, ctx)
        if not entries:
            raise Infeasible(
                "no admissible start (initial distribution vs constraints)",
                family="unary" if allowed else "markov",
            )

        steps = length - self.prefix_len
        self.steps = steps

        # forward reachability, layer by layer
        layers = [sorted(entries)]
        arcs = []  # arcs[t]: node -> [(tid, logw, next_node)]
        for t in range(steps):
            pos = self.prefix_len + t
            layer_arcs = {}
            nxt = set()
            for node in layers[t]:
                ctx, dstates = node
                out = []
                for tid, p in model.successors(ctx):
                    w = math.log(p) + log_bias(pos, tid) + _log_pair(pair_bias, ctx[-1], tid)
                    if w == NEG_INF:
                        continue
                    d2 = dfa_step(dstates, tid)
                    if d2 is None:
                        continue
                    node2 = ((ctx + (tid,))[1:], d2)
                    out.append((tid, w, node2))
                    nxt.add(node2)
                layer_arcs[node] = out
            if not nxt:
                raise Infeasible(
                    f"no live transition into position {pos}",
                    family="unary" if pos in allowed else ("regular" if self.dfas else "markov"),
                    detail={"position": pos},
                )
            arcs.append(layer_arcs)
            layers.append(sorted(nxt))

        # backward pass: sum of completion weights per node
        back = [dict() for _ in range(steps + 1)]
        for node in layers[steps]:
            _, dstates = node
            ok = all(s in d.accepting for d, s in zip(self.dfas, dstates))
            back[steps][node] = 0.0 if ok else NEG_INF
        for t in range(steps - 1, -1, -1):
            for node in layers[t]:
                vals = [w + back[t + 1][n2] for _, w, n2 in arcs[t][node]]
                back[t][node] = _logsumexp(vals)

        self.entries = entries
        self.layers = layers
        self.arcs = arcs
        self.backward = back
        self.log_partition = _logsumexp(
            [w + back[0][node] for node, (w, _) in entries.items()]
        )
        if self.log_partition == NEG_INF:
            raise Infeasible(
                "no accepted completion (automaton acceptance)",
                family="regular" if self.dfas else "unary",
            )
        # drop dead nodes/arcs so downstream passes only see live structure
        for t in range(steps + 1):
            self.layers[t] = [n for n in self.layers[t] if back[t][n] > NEG_INF]
        for t in range(steps):
            self.arcs[t] = {
                node: [(tid, w, n2) for tid, w, n2 in out if back[t + 1][n2] > NEG_INF]
                for node, out in self.arcs[t].items()
                if back[t][node] > NEG_INF
            }
        self._csr = None
        self._maxback = None

    # -- exact queries ---------------------------------------------------

    @property
    def partition(self) -> float:
        return math.exp(self.log_partition)

    def enumerate_sequences(self, limit=None):
        """Yield (token id tuple, log weight) for every live path, in
        deterministic (prefix-lexicographic) order."""
        count = 0
        for node in sorted(self.entries, key=lambda n: (self.entries[n][1], n)):
            if node not in self.backward[0] or self.backward[0][node] == NEG_INF:
                continue
            w0, prefix = self.entries[node]
            stack = [(0, node, list(prefix), w0)]
            while stack:
                t, cur, ids, w = stack.pop()
                if t == self.steps:
                    yield tuple(ids), w
                    count += 1
                    if limit is not None and count >= limit:
                        return
                    continue
                for tid, aw, n2 in sorted(self.arcs[t].get(cur, ()), reverse=True):
                    stack.append((t + 1, n2, ids + [tid], w + aw))

    def count_paths(self) -> int:
        """Exact number of live complete paths (distinct sequences)."""
        counts = {n: 1 for n in self.layers[self.steps]}
        for t in range(self.steps - 1, -1, -1):
            counts = {
                node: sum(counts[n2] for _, _, n2 in self.arcs[t][node])
                for node in self.layers[t]
            }
        return sum(counts[n] for n in self.layers[0])

    def marginals(self):
        """Exact per-position token marginals via forward-backward."""
        # forward mass arriving at each node
        fwd = [dict() for _ in range(self.steps + 1)]
        out = [dict() for _ in range(self.length)]
        for node in self.layers[0]:
            w0, prefix = self.entries[node]
            fwd[0][node] = _logsumexp([fwd[0].get(node, NEG_INF), w0])
        for t in range(self.steps):
            for node in self.layers[t]:
                for tid, w, n2 in self.arcs[t][node]:
                    mass = fwd[t][node] + w + self.backward[t + 1][n2]
                    pos = self.prefix_len + t
                    out[pos][tid] = _logsumexp([out[pos].get(tid, NEG_INF), mass])
                    fwd[t + 1][n2] = _logsumexp([fwd[t + 1].get(n2, NEG_INF), fwd[t][node] + w])
        # prefix positions: attribute entry mass to its tokens
        for node in self.layers[0]:
            w0, prefix = self.entries[node]
            mass = w0 + self.backward[0][node]
            for pos, tid in enumerate(prefix):
                out[pos][tid] = _logsumexp([out[pos].get(tid, NEG_INF), mass])
        z = self.log_partition
        return [
            {tid: math.exp(v - z) for tid, v in table.items()} for table in out
        ]

    # -- sampling ---------------------------------------------------------

    def _build_csr(self):
        if self._csr is not None:
            return self._csr
        node_id = {}
        offset = 0
        for t in range(self.steps + 1):
            for n in self.layers[t]:
                node_id[(t, n)] = offset
                offset += 1
        total_nodes = offset

        entries = sorted(self.entries.items(), key=lambda kv: (kv[1][1], kv[0]))
        entries = [(n, w0, pre) for n, (w0, pre) in entries if self.backward[0][n] > NEG_INF]
        probs = np.array(
            [math.exp(w0 + self.backward[0][n] - self.log_partition) for n, w0, _ in entries]
        )
        entry_cum = np.cumsum(probs)
        entry_cum[-1] = 1.0
        entry_node = np.array([node_id[(0, n)] for n, _, _ in entries], dtype=np.int64)
        entry_prefix = np.array(
            [pre for _, _, pre in entries], dtype=np.int64
        ).reshape(len(entries), self.prefix_len)

        indptr = np.zeros(total_nodes + 1, dtype=np.int64)
        arc_cum, arc_token, arc_next = [], [], []
        for t in range(self.steps):
            for n in self.layers[t]:
                nid = node_id[(t, n)]
                out = sorted(self.arcs[t][n])
                ws = np.array(
                    [math.exp(w + self.backward[t + 1][n2] - self.backward[t][n])
                     for _, w, n2 in out]
                )
                cum = np.cumsum(ws)
                cum[-1] = 1.0
                arc_cum.extend(nid + cum)
                arc_token.extend(tid for tid, _, _ in out)
                arc_next.extend(node_id[(t + 1, n2)] for _, _, n2 in out)
                indptr[nid + 1] = len(out)
        indptr = np.cumsum(indptr)
        self._csr = dict(
            entry_cum=entry_cum,
            entry_node=entry_node,
            entry_prefix=entry_prefix,
            indptr=indptr,
            arc_cum=np.array(arc_cum, dtype=np.float64),
            arc_token=np.array(arc_token, dtype=np.int64),
            arc_next=np.array(arc_next, dtype=np.int64),
        )
        return self._csr

    def sample_ids(self, n_samples: int, seed) -> np.ndarray:
        """Draw n_samples token-id sequences, shape (n_samples, length)."""
        csr = self._build_csr()
        rng = np.random.default_rng(seed)
        uniforms = rng.random((n_samples, self.steps + 1))
        out = np.empty((n_samples, self.length), dtype=np.int64)
        _kernels.sample_paths(
            csr["entry_cum"], csr["entry_node"], csr["entry_prefix"],
            csr["indptr"], csr["arc_cum"], csr["arc_token"], csr["arc_next"],
            uniforms, out,
        )
        return out

    def sample(self, seed) -> TokenSequence:
        ids = self.sample_ids(1, seed)[0]
        return TokenSequence(self.model.alphabet.decode(ids))

    # -- most probable path ------------------------------------------------

    def _build_maxback(self):
        if self._maxback is not None:
            return self._maxback
        mb = [dict() for _ in range(self.steps + 1)]
        for n in self.layers[self.steps]:
            mb[self.steps][n] = 0.0
        for t in range(self.steps - 1, -1, -1):
            for n in self.layers[t]:
                mb[t][n] = max(w + mb[t + 1][n2] for _, w, n2 in self.arcs[t][n])
        self._maxback = mb
        return mb

    def most_probable(self):
        """Argmax path; ties broken by smallest token id at the earliest
        position. Returns (TokenSequence, log weight)."""
        mb = self._build_maxback()
        best = NEG_INF
        best_entry = None
        for node in sorted(self.entries, key=lambda n: (self.entries[n][1], n)):
            if node not in mb[0]:
                continue
            w0, prefix = self.entries[node]
            v = w0 + mb[0][node]
            if v > best:
                best = v
                best_entry = node
        node = best_entry
        ids = list(self.entries[node][1])
        score = self.entries[node][0]
        for t in range(self.steps):
            target = mb[t][node]
            for tid, w, n2 in sorted(self.arcs[t][node]):
                if n2 in mb[t + 1] and w + mb[t + 1][n2] == target:
                    ids.append(tid)
                    score += w
                    node = n2
                    break
        return TokenSequence(self.model.alphabet.decode(ids)), score


class TrellisUnion:
    """Disjoint union of fixed-length trellises (variable-length feasible
    sets, e.g. meter constraints without an explicit length)."""

    def __init__(self, parts):
        self.parts = list(parts)  # list of Trellis
        if not self.parts:
            raise Infeasible("no feasible sequence length", family="regular")
        self.model = self.parts[0].model
        self.log_partition = _logsumexp([t.log_partition for t in self.parts])

    @property
    def partition(self):
        return math.exp(self.log_partition)

    def enumerate_sequences(self, limit=None):
        count = 0
        for part in self.parts:
            for ids, w in part.enumerate_sequences():
                yield ids, w
                count += 1
                if limit is not None and count >= limit:
                    return

    def count_paths(self):
        return sum(t.count_paths() for t in self.parts)

    def sample_id_lists(self, n_samples, seed):
        rng = np.random.default_rng(seed)
        weights = np.array([math.exp(t.log_partition - self.log_partition) for t in self.parts])
        weights = weights / weights.sum()
        choice = rng.choice(len(self.parts), size=n_samples, p=weights)
        results = [None] * n_samples
        for ci, part in enumerate(self.parts):
            idx = np.nonzero(choice == ci)[0]
            if len(idx) == 0:
                continue
            block = part.sample_ids(len(idx), rng.integers(2**63))
            for row, pos in enumerate(idx):
                results[pos] = tuple(block[row])
        return results

    def sample(self, seed):
        ids = self.sample_id_lists(1, seed)[0]
        return TokenSequence(self.model.alphabet.decode(ids))

    def most_probable(self):
        best = None
        best_score = NEG_INF
        for part in self.parts:
            seq, score = part.most_probable()
            if score > best_score:
                best, best_score = seq, score
        return best, best_score


def build_trellis(model: MarkovModel, length: int, unary=(), bias=None,
                  pair_bias=None, seed_context=None) -> Trellis:
    """Filter + backward pass for unary/bias constraints only."""
    return Trellis(model, length, unary=unary, bias=bias, pair_bias=pair_bias,
                   seed_context=seed_context)


def sample(trellis, seed) -> TokenSequence:
    return trellis.sample(seed)


def most_probable(trellis):
    return trellis.most_probable()


def solve_alldifferent(model: MarkovModel, length: int, unary=(), maximize=False,
                       seed=None) -> TokenSequence:
    """Pairwise-distinct sequence with positive model probability.

    maximize=True runs depth-first branch & bound (upper bound: prefix
    weight times max transition probability per remaining step); otherwise
    randomized backtracking returns an arbitrary feasible solution.
    """
    k = model.order
    if length < k:
        raise ValueError(f"length {length} < order {k}")
    if length > len(model.alphabet):
        raise Infeasible(
            f"length {length} exceeds alphabet size {len(model.alphabet)} "
            "(pigeonhole)", family="alldifferent",
        )

    # relaxed trellis: prunes (position, context) states that cannot reach
    # a full-length completion even before the all-different requirement
    relaxed = build_trellis(model, length, unary=unary)
    live = [set(ctx for ctx, _ in relaxed.layers[t]) for t in range(relaxed.steps + 1)]

    allowed = {}
    for c in unary:
        allowed[c.position] = (
            allowed[c.position] & c.allowed if c.position in allowed else c.allowed
        )

    pmax = model.max_transition_prob()
    log_pmax = math.log(pmax) if pmax > 0 else NEG_INF
    rng = np.random.default_rng(seed) if not maximize else None

    best_ids = None
    best_score = NEG_INF

    def entry_candidates():
        cands = []
        for ctx, p in model.initial_items():
            if len(set(ctx)) != len(ctx) or ctx not in live[0]:
                continue
            if any(pos in allowed and tid not in allowed[pos] for pos, tid in enumerate(ctx)):
                continue
            cands.append((ctx, math.log(p)))
        return cands

    def order_candidates(cands, key_prob):
        if maximize:
            return sorted(cands, key=key_prob)
        idx = rng.permutation(len(cands))
        return [cands[i] for i in idx]

    def dfs(ids, used, score):
        nonlocal best_ids, best_score
        t = len(ids) - k  # transition layer index
        if len(ids) == length:
            if maximize:
                if score > best_score:
                    best_score, best_ids = score, list(ids)
                return False
            best_ids = list(ids)
            return True
        if maximize and score + (length - len(ids)) * log_pmax <= best_score:
            return False
        pos = len(ids)
        ctx = tuple(ids[-k:])
        cands = []
        for tid, p in model.successors(ctx):
            if tid in used:
                continue
            if pos in allowed and tid not in allowed[pos]:
                continue
            if (ctx + (tid,))[1:] not in live[t + 1]:
                continue
            cands.append((tid, math.log(p)))
        for tid, lw in order_candidates(cands, key_prob=lambda c: (-math.exp(c[1]), c[0])):
            ids.append(tid)
            used.add(tid)
            done = dfs(ids, used, score + lw)
            ids.pop()
            used.remove(tid)
            if done:
                return True
        return False

    entries = entry_candidates()
    for ctx, lw in order_candidates(entries, key_prob=lambda c: (-math.exp(c[1]), c[0])):
        done = dfs(list(ctx), set(ctx), lw)
        if done:
            break
    if best_ids is None:
        raise Infeasible("no all-different sequence satisfies the constraints",
                         family="alldifferent")
    return TokenSequence(model.alphabet.decode(best_ids))
