"""Regular-language constraints compiled to DFAs and intersected with the
Markov trellis: anti-plagiarism MaxOrder, duration-sum meter, and
user-supplied forbidden/required patterns.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import Infeasible, UnboundedLength, UnreachableTotal
from .tokens import Corpus
from .trellis import Trellis, TrellisUnion


class Dfa:
    """Deterministic finite automaton over token ids.

    Transitions are partial: a missing (state, token) entry is a dead move.
    `max_len`, when set, bounds the length of any accepted string (used to
    bound trellis length for meter automata).
    """

    def __init__(self, n_states, start, accepting, transitions, max_len=None):
        self.n_states = n_states
        self.start = start
        self.accepting = frozenset(accepting)
        self.transitions = dict(transitions)  # (state, tid) -> state
        self.max_len = max_len

    def step(self, state, tid):
        return self.transitions.get((state, tid))

    def accepts(self, ids) -> bool:
        s = self.start
        for tid in ids:
            s = self.step(s, tid)
            if s is None:
                return False
        return s in self.accepting

    def prune(self) -> "Dfa":
        """Keep only states reachable from start and co-reachable to an
        accepting state; renumber densely."""
        succ = {}
        pred = {}
        for (s, tid), s2 in self.transitions.items():
            succ.setdefault(s, []).append((tid, s2))
            pred.setdefault(s2, []).append(s)
        reach = {self.start}
        stack = [self.start]
        while stack:
            s = stack.pop()
            for _, s2 in succ.get(s, ()):
                if s2 not in reach:
                    reach.add(s2)
                    stack.append(s2)
        coreach = set(a for a in self.accepting if a in reach)
        stack = list(coreach)
        while stack:
            s = stack.pop()
            for s0 in pred.get(s, ()):
                if s0 in reach and s0 not in coreach:
                    coreach.add(s0)
                    stack.append(s0)
        if self.start not in coreach:
            raise UnreachableTotal("no accepting state reachable from start")
        keep = sorted(coreach)
        remap = {s: i for i, s in enumerate(keep)}
        trans = {
            (remap[s], tid): remap[s2]
            for (s, tid), s2 in self.transitions.items()
            if s in remap and s2 in remap
        }
        return Dfa(len(keep), remap[self.start],
                   [remap[a] for a in self.accepting if a in remap],
                   trans, max_len=self.max_len)

    # JSON adjacency import/export; edges carry token strings
    def to_dict(self, alphabet) -> dict:
        return {
            "states": self.n_states,
            "start": self.start,
            "accepting": sorted(self.accepting),
            "edges": [
                {"from": s, "token": str(alphabet[tid]), "to": s2}
                for (s, tid), s2 in sorted(self.transitions.items())
            ],
        }

    def to_json(self, alphabet) -> str:
        return json.dumps(self.to_dict(alphabet), indent=2)

    @classmethod
    def from_dict(cls, data, alphabet) -> "Dfa":
        from .tokens import parse_token

        trans = {}
        for e in data["edges"]:
            tok = parse_token(e["token"])
            if tok not in alphabet:
                continue  # edge on a token the model can never emit
            trans[(e["from"], alphabet.id_of(tok))] = e["to"]
        return cls(data["states"], data["start"], data["accepting"], trans)


def universal_dfa(alphabet_size) -> Dfa:
    return Dfa(1, 0, [0], {(0, tid): 0 for tid in range(alphabet_size)})


@dataclass(frozen=True)
class MaxOrderSpec:
    L: int  # longest allowed copied corpus subsequence, in tokens

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be >= 1")


@dataclass(frozen=True)
class MeterSpec:
    total: int
    checkpoints: tuple = ()

    def __post_init__(self):
        if self.total < 1:
            raise ValueError("total must be >= 1")
        prev = 0
        for cp in self.checkpoints:
            if cp <= prev or cp > self.total:
                raise ValueError("checkpoints must be strictly increasing and <= total")
            prev = cp


def maxorder_automaton(corpus: Corpus, spec: MaxOrderSpec) -> Dfa:
    """DFA accepting exactly the strings with no corpus (L+1)-gram.

    Aho-Corasick over the forbidden grams; states that complete a gram are
    dead, everything else accepts.
    """
    n = spec.L + 1
    grams = set()
    for seq in corpus.sequences:
        ids = corpus.alphabet.encode(seq)
        for i in range(len(ids) - n + 1):
            grams.add(ids[i : i + n])
    alpha = range(len(corpus.alphabet))
    if not grams:
        return universal_dfa(len(corpus.alphabet))

    # trie
    goto = [{}]  # node -> {tid: node}
    terminal = [False]
    for gram in sorted(grams):
        node = 0
        for tid in gram:
            if tid not in goto[node]:
                goto.append({})
                terminal.append(False)
                goto[node][tid] = len(goto) - 1
            node = goto[node][tid]
        terminal[node] = True

    # BFS failure links; full transition table
    fail = [0] * len(goto)
    table = {}
    queue = []
    for tid in alpha:
        child = goto[0].get(tid)
        if child is None:
            table[(0, tid)] = 0
        else:
            table[(0, tid)] = child
            queue.append(child)
    while queue:
        node = queue.pop(0)
        for tid in alpha:
            child = goto[node].get(tid)
            if child is None:
                table[(node, tid)] = table[(fail[node], tid)]
            else:
                fail[child] = table[(fail[node], tid)]
                if terminal[fail[child]]:
                    terminal[child] = True
                table[(node, tid)] = child
                queue.append(child)

    transitions = {
        (s, tid): s2
        for (s, tid), s2 in table.items()
        if not terminal[s] and not terminal[s2]
    }
    accepting = [s for s in range(len(goto)) if not terminal[s]]
    return Dfa(len(goto), 0, accepting, transitions).prune()


def meter_automaton(durations: dict, spec: MeterSpec) -> Dfa:
    """DFA whose state is the running duration sum; accepts at exactly
    `total`. Checkpoint ticks may not be jumped over, so every accepted
    string has a prefix sum at each checkpoint."""
    for tid, d in durations.items():
        if d < 1:
            raise ValueError(f"duration of token {tid} must be >= 1")
    cps = set(spec.checkpoints)
    transitions = {}
    frontier = [0]
    seen = {0}
    while frontier:
        s = frontier.pop()
        for tid, d in durations.items():
            s2 = s + d
            if s2 > spec.total:
                continue
            if any(s < cp < s2 for cp in cps):
                continue
            transitions[(s, tid)] = s2
            if s2 not in seen:
                seen.add(s2)
                frontier.append(s2)
    dfa = Dfa(spec.total + 1, 0, [spec.total], transitions,
              max_len=spec.total // min(durations.values()) if durations else 0)
    try:
        return dfa.prune()
    except UnreachableTotal:
        raise UnreachableTotal(
            f"total {spec.total} unreachable with the given durations/checkpoints"
        )


def intersect_and_build(model, length=None, dfas=(), unary=(), bias=None,
                        pair_bias=None, seed_context=None):
    """Product trellis over (Markov context x DFA states).

    With an explicit length the result is a single fixed-length Trellis;
    otherwise a length bound must be derivable from some DFA (meter), and
    the result is the union over feasible lengths.
    """
    dfas = tuple(dfas)
    if length is not None:
        return Trellis(model, length, unary=unary, bias=bias, dfas=dfas,
                       pair_bias=pair_bias, seed_context=seed_context)
    bounds = [d.max_len for d in dfas if d.max_len is not None]
    if not bounds:
        raise UnboundedLength("no explicit length and no length-bounding DFA")
    max_len = min(bounds)
    parts = []
    min_len = model.order if seed_context is None else 1
    for n in range(min_len, max_len + 1):
        try:
            parts.append(Trellis(model, n, unary=unary, bias=bias, dfas=dfas,
                                 pair_bias=pair_bias, seed_context=seed_context))
        except Infeasible:
            continue
    if not parts:
        raise Infeasible("no sequence of any length satisfies the constraints",
                         family="regular")
    if len(parts) == 1:
        return parts[0]
    return TrellisUnion(parts)
