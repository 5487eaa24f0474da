"""Palindromic order-1 Markov enumeration and Voss dice 1/f sequences."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import MarkovModel
from .tokens import TokenSequence

DEFAULT_PALINDROME_CAP = 10_000


@dataclass
class PalindromeResult:
    sequences: list  # of TokenSequence
    truncated: bool


def _palindrome_id_lists(model: MarkovModel, length: int, cap: int):
    """All id tuples s with s == reversed(s) and positive model probability.

    A palindrome of length 2m+1 is determined by its first half
    t_0..t_m; each consecutive pair must be traversable in both directions
    (the reversed half walks the same edges backwards). Even lengths force
    t_{m-1} == t_m, i.e. a self-loop at the center.
    """
    if model.order != 1:
        raise ValueError("palindrome enumeration requires an order-1 model")
    n_tokens = len(model.alphabet)
    symmetric = {}
    for a in range(n_tokens):
        outs = []
        for b, p in model.successors((a,)):
            if model.transition_prob((b,), a) > 0:
                outs.append(b)
        symmetric[a] = outs
    starts = [ctx[0] for ctx, _ in model.initial_items()]

    half = (length + 1) // 2
    even = length % 2 == 0
    results = []
    truncated = False

    def expand(path):
        nonlocal truncated
        if truncated:
            return
        if len(path) == half:
            if even and model.transition_prob((path[-1],), path[-1]) <= 0:
                return
            if even:
                full = path + path[::-1]
            else:
                full = path + path[-2::-1]
            if len(results) >= cap:
                truncated = True
                return
            results.append(tuple(full))
            return
        for b in symmetric[path[-1]]:
            expand(path + [b])

    for t0 in sorted(starts):
        if length == 1:
            results.append((t0,))
            continue
        expand([t0])
    return results, truncated


def palindromes(model: MarkovModel, length: int, cap: int = DEFAULT_PALINDROME_CAP) -> PalindromeResult:
    """Enumerate palindromic sequences in token-id lexicographic order."""
    ids, truncated = _palindrome_id_lists(model, length, cap)
    seqs = [TokenSequence(model.alphabet.decode(t)) for t in ids]
    return PalindromeResult(seqs, truncated)


def sample_palindrome(model: MarkovModel, length: int, seed, weighted: bool = False,
                      cap: int = DEFAULT_PALINDROME_CAP):
    """Uniform or forward-probability-weighted draw from the palindrome set.

    Returns None when the set is empty.
    """
    from .model import sequence_logprob

    result = palindromes(model, length, cap=cap)
    if not result.sequences:
        return None
    rng = np.random.default_rng(seed)
    if not weighted:
        return result.sequences[rng.integers(len(result.sequences))]
    logs = np.array([sequence_logprob(model, s) for s in result.sequences])
    w = np.exp(logs - logs.max())
    return result.sequences[rng.choice(len(w), p=w / w.sum())]


@dataclass(frozen=True)
class VossConfig:
    k: int = 8
    steps: int = 4096
    faces: tuple = (0, 5)  # inclusive value range of each source

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.steps < 2:
            raise ValueError("steps must be >= 2")
        if self.faces[1] < self.faces[0]:
            raise ValueError("faces range is empty")


def voss_sequence(cfg: VossConfig, seed) -> list:
    """Voss dice walk: value at step t is the sum of k sources; source j is
    redrawn whenever bit j of the step counter flips."""
    rng = np.random.default_rng(seed)
    lo, hi = cfg.faces
    dice = rng.integers(lo, hi + 1, size=cfg.k)
    out = [int(dice.sum())]
    for t in range(1, cfg.steps):
        flipped = t ^ (t - 1)
        for j in range(cfg.k):
            if flipped >> j & 1:
                dice[j] = rng.integers(lo, hi + 1)
        out.append(int(dice.sum()))
    return out


def voss_to_tokens(values, alphabet) -> TokenSequence:
    """Map integer values onto an ordered token alphabet by binning the
    observed value range into |alphabet| equal-width bins."""
    if len(alphabet) == 0:
        raise ValueError("alphabet must be non-empty")
    vmin = min(values)
    vmax = max(values)
    n = len(alphabet)
    if vmax == vmin:
        return TokenSequence(tuple(alphabet[0] for _ in values))
    ids = [min(n - 1, (v - vmin) * n // (vmax - vmin + 1)) for v in values]
    return TokenSequence(tuple(alphabet[i] for i in ids))


def periodogram(values) -> tuple:
    """(frequencies, power) of the mean-removed series, DC bin excluded."""
    x = np.asarray(values, dtype=float)
    x = x - x.mean()
    power = np.abs(np.fft.rfft(x)) ** 2 / len(x)
    freqs = np.fft.rfftfreq(len(x))
    return freqs[1:], power[1:]


def spectral_slope(values_batches) -> float:
    """Least-squares log-log slope of the periodogram averaged over runs."""
    acc = None
    freqs = None
    count = 0
    for values in values_batches:
        freqs, power = periodogram(values)
        acc = power if acc is None else acc + power
        count += 1
    avg = acc / count
    mask = avg > 0
    slope, _ = np.polyfit(np.log(freqs[mask]), np.log(avg[mask]), 1)
    return float(slope)
