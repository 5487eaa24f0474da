"""Benchmark the trellis path-sampling kernel: compiled vs pure numpy.

Builds a moderately large constrained trellis, compiles it to CSR form
once, then times `sample_paths` for each available backend on identical
inputs and checks the outputs are bit-identical.

Run:  python3 benchmarks/bench_sampling.py [--samples N] [--repeat R]
"""

import argparse
import itertools
import time

import numpy as np

from stylechain._kernels import BACKEND, available_backends
from stylechain.model import MarkovModel
from stylechain.tokens import Alphabet, label
from stylechain.trellis import UnaryConstraint, build_trellis


def build_benchmark_trellis(n_tokens=12, order=2, length=32, seed=7):
    rng = np.random.default_rng(seed)
    alpha = Alphabet(label(f"t{i}") for i in range(n_tokens))
    trans = {}
    for ctx in itertools.product(range(n_tokens), repeat=order):
        succ = rng.choice(n_tokens, size=rng.integers(2, n_tokens + 1), replace=False)
        trans[ctx] = {int(t): int(rng.integers(1, 20)) ** 2 for t in succ}
    ctxs = list(trans)
    init = {ctxs[i]: 1 for i in rng.choice(len(ctxs), size=8, replace=False)}
    model = MarkovModel(order=order, alphabet=alpha, transition_counts=trans,
                        initial_counts=init, terminal=frozenset(),
                        initial_only=frozenset())
    unary = [
        UnaryConstraint(int(pos), frozenset(
            int(x) for x in rng.choice(n_tokens, size=n_tokens // 2, replace=False)
        ))
        for pos in rng.choice(length, size=length // 4, replace=False)
    ]
    return build_trellis(model, length, unary=unary)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    trellis = build_benchmark_trellis()
    csr = trellis._build_csr()
    rng = np.random.default_rng(0)
    uniforms = rng.random((args.samples, trellis.steps + 1))
    kernel_args = (csr["entry_cum"], csr["entry_node"], csr["entry_prefix"],
                   csr["indptr"], csr["arc_cum"], csr["arc_token"],
                   csr["arc_next"], uniforms)

    n_arcs = len(csr["arc_token"])
    print(f"trellis: {trellis.length} positions, {n_arcs} live arcs")
    print(f"default backend: {BACKEND}")
    print(f"{args.samples} samples x {args.repeat} repeats\n")

    outputs = {}
    for name, kernel in available_backends().items():
        out = np.empty((args.samples, trellis.length), dtype=np.int64)
        kernel(*kernel_args, out)  # warm-up
        best = min(
            (lambda t0: (kernel(*kernel_args, out), time.perf_counter() - t0)[1])(
                time.perf_counter()
            )
            for _ in range(args.repeat)
        )
        outputs[name] = out.copy()
        rate = args.samples / best
        print(f"{name:>8}: {best * 1e3:8.1f} ms   ({rate / 1e6:.2f} M sequences/s)")

    if len(outputs) == 2:
        py, cy = outputs["python"], outputs["cython"]
        assert np.array_equal(py, cy), "backend outputs differ"
        print("\nbackends produce bit-identical output")


if __name__ == "__main__":
    main()
