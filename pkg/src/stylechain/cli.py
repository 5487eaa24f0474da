"""Batch command-line entry point.

Exit codes: 0 success, 2 infeasible constraint set, 1 usage or data error.
All randomness flows through one 64-bit seed; when no seed is given a
random one is drawn and printed so runs can be reproduced.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys

from . import automata, constraints, continuator, generators, harmonizer
from . import model as model_mod
from . import trellis as trellis_mod
from .errors import Infeasible, StylechainError, UnreachableTotal
from .tokens import LeadSheet, parse_corpus, parse_token

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


def _load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_mod.MarkovModel.from_json(fh.read())


def _load_corpus(path):
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh.read())


def _resolve_seed(args):
    if args.seed is not None:
        return args.seed
    seed = secrets.randbits(64)
    print(f"# seed {seed}", file=sys.stderr)
    return seed


def _parse_meter(text):
    parts = [int(p) for p in text.split(",")]
    return automata.MeterSpec(total=parts[0], checkpoints=tuple(parts[1:]))


def cmd_train(args):
    corpus = _load_corpus(args.corpus)
    m = model_mod.estimate(corpus, args.order)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(m.to_json())
    print(f"alphabet size {len(m.alphabet)}")
    print(f"contexts {len(m.transition_counts)}")
    print(f"initial contexts {len(m.initial_counts)}")
    return EXIT_OK


def _build_generation_trellis(m, args, cset):
    dfas = []
    if args.max_order is not None or cset.max_order is not None:
        L = args.max_order if args.max_order is not None else cset.max_order
        if not args.corpus:
            raise StylechainError("--max-order needs --corpus (the training corpus)")
        corpus = _load_corpus(args.corpus)
        if corpus.alphabet != m.alphabet:
            raise StylechainError("--corpus alphabet differs from the model's")
        dfas.append(automata.maxorder_automaton(corpus, automata.MaxOrderSpec(L)))
    meter = cset.meter
    if args.meter:
        meter = _parse_meter(args.meter)
    if meter is not None:
        durations = {tid: tok.ticks for tid, tok in enumerate(m.alphabet)}
        dfas.append(automata.meter_automaton(durations, meter))
    return automata.intersect_and_build(
        m, length=args.length, dfas=dfas, unary=cset.unary, bias=cset.bias
    )


def _verify_sequence(m, seq, cset, meter):
    lp = model_mod.sequence_logprob(m, seq)
    assert lp > float("-inf"), "zero-probability output"
    ids = m.alphabet.encode(seq)
    for c in cset.unary:
        assert ids[c.position] in c.allowed, f"unary violated at {c.position}"
    if meter is not None:
        sums = []
        acc = 0
        for tok in seq:
            acc += tok.ticks
            sums.append(acc)
        assert acc == meter.total, "meter total missed"
        for cp in meter.checkpoints:
            assert cp in sums, f"checkpoint {cp} missed"
    return lp


def cmd_generate(args):
    m = _load_model(args.model)
    cset = (
        constraints.load_constraint_file(args.constraints, m.alphabet)
        if args.constraints
        else constraints.ConstraintSet()
    )
    seed = _resolve_seed(args)
    meter = _parse_meter(args.meter) if args.meter else cset.meter

    outputs = []
    if args.mode == "alldifferent" or cset.alldifferent:
        if args.length is None:
            raise StylechainError("alldifferent mode needs --length")
        seq = trellis_mod.solve_alldifferent(
            m, args.length, unary=cset.unary, maximize=args.maximize, seed=seed
        )
        lp = model_mod.sequence_logprob(m, seq)
        outputs.append((seq, lp))
        log_partition = None
    else:
        t = _build_generation_trellis(m, args, cset)
        log_partition = t.log_partition
        if args.mode == "argmax":
            seq, lp = t.most_probable()
            outputs.append((seq, lp))
        else:
            for i in range(args.count):
                seq = t.sample((seed, i))
                outputs.append((seq, model_mod.sequence_logprob(m, seq)))

    if args.verify:
        for seq, _ in outputs:
            _verify_sequence(m, seq, cset, meter)

    if args.json:
        payload = {
            "seed": seed,
            "log_partition": log_partition,
            "sequences": [
                {"tokens": [str(t_) for t_ in seq], "logprob": lp}
                for seq, lp in outputs
            ],
        }
        print(json.dumps(payload, indent=2))
    else:
        for seq, _ in outputs:
            print(seq)
    return EXIT_OK


def cmd_continue(args):
    m = _load_model(args.model)
    line = sys.stdin.readline().strip()
    tokens = [parse_token(w) for w in line.split()]
    if args.learn_input:
        if not args.corpus:
            raise StylechainError("--learn-input needs --corpus to retrain")
        with open(args.corpus, encoding="utf-8") as fh:
            text = fh.read()
        corpus = parse_corpus(text.rstrip("\n") + "\n" + line + "\n")
        m = model_mod.estimate(corpus, m.order)
    seed = _resolve_seed(args)
    out = continuator.respond(
        m, tokens, args.mode, length=args.length, seed=seed, strict=args.strict
    )
    print(out)
    return EXIT_OK


def cmd_harmonize(args):
    with open(args.melody, encoding="utf-8") as fh:
        sheet = LeadSheet.from_json(fh.read())
    corpus = _load_corpus(args.chord_corpus)
    m = model_mod.estimate(corpus, args.order)
    pair_bias = (
        harmonizer.sadness_bias_table(args.sadness_bias)
        if args.sadness_bias is not None
        else None
    )
    spec = harmonizer.HarmonizationSpec(
        slots_per_bar=args.slots_per_bar, pair_bias=pair_bias
    )
    seed = _resolve_seed(args)
    out = harmonizer.harmonize(m, sheet, spec, seed)
    print(out.to_json())
    return EXIT_OK


def cmd_palindromes(args):
    m = _load_model(args.model)
    result = generators.palindromes(m, args.length, cap=args.cap)
    for seq in result.sequences:
        print(seq)
    if result.truncated:
        print(f"# truncated at {args.cap}", file=sys.stderr)
    return EXIT_OK


def cmd_voss(args):
    lo, hi = (int(x) for x in args.faces.split(","))
    cfg = generators.VossConfig(k=args.k, steps=args.steps, faces=(lo, hi))
    seed = _resolve_seed(args)
    values = generators.voss_sequence(cfg, seed)
    if args.spectrum:
        freqs, power = generators.periodogram(values)
        print("frequency,power")
        for f, p in zip(freqs, power):
            print(f"{f},{p}")
    else:
        for v in values:
            print(v)
    return EXIT_OK


def cmd_inspect(args):
    m = _load_model(args.model)
    print(f"order {m.order}")
    print(f"alphabet size {len(m.alphabet)}")
    for tid, tok in enumerate(m.alphabet):
        print(f"  {tid}: {tok}")
    print(f"contexts {len(m.transition_counts)}")
    print(f"terminal tokens {sorted(str(m.alphabet[t]) for t in m.terminal)}")
    return EXIT_OK


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    app = create_app(args.corpus_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="stylechain")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="estimate a Markov model from a corpus")
    t.add_argument("corpus")
    t.add_argument("-o", "--output", required=True)
    t.add_argument("--order", type=int, default=1)
    t.set_defaults(fn=cmd_train)

    g = sub.add_parser("generate", help="constrained generation from a model")
    g.add_argument("-m", "--model", required=True)
    g.add_argument("--length", type=int)
    g.add_argument("--constraints", help="constraint-set JSON file")
    g.add_argument("--max-order", type=int, dest="max_order")
    g.add_argument("--corpus", help="training corpus (needed for --max-order)")
    g.add_argument("--meter", help="TOTAL[,checkpoint...]")
    g.add_argument("--mode", choices=["sample", "argmax", "alldifferent"],
                   default="sample")
    g.add_argument("--maximize", action="store_true",
                   help="with alldifferent: most probable solution")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int)
    g.add_argument("--json", action="store_true")
    g.add_argument("--verify", action="store_true")
    g.set_defaults(fn=cmd_generate)

    c = sub.add_parser("continue", help="respond to a phrase on stdin")
    c.add_argument("-m", "--model", required=True)
    c.add_argument("--mode", choices=list(continuator.MODES), default="continuation")
    c.add_argument("--length", type=int)
    c.add_argument("--seed", type=int)
    c.add_argument("--strict", action="store_true")
    c.add_argument("--learn-input", action="store_true", dest="learn_input")
    c.add_argument("--corpus")
    c.set_defaults(fn=cmd_continue)

    h = sub.add_parser("harmonize", help="chord track for a melody lead sheet")
    h.add_argument("--melody", required=True, help="LeadSheet JSON file")
    h.add_argument("--chord-corpus", required=True, dest="chord_corpus")
    h.add_argument("--slots-per-bar", type=int, default=2, dest="slots_per_bar")
    h.add_argument("--order", type=int, default=1)
    h.add_argument("--sadness-bias", type=float, dest="sadness_bias")
    h.add_argument("--seed", type=int)
    h.set_defaults(fn=cmd_harmonize)

    pa = sub.add_parser("palindromes", help="enumerate Markov palindromes")
    pa.add_argument("-m", "--model", required=True)
    pa.add_argument("--length", type=int, required=True)
    pa.add_argument("--cap", type=int, default=generators.DEFAULT_PALINDROME_CAP)
    pa.set_defaults(fn=cmd_palindromes)

    v = sub.add_parser("voss", help="1/f dice sequence")
    v.add_argument("--k", type=int, default=8)
    v.add_argument("--steps", type=int, default=4096)
    v.add_argument("--faces", default="0,5")
    v.add_argument("--seed", type=int)
    v.add_argument("--spectrum", action="store_true")
    v.set_defaults(fn=cmd_voss)

    i = sub.add_parser("inspect", help="print a model summary")
    i.add_argument("-m", "--model", required=True)
    i.set_defaults(fn=cmd_inspect)

    s = sub.add_parser("serve", help="run the inpainting HTTP service")
    s.add_argument("--port", type=int, default=8000)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--corpus-dir", required=True, dest="corpus_dir")
    s.set_defaults(fn=cmd_serve)

    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except Infeasible as exc:
        family = f" [{exc.family}]" if exc.family else ""
        print(f"infeasible{family}: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except UnreachableTotal as exc:
        print(f"infeasible [meter]: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (StylechainError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
