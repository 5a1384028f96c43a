"""Command-line front end.

Exit codes: 0 bisimilar (or success), 1 not bisimilar, 2 input error,
3 the two engines disagree.
"""

from __future__ import annotations

import argparse
import gc
import json
import random
import sys
import time
from typing import Sequence

from .bisim import BisimOracle, prime_factors
from .generate import bench_pair
from .normalizer import NodeTable, dump, from_tree, nf, nf_equal, node_count, to_tree, tree_size
from .parser import ParseError, parse_context, parse_many, print_term
from .semantics import Tau, canonicalize, transitions
from .syntax import SortError, Term

EXIT_EQUAL, EXIT_DIFFERENT, EXIT_ERROR, EXIT_DISAGREE = 0, 1, 2, 3


class _Failure(Exception):
    pass


def _emit(args, report: dict, text: str) -> None:
    if args.json:
        print(json.dumps(report, sort_keys=True))
    else:
        print(text)


def _terms(args, texts: list[str]) -> list[Term]:
    try:
        ctx = parse_context(args.free)
    except ValueError as e:
        raise _Failure(f"--free: {e}") from e
    try:
        return parse_many(texts, ctx)
    except ParseError as e:
        raise _Failure(f"parse error {e}") from e
    except SortError as e:
        raise _Failure(f"sort error: {e}") from e


def _verdicts(p: Term, q: Term, mode: str, oracle: BisimOracle) -> dict:
    out: dict = {}
    if mode in ("fast", "both"):
        table = NodeTable()
        start = time.perf_counter()
        verdict = nf_equal(p, q, table)
        np_, nq = verdict.witness
        out["fast"] = verdict.equal
        out["fast_ms"] = (time.perf_counter() - start) * 1e3
        out["nodes"] = node_count(np_, nq)
        out["nf"] = [print_term(from_tree(np_)), print_term(from_tree(nq))]
    if mode in ("oracle", "both"):
        start = time.perf_counter()
        verdict = oracle.check(p, q)
        out["oracle"] = verdict.equal
        out["oracle_ms"] = (time.perf_counter() - start) * 1e3
        if not verdict.equal:
            out["distinguisher"] = str(verdict.witness)
    return out


def _exit_for(v: dict) -> int:
    answers = {v[k] for k in ("fast", "oracle") if k in v}
    if len(answers) > 1:
        return EXIT_DISAGREE
    return EXIT_EQUAL if answers.pop() else EXIT_DIFFERENT


def cmd_check(args, mode: str | None = None) -> int:
    mode = mode or args.mode
    oracle = BisimOracle()
    if args.batch:
        return _batch(args, mode, oracle)
    if args.p is None or args.q is None:
        raise _Failure("check needs two terms (or --batch FILE)")
    p, q = _terms(args, [args.p, args.q])
    v = _verdicts(p, q, mode, oracle)
    code = _exit_for(v)
    report = {"command": "check", "mode": mode, "terms": [args.p, args.q], **v, "exit": code}
    word = {0: "bisimilar", 1: "not bisimilar", 3: "DISAGREEMENT"}[code]
    lines = [word]
    if "nf" in v:
        lines.append(f"  nf: {v['nf'][0]}  vs  {v['nf'][1]}")
    if "distinguisher" in v:
        lines.append(f"  distinguisher: {v['distinguisher']}")
    _emit(args, report, "\n".join(lines))
    return code


def _batch(args, mode: str, oracle: BisimOracle) -> int:
    stream = sys.stdin if args.batch == "-" else open(args.batch, encoding="utf-8")
    worst = EXIT_EQUAL
    with stream:
        for lineno, line in enumerate(stream, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            left, sep, right = line.partition(";;")
            try:
                if not sep:
                    raise _Failure("expected 'P ;; Q'")
                p, q = _terms(args, [left.strip(), right.strip()])
                v = _verdicts(p, q, mode, oracle)
                code = _exit_for(v)
            except _Failure as e:
                print(f"line {lineno}: {e}", file=sys.stderr)
                code, v = EXIT_ERROR, {"error": str(e)}
            word = {0: "bisimilar", 1: "not-bisimilar", 2: "error", 3: "DISAGREEMENT"}[code]
            _emit(args, {"line": lineno, **v, "exit": code}, f"{lineno}\t{word}")
            worst = max(worst, code)
    return worst


def cmd_nf(args) -> int:
    (t,) = _terms(args, [args.p])
    table = NodeTable()
    start = time.perf_counter()
    root = nf(t, table)
    ms = (time.perf_counter() - start) * 1e3
    text = print_term(from_tree(root))
    report = {"command": "nf", "term": args.p, "nf": text, "time_ms": ms, "nodes": node_count(root)}
    lines = [text]
    if args.dump_tree:
        report["tree"] = dump(root)
        lines += report["tree"]
    _emit(args, report, "\n".join(lines))
    return EXIT_EQUAL


def _trace(t: Term, steps: int, tau_only: bool) -> list[dict]:
    if steps == 0:
        return []
    out = []
    for action, target in transitions(canonicalize(t)):
        if tau_only and not isinstance(action, Tau):
            continue
        out.append({
            "action": str(action),
            "target": print_term(target),
            "next": _trace(target, steps - 1, tau_only),
        })
    return out


def _trace_lines(tree: list[dict], indent: int = 0) -> list[str]:
    lines = []
    for node in tree:
        lines.append(f"{'  ' * indent}--{node['action']}--> {node['target']}")
        lines += _trace_lines(node["next"], indent + 1)
    return lines


def cmd_trace(args) -> int:
    (t,) = _terms(args, [args.p])
    tree = _trace(t, args.max_steps, args.tau)
    report = {"command": "trace", "term": args.p, "max_steps": args.max_steps, "trace": tree}
    lines = [print_term(canonicalize(t).term())] + (_trace_lines(tree) or ["  (no transitions)"])
    _emit(args, report, "\n".join(lines))
    return EXIT_EQUAL


def cmd_primes(args) -> int:
    (t,) = _terms(args, [args.p])
    factors = [print_term(f) for f in prime_factors(t)]
    _emit(args, {"command": "primes", "term": args.p, "primes": factors}, "\n".join(factors) or "(none)")
    return EXIT_EQUAL


def cmd_selftest(args) -> int:
    """Differential run of both engines on the exhaustive small-term corpus
    plus random pairs; any disagreement exits with code 3."""
    start = time.perf_counter()
    from .selftest import differential

    result = differential(max_nodes=args.max_nodes, seed=args.seed, random_pairs=args.random, cross_samples=args.samples)
    result["time_ms"] = (time.perf_counter() - start) * 1e3
    text = (
        f"terms={result['terms']} classes={result['classes']} "
        f"oracle_calls={result['oracle_calls']} disagreements={len(result['disagreements'])}"
    )
    for d in result["disagreements"][:20]:
        text += f"\n  {d}"
    _emit(args, {"command": "selftest", **result}, text)
    return EXIT_DISAGREE if result["disagreements"] else EXIT_EQUAL


def cmd_bench(args) -> int:
    rng = random.Random(args.seed)
    pairs = [bench_pair(n, rng) for n in args.sizes]
    best = [float("inf")] * len(pairs)
    results: list = [None] * len(pairs)
    # repetitions go round-robin over the sizes, so a burst of machine noise
    # cannot land on a single size only; the minimum is kept
    for _ in range(args.repeat):
        for i, (p, q) in enumerate(pairs):
            table = NodeTable()
            gc.collect()
            start = time.perf_counter()
            verdict = nf_equal(p, q, table)
            best[i] = min(best[i], time.perf_counter() - start)
            results[i] = verdict
    rows = []
    for (p, _), t, verdict in zip(pairs, best, results):
        rows.append({
            "n": tree_size(to_tree(p, NodeTable())),
            "time_ms": t * 1e3,
            "nodes": node_count(*verdict.witness),
            "verdict_count": int(verdict.equal),
        })
    if args.json:
        print(json.dumps({"command": "bench", "rows": rows}, sort_keys=True))
    else:
        print("n,time_ms,nodes,verdict_count")
        for r in rows:
            print(f"{r['n']},{r['time_ms']:.3f},{r['nodes']},{r['verdict_count']}")
    return EXIT_EQUAL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="one JSON report per result")
    common.add_argument("--free", default="", help='declared free identifiers, e.g. "X:proc,F:proc->proc,y:name"')

    ap = argparse.ArgumentParser(prog="hobisim", description=__doc__.splitlines()[0], parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="decide bisimilarity of two terms")
    c.add_argument("p", nargs="?")
    c.add_argument("q", nargs="?")
    c.add_argument("--mode", choices=("fast", "oracle", "both"), default="fast")
    c.add_argument("--batch", metavar="FILE", help="lines of 'P ;; Q' ('-' for stdin)")

    o = sub.add_parser("oracle", parents=[common], help="check with the reference oracle only")
    o.add_argument("p", nargs="?")
    o.add_argument("q", nargs="?")
    o.add_argument("--batch", metavar="FILE")

    n = sub.add_parser("nf", parents=[common], help="print the normal form")
    n.add_argument("p")
    n.add_argument("--dump-tree", action="store_true", help="also print the interned tree")

    t = sub.add_parser("trace", parents=[common], help="print the transition tree")
    t.add_argument("p")
    t.add_argument("--max-steps", type=int, default=3)
    t.add_argument("--tau", action="store_true", help="follow internal steps only")

    pr = sub.add_parser("primes", parents=[common], help="prime decomposition")
    pr.add_argument("p")

    s = sub.add_parser("selftest", parents=[common], help="differential run of both engines")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-nodes", type=int, default=4)
    s.add_argument("--random", type=int, default=200, help="random terms paired with bisimilar variants")
    s.add_argument("--samples", type=int, default=2000, help="oracle spot checks across normal-form classes")

    b = sub.add_parser("bench", parents=[common], help="normalization scaling run, CSV on stdout")
    b.add_argument("--sizes", type=lambda s: [int(x) for x in s.split(",")], default=[1000, 10000, 100000])
    b.add_argument("--repeat", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "check": cmd_check,
        "oracle": lambda a: cmd_check(a, "oracle"),
        "nf": cmd_nf,
        "trace": cmd_trace,
        "primes": cmd_primes,
        "selftest": cmd_selftest,
        "bench": cmd_bench,
    }
    if args.command == "oracle":
        args.mode = "oracle"
    try:
        return handlers[args.command](args)
    except _Failure as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
