"""Command-line front end.

Subcommands: check (acyclicity verdict), decompose (normalized form,
binary decomposition, join tree, concatenation trees), eval (model
checking), enum (answer enumeration), convert (spanner compilation), and
bench (growth measurements). All outputs except bench timings are
deterministic. Exit codes: 2 for parse/contract errors, 3 for an
exhausted oracle budget, and for `eval` 0/1 as true/false.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from wordcq.errors import BudgetError, ContractError, ParseError
from wordcq.evaluate import enumerate_answers, model_check
from wordcq.kernel import BACKEND
from wordcq.oracle import DEFAULT_BUDGET, oracle_eval
from wordcq.parser import parse_query, query_to_text
from wordcq.patterns import concat_tree, concat_tree_dot, pattern_acyclic
from wordcq.querydecomp import analyze_query, join_tree_dot, prefactor
from wordcq.spanners import (
    is_pseudo_acyclic,
    parse_spanner_query,
    pseudo_acyclic_query,
    sercq_to_fccq,
)

def _load_word(args) -> str:
    if args.word is not None:
        return args.word
    if args.word_file:
        with open(args.word_file, encoding="utf-8") as fh:
            return fh.read().rstrip("\n")
    raise ParseError("a word is required: pass -w or --word-file")


def _analyze(args):
    query = parse_query(args.query)
    if args.prefactor:
        from wordcq.normalize import normalize

        query = prefactor(normalize(query).query)
    return analyze_query(query)


def cmd_check(args) -> int:
    res = _analyze(args)
    if res.acyclic:
        print("acyclic")
    else:
        fired = res.report.fired()
        if fired:
            reason = ", ".join(f"condition {k}" for k in fired)
        else:
            reason = "no constrained atom decomposition"
        print(f"cyclic ({reason})")
    return 0


def cmd_decompose(args) -> int:
    res = _analyze(args)
    if args.emit == "normalized":
        print(query_to_text(res.normalized.query))
        return 0
    if not res.acyclic:
        fired = ", ".join(f"condition {k}" for k in res.report.fired()) or (
            "no constrained atom decomposition"
        )
        print(f"cyclic ({fired})", file=sys.stderr)
        return 2
    qd = res.decomposition
    if args.emit == "decomposition":
        if args.format == "json":
            payload = {
                "query": query_to_text(qd.query2),
                "atoms": [
                    {"lhs": a.lhs, "rhs": list(a.rhs), "block": qd.tree.block_of[i]}
                    for i, a in enumerate(qd.tree.atoms)
                ],
            }
            print(json.dumps(payload, indent=2))
        else:
            print(query_to_text(qd.query2))
    elif args.emit == "join-tree":
        print(join_tree_dot(qd.tree))
    elif args.emit == "concat-tree":
        for i, d in enumerate(qd.per_atom):
            print(concat_tree_dot(concat_tree(d), name=f"atom{i}"))
    return 0


def cmd_eval(args) -> int:
    query = parse_query(args.query)
    word = _load_word(args)
    res = analyze_query(query)
    if res.acyclic:
        ok = model_check(res.decomposition, word)
    else:
        ok = bool(oracle_eval(query, word, args.budget))
    print("true" if ok else "false")
    return 0 if ok else 1


def cmd_enum(args) -> int:
    query = parse_query(args.query)
    word = _load_word(args)
    res = analyze_query(query)
    if res.acyclic:
        answers = list(enumerate_answers(res.decomposition, word))
    else:
        answers = sorted(oracle_eval(query, word, args.budget))
    if args.limit is not None:
        answers = answers[: args.limit]
    if args.format == "json":
        print(json.dumps([list(t) for t in answers]))
    else:
        for t in answers:
            print("\t".join(f'"{v}"' for v in t))
    return 0


def cmd_convert(args) -> int:
    spanner = parse_spanner_query(args.sercq)
    if args.pseudo:
        if not is_pseudo_acyclic(spanner):
            raise ContractError("spanner query is not pseudo-acyclic")
        print(query_to_text(pseudo_acyclic_query(spanner)))
    else:
        print(query_to_text(sercq_to_fccq(spanner)))
    return 0


def _loglog_slope(points: list[tuple[int, float]]) -> float:
    import math

    xs = [math.log(n) for n, t in points if t > 0]
    ys = [math.log(t) for _n, t in points if t > 0]
    if len(xs) < 2:
        return 0.0
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    denom = sum((x - mx) ** 2 for x in xs)
    if denom == 0:
        return 0.0
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / denom


def cmd_bench(args) -> int:
    rows: list[tuple[str, int, float]] = []

    acyc_points = []
    for n in (4, 8, 16, 32, 64):
        if n > args.max_pattern:
            break
        alpha = ("x1", "x2") * n
        t0 = time.perf_counter()
        tree = pattern_acyclic(alpha)
        dt = time.perf_counter() - t0
        assert tree is not None
        rows.append(("pattern-acyclic", 2 * n, dt))
        acyc_points.append((2 * n, dt))

    enum_points = []
    query = parse_query("Ans(x,y) :- U = x.y")
    res = analyze_query(query)
    for n in (32, 64, 128, 256, 512):
        if n > args.max_word:
            break
        word = "a" * n
        t0 = time.perf_counter()
        stream = enumerate_answers(res.decomposition, word)
        last = time.perf_counter()
        max_delay = 0.0
        count = 0
        for _answer in stream:
            now = time.perf_counter()
            max_delay = max(max_delay, now - last)
            last = now
            count += 1
        rows.append(("enum-total", n, time.perf_counter() - t0))
        rows.append(("enum-delay", n, max_delay))
        enum_points.append((n, max_delay))

    backends = [("pure", "wordcq.kernel.pure")]
    if BACKEND == "native":
        backends.append(("native", "wordcq.kernel._native"))
    import importlib

    for name, module in backends:
        kernel_mod = importlib.import_module(module)
        for n in (1024, 4096, 16384):
            if n > args.max_index:
                break
            codes = [(i * 1103515245 + 12345) % 4 for i in range(n)]
            t0 = time.perf_counter()
            kernel = kernel_mod.SuffixKernel(codes)
            rows.append((f"index-build[{name}]", n, time.perf_counter() - t0))
            t0 = time.perf_counter()
            acc = 0
            for i in range(0, n - 1):
                acc += kernel.suffix_lcp(i, (i * 7 + 1) % n)
            rows.append((f"lcp-queries[{name}]", n, time.perf_counter() - t0))

    out = sys.stdout if args.out in (None, "-") else open(args.out, "w")
    try:
        print("check,n,seconds", file=out)
        for kind, n, dt in rows:
            print(f"{kind},{n},{dt:.6f}", file=out)
    finally:
        if out is not sys.stdout:
            out.close()

    slope = _loglog_slope(acyc_points)
    if slope > 8:
        print(f"warning: pattern-acyclic growth slope {slope:.2f} > 8", file=sys.stderr)
    slope = _loglog_slope(enum_points)
    if slope > 4:
        print(f"warning: enumeration delay slope {slope:.2f} > 4", file=sys.stderr)
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="wordcq",
        description="Conjunctive queries over word equations: acyclicity, "
        "decomposition, evaluation, and spanner compilation.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def add_query_opts(p, word=False):
        p.add_argument("-q", "--query", required=True, help="query text")
        p.add_argument("--prefactor", action="store_true",
                       help="pre-factor shared subpatterns before the analysis")
        if word:
            p.add_argument("-w", "--word", help="input word")
            p.add_argument("--word-file", help="read the input word from a file")
            p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                           help="search budget for the oracle fallback")

    p = sub.add_parser("check", help="decide acyclicity")
    add_query_opts(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("decompose", help="emit normalized/decomposed forms")
    add_query_opts(p)
    p.add_argument("--emit", default="decomposition",
                   choices=["normalized", "decomposition", "join-tree", "concat-tree"])
    p.add_argument("--format", default="text", choices=["text", "json", "dot"])
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("eval", help="model check a query on a word")
    add_query_opts(p, word=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("enum", help="enumerate answers on a word")
    add_query_opts(p, word=True)
    p.add_argument("--limit", type=int, help="truncate the answer stream")
    p.add_argument("--format", default="text", choices=["text", "json"])
    p.set_defaults(func=cmd_enum)

    p = sub.add_parser("convert", help="compile a spanner query")
    p.add_argument("-s", "--sercq", required=True, help="spanner query text")
    p.add_argument("--pseudo", action="store_true",
                   help="use the direct pseudo-acyclic construction")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("bench", help="growth measurements as CSV")
    p.add_argument("--out", help="CSV destination (default stdout)")
    p.add_argument("--max-pattern", type=int, default=64)
    p.add_argument("--max-word", type=int, default=512)
    p.add_argument("--max-index", type=int, default=16384)
    p.set_defaults(func=cmd_bench)
    return top


def main(argv=None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ParseError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
