"""Command line interface: ``scfo verify|table|simulate|dist|search|classify``.

Exit codes: 0 success, 1 verification or search failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path

from .core import BooleanFunction, StructuralError, format_assignment, instantiate, open_distribution, parse_assignment
from .dsl import DslError, format_template, function_spec, parse_document, serialize_protocol
from .engine import ProtocolError, render_table, run, verify
from .fixtures import FUNCTIONS, lookup_protocol
from .search import COMMITTED, FREE, SearchBudgetError, SearchConfig, classify, search


class UsageError(Exception):
    pass


def resolve_function(spec: str, n: int | None = None) -> BooleanFunction:
    if spec in FUNCTIONS:
        f = FUNCTIONS[spec]
        if n is not None and f.n != n:
            raise UsageError(f"function {spec} takes {f.n} variables, expected {n}")
        return f
    digits = spec[2:] if spec.lower().startswith("0x") else spec
    if n is None:
        # one hex digit per four rows
        n = {1: 2, 2: 3, 4: 4, 8: 5}.get(len(digits))
        if n is None:
            raise UsageError(f"cannot infer the variable count of {spec!r}; pass --vars")
    try:
        return BooleanFunction.from_hex(n, spec)
    except StructuralError as exc:
        raise UsageError(str(exc)) from None


def load_protocol(target: str, function: str | None):
    """A ``.scfo`` path or a built-in name, plus the function to check against."""
    if os.path.exists(target):
        text = Path(target).read_text(encoding="utf-8")
        try:
            doc = parse_document(text)
        except DslError as exc:
            raise UsageError(f"{target}:{exc}") from None
        p, f = doc.protocol, doc.function
    else:
        found = lookup_protocol(target)
        if found is None:
            raise UsageError(f"no such file or built-in protocol: {target}")
        p, f = found
    if function is not None:
        f = resolve_function(function, p.n)
    return p, f


def require_function(f):
    if f is None:
        raise UsageError("no function given: add a 'function' line or pass --function")
    return f


def kv(**fields) -> str:
    return " ".join(f"{k}={v}" for k, v in fields.items())


def cmd_verify(args) -> int:
    p, f = load_protocol(args.file, args.function)
    f = require_function(f)
    report = verify(p, f)
    yes = {True: "yes", False: "no"}
    if args.porcelain:
        print(kv(protocol=p.name, function=function_spec(f), cards=p.m, constants=report.constants))
        for nk, bit in p.rule.entries:
            print(kv(rule=bit, necklace=nk))
        for r in report.rows:
            decoded = "none" if r.decoded is None else r.decoded
            print("row " + kv(assignment=format_assignment(r.assignment), expected=r.expected,
                              word=r.word, necklace=r.necklace, decoded=decoded))
        for reason in report.failure_reasons:
            print(f"failure reason={reason!r}")
        print("result " + kv(correct=str(report.correct).lower(), secure=str(report.secure).lower()))
    else:
        print(f"protocol: {p.name}")
        print(f"function: {function_spec(f)}")
        print(f"cards: {p.m}")
        print(f"constants: {report.constants}")
        for nk, bit in p.rule.entries:
            print(f"class {bit}: {nk}")
        for r in report.rows:
            decoded = "?" if r.decoded is None else r.decoded
            print(f"{format_assignment(r.assignment)} | {r.expected} | {r.word} | {r.necklace} | {decoded}")
        for reason in report.failure_reasons:
            print(f"failure: {reason}")
        print(f"correct: {yes[report.correct]}")
        print(f"secure: {yes[report.secure]}")
    return 0 if report.ok else 1


def cmd_table(args) -> int:
    p, f = load_protocol(args.target, args.function)
    f = require_function(f)
    for row in render_table(p, f):
        if args.porcelain:
            bits, out, word = row.split(" | ")
            print(kv(assignment=bits, output=out, word=word))
        else:
            print(row)
    return 0


def _assignment(text: str, n: int):
    try:
        a = parse_assignment(text)
    except StructuralError as exc:
        raise UsageError(str(exc)) from None
    if len(a) != n:
        raise UsageError(f"--input needs {n} bits, got {len(a)}")
    return a


def cmd_simulate(args) -> int:
    p, _ = load_protocol(args.target, None)
    a = _assignment(args.input, p.n)
    if args.seed is not None and not 0 <= args.seed < 2**64:
        raise UsageError("--seed must fit in 64 unsigned bits")
    rng = random.Random(args.seed)
    try:
        trace = run(p, a, rng)
    except ProtocolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    fields = [("protocol", p.name), ("assignment", format_assignment(a))]
    if args.reveal:
        fields += [("hidden", str(trace.hidden_word)), ("shift", str(trace.shift))]
    fields += [("opened", str(trace.opened_word)), ("output", str(trace.decoded))]
    if args.porcelain:
        print(kv(**dict(fields)))
    else:
        for k, v in fields:
            print(f"{k}: {v}")
    return 0


def cmd_dist(args) -> int:
    p, _ = load_protocol(args.target, None)
    a = _assignment(args.input, p.n)
    dist = open_distribution(instantiate(p.template, a))
    if args.porcelain:
        print(kv(protocol=p.name, assignment=format_assignment(a), support=len(dist)))
        for w, prob in dist:
            print(kv(word=w, probability=prob))
    else:
        print(f"protocol: {p.name}")
        print(f"assignment: {format_assignment(a)}")
        for w, prob in dist:
            print(f"{w} {prob}")
    return 0


def _config(args, m: int) -> SearchConfig:
    try:
        return SearchConfig(
            m=m,
            deck_mode=args.deck,
            max_pair_multiplicity=args.max_pairs,
            allow_constants=args.constants > 0,
            constant_budget=args.constants,
            dedup_color=args.dedup_color,
            limit=getattr(args, "limit", None),
        )
    except StructuralError as exc:
        raise UsageError(str(exc)) from None


def cmd_search(args) -> int:
    f = resolve_function(args.function, args.vars)
    cfg = _config(args, args.cards)
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    result = search(f, cfg, jobs=args.jobs)
    print(f"search took {result.wall_time:.3f}s", file=sys.stderr)
    if not result.complete:
        print("warning: node budget exhausted, results are partial", file=sys.stderr)
    if args.porcelain:
        for p in result.protocols:
            classes = {f"class{bit}": nk for nk, bit in p.rule.entries}
            print(kv(protocol=p.name, template=format_template(p.template).replace(" ", ","), **classes))
        print("stats " + kv(function=function_spec(f), cards=cfg.m, deck=cfg.deck_mode,
                             found=len(result.protocols), examined=result.examined,
                             pruned=result.pruned, status=result.status))
    else:
        for p in result.protocols:
            print(serialize_protocol(p, f))
        print(f"# function: {function_spec(f)}")
        print(f"# cards: {cfg.m}")
        print(f"# deck: {cfg.deck_mode}")
        print(f"# found: {len(result.protocols)}")
        print(f"# templates examined: {result.examined}")
        print(f"# templates pruned: {result.pruned}")
        print(f"# status: {result.status}")
    return 0 if result.protocols else 1


def cmd_classify(args) -> int:
    cfg = _config(args, args.max_cards)
    try:
        report = classify(args.vars, args.max_cards, cfg, reduce_np=args.np)
    except SearchBudgetError as exc:
        raise UsageError(str(exc)) from None
    Path(args.out).write_text("\n".join(report.lines()) + "\n", encoding="utf-8")
    feasible = sum(r.witness is not None for r in report.records)
    status = "complete" if report.complete else "partial"
    if args.porcelain:
        print(kv(functions=len(report.records), feasible=feasible,
                 infeasible=len(report.records) - feasible, status=status, out=args.out))
    else:
        print(f"functions: {len(report.records)}")
        print(f"feasible: {feasible}")
        print(f"infeasible: {len(report.records) - feasible}")
        print(f"status: {status}")
        print(f"report: {args.out}")
    return 0 if report.complete else 1


def _deck_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--deck", choices=[COMMITTED, FREE], default=COMMITTED)
    sp.add_argument("--max-pairs", type=int, default=None, metavar="K")
    sp.add_argument("--constants", type=int, default=0, metavar="C")
    sp.add_argument("--dedup-color", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scfo", description="Single-cut full-open card protocols.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", help="check correctness and security of a protocol")
    sp.add_argument("file")
    sp.add_argument("--function")
    sp.set_defaults(handler=cmd_verify)

    sp = sub.add_parser("table", help="print the input/output/word table")
    sp.add_argument("target")
    sp.add_argument("--function")
    sp.set_defaults(handler=cmd_table)

    sp = sub.add_parser("simulate", help="run the protocol once")
    sp.add_argument("target")
    sp.add_argument("--input", required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--reveal", action="store_true", help="also print the hidden row and the shift")
    sp.set_defaults(handler=cmd_simulate)

    sp = sub.add_parser("dist", help="exact distribution of the opened row")
    sp.add_argument("target")
    sp.add_argument("--input", required=True)
    sp.set_defaults(handler=cmd_dist)

    sp = sub.add_parser("search", help="find all protocols for a function")
    sp.add_argument("--function", required=True)
    sp.add_argument("--vars", type=int, default=None, help="variable count for hex tables")
    sp.add_argument("--cards", type=int, required=True)
    _deck_flags(sp)
    sp.add_argument("--limit", type=int, default=None)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(handler=cmd_search)

    sp = sub.add_parser("classify", help="least card count for every n-variable function")
    sp.add_argument("--vars", type=int, required=True)
    sp.add_argument("--max-cards", type=int, required=True)
    _deck_flags(sp)
    sp.add_argument("--np", action="store_true", help="one function per input permutation/negation class")
    sp.add_argument("--out", required=True)
    sp.set_defaults(handler=cmd_classify)

    for p in sub.choices.values():
        p.add_argument("--porcelain", action="store_true", help="key=value output for scripts")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
