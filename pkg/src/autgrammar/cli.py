"""Command-line surface: build/transform grammars, inspect them, emit LP
files, and cross-check everything against the brute-force oracle.

Exit codes: 0 success, 1 validation mismatch, 2 usage error, 3 precondition
violation.  Every failure prints a single machine-parsable line on stderr.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import annotate, decomp, grammar as gmod, oracle, polytope
from .graph import DisconnectedGraphError, GraphError, parse_graph
from .perm import (
    PermError,
    format_permutation,
    format_word,
    parse_permutation,
    parse_word,
    permute_word,
    to_string_word,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # one-line reason, stable exit code
        raise _UsageError(message)


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="ascii") as fh:
            return fh.read()
    except OSError as e:
        raise _UsageError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def _load_graph(path: str):
    try:
        return parse_graph(_read(path))
    except GraphError as e:
        raise _UsageError(f"bad graph file {path}: {e}") from None


def _load_grammar(path: str):
    try:
        return gmod.grammar_from_json(_read(path))
    except gmod.GrammarError as e:
        raise _UsageError(f"bad grammar file {path}: {e}") from None


def _build_parser() -> _Parser:
    p = _Parser(prog="autgrammar")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="compile the automorphism grammar of a graph")
    b.add_argument("--graph", required=True)
    b.add_argument("--td", help="PACE .td file to use instead of constructing one")
    b.add_argument("--strategy", choices=["min-fill", "exact-small"], default="min-fill")
    b.add_argument("--path", action="store_true", help="regular grammar via a path decomposition")
    b.add_argument("--out", required=True)

    e = sub.add_parser("embed", help="grammar for the group embedded on the first vertices")
    e.add_argument("--graph", required=True)
    e.add_argument("--keep", type=int, required=True)
    e.add_argument("--beta", help="coset representative, one-line image form")
    e.add_argument("--unchecked", action="store_true", help="skip the invariance oracle check")
    e.add_argument("--out", required=True)

    s = sub.add_parser("stats", help="rule/variable counts, size, regularity")
    s.add_argument("grammar")

    en = sub.add_parser("enum", help="enumerate the language")
    en.add_argument("grammar")
    en.add_argument("--cap", type=int, default=1000000)

    c = sub.add_parser("count", help="number of accepting parse trees")
    c.add_argument("grammar")

    m = sub.add_parser("member", help="decide membership of a word")
    m.add_argument("grammar")
    m.add_argument("--word", required=True)

    lf = sub.add_parser("lift", help="emit the extended formulation as a CPLEX LP file")
    lf.add_argument("grammar")
    lf.add_argument("--out", required=True)
    lf.add_argument("--matrix", action="store_true", help="0/1 assignment-matrix projection")

    ck = sub.add_parser("check", help="feasibility of a fixed projection point")
    ck.add_argument("model")
    ck.add_argument("--point", required=True)

    v = sub.add_parser("validate", help="full oracle cross-check for a graph")
    v.add_argument("--graph", required=True)
    v.add_argument("--strategy", choices=["min-fill", "exact-small"], default="min-fill")
    return p


def _cmd_build(args) -> int:
    g = _load_graph(args.graph)
    if args.path:
        if args.td:
            pd = _load_td(args.td)
        else:
            pd = decomp.compute_path_decomposition(g)
        alpha, gr = gmod.build_regular_aut_grammar(g, pd)
    else:
        if args.td:
            t0 = _load_td(args.td)
            report = decomp.validate_tree_decomposition(g, t0)
            if not report.ok:
                raise decomp.DecompositionError(
                    f"decomposition invalid: {report.violations[0].message}"
                )
        else:
            t0 = decomp.compute_tree_decomposition(g, args.strategy)
        t, _ = decomp.make_permutation_yielding(g, t0)
        alpha, gr = gmod.build_aut_grammar(g, t)
    _write(args.out, gmod.grammar_to_json(gr))
    print(format_permutation(alpha))
    return 0


def _load_td(path: str):
    try:
        return decomp.read_pace_td(_read(path))
    except decomp.TdParseError as e:
        raise _UsageError(f"bad td file {path}: {e}") from None


def _cmd_embed(args) -> int:
    g = _load_graph(args.graph)
    beta = None
    if args.beta is not None:
        try:
            beta = parse_permutation(args.beta)
        except PermError as e:
            raise _UsageError(f"bad --beta: {e}") from None
        if beta.size != args.keep:
            raise _UsageError(f"--beta must permute 1..{args.keep}")
    alpha, gr = gmod.build_embedded_group_grammar(
        g, args.keep, beta, check_invariance=not args.unchecked
    )
    _write(args.out, gmod.grammar_to_json(gr))
    print(format_permutation(alpha))
    return 0


def _cmd_stats(args) -> int:
    gr = _load_grammar(args.grammar)
    size = gmod.grammar_size(gr)
    print(f"rules: {len(gr.rules)}")
    print(f"variables: {len(gr.variables)}")
    print(f"size: {size.value!r}")
    print(f"regular: {'true' if gmod.is_regular(gr) else 'false'}")
    return 0


def _cmd_enum(args) -> int:
    gr = _load_grammar(args.grammar)
    result = gmod.enumerate_language(gr, cap=args.cap)
    for w in result.words:
        print(format_word(w))
    if result.truncated:
        print(f"truncated at {args.cap}", file=sys.stderr)
    return 0


def _cmd_count(args) -> int:
    gr = _load_grammar(args.grammar)
    print(gmod.count_parse_trees(gr))
    return 0


def _cmd_member(args) -> int:
    gr = _load_grammar(args.grammar)
    try:
        w = parse_word(args.word)
    except PermError as e:
        raise _UsageError(f"bad --word: {e}") from None
    print("true" if gmod.membership(gr, w) else "false")
    return 0


def _cmd_lift(args) -> int:
    gr = _load_grammar(args.grammar)
    ef = polytope.build_extended_formulation(gr, style="matrix" if args.matrix else "value")
    _write(args.out, polytope.emit_lp(ef))
    return 0


def _cmd_check(args) -> int:
    parsed = polytope.parse_lp(_read(args.model))
    try:
        values = [Fraction(tok) for tok in args.point.split()]
    except (ValueError, ZeroDivisionError):
        raise _UsageError(f"bad --point {args.point!r}") from None
    xs = sorted(
        {v for _, terms, _, _ in parsed.constraints for _, v in terms if v.startswith("x_")},
        key=lambda v: int(v.split("_")[1]),
    )
    if len(values) != len(xs):
        raise _UsageError(f"point has {len(values)} coordinates, model has {len(xs)}")
    point = dict(zip(xs, values))
    feasible = polytope.check_lp_feasibility(parsed, point)
    print("feasible" if feasible else "infeasible")
    return 0


def _cmd_validate(args) -> int:
    g = _load_graph(args.graph)
    auts = oracle.brute_force_automorphisms(g)
    t0 = decomp.compute_tree_decomposition(g, args.strategy)
    t, _ = decomp.make_permutation_yielding(g, t0)
    alpha, gr = gmod.build_aut_grammar(g, t)
    words = gmod.enumerate_language(gr).words
    expected = sorted(permute_word(to_string_word(a), alpha) for a in auts)
    lang_ok = list(words) == expected
    print(f"language: {len(words)} == {len(expected)}" if lang_ok
          else f"language: {len(words)} != {len(expected)}")
    trees = gmod.count_parse_trees(gr)
    trees_ok = trees == len(words)
    print(f"parse_trees: {trees} == {len(words)}" if trees_ok
          else f"parse_trees: {trees} != {len(words)}")
    annotations = annotate.count_assignments(g, t)
    ann_ok = annotations == len(auts)
    print(f"annotations: {annotations} == {len(auts)}" if ann_ok
          else f"annotations: {annotations} != {len(auts)}")
    if lang_ok and trees_ok and ann_ok:
        print("result: ok")
        return 0
    print("result: mismatch")
    return 1


_COMMANDS = {
    "build": _cmd_build,
    "embed": _cmd_embed,
    "stats": _cmd_stats,
    "enum": _cmd_enum,
    "count": _cmd_count,
    "member": _cmd_member,
    "lift": _cmd_lift,
    "check": _cmd_check,
    "validate": _cmd_validate,
}

_PRECONDITION_ERRORS = (
    DisconnectedGraphError,
    decomp.DecompositionError,
    annotate.AnnotationError,
    gmod.GrammarError,
    polytope.PolytopeError,
    oracle.OracleError,
)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except _PRECONDITION_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except GraphError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
