"""Context-free grammars for finite permutation languages.

Terminals are integers 1..sigma_max, variables are interned strings, and a
rule is (lhs, rhs) with the rhs mixing both.  Every grammar this package
constructs is non-recursive (the variable dependency relation is acyclic),
so the language analytics (enumeration, parse-tree counting, membership)
are finite dynamic programs and refuse cyclic inputs.

The central constructor compiles the automorphism group of a connected
graph out of a permutation-yielding tree decomposition: variables are
(position, annotated bag) pairs, rules connect annotations that agree on
their shared domain, and each leaf writes the image of its vertex.  Parse
trees then correspond one-to-one with consistent whole-tree annotations,
hence with automorphisms.  A word w produced for automorphism s satisfies
w_i = s(alpha(i)) where alpha spells the leaf vertex order, so the language
is exactly the string set of the group repositioned by alpha.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

from . import oracle as _oracle
from .annotate import AnnotatedBag, enumerate_annotated_bags
from .decomp import (
    ROOT,
    Pos,
    TreeDecomposition,
    compute_tree_decomposition,
    introduced_order,
    is_permutation_yielding,
    make_permutation_yielding,
    validate_tree_decomposition,
    yield_order_of,
)
from .graph import Graph, require_connected
from .perm import Permutation, Word, identity, inverse


class GrammarError(Exception):
    pass


class CyclicGrammarError(GrammarError):
    pass


@dataclass(frozen=True, eq=False)
class Grammar:
    sigma_max: int
    start: str
    variables: tuple[str, ...]
    rules: tuple
    provenance: dict | None = field(default=None)
    accepts_empty: bool = False

    def __post_init__(self):
        declared = set(self.variables)
        if self.start not in declared:
            raise GrammarError(f"start variable {self.start!r} not declared")
        for lhs, rhs in self.rules:
            if lhs not in declared:
                raise GrammarError(f"rule lhs {lhs!r} not declared")
            for x in rhs:
                if isinstance(x, str):
                    if x not in declared:
                        raise GrammarError(f"rhs variable {x!r} not declared")
                elif not 1 <= x <= self.sigma_max:
                    raise GrammarError(f"terminal {x} outside 1..{self.sigma_max}")

    def __eq__(self, other):
        return (
            isinstance(other, Grammar)
            and self.sigma_max == other.sigma_max
            and self.start == other.start
            and self.variables == other.variables
            and self.rules == other.rules
            and self.accepts_empty == other.accepts_empty
        )

    def rules_of(self, v: str) -> list:
        return [(i, rhs) for i, (lhs, rhs) in enumerate(self.rules) if lhs == v]


def topological_variables(gr: Grammar) -> list[str]:
    """Variables ordered dependencies-first; raises on recursion."""
    deps: dict[str, set[str]] = {v: set() for v in gr.variables}
    for lhs, rhs in gr.rules:
        deps[lhs].update(x for x in rhs if isinstance(x, str))
    order: list[str] = []
    state: dict[str, int] = {}

    def visit(v: str) -> None:
        if state.get(v) == 2:
            return
        if state.get(v) == 1:
            raise CyclicGrammarError(f"variable {v!r} depends on itself")
        state[v] = 1
        for u in sorted(deps[v]):
            visit(u)
        state[v] = 2
        order.append(v)

    for v in gr.variables:
        visit(v)
    return order


class GrammarSize(NamedTuple):
    value: float
    rule_symbols: int
    symbol_space: int


def grammar_size(gr: Grammar) -> GrammarSize:
    """Sum over rules of (1 + |rhs|) * log2(|alphabet| + |variables|)."""
    rule_symbols = sum(1 + len(rhs) for _, rhs in gr.rules)
    symbol_space = gr.sigma_max + len(gr.variables)
    value = rule_symbols * math.log2(symbol_space) if rule_symbols else 0.0
    return GrammarSize(value, rule_symbols, symbol_space)


def is_regular(gr: Grammar) -> bool:
    """Every rule is (B, a) or (B, a B') with a a terminal."""
    for _, rhs in gr.rules:
        if len(rhs) == 1 and isinstance(rhs[0], int):
            continue
        if (
            len(rhs) == 2
            and isinstance(rhs[0], int)
            and isinstance(rhs[1], str)
        ):
            continue
        return False
    return True


def _rules_by_lhs(gr: Grammar) -> dict[str, list]:
    table: dict[str, list] = {v: [] for v in gr.variables}
    for lhs, rhs in gr.rules:
        table[lhs].append(rhs)
    return table


def _variable_languages(gr: Grammar) -> dict[str, set[tuple[int, ...]]]:
    table = _rules_by_lhs(gr)
    lang: dict[str, set[tuple[int, ...]]] = {}
    for v in topological_variables(gr):
        words: set[tuple[int, ...]] = set()
        for rhs in table[v]:
            partial: set[tuple[int, ...]] = {()}
            for x in rhs:
                if isinstance(x, int):
                    partial = {w + (x,) for w in partial}
                else:
                    partial = {w + u for w in partial for u in lang[x]}
                if not partial:
                    break
            words |= partial
        lang[v] = words
    return lang


class LanguageResult(NamedTuple):
    words: tuple[Word, ...]
    truncated: bool


def enumerate_language(gr: Grammar, cap: int | None = None) -> LanguageResult:
    """All distinct words, lexicographically sorted, truncated at cap."""
    raw = _variable_languages(gr)[gr.start]
    if gr.accepts_empty:
        raw = raw | {()}
    ordered = sorted(raw)
    truncated = cap is not None and len(ordered) > cap
    if truncated:
        ordered = ordered[:cap]
    return LanguageResult(tuple(Word(w) for w in ordered), truncated)


def count_parse_trees(gr: Grammar) -> int:
    """Number of accepting parse trees (duplicate rules count separately)."""
    table = _rules_by_lhs(gr)
    counts: dict[str, int] = {}
    for v in topological_variables(gr):
        total = 0
        for rhs in table[v]:
            prod = 1
            for x in rhs:
                if isinstance(x, str):
                    prod *= counts[x]
                    if prod == 0:
                        break
            total += prod
        counts[v] = total
    return counts[gr.start]


def _variable_lengths(gr: Grammar) -> dict[str, set[int]]:
    table = _rules_by_lhs(gr)
    lengths: dict[str, set[int]] = {}
    for v in topological_variables(gr):
        out: set[int] = set()
        for rhs in table[v]:
            partial = {0}
            for x in rhs:
                if isinstance(x, int):
                    partial = {n + 1 for n in partial}
                else:
                    partial = {n + k for n in partial for k in lengths[x]}
                if not partial:
                    break
            out |= partial
        lengths[v] = out
    return lengths


def membership(gr: Grammar, w: Word) -> bool:
    symbols = w.symbols
    if len(symbols) == 0:
        return gr.accepts_empty
    table = _rules_by_lhs(gr)
    lengths = _variable_lengths(gr)
    memo: dict[tuple[str, int, int], bool] = {}

    def derives(v: str, i: int, j: int) -> bool:
        key = (v, i, j)
        if key in memo:
            return memo[key]
        memo[key] = False  # acyclic, so no self-dependency to worry about
        for rhs in table[v]:
            if match(rhs, 0, i, j):
                memo[key] = True
                break
        return memo[key]

    def match(rhs, k: int, i: int, j: int) -> bool:
        if k == len(rhs):
            return i == j
        x = rhs[k]
        if isinstance(x, int):
            return i < j and symbols[i] == x and match(rhs, k + 1, i + 1, j)
        for n in sorted(lengths[x]):
            if i + n <= j and derives(x, i, i + n) and match(rhs, k + 1, i + n, j):
                return True
        return False

    return derives(gr.start, 0, len(symbols))


def trim(gr: Grammar) -> Grammar:
    """Drop variables deriving no terminal string or unreachable from the
    start; declaration and rule order are preserved."""
    lengths = _variable_lengths(gr)
    productive = {v for v, ls in lengths.items() if ls}
    usable = [
        (lhs, rhs)
        for lhs, rhs in gr.rules
        if all(x in productive for x in rhs if isinstance(x, str))
    ]
    reach = {gr.start}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in usable:
            if lhs in reach:
                for x in rhs:
                    if isinstance(x, str) and x not in reach:
                        reach.add(x)
                        changed = True
    keep = (reach & productive) | {gr.start}
    variables = tuple(v for v in gr.variables if v in keep)
    rules = tuple(
        (lhs, rhs)
        for lhs, rhs in usable
        if lhs in keep and all(x in keep for x in rhs if isinstance(x, str))
    )
    provenance = None
    if gr.provenance is not None:
        provenance = {v: gr.provenance[v] for v in variables if v in gr.provenance}
    return Grammar(gr.sigma_max, gr.start, variables, rules, provenance, gr.accepts_empty)


# ---------------------------------------------------------------------------
# Construction from a permutation-yielding tree decomposition.

def _pos_str(p: Pos) -> str:
    return "e" if p == ROOT else ".".join(str(i) for i in p)


def _var_name(p: Pos, idx: int) -> str:
    return f"p:{_pos_str(p)}|b:{idx}"


def _consistent_dicts(a: dict[int, int], b: dict[int, int]) -> bool:
    if len(b) < len(a):
        a, b = b, a
    for v, img in a.items():
        other = b.get(v)
        if other is not None and other != img:
            return False
    return True


def _bag_provenance(p: Pos, b: AnnotatedBag) -> dict:
    return {
        "position": _pos_str(p),
        "bag": list(b.s),
        "phi": [[v, img] for v, img in b.phi],
    }


def build_aut_grammar(g: Graph, t: TreeDecomposition) -> tuple[Permutation, Grammar]:
    """Compile Aut(g) into a grammar over alphabet V(g).

    Returns (alpha, grammar) where the language equals the set of one-line
    automorphism strings repositioned by alpha (word position i holds the
    image of vertex alpha(i))."""
    require_connected(g)
    report = validate_tree_decomposition(g, t)
    if not report.ok:
        raise GrammarError(f"invalid decomposition: {report.violations[0].message}")
    if not is_permutation_yielding(g, t):
        raise GrammarError("decomposition is not permutation yielding")
    y = yield_order_of(t)
    ann = {p: enumerate_annotated_bags(g, t.bag(p)) for p in t.positions}
    maps = {p: [b.as_dict() for b in ann[p]] for p in t.positions}

    variables = ["B1"]
    for p in t.positions:
        variables.extend(_var_name(p, i) for i in range(len(ann[p])))
    provenance: dict[str, dict] = {}
    for p in t.positions:
        for i, b in enumerate(ann[p]):
            provenance[_var_name(p, i)] = _bag_provenance(p, b)

    rules: list = []
    for i in range(len(ann[ROOT])):
        rules.append(("B1", (_var_name(ROOT, i),)))
    for p in t.positions:
        kids = t.children(p)
        if kids:
            for i, pmap in enumerate(maps[p]):
                per_child = [
                    [j for j, cmap in enumerate(maps[c]) if _consistent_dicts(pmap, cmap)]
                    for c in kids
                ]
                for combo in itertools.product(*per_child):
                    rules.append(
                        (_var_name(p, i), tuple(_var_name(c, j) for c, j in zip(kids, combo)))
                    )
        else:
            v = t.bag(p)[0]
            for i, b in enumerate(ann[p]):
                rules.append((_var_name(p, i), (b.maps(v),)))

    gr = Grammar(
        sigma_max=g.vertex_count,
        start="B1",
        variables=tuple(variables),
        rules=tuple(rules),
        provenance=provenance,
    )
    return y.alpha, trim(gr)


# ---------------------------------------------------------------------------
# Regular construction from a path decomposition that introduces each vertex
# exactly once.  The grammar walks the path, emitting the image of each
# introduced vertex and remembering the previous bag annotation in the
# variable, so every rule has shape (B, a) or (B, a B').

def build_regular_aut_grammar(g: Graph, pd: TreeDecomposition) -> tuple[Permutation, Grammar]:
    require_connected(g)
    report = validate_tree_decomposition(g, pd)
    if not report.ok:
        raise GrammarError(f"invalid decomposition: {report.violations[0].message}")
    order = introduced_order(g, pd)
    n = g.vertex_count
    chain: list[Pos] = [ROOT]
    while pd.children(chain[-1]):
        chain.append(pd.children(chain[-1])[0])
    ann = [enumerate_annotated_bags(g, pd.bag(p)) for p in chain]
    maps = [[b.as_dict() for b in lvl] for lvl in ann]
    alpha = Permutation(tuple(order))

    def state(i: int, j: int) -> str:
        return f"q:{i}|b:{j}"

    variables = ["B1"]
    provenance: dict[str, dict] = {}
    for i in range(2, n + 1):
        for j in range(len(ann[i - 2])):
            variables.append(state(i, j))
            provenance[state(i, j)] = _bag_provenance(chain[i - 2], ann[i - 2][j])
    rules: list = []
    if n == 1:
        for b in ann[0]:
            rules.append(("B1", (b.maps(order[0]),)))
    else:
        for j, b in enumerate(ann[0]):
            rules.append(("B1", (b.maps(order[0]), state(2, j))))
        for i in range(2, n):
            for j, pmap in enumerate(maps[i - 2]):
                for j2, b2 in enumerate(ann[i - 1]):
                    if _consistent_dicts(pmap, maps[i - 1][j2]):
                        rules.append((state(i, j), (b2.maps(order[i - 1]), state(i + 1, j2))))
        for j, pmap in enumerate(maps[n - 2]):
            for b2, cmap in zip(ann[n - 1], maps[n - 1]):
                if _consistent_dicts(pmap, cmap):
                    rules.append((state(n, j), (b2.maps(order[n - 1]),)))

    gr = Grammar(
        sigma_max=g.vertex_count,
        start="B1",
        variables=tuple(variables),
        rules=tuple(rules),
        provenance=provenance,
    )
    return alpha, trim(gr)


# ---------------------------------------------------------------------------
# Language-preserving transforms.

def rename_terminals(gr: Grammar, b: Permutation) -> Grammar:
    """Apply b symbol-wise to the language; rule shapes and size unchanged."""
    occurring = {x for _, rhs in gr.rules for x in rhs if isinstance(x, int)}
    for t in sorted(occurring):
        if t > b.size:
            raise GrammarError(f"renaming undefined on terminal {t}")
        if b(t) > gr.sigma_max:
            raise GrammarError(
                f"renaming sends terminal {t} to {b(t)}, outside the declared alphabet"
            )
    rules = tuple(
        (lhs, tuple(b(x) if isinstance(x, int) else x for x in rhs))
        for lhs, rhs in gr.rules
    )
    return Grammar(gr.sigma_max, gr.start, gr.variables, rules, None, gr.accepts_empty)


def erase_terminals(gr: Grammar, keep: int) -> Grammar:
    """Homomorphic image erasing every terminal above `keep`.

    The result has no epsilon anywhere in its rules; if the empty word
    arises it is recorded on the accepts_empty flag instead.  The declared
    alphabet shrinks to 1..keep."""
    if keep < 0:
        raise GrammarError("keep must be non-negative")
    dropped = tuple(
        (lhs, tuple(x for x in rhs if isinstance(x, str) or x <= keep))
        for lhs, rhs in gr.rules
    )
    inter = Grammar(gr.sigma_max, gr.start, gr.variables, dropped, None, gr.accepts_empty)
    lengths = _variable_lengths(inter)
    nullable = {v for v, ls in lengths.items() if 0 in ls}
    only_empty = {v for v, ls in lengths.items() if ls == {0}}
    dead = {v for v, ls in lengths.items() if not ls}

    rules: list = []
    for lhs, rhs in dropped:
        if any(isinstance(x, str) and x in dead for x in rhs):
            continue
        slots: list[list] = []
        for x in rhs:
            if isinstance(x, int):
                slots.append([x])
            elif x in only_empty:
                slots.append([None])
            elif x in nullable:
                slots.append([x, None])
            else:
                slots.append([x])
        seen: set[tuple] = set()
        for combo in itertools.product(*slots):
            new_rhs = tuple(x for x in combo if x is not None)
            if new_rhs and new_rhs not in seen:
                seen.add(new_rhs)
                rules.append((lhs, new_rhs))
    accepts_empty = gr.accepts_empty or gr.start in nullable
    out = Grammar(keep, gr.start, gr.variables, tuple(rules), None, accepts_empty)
    return trim(out)


def union_grammar(g1: Grammar, g2: Grammar) -> Grammar:
    """Fresh start with unit rules to both operands, renamed apart."""
    if g1.sigma_max != g2.sigma_max:
        raise GrammarError(
            f"alphabet mismatch: {g1.sigma_max} vs {g2.sigma_max}"
        )
    variables = ["B1"]
    variables.extend(f"a:{v}" for v in g1.variables)
    variables.extend(f"b:{v}" for v in g2.variables)

    def tag(prefix: str, rhs) -> tuple:
        return tuple(x if isinstance(x, int) else f"{prefix}:{x}" for x in rhs)

    rules: list = [("B1", (f"a:{g1.start}",)), ("B1", (f"b:{g2.start}",))]
    rules.extend((f"a:{lhs}", tag("a", rhs)) for lhs, rhs in g1.rules)
    rules.extend((f"b:{lhs}", tag("b", rhs)) for lhs, rhs in g2.rules)
    return Grammar(
        g1.sigma_max,
        "B1",
        tuple(variables),
        tuple(rules),
        None,
        g1.accepts_empty or g2.accepts_empty,
    )


def group_from_subgroup(grH: Grammar, transversal: list[Permutation]) -> Grammar:
    """Union of terminal renamings of grH, one per coset representative."""
    if not transversal:
        raise GrammarError("transversal must be nonempty")
    parts = [rename_terminals(grH, beta) for beta in transversal]
    langs = [frozenset(w.symbols for w in enumerate_language(p).words) for p in parts]
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if langs[i] == langs[j]:
                warnings.warn(
                    f"transversal entries {i} and {j} give the same coset language",
                    stacklevel=2,
                )
    combined = parts[0]
    for p in parts[1:]:
        combined = union_grammar(combined, p)
    return combined


# ---------------------------------------------------------------------------
# Embedded groups and cosets: erase the non-prefix vertices out of the
# automorphism grammar of the host graph, then rename by the coset
# representative.

def build_embedded_group_grammar(
    g: Graph,
    n: int,
    b: Permutation | None = None,
    *,
    strategy: str = "min-fill",
    check_invariance: bool = True,
) -> tuple[Permutation, Grammar]:
    require_connected(g)
    m = g.vertex_count
    if not 1 <= n <= m:
        raise GrammarError(f"prefix size {n} out of range 1..{m}")
    if b is None:
        b = identity(n)
    if b.size != n:
        raise GrammarError(f"coset representative must permute 1..{n}")
    if check_invariance:
        result = _oracle.restricted_action(g, n)
        if not result.invariant:
            raise GrammarError(
                f"prefix 1..{n} not invariant under the automorphism group "
                f"(witness {result.witness.image})"
            )
    t0 = compute_tree_decomposition(g, strategy)
    t, _ = make_permutation_yielding(g, t0)
    alpha_big, gr_full = build_aut_grammar(g, t)
    kept = [i for i in range(1, m + 1) if alpha_big(i) <= n]
    alpha = Permutation(tuple(alpha_big(i) for i in kept))
    erased = erase_terminals(gr_full, n)
    return alpha, rename_terminals(erased, b)


# ---------------------------------------------------------------------------
# Reading grammar words back as permutations.

def permutation_from_aligned_word(w: Word, alpha: Permutation) -> Permutation:
    """Invert the alignment: given w with w_i = s(alpha(i)), recover s."""
    inv = inverse(alpha)
    if len(w) != alpha.size:
        raise GrammarError(f"word length {len(w)} does not match alpha size {alpha.size}")
    return Permutation(tuple(w.symbols[inv(j) - 1] for j in range(1, alpha.size + 1)))


def language_as_permutations(words, alpha: Permutation) -> tuple[Permutation, ...]:
    return tuple(sorted(permutation_from_aligned_word(w, alpha) for w in words))


# ---------------------------------------------------------------------------
# Parse trees.

@dataclass(frozen=True)
class ParseTree:
    rule_index: int
    children: tuple["ParseTree", ...]


def enumerate_parse_trees(gr: Grammar) -> list[ParseTree]:
    """Every accepting parse tree, in rule order."""
    topological_variables(gr)  # raises on cycles
    memo: dict[str, list[ParseTree]] = {}

    def trees_for(v: str) -> list[ParseTree]:
        if v in memo:
            return memo[v]
        out: list[ParseTree] = []
        for idx, (lhs, rhs) in enumerate(gr.rules):
            if lhs != v:
                continue
            child_lists = [trees_for(x) for x in rhs if isinstance(x, str)]
            for combo in itertools.product(*child_lists):
                out.append(ParseTree(idx, tuple(combo)))
        memo[v] = out
        return out

    return trees_for(gr.start)


def parse_tree_yield(gr: Grammar, t: ParseTree) -> Word:
    lhs, rhs = gr.rules[t.rule_index]
    out: list[int] = []
    child_iter = iter(t.children)
    for x in rhs:
        if isinstance(x, int):
            out.append(x)
        else:
            child = next(child_iter)
            clhs, _ = gr.rules[child.rule_index]
            if clhs != x:
                raise GrammarError("parse tree does not follow the grammar rules")
            out.extend(parse_tree_yield(gr, child).symbols)
    if list(child_iter):
        raise GrammarError("parse tree has extra children")
    return Word(tuple(out))


# ---------------------------------------------------------------------------
# JSON serialization: deterministic key and array order.

def grammar_to_json(gr: Grammar) -> str:
    doc: dict = {
        "sigma_max": gr.sigma_max,
        "start": gr.start,
        "variables": list(gr.variables),
        "rules": [[lhs, list(rhs)] for lhs, rhs in gr.rules],
    }
    if gr.accepts_empty:
        doc["accepts_empty"] = True
    if gr.provenance is not None:
        doc["provenance"] = {v: gr.provenance[v] for v in gr.variables if v in gr.provenance}
    return json.dumps(doc, indent=1) + "\n"


def grammar_from_json(text: str) -> Grammar:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GrammarError(f"bad grammar JSON: {e}") from None
    for key in ("sigma_max", "start", "variables", "rules"):
        if key not in doc:
            raise GrammarError(f"grammar JSON missing field {key!r}")
    rules = tuple(
        (lhs, tuple(x if isinstance(x, int) else str(x) for x in rhs))
        for lhs, rhs in doc["rules"]
    )
    return Grammar(
        int(doc["sigma_max"]),
        str(doc["start"]),
        tuple(str(v) for v in doc["variables"]),
        rules,
        doc.get("provenance"),
        bool(doc.get("accepts_empty", False)),
    )
