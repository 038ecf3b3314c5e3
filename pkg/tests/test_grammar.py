import itertools
import math

import pytest

from autgrammar.decomp import (
    TreeDecomposition,
    compute_path_decomposition,
    compute_tree_decomposition,
    make_permutation_yielding,
)
from autgrammar.graph import Graph
from autgrammar.grammar import (
    CyclicGrammarError,
    Grammar,
    GrammarError,
    build_aut_grammar,
    build_embedded_group_grammar,
    build_regular_aut_grammar,
    count_parse_trees,
    enumerate_language,
    enumerate_parse_trees,
    erase_terminals,
    grammar_from_json,
    grammar_size,
    grammar_to_json,
    group_from_subgroup,
    is_regular,
    membership,
    parse_tree_yield,
    permutation_from_aligned_word,
    rename_terminals,
    trim,
    union_grammar,
)
from autgrammar.oracle import brute_force_automorphisms, left_transversal
from autgrammar.perm import (
    Permutation,
    Word,
    compose,
    identity,
    inverse,
    permute_word,
    to_string_word,
)


def aut_grammar(g):
    t0 = compute_tree_decomposition(g, "min-fill")
    t, _ = make_permutation_yielding(g, t0)
    return build_aut_grammar(g, t)


def oracle_language(g, alpha):
    return sorted(
        permute_word(to_string_word(s), alpha) for s in brute_force_automorphisms(g)
    )


def test_language_matches_oracle(p3, p4, c4, star5):
    for g in (p3, p4, c4, star5):
        alpha, gr = aut_grammar(g)
        assert list(enumerate_language(gr).words) == oracle_language(g, alpha)


def test_language_counts(c4, p4, star5):
    assert len(enumerate_language(aut_grammar(c4)[1]).words) == 8
    assert len(enumerate_language(aut_grammar(p4)[1]).words) == 2
    assert len(enumerate_language(aut_grammar(star5)[1]).words) == 24


def test_nontrivial_alignment(p3):
    # handcrafted decomposition whose leaves read 3, 1, 2
    t = TreeDecomposition(
        {(): (1, 2), (1,): (2, 3), (1, 1): (3,), (2,): (1,), (3,): (2,)}
    )
    alpha, gr = build_aut_grammar(p3, t)
    assert alpha == Permutation((3, 1, 2))
    assert list(enumerate_language(gr).words) == oracle_language(p3, alpha)


def test_rejects_disconnected():
    g = Graph(2, [])
    t = TreeDecomposition({(): (1,), (1,): (2,)})
    with pytest.raises(Exception):
        build_aut_grammar(g, t)


def test_rejects_non_yielding(p3):
    t = TreeDecomposition({(): (1, 2), (1,): (2, 3)})
    with pytest.raises(GrammarError):
        build_aut_grammar(p3, t)


def test_pullback_is_a_group(c4, q3):
    for g in (c4, q3):
        alpha, gr = aut_grammar(g)
        perms = {
            permutation_from_aligned_word(w, alpha)
            for w in enumerate_language(gr).words
        }
        assert identity(g.vertex_count) in perms
        for a in perms:
            assert inverse(a) in perms
            for b in perms:
                assert compose(a, b) in perms


def test_unambiguous(corpus):
    for name, g in corpus.items():
        _, gr = aut_grammar(g)
        assert count_parse_trees(gr) == len(enumerate_language(gr).words), name


def test_grammar_size_formula():
    toy = Grammar(2, "B1", ("B1",), (("B1", (1,)), ("B1", (2,))))
    size = grammar_size(toy)
    assert size.rule_symbols == 4
    assert size.symbol_space == 3
    assert abs(size.value - 4 * math.log2(3)) < 1e-12
    empty = Grammar(2, "B1", ("B1",), ())
    assert grammar_size(empty).value == 0.0
    single = Grammar(2, "B1", ("B1",), (("B1", (1, 2)),))
    assert abs(grammar_size(single).value - 3 * math.log2(3)) < 1e-12


def test_enumerate_duplicate_rules():
    dup = Grammar(1, "B1", ("B1",), (("B1", (1,)), ("B1", (1,))))
    assert [w.symbols for w in enumerate_language(dup).words] == [(1,)]
    assert count_parse_trees(dup) == 2


def test_enumerate_cap():
    gr = Grammar(3, "B1", ("B1",), tuple(("B1", (i,)) for i in (1, 2, 3)))
    res = enumerate_language(gr, cap=2)
    assert res.truncated
    assert [w.symbols for w in res.words] == [(1,), (2,)]


def test_enumerate_rejects_cyclic():
    cyc = Grammar(1, "B1", ("B1",), (("B1", (1, "B1")), ("B1", (1,))))
    with pytest.raises(CyclicGrammarError):
        enumerate_language(cyc)


def test_membership(c4):
    alpha, gr = aut_grammar(c4)
    words = enumerate_language(gr).words
    auts = set(brute_force_automorphisms(c4))
    rotation = Permutation((2, 3, 4, 1))
    assert rotation in auts
    assert membership(gr, permute_word(to_string_word(rotation), alpha))
    outside = Permutation((2, 1, 3, 4))
    assert outside not in auts
    assert not membership(gr, permute_word(to_string_word(outside), alpha))
    assert not membership(gr, Word((1, 2)))
    # agreement with a linear scan over every length-4 word on a sample
    for img in itertools.permutations(range(1, 5)):
        w = Word(img)
        assert membership(gr, w) == (w in words)


def test_membership_agrees_with_enumeration(corpus):
    import random

    rng = random.Random(31337)
    for name, g in corpus.items():
        _, gr = aut_grammar(g)
        words = set(enumerate_language(gr).words)
        for w in sorted(words):
            assert membership(gr, w), name
        for w in sorted(words)[:4]:
            symbols = list(w.symbols)
            i, j = rng.sample(range(len(symbols)), 2)
            symbols[i], symbols[j] = symbols[j], symbols[i]
            mutated = Word(tuple(symbols))
            assert membership(gr, mutated) == (mutated in words), (name, mutated)


def test_rename_terminals(p3):
    alpha, gr = aut_grammar(p3)
    assert rename_terminals(gr, identity(3)).rules == gr.rules
    beta = Permutation((2, 1, 3))
    renamed = rename_terminals(gr, beta)
    expected = sorted(
        permute_word(to_string_word(compose(beta, s)), alpha)
        for s in brute_force_automorphisms(p3)
    )
    assert list(enumerate_language(renamed).words) == expected
    assert grammar_size(renamed) == grammar_size(gr)


def test_rename_undefined_terminal():
    gr = Grammar(3, "B1", ("B1",), (("B1", (3,)),))
    with pytest.raises(GrammarError):
        rename_terminals(gr, identity(2))


def test_erase_keep_all(c4):
    _, gr = aut_grammar(c4)
    erased = erase_terminals(gr, 4)
    assert erased.rules == gr.rules
    assert not erased.accepts_empty


def test_erase_star(star5):
    _, gr = aut_grammar(star5)
    erased = erase_terminals(gr, 4)
    words = enumerate_language(erased).words
    assert len(words) == 24
    assert {len(w) for w in words} == {4}
    assert all(max(w.symbols) <= 4 for w in words)
    # word count survives erasure here: the restriction to 1..4 is faithful
    assert len(enumerate_language(gr).words) == len(words)


def test_erase_to_empty_word():
    gr = Grammar(3, "B1", ("B1",), (("B1", (3, 3)),))
    erased = erase_terminals(gr, 2)
    assert erased.accepts_empty
    assert [w.symbols for w in enumerate_language(erased).words] == [()]
    for _, rhs in erased.rules:
        assert len(rhs) > 0


def test_union_grammar():
    g1 = Grammar(3, "B1", ("B1",), (("B1", (1, 2)),))
    g2 = Grammar(3, "B1", ("B1",), (("B1", (1, 3)),))
    u = union_grammar(g1, g2)
    assert [w.symbols for w in enumerate_language(u).words] == [(1, 2), (1, 3)]
    assert count_parse_trees(u) == 2
    uu = union_grammar(u, u)
    assert [w.symbols for w in enumerate_language(uu).words] == [(1, 2), (1, 3)]
    assert count_parse_trees(uu) == 4
    with pytest.raises(GrammarError):
        union_grammar(g1, Grammar(2, "B1", ("B1",), ()))


def s4():
    return tuple(
        sorted(Permutation(img) for img in itertools.permutations(range(1, 5)))
    )


def test_group_from_subgroup(c4):
    alpha, grH = aut_grammar(c4)
    aut = brute_force_automorphisms(c4)
    reps = left_transversal(s4(), aut)
    assert len(reps) == 3
    full = group_from_subgroup(grH, reps)
    words = enumerate_language(full).words
    assert len(words) == 24
    assert count_parse_trees(full) == 24
    expected = sorted(permute_word(to_string_word(s), alpha) for s in s4())
    assert list(words) == expected


def test_group_from_subgroup_trivial(c4):
    _, grH = aut_grammar(c4)
    same = group_from_subgroup(grH, [identity(4)])
    assert enumerate_language(same).words == enumerate_language(grH).words


def test_group_from_subgroup_duplicate_warns(c4):
    _, grH = aut_grammar(c4)
    aut = brute_force_automorphisms(c4)
    dup = [identity(4), sorted(aut)[1]]  # same coset twice
    with pytest.warns(UserWarning):
        group_from_subgroup(grH, dup)


def test_embedded_full_prefix_identity(c4):
    alpha_direct, gr_direct = aut_grammar(c4)
    alpha, gr = build_embedded_group_grammar(c4, 4)
    assert alpha == alpha_direct
    assert gr.rules == gr_direct.rules
    assert gr.variables == gr_direct.variables


def test_embedded_star(star5):
    alpha, gr = build_embedded_group_grammar(star5, 4)
    words = enumerate_language(gr).words
    assert len(words) == 24
    perms = sorted(permutation_from_aligned_word(w, alpha) for w in words)
    assert perms == list(s4())


def test_embedded_star_coset(star5):
    beta = Permutation((2, 1, 3, 4))
    alpha, gr = build_embedded_group_grammar(star5, 4, beta)
    assert len(enumerate_language(gr).words) == 24  # S4 closed under renaming


def test_embedded_rejects_non_invariant(p3):
    with pytest.raises(GrammarError):
        build_embedded_group_grammar(p3, 2)


def test_regular_grammar(p4, c4):
    for g, expect in ((p4, 2), (c4, 8)):
        pd = compute_path_decomposition(g)
        alpha, gr = build_regular_aut_grammar(g, pd)
        assert is_regular(gr)
        words = enumerate_language(gr).words
        assert len(words) == expect
        perms = sorted(permutation_from_aligned_word(w, alpha) for w in words)
        assert perms == list(brute_force_automorphisms(g))
        assert count_parse_trees(gr) == len(words)


def test_regular_single_vertex():
    g = Graph(1, [])
    pd = compute_path_decomposition(g)
    alpha, gr = build_regular_aut_grammar(g, pd)
    assert is_regular(gr)
    assert [w.symbols for w in enumerate_language(gr).words] == [(1,)]


def test_tree_grammar_not_regular(c4):
    _, gr = aut_grammar(c4)
    assert not is_regular(gr)


def test_trim_removes_dead():
    gr = Grammar(
        2,
        "B1",
        ("B1", "A", "Dead", "NoRule"),
        (("B1", ("A",)), ("A", (1,)), ("Dead", (2,)), ("A", ("NoRule",))),
    )
    t = trim(gr)
    assert t.variables == ("B1", "A")
    assert t.rules == (("B1", ("A",)), ("A", (1,)))


def test_parse_trees(c4):
    alpha, gr = aut_grammar(c4)
    trees = enumerate_parse_trees(gr)
    assert len(trees) == 8
    yields = sorted(parse_tree_yield(gr, t) for t in trees)
    assert yields == list(enumerate_language(gr).words)


def test_json_round_trip(c4):
    _, gr = aut_grammar(c4)
    text = grammar_to_json(gr)
    back = grammar_from_json(text)
    assert back == gr
    assert grammar_to_json(back) == text


def test_json_rejects_garbage():
    with pytest.raises(GrammarError):
        grammar_from_json("{not json")
    with pytest.raises(GrammarError):
        grammar_from_json("{}")


def random_connected_graph(rng, n):
    while True:
        edges = [
            (i, j)
            for i in range(1, n)
            for j in range(i + 1, n + 1)
            if rng.random() < 0.45
        ]
        g = Graph(n, edges)
        from autgrammar.graph import is_connected

        if is_connected(g):
            return g


def test_random_graphs_cross_check():
    # end-to-end fuzz: language equality, unambiguity, annotation counts
    import random

    from autgrammar.annotate import count_assignments
    from autgrammar.decomp import validate_tree_decomposition

    rng = random.Random(20240817)
    for trial in range(25):
        n = rng.randint(2, 6)
        g = random_connected_graph(rng, n)
        auts = brute_force_automorphisms(g)
        t0 = compute_tree_decomposition(g, "min-fill")
        t, _ = make_permutation_yielding(g, t0)
        assert validate_tree_decomposition(g, t).ok, g
        alpha, gr = build_aut_grammar(g, t)
        words = list(enumerate_language(gr).words)
        expected = sorted(permute_word(to_string_word(s), alpha) for s in auts)
        assert words == expected, g
        assert count_parse_trees(gr) == len(words), g
        assert count_assignments(g, t) == len(auts), g


def test_random_graphs_regular_route():
    import random

    rng = random.Random(987123)
    for trial in range(12):
        n = rng.randint(2, 6)
        g = random_connected_graph(rng, n)
        auts = brute_force_automorphisms(g)
        pd = compute_path_decomposition(g)
        alpha, gr = build_regular_aut_grammar(g, pd)
        assert is_regular(gr)
        perms = sorted(
            permutation_from_aligned_word(w, alpha)
            for w in enumerate_language(gr).words
        )
        assert perms == list(auts), g
        assert count_parse_trees(gr) == len(auts), g


def test_regular_star(star5):
    pd = compute_path_decomposition(star5)
    alpha, gr = build_regular_aut_grammar(star5, pd)
    assert is_regular(gr)
    assert len(enumerate_language(gr).words) == 24
