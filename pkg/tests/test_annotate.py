import itertools

import pytest

from autgrammar.annotate import (
    AnnotationError,
    annotation_morphism,
    check_annotated_bag,
    consistent_bags,
    count_assignments,
    enumerate_annotated_bags,
    enumerate_assignments,
    make_annotated_bag,
    make_assignment,
)
from autgrammar.decomp import compute_tree_decomposition, make_permutation_yielding
from autgrammar.graph import Graph, closed_neighborhood
from autgrammar.oracle import brute_force_automorphisms
from autgrammar.perm import Permutation


def oracle_annotations(g, s):
    """Independent route: try every injective map on the closed
    neighborhood and keep those satisfying both conditions directly."""
    bag = tuple(sorted(set(s)))
    dom = closed_neighborhood(g, bag)
    out = []
    for images in itertools.permutations(g.vertices, len(dom)):
        phi = dict(zip(dom, images))
        image_of_bag = {phi[v] for v in bag}
        nbar = set(image_of_bag)
        for v in image_of_bag:
            nbar.update(g.neighbors[v])
        if set(images) != nbar:
            continue
        if all(
            g.has_edge(u, v) == g.has_edge(phi[u], phi[v])
            for u, v in itertools.combinations(dom, 2)
        ):
            out.append(tuple(sorted(phi.items())))
    return sorted(out, key=lambda pairs: tuple(img for _, img in pairs))


def test_enumeration_matches_oracle_p3(p3):
    got = enumerate_annotated_bags(p3, (2,))
    assert [b.phi for b in got] == oracle_annotations(p3, (2,))
    assert len(got) == 2
    assert got[0].as_dict() == {1: 1, 2: 2, 3: 3}
    assert got[1].as_dict() == {1: 3, 2: 2, 3: 1}

    got1 = enumerate_annotated_bags(p3, (1,))
    assert [b.phi for b in got1] == oracle_annotations(p3, (1,))
    assert {frozenset(b.as_dict().items()) for b in got1} == {
        frozenset({(1, 1), (2, 2)}),
        frozenset({(1, 3), (2, 2)}),
    }


def test_enumeration_matches_oracle_c4(c4):
    got = enumerate_annotated_bags(c4, (1,))
    assert len(got) == 8
    assert [b.phi for b in got] == oracle_annotations(c4, (1,))


def test_enumeration_matches_oracle_more(p4, k4, star5):
    for g, s in [(p4, (2, 3)), (k4, (1,)), (k4, (1, 2)), (star5, (5,)), (star5, (1,))]:
        got = enumerate_annotated_bags(g, s)
        assert [b.phi for b in got] == oracle_annotations(g, s)


def test_enumeration_matches_oracle_cube(q3):
    # a denser case where the closed neighborhood is a proper subset
    got = enumerate_annotated_bags(q3, (1,))
    assert [b.phi for b in got] == oracle_annotations(q3, (1,))


def test_enumeration_rejects_empty(p3):
    with pytest.raises(AnnotationError):
        enumerate_annotated_bags(p3, ())


def test_enumeration_count_invariant_under_relabeling(c5):
    # relabel by a rotation and check bag counts transport
    rho = Permutation((2, 3, 4, 5, 1))
    relabeled = Graph(5, [(rho(u), rho(v)) for u, v in c5.edges])
    for s in [(1,), (1, 2), (3,)]:
        image = tuple(sorted(rho(v) for v in s))
        assert len(enumerate_annotated_bags(c5, s)) == len(
            enumerate_annotated_bags(relabeled, image)
        )


def test_check_annotated_bag(p3):
    ok = make_annotated_bag((2,), {1: 1, 2: 2, 3: 3})
    assert check_annotated_bag(p3, ok)
    bad = make_annotated_bag((2,), {1: 2, 2: 1, 3: 3})
    assert not check_annotated_bag(p3, bad)
    with pytest.raises(AnnotationError):
        check_annotated_bag(p3, make_annotated_bag((2,), {1: 1, 2: 2}))


def test_check_cardinality_case(p3):
    # bag {1} mapped onto vertex 2 cannot satisfy the image condition:
    # the closed neighborhoods have different sizes
    assert not check_annotated_bag(p3, make_annotated_bag((1,), {1: 2, 2: 1}))


def test_consistent_bags(p3):
    a = make_annotated_bag((2,), {1: 1, 2: 2, 3: 3})
    b = make_annotated_bag((1,), {1: 1, 2: 2})
    c = make_annotated_bag((1,), {1: 3, 2: 2})
    assert consistent_bags(a, b)
    assert not consistent_bags(a, c)
    d1 = make_annotated_bag((1,), {1: 1, 2: 2})
    far = make_annotated_bag((9,), {9: 9})
    assert consistent_bags(d1, far)  # disjoint domains


def yielding(g):
    t = compute_tree_decomposition(g, "min-fill")
    out, _ = make_permutation_yielding(g, t)
    return out


def test_annotation_morphism_identity(p3):
    t = yielding(p3)
    idmaps = {
        p: make_annotated_bag(t.bag(p), {v: v for v in closed_neighborhood(p3, t.bag(p))})
        for p in t.positions
    }
    a = make_assignment(t, idmaps)
    assert annotation_morphism(p3, a) == Permutation((1, 2, 3))


def test_annotation_morphism_reversal(p3):
    t = yielding(p3)
    rev = {1: 3, 2: 2, 3: 1}
    maps = {
        p: make_annotated_bag(
            t.bag(p), {v: rev[v] for v in closed_neighborhood(p3, t.bag(p))}
        )
        for p in t.positions
    }
    sigma = annotation_morphism(p3, make_assignment(t, maps))
    assert sigma == Permutation((3, 2, 1))
    assert sigma in brute_force_automorphisms(p3)


def test_annotation_morphism_rotation(c4):
    t = yielding(c4)
    rot = {1: 2, 2: 3, 3: 4, 4: 1}
    maps = {
        p: make_annotated_bag(
            t.bag(p), {v: rot[v] for v in closed_neighborhood(c4, t.bag(p))}
        )
        for p in t.positions
    }
    sigma = annotation_morphism(c4, make_assignment(t, maps))
    assert sigma == Permutation((2, 3, 4, 1))
    assert sigma in brute_force_automorphisms(c4)


def test_annotation_morphism_rejects_inconsistent(p3):
    t = yielding(p3)
    maps = {}
    for i, p in enumerate(t.positions):
        src = {1: 1, 2: 2, 3: 3} if i % 2 == 0 else {1: 3, 2: 2, 3: 1}
        dom = closed_neighborhood(p3, t.bag(p))
        maps[p] = make_annotated_bag(t.bag(p), {v: src[v] for v in dom})
    with pytest.raises(AnnotationError):
        annotation_morphism(p3, make_assignment(t, maps))


def test_assignment_bijection_with_automorphisms(p3, p4, c4, k4):
    for g in (p3, p4, c4, k4):
        t = yielding(g)
        auts = brute_force_automorphisms(g)
        assignments = list(enumerate_assignments(g, t))
        assert len(assignments) == len(auts)
        morphisms = sorted(annotation_morphism(g, a) for a in assignments)
        assert morphisms == list(auts)


def test_restrictions_of_automorphisms_are_valid(c4):
    # completeness: restricting any automorphism to every closed
    # neighborhood gives a valid assignment
    t = yielding(c4)
    for sigma in brute_force_automorphisms(c4):
        maps = {
            p: make_annotated_bag(
                t.bag(p),
                {v: sigma(v) for v in closed_neighborhood(c4, t.bag(p))},
            )
            for p in t.positions
        }
        a = make_assignment(t, maps)
        assert annotation_morphism(c4, a) == sigma


def test_count_assignments(c4):
    assert count_assignments(c4, yielding(c4)) == 8
