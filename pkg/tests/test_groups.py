import itertools

import pytest

from gluing import catalog, group_from_generators
from gluing import groups
from gluing.errors import NotAPermutation, OrderBound, UnknownSpec
from gluing.groups import (all_subgroups, center, centralizer, classify_small,
                           conjugacy_classes_of_subgroups, is_normal, normalizer, p_rank,
                           quotient)


def _brute_subgroups(G):
    """Closures of all element triples, computed directly on the permutations."""
    elems = list(G.elements)
    ident = tuple(range(G.degree))

    def close(gens):
        seen = {ident}
        frontier = [ident]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = tuple(x[g[i]] for i in range(G.degree))
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return frozenset(seen)

    return {close(c) for c in itertools.combinations_with_replacement(elems, 3)}


def _brute_classes(G, subs):
    elems = list(G.elements)
    inv = {g: tuple(sorted(range(G.degree), key=lambda i: g[i])) for g in elems}

    def conj(g, H):
        return frozenset(tuple(g[h[inv[g][i]]] for i in range(G.degree)) for h in H)

    classes = set()
    for H in subs:
        classes.add(frozenset(conj(g, H) for g in elems))
    return classes


SMALL = ["C2", "C4", "C8", "C16", "C2xC2", "C4xC2", "EA(2,3)", "D8", "Q8", "C4xC4",
         "C8xC2", "C4xC2xC2", "D8xC2", "Q8xC2", "D16", "Q16", "SD16", "M16", "C4:C4",
         "C3", "C9", "C3xC3", "C5"]


@pytest.mark.parametrize("spec", SMALL)
def test_subgroup_lattice_matches_brute_force(spec):
    G = catalog(spec)
    subs = _brute_subgroups(G)
    assert len(G._subgroup_masks) == len(subs)
    got = {frozenset(G.elements[i] for i in H.members) for H in all_subgroups(G)}
    assert got == subs
    assert len(G.subgroup_classes) == len(_brute_classes(G, subs))


def test_generators_examples():
    assert group_from_generators(3, [[1, 2, 0]]).order == 3
    D = group_from_generators(4, [[1, 2, 3, 0], [0, 3, 2, 1]])
    assert D.order == 8 and not D.is_abelian
    assert group_from_generators(1, []).order == 1


def test_identity_is_index_zero():
    G = catalog("D8")
    assert G.elements[0] == tuple(range(G.degree))
    assert all(G.mul[0][g] == g for g in range(G.order))


def test_bad_permutation_rejected():
    with pytest.raises(NotAPermutation):
        group_from_generators(3, [[0, 0, 1]])


def test_element_cap(monkeypatch):
    monkeypatch.setattr(groups, "ELEMENT_CAP", 10)
    with pytest.raises(OrderBound):
        group_from_generators(4, [[1, 2, 3, 0], [0, 3, 2, 1], [1, 0, 2, 3]])


def test_unknown_spec():
    with pytest.raises(UnknownSpec):
        catalog("S7")


def test_catalog_examples():
    assert catalog("C9").order == 9
    Q = catalog("Q8")
    assert sum(1 for H in all_subgroups(Q) if H.order == 2) == 1
    X = catalog("XS(3,+)")
    assert X.order == 27 and X.exponent == 3 and center(X).order == 3
    assert catalog("XS(3,-)").exponent == 9
    assert len(all_subgroups(catalog("C4"))) == 3
    D = catalog("D8")
    assert len(all_subgroups(D)) == 10 and len(conjugacy_classes_of_subgroups(D)) == 8
    assert len(all_subgroups(Q)) == 6


@pytest.mark.parametrize("spec,rank", [("C8", 1), ("Q16", 1), ("D8", 2), ("EA(2,3)", 3),
                                       ("XS(3,+)", 2), ("C4xC2xC2", 3), ("C5xC5", 2)])
def test_p_rank(spec, rank):
    G = catalog(spec)
    assert p_rank(G, G.prime_divisors[0]) == rank


def test_normalizer_centralizer_quotient():
    G = catalog("D8")
    Z = center(G)
    assert Z.order == 2 and is_normal(G, Z)
    for H in all_subgroups(G):
        N = normalizer(G, H)
        C = centralizer(G, H)
        assert C <= N and H <= N
    Q, hom = quotient(G, Z)
    assert Q.order == 4 and Q.is_abelian and Q.exponent == 2
    assert hom.kernel() == Z


@pytest.mark.parametrize("spec,kind", [("C8", "cyclic"), ("Q16", "quaternion"),
                                       ("D16", "dihedral"), ("SD16", "semidihedral"),
                                       ("C4xC2", "other")])
def test_classify_small(spec, kind):
    assert classify_small(catalog(spec)).startswith(kind)


def test_order_64_corpus_builds():
    for spec in ["D64", "Q64", "SD64", "C8xC8", "C7xC7"]:
        G = catalog(spec)
        assert G.order in (64, 49)
