import pytest

from gluing import catalog
from gluing.engine import bar_complex, obs_direct
from gluing.errors import CoefficientScope, NotIndexP, NotPGroup
from gluing.functors import AtomicFunctor, BurnsideDual, ConstantFunctor
from gluing.homalg import GF, QQ, AbGroup, cohomology
from gluing.oliver import (elementary_reps, equivariant_hom, oliver_complex, steinberg_module,
                           truncation_map)
from gluing.sections import sections


def _elementary(G, p, k):
    return elementary_reps(G, p, k)[0]


@pytest.mark.parametrize("spec,p,dim", [("C2", 2, 1), ("C2xC2", 2, 2), ("C3xC3", 3, 3),
                                        ("C5xC5", 5, 5), ("EA(2,3)", 2, 8)])
def test_steinberg_rank(spec, p, dim):
    G = catalog(spec)
    assert steinberg_module(G, G.full_mask, p).dim == dim


def test_steinberg_basis_is_a_cycle_lattice():
    G = catalog("EA(2,3)")
    St = steinberg_module(G, G.full_mask, 2)
    for g in range(G.order):
        S = St.action(g)
        assert len(S) == St.dim and all(len(r) == St.dim for r in S)


def test_equivariant_hom_trivial_action():
    G = catalog("C2xC2")
    hom, *_ = equivariant_hom(ConstantFunctor(G), G.full_mask, 2)
    # Aut_G(E) is trivial in an abelian group, so Hom(St, Z) = Z^2
    assert hom == AbGroup(2)


def test_truncation_rejects_non_index_p():
    G = catalog("EA(2,3)")
    with pytest.raises(NotIndexP):
        truncation_map(G, G.full_mask, _elementary(G, 2, 1), 2)


def test_non_p_group_rejected():
    G = catalog("C3xC2")
    with pytest.raises(NotPGroup):
        oliver_complex(ConstantFunctor(G), 2)


def test_d8_shape():
    OC = oliver_complex(BurnsideDual(catalog("D8")), 2)
    assert OC.complex.dims == [8, 9, 2]


def test_integral_degree_two_out_of_scope():
    OC = oliver_complex(BurnsideDual(catalog("EA(2,3)")), 2)
    with pytest.raises(CoefficientScope):
        OC.cohomology(2)


@pytest.mark.parametrize("spec", ["C2xC2", "C3xC3"])
def test_constant_rational_acyclic(spec):
    G = catalog(spec)
    OC = oliver_complex(ConstantFunctor(G, ring=QQ), G.prime_divisors[0])
    for i in range(-1, 2):
        assert OC.cohomology(i).is_zero


@pytest.mark.parametrize("spec", ["D8", "C2xC2", "EA(2,3)", "XS(3,+)", "Q8", "C4xC2"])
def test_atomic_functors_match_bar_route(spec):
    G = catalog(spec)
    p = G.prime_divisors[0]
    P = sections(G, "all")
    for i in P.representatives:
        F = AtomicFunctor(G, P.elements[i])
        B = bar_complex(F, "proper", 2)
        OC = oliver_complex(F, p)
        for n in (-1, 0, 1):
            assert OC.cohomology(n) == cohomology(B.complex, n), (P.elements[i], n)


def test_nonzero_first_cohomology_is_detected():
    G = catalog("XS(3,+)")
    hits = []
    P = sections(G, "all")
    for i in P.representatives:
        h = oliver_complex(AtomicFunctor(G, P.elements[i]), 3).cohomology(1)
        if not h.is_zero:
            hits.append(h)
    assert hits


def test_bdual_matches_direct_over_fields():
    G = catalog("D8")
    for ring in (GF(2), QQ):
        F = BurnsideDual(G, ring=ring)
        ker, obs = obs_direct(F)
        OC = oliver_complex(F, 2)
        assert OC.cohomology(-1) == ker and OC.cohomology(0) == obs
