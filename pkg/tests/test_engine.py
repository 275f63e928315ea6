import pytest

from gluing import catalog
from gluing.engine import (bar_complex, category_cohomology, check_htw_sequences,
                           check_limit_iso, detection_map, faithful_part, gluing_limit,
                           gluing_system, limit_over_category, obs_direct, reduced_cohomology,
                           skeleton)
from gluing.errors import BarSizeBound
from gluing.functors import AtomicFunctor, BurnsideDual, ConstantFunctor, default_atomic_section
from gluing.homalg import GF, QQ, AbGroup, cohomology
from gluing.sections import Section

Z1 = AbGroup(1)


def test_gluing_limit_examples():
    assert gluing_limit(BurnsideDual(catalog("C2xC2")))[0] == AbGroup(4)
    assert gluing_limit(BurnsideDual(catalog("C9")))[0] == AbGroup(2)
    assert gluing_limit(BurnsideDual(catalog("C1")))[0].is_zero


@pytest.mark.parametrize("spec", ["D8", "C2xC2", "C9", "Q8", "XS(3,+)"])
def test_burnside_dual_kernel_and_obstruction(spec):
    assert obs_direct(BurnsideDual(catalog(spec))) == (Z1, AbGroup())


def test_detection_map_shape():
    F = BurnsideDual(catalog("D8"))
    r = detection_map(F)
    assert r.source == AbGroup(8)
    assert r.target == gluing_limit(F)[0]


def test_atomic_top_section_is_obstructed():
    G = catalog("D8")
    ker, obs = obs_direct(AtomicFunctor(G, default_atomic_section(G)))
    assert ker.is_zero and obs == Z1


def test_bar_and_direct_agree():
    for spec in ["C4", "D8", "C2xC2"]:
        F = BurnsideDual(catalog(spec))
        B = bar_complex(F, "proper", 2)
        ker, obs = obs_direct(F)
        assert cohomology(B.complex, -1) == ker
        assert cohomology(B.complex, 0) == obs


def test_constant_rational_cyclic_prime():
    F = ConstantFunctor(catalog("C3"), ring=QQ)
    assert category_cohomology(F, "proper", 0) == AbGroup(1)
    assert category_cohomology(F, "proper", 1).is_zero


def test_constant_rational_d8_acyclic():
    F = ConstantFunctor(catalog("D8"), ring=QQ)
    for n in (-1, 0, 1, 2):
        assert reduced_cohomology(F, "proper", n).is_zero


def test_h0_is_the_limit():
    for F in (BurnsideDual(catalog("D8")), ConstantFunctor(catalog("Q8"))):
        assert category_cohomology(F, "proper", 0) == limit_over_category(F, "proper")


@pytest.mark.parametrize("spec", ["D8", "C2xC2", "C9", "Q8"])
def test_limit_iso(spec):
    G = catalog(spec)
    for F in (BurnsideDual(G), ConstantFunctor(G, ring=GF(G.prime_divisors[0])),
              AtomicFunctor(G, default_atomic_section(G))):
        rep = check_limit_iso(F)
        assert rep.ok, rep.failures


def test_skeleton_composition_is_associative():
    S = skeleton(catalog("D8"), "proper")
    for a, (_, t, _) in enumerate(S.morphisms):
        for b in S.by_source[t]:
            ba, tb = S.compose(b, a), S.morphisms[b][1]
            for c in S.by_source[tb]:
                cb = S.compose(c, b)
                if ba is not None and cb is not None:
                    assert S.compose(c, ba) == S.compose(cb, a)


def test_bar_size_bound():
    with pytest.raises(BarSizeBound):
        bar_complex(BurnsideDual(catalog("D8")), "proper", 2, chain_cap=10)


def test_faithful_parts():
    assert faithful_part(BurnsideDual(catalog("C2xC2")))[0] == Z1
    assert faithful_part(ConstantFunctor(catalog("D8")))[0].is_zero
    assert faithful_part(BurnsideDual(catalog("C5")))[0] == Z1


def test_gluing_system_complex_is_a_complex():
    S = gluing_system(BurnsideDual(catalog("D8")))
    S.complex.check()


def test_htw_atomic_fails_and_constant_is_recorded():
    G = catalog("C2xC2")
    rep = check_htw_sequences(AtomicFunctor(G, Section(G.full_mask, 1)), G.full_mask)
    assert not rep.ok and "α is not injective" in rep.failures
    rep = check_htw_sequences(ConstantFunctor(G), G.full_mask)
    assert rep.details["central"] is True
    assert {"rank_alpha", "rank_beta", "middle"} <= set(rep.details)
