import json

import pytest

from gluing import catalog
from gluing.errors import InputError, UnsupportedValue
from gluing.functors import (AtomicFunctor, BurnsideDual, ConstantFunctor, builtin_atomic,
                             builtin_constant, default_atomic_section, load_functor,
                             parse_functor, save_functor, validate_functor)
from gluing.homalg import GF, ZZ, AbGroup
from gluing.sections import Section

GROUPS = ["C4", "D8", "C2xC2", "XS(3,+)", "Q8"]


@pytest.mark.parametrize("spec", GROUPS)
def test_builtins_satisfy_relations(spec):
    G = catalog(spec)
    for F in (ConstantFunctor(G), ConstantFunctor(G, ring=GF(G.prime_divisors[0])),
              BurnsideDual(G), AtomicFunctor(G, default_atomic_section(G))):
        rep = validate_functor(F)
        assert rep.ok, rep.failures[:3]


def _subgroup_count_up_to_conjugacy(G, U, V):
    """Orbits of U on subgroups W with V <= W <= U, by direct conjugation."""
    subs = [H for H in G._subgroup_masks if V & ~H == 0 and H & ~U == 0]
    members = [u for u in range(G.order) if U >> u & 1]
    seen, orbits = set(), 0
    for H in subs:
        if H in seen:
            continue
        orbits += 1
        seen.update(G.conjugate_mask(u, H) for u in members)
    return orbits


@pytest.mark.parametrize("spec", ["D8", "Q8", "C4xC2"])
def test_burnside_dual_ranks(spec):
    G = catalog(spec)
    F = BurnsideDual(G)
    for s in {Section(G.full_mask, 1)} | {Section(G.normalizer_mask(H), H)
                                          for H in G._subgroup_masks}:
        assert F.dim(s) == _subgroup_count_up_to_conjugacy(G, s.U, s.V)


def test_burnside_dual_d8_values():
    G = catalog("D8")
    F = BurnsideDual(G)
    Z = G.centralizer_mask(G.full_mask)
    assert F.dim(Section(G.full_mask, 1)) == 8
    assert F.dim(Section(G.full_mask, Z)) == 5


def test_cyclic_deflation_is_restriction_of_functions():
    # f'(H/Z) = f(H) for the deflation from C_8 to C_8/C_2
    G = catalog("C8")
    F = BurnsideDual(G)
    whole = Section(G.full_mask, 1)
    Z = [H for H in G._subgroup_masks if bin(H).count("1") == 2][0]
    top = Section(G.full_mask, Z)
    big, _ = F.basis(whole)
    small, _ = F.basis(top)
    D = F.des(whole, top).to_dense()
    for i, W in enumerate(small):
        assert D[i] == [int(H == W) for H in big]


def test_atomic_support():
    G = catalog("D8")
    s = default_atomic_section(G)
    F = AtomicFunctor(G, s)
    assert F.dim(s) == 1
    assert F.dim(Section(G.full_mask, 1)) == 0


def test_constructors_reject_mixed_values():
    G = catalog("C4")
    with pytest.raises(UnsupportedValue):
        builtin_constant(G, "all", AbGroup(1, (2,)))
    with pytest.raises(UnsupportedValue):
        builtin_constant(G, "all", AbGroup(0, (4,)))
    assert builtin_constant(G, "all", AbGroup(0, (2, 2))).ring == GF(2)
    assert builtin_atomic(G, "all", Section(G.full_mask, 1)).ring == ZZ


def test_parse_functor():
    G = catalog("D8")
    assert isinstance(parse_functor("constant", G), ConstantFunctor)
    assert parse_functor("constant:F2", G).ring == GF(2)
    assert isinstance(parse_functor("bdual", G), BurnsideDual)
    assert isinstance(parse_functor("atomic", G), AtomicFunctor)
    n = len(G._subgroup_masks) - 1
    assert parse_functor(f"atomic:{n}:0", G).section == Section(G.full_mask, 1)
    for bad in ("nonsense", "atomic:99:0", "atomic:1"):
        with pytest.raises(InputError):
            parse_functor(bad, G)


def test_file_round_trip(tmp_path):
    G = catalog("D8")
    F = BurnsideDual(G)
    path = tmp_path / "bdual.json"
    save_functor(F, str(path))
    T = load_functor(str(path), G)
    assert validate_functor(T).ok
    for s in [Section(G.full_mask, 1), Section(G.full_mask, G.centralizer_mask(G.full_mask))]:
        assert T.dim(s) == F.dim(s)
        assert T.des(Section(G.full_mask, 1), s).to_dense() == F.des(Section(G.full_mask, 1), s).to_dense()


def test_corrupted_file_names_the_diagram(tmp_path):
    G = catalog("D8")
    path = tmp_path / "bad.json"
    save_functor(BurnsideDual(G), str(path))
    data = json.loads(path.read_text())
    entry = next(e for e in data["des"] if any(any(r) for r in e["matrix"]))
    entry["matrix"][0][0] += 1
    path.write_text(json.dumps(data))
    rep = validate_functor(load_functor(str(path), G))
    assert not rep.ok
    assert all(f.startswith(("R1", "R2", "R3")) for f in rep.failures)


def test_malformed_file(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    with pytest.raises(InputError):
        load_functor(str(path))
