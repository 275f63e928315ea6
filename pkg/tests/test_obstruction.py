import pytest

from gluing import catalog
from gluing.errors import InputError, RankTooSmall
from gluing.functors import BurnsideDual
from gluing.homalg import AbGroup, induced_map_on_cohomology
from gluing.obstruction import (TABLES, check_s_set, circle_complex, compute_s_set,
                                constant_table, cross_validate, h1_invariant_cocycles, h1_orbit,
                                obs_dade_odd, obs_df_odd, obs_dt_2group, obs_dt_odd,
                                obs_rhetorical, obs_rq_dual, parse_table, reduced_h0_orbit_space)

Z1, Z2 = AbGroup(1), AbGroup(0, (2,))


def test_s_set_d8():
    G = catalog("D8")
    ss = compute_s_set(G, 2)
    assert len(ss.entries) == 1
    assert ss.entries[0].centralizer_order == 2


def test_s_set_xs3():
    ss = compute_s_set(catalog("XS(3,+)"), 3)
    assert len(ss.entries) == 3
    assert all(e.centralizer_type == "cyclic" and e.centralizer_order == 3 for e in ss.entries)


def test_s_set_empty_for_noncyclic_center():
    assert compute_s_set(catalog("C3xC3"), 3).entries == []


@pytest.mark.parametrize("spec", ["D8", "D16", "SD16", "Q8xC2", "XS(3,+)", "XS(3,-)", "D32"])
def test_s_set_structure(spec):
    G = catalog(spec)
    assert check_s_set(G, G.prime_divisors[0]).ok


def test_rhetorical_spot_values():
    assert obs_rhetorical(catalog("D8"), 2, constant_table(Z1)).group == Z1
    assert obs_rhetorical(catalog("XS(3,+)"), 3, constant_table(Z2)).group == AbGroup(0, (2, 2, 2))
    assert obs_rhetorical(catalog("C4xC2"), 2, constant_table(Z1)).group.is_zero


def test_rhetorical_needs_rank_two():
    with pytest.raises(RankTooSmall):
        obs_rhetorical(catalog("C8"), 2, TABLES["rq"])


def test_torsion_dade_odd():
    assert obs_dt_odd(catalog("XS(3,+)"), 3).group == AbGroup(0, (2, 2, 2))
    assert obs_dt_odd(catalog("C3xC3"), 3).group.is_zero
    assert obs_dt_odd(catalog("C9xC3"), 3).group.is_zero
    with pytest.raises(InputError):
        obs_dt_odd(catalog("D8"), 2)


def test_rational_dual():
    r = obs_rq_dual(catalog("D8"), 2)
    assert r.group == Z1 and r.notes
    with pytest.raises(RankTooSmall):
        obs_rq_dual(catalog("Q8"), 2)
    assert obs_rq_dual(catalog("C4xC4"), 2).group.is_zero


def test_torsion_dade_two_groups():
    assert obs_dt_2group(catalog("D8")).group.is_zero
    assert obs_dt_2group(catalog("SD16")).group.is_zero
    assert obs_dt_2group(catalog("D8xC2")).group.is_zero


def test_table_values():
    assert TABLES["dt"]("cyclic", 9) == Z2
    assert TABLES["rq"]("quaternion", 8) == Z1
    assert TABLES["dade2"]("cyclic", 2).is_zero
    assert TABLES["dade2"]("cyclic", 4) == Z2
    assert TABLES["dade2"]("quaternion", 8) == AbGroup(0, (4,))
    assert parse_table("const:Z/3").constant == AbGroup(0, (3,))
    assert parse_table("const:Z^2").constant == AbGroup(2)
    with pytest.raises(InputError):
        parse_table("bogus")


def test_h1_both_ways():
    for spec, p in [("D8", 2), ("XS(3,+)", 3), ("EA(2,3)", 2), ("C4xC2xC2", 2)]:
        G = catalog(spec)
        assert h1_orbit(G, p) == h1_invariant_cocycles(G, p)


def test_dade_odd_machinery():
    _, ker = induced_map_on_cohomology(circle_complex(), 1, 2)
    assert ker == Z1
    assert obs_dade_odd(catalog("XS(3,+)"), 3).group.is_zero
    assert obs_df_odd(catalog("XS(3,+)"), 3).group.is_zero


def test_orbit_space_h0_coefficients():
    G = catalog("XS(3,+)")
    assert reduced_h0_orbit_space(G, 3, AbGroup(2)) == AbGroup(6)
    assert reduced_h0_orbit_space(G, 3, AbGroup(0, (3,))) == AbGroup(0, (3, 3, 3))


def test_cross_validate_examples():
    rep = cross_validate(catalog("D8"), 2, functor=BurnsideDual(catalog("D8")),
                         routes=("direct", "bar", "oliver"))
    assert rep.ok
    assert rep.details["results"]["direct"]["-1"] == Z1.to_json()
    G = catalog("C2xC2")
    assert cross_validate(G, 2, functor=BurnsideDual(G), routes=("direct", "bar")).ok
    rep = cross_validate(catalog("XS(3,+)"), 3, table=constant_table(Z2),
                         routes=("formula", "orbit"), degrees=(0,))
    assert rep.ok
    assert rep.details["results"]["orbit"]["0"] == AbGroup(0, (2, 2, 2)).to_json()


def test_cross_validate_route_checks():
    G = catalog("D8")
    with pytest.raises(InputError):
        cross_validate(G, 2, functor=BurnsideDual(G), routes=("formula",))
    with pytest.raises(InputError):
        cross_validate(G, 2, table=TABLES["dade2"], routes=("orbit",))
