"""Closed-form obstruction groups and the cross-validation harness.

Everything here is driven by the poset ``A_>=2(G)`` of elementary abelian
subgroups of rank at least 2, its distinguished component ``B(G)`` and the
set ``𝒮`` of cyclic subgroups ``S`` of order ``p`` with ``S × Z`` an isolated
vertex (``Z`` the unique central subgroup of order ``p``).  Values of ``∂F``
on the groups ``C_G(S)/S`` come from named tables; they are parameters and
are never computed from representation theory here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import (FormulaMismatch, InputError, RankTooSmall, TableIncomplete,
                     UnsupportedValue)
from .groups import FinGroup, classify_small, section_group
from .homalg import (GF, ZZ, AbGroup, ChainComplex, Ring, SparseMatrix, cohomology,
                     induced_map_on_cohomology, kernel_basis)
from .sections import (Report, _sort_sign, a_geq2, components_a_geq2, elementary_rank,
                       full_cochain_complex, is_elementary_mask, order_complex,
                       orbit_cochain_complex)


def _popcount(m: int) -> int:
    return bin(m).count("1")


def center_rank(G: FinGroup, p: int) -> int:
    Zm = G.centralizer_mask(G.full_mask)
    return max((elementary_rank(H, p) for H in G._subgroup_masks
                if H & ~Zm == 0 and is_elementary_mask(G, H, p)), default=0)


def central_order_p(G: FinGroup, p: int) -> int:
    Zm = G.centralizer_mask(G.full_mask)
    cands = [H for H in G._subgroup_masks if H & ~Zm == 0 and _popcount(H) == p]
    if len(cands) != 1:
        raise InputError(f"{G.label} has no unique central subgroup of order {p}")
    return cands[0]


# ---------------------------------------------------------------------------
# the set 𝒮


@dataclass
class SEntry:
    S: int
    E: int
    centralizer_type: str       # of C_G(S)/S
    centralizer_order: int
    normalizer_type: str        # of N_G(S)/S


@dataclass
class SSet:
    G: FinGroup
    p: int
    Z: int | None
    b_choice: str
    entries: list[SEntry]
    note: str = ""

    def to_json(self) -> dict:
        pos = self.G.subgroup_position
        return {"Z": pos.get(self.Z) if self.Z else None, "B(G)": self.b_choice,
                "note": self.note,
                "entries": [{"S": pos[e.S], "E": pos[e.E],
                             "C_G(S)/S": f"{e.centralizer_type}{e.centralizer_order}",
                             "N_G(S)/S": e.normalizer_type} for e in self.entries]}


def compute_s_set(G: FinGroup, p: int) -> SSet:
    if not G.is_p_group(p):
        raise InputError(f"{G.label} is not a {p}-group")
    if center_rank(G, p) >= 2:
        return SSet(G, p, None, "", [], "rk Z(G) >= 2: every obstruction vanishes")
    comps = components_a_geq2(G, p)          # raises RankTooSmall
    Z = central_order_p(G, p)
    P = comps.poset
    seen: set[int] = set()
    entries = []
    for i in comps.isolated:
        E = P.elements[i]
        for H in G._subgroup_masks:
            if _popcount(H) != p or H == Z or H & ~E or H in seen:
                continue
            cls = G.subgroup_classes[G.class_of_subgroup[H]]
            seen.update(cls)
            S = cls[0]
            ES = G.closure([*_gens(G, S), *_gens(G, Z)])
            C = G.centralizer_mask(S)
            N = G.normalizer_mask(S)
            Cq = section_group(G.subgroup(C), G.subgroup(S))
            Nq = section_group(G.subgroup(N), G.subgroup(S))
            entries.append(SEntry(S, ES, classify_small(Cq), Cq.order, classify_small(Nq)))
    pos = G.subgroup_position
    entries.sort(key=lambda e: pos[e.S])
    return SSet(G, p, Z, comps.choice, entries)


def _gens(G: FinGroup, mask: int) -> list[int]:
    from .groups import _small_generating_set
    return _small_generating_set(G, mask)


def check_s_set(G: FinGroup, p: int) -> Report:
    """``N_G(S)/S`` is cyclic or quaternion for each ``S``, every non-``B(G)``
    component is a single rank-2 vertex, and the order-``p`` subgroups of an
    isolated vertex other than ``Z`` form one conjugacy class."""
    rep = Report(f"S-set structure for {G.label}")
    ss = compute_s_set(G, p)
    if ss.Z is None:
        return rep
    comps = components_a_geq2(G, p)
    P = comps.poset
    for i in comps.isolated:
        E = P.elements[i]
        if elementary_rank(E, p) != 2:
            rep.fail(f"isolated vertex {G.subgroup_position[E]} has rank {elementary_rank(E, p)}")
        if any(P.leq(i, j) or P.leq(j, i) for j in range(len(P)) if j != i):
            rep.fail(f"vertex {G.subgroup_position[E]} is not isolated")
        lines = {G.class_of_subgroup[H] for H in G._subgroup_masks
                 if _popcount(H) == p and H != ss.Z and H & ~E == 0}
        if len(lines) != 1:
            rep.fail(f"order-p subgroups of {G.subgroup_position[E]} fall into {len(lines)} classes")
    for e in ss.entries:
        if e.normalizer_type not in ("cyclic", "quaternion"):
            rep.fail(f"N_G(S)/S for S={G.subgroup_position[e.S]} is {e.normalizer_type}")
    return rep


# ---------------------------------------------------------------------------
# tables of faithful parts


@dataclass
class DelPartialTable:
    """``∂F`` on cyclic and generalized quaternion groups, or a constant ``A``."""
    name: str
    value: Callable[[str, int], AbGroup | None]
    constant: AbGroup | None = None

    def __call__(self, kind: str, order: int) -> AbGroup:
        out = self.value(kind, order)
        if out is None:
            raise TableIncomplete(f"table {self.name} has no value for {kind} of order {order}")
        return out


def constant_table(A: AbGroup, name: str | None = None) -> DelPartialTable:
    return DelPartialTable(name or f"const:{A}", lambda kind, order: A, A)


def _dade2(kind: str, order: int) -> AbGroup | None:
    if kind == "cyclic":
        return AbGroup() if order == 2 else AbGroup(0, (2,))
    if kind == "quaternion":
        return AbGroup(0, (4,))
    return None


TABLES: dict[str, DelPartialTable] = {
    # torsion part of the Dade group, odd p: ∂ is Z/2 on every nontrivial cyclic group
    "dt": constant_table(AbGroup(0, (2,)), "dt"),
    # dual rational representation ring: ∂ is Z
    "rq": constant_table(AbGroup(1), "rq"),
    # Dade group torsion for 2-groups: Z/n_S with n_S = 1, 2, 4
    "dade2": DelPartialTable("dade2", _dade2),
}


def parse_table(token: str) -> DelPartialTable:
    if token in TABLES:
        return TABLES[token]
    if token.startswith("const:"):
        body = token[len("const:"):]
        if body in ("Z", "ZZ"):
            return constant_table(AbGroup(1), token)
        if body.startswith("Z/"):
            return constant_table(AbGroup(0, (int(body[2:]),)), token)
        if body.startswith("Z^"):
            return constant_table(AbGroup(int(body[2:])), token)
    raise InputError(f"unknown table {token!r}")


# ---------------------------------------------------------------------------
# orbit-space cohomology


def _ring_for(A: AbGroup) -> tuple[Ring, int]:
    """Coefficient ring and multiplicity for a constant ``A`` = ``R^k``."""
    if A.is_zero:
        return ZZ, 0
    if A.rank and not A.torsion:
        return ZZ, A.rank
    if not A.rank and len(set(A.torsion)) == 1:
        m = A.torsion[0]
        if all(m % d for d in range(2, int(m ** 0.5) + 1)):
            return GF(m), len(A.torsion)
    raise UnsupportedValue(f"constant coefficients {A} must be Z^k or (Z/p)^k")


def _times(H: AbGroup, k: int) -> AbGroup:
    out = AbGroup()
    for _ in range(k):
        out = out + H
    return out


def orbit_space_complex(G: FinGroup, p: int, ring: Ring = ZZ, augmented: bool = True
                        ) -> ChainComplex:
    X = order_complex(a_geq2(G, p), max_dim=2)
    return orbit_cochain_complex(X, ring, augmented)


def reduced_h0_orbit_space(G: FinGroup, p: int, A: AbGroup) -> AbGroup:
    """``H̃^0(A_>=2(G)/G; A)``."""
    ring, k = _ring_for(A)
    if k == 0:
        return AbGroup()
    if not len(a_geq2(G, p)):
        raise RankTooSmall(f"{G.label} has {p}-rank < 2")
    return _times(cohomology(orbit_space_complex(G, p, ring), 0, ring), k)


def h1_orbit(G: FinGroup, p: int, ring: Ring = ZZ) -> AbGroup:
    """``H^1(A_>=2(G)/G; ring)`` from the orbit cochain complex."""
    if not len(a_geq2(G, p)):
        return AbGroup()
    return cohomology(orbit_space_complex(G, p, ring, augmented=False), 1, ring)


def h1_invariant_cocycles(G: FinGroup, p: int) -> AbGroup:
    """``H^1`` of the G-invariant subcomplex of the full cochain complex of
    ``A_>=2(G)``, with integer coefficients."""
    P = a_geq2(G, p)
    if not len(P):
        return AbGroup()
    X = order_complex(P, max_dim=2)
    full = full_cochain_complex(X)
    bases = []
    for k, level in enumerate(X.simplices[:3]):
        idx = X.simplex_index[k]
        rows = []
        for perm in X.vertex_action:
            for j, s in enumerate(level):
                t, sign = _sort_sign([perm[v] for v in s])
                i = idx[t]
                row = {}
                # (g·c)(t) = sign c(s); invariance: sign c_s - c_t = 0
                row[j] = row.get(j, 0) + sign
                row[i] = row.get(i, 0) - 1
                row = {a: b for a, b in row.items() if b}
                if row:
                    rows.append(row)
        n = len(level)
        if rows:
            M = [[r.get(c, 0) for c in range(n)] for r in rows]
            K = kernel_basis(M, ZZ, n)
            kdim = len(K[0]) if K and K[0] else 0
            bases.append([[K[i][c] for i in range(n)] for c in range(kdim)])
        else:
            bases.append([[int(i == c) for i in range(n)] for c in range(n)])
    while len(bases) < 3:
        bases.append([])
    from .oliver import _left_inverse
    diffs = []
    for k in range(2):
        src, dst = bases[k], bases[k + 1]
        D = full.d(k)
        if not src or not dst:
            diffs.append(SparseMatrix.zero(len(dst), len(src)))
            continue
        L = _left_inverse([[b[i] for b in dst] for i in range(len(dst[0]))], 0)
        images = [D.apply(v) for v in src]
        M = [[sum(L[r][i] * img[i] for i in range(len(img))) for img in images]
             for r in range(len(dst))]
        diffs.append(SparseMatrix.from_dense(M, len(src)))
    C = ChainComplex([len(b) for b in bases], diffs, lo=0)
    return cohomology(C, 1, ZZ)


# ---------------------------------------------------------------------------
# obstruction formulas


@dataclass
class FormulaResult:
    group: AbGroup
    notes: list[str] = field(default_factory=list)
    s_set: SSet | None = None

    def to_json(self) -> dict:
        out = {"result": self.group.to_json(), "notes": self.notes}
        if self.s_set is not None:
            out["S"] = self.s_set.to_json()
        return out


def _vanishing(G: FinGroup, p: int) -> FormulaResult | None:
    if center_rank(G, p) >= 2:
        return FormulaResult(AbGroup(), ["rk Z(G) >= 2, so the obstruction group vanishes"])
    return None


def obs_rhetorical(G: FinGroup, p: int, table: DelPartialTable) -> FormulaResult:
    """``⊕_{S∈𝒮} ∂F(C_G(S)/S)``; for a constant table this is also checked
    against ``H̃^0(A_>=2(G)/G; A)``."""
    pre = _vanishing(G, p)
    if pre is not None:
        if table.constant is not None and len(a_geq2(G, p)):
            h0 = reduced_h0_orbit_space(G, p, table.constant)
            if not h0.is_zero:
                raise FormulaMismatch(f"orbit space of {G.label} is disconnected: {h0}")
        return pre
    ss = compute_s_set(G, p)
    total = AbGroup()
    for e in ss.entries:
        total = total + table(e.centralizer_type, e.centralizer_order)
    res = FormulaResult(total, [f"B(G): {ss.b_choice}"], ss)
    if table.constant is not None:
        h0 = reduced_h0_orbit_space(G, p, table.constant)
        if h0 != total:
            raise FormulaMismatch(f"sum over S gives {total}, orbit space gives {h0}")
        res.notes.append("agrees with the reduced H^0 of the orbit space")
    return res


def obs_dt_odd(G: FinGroup, p: int) -> FormulaResult:
    """Torsion Dade group, odd ``p``: ``H̃^0(A_>=2(G)/G; F_2)``."""
    if p == 2:
        raise InputError("obs_dt_odd needs an odd prime")
    pre = _vanishing(G, p)
    if pre is not None:
        return pre
    return FormulaResult(reduced_h0_orbit_space(G, p, AbGroup(0, (2,))))


_ROQUETTE_NOTE = ("dihedral/semidihedral input: a published variant of this formula "
                  "disagrees for rank-2 Roquette groups; the orbit-space formula is reported")


def obs_rq_dual(G: FinGroup, p: int) -> FormulaResult:
    """Dual rational representation functor: ``H̃^0(A_>=2(G)/G; Z)``."""
    notes = []
    if classify_small(G) in ("dihedral", "semidihedral"):
        notes.append(_ROQUETTE_NOTE)
    pre = _vanishing(G, p)
    if pre is not None:
        pre.notes += notes
        return pre
    return FormulaResult(reduced_h0_orbit_space(G, p, AbGroup(1)), notes)


def obs_dt_2group(G: FinGroup) -> FormulaResult:
    """Torsion Dade group for a 2-group: ``⊕ Z/n_S``."""
    pre = _vanishing(G, 2)
    if pre is not None:
        return pre
    return obs_rhetorical(G, 2, TABLES["dade2"])


def obs_dade_odd(G: FinGroup, p: int) -> FormulaResult:
    """Kernel of ``H^1(A_>=2/G; Z) -> H^1(A_>=2/G; Z/2)``, which is ``Obs(D(G))``
    by exactness of the coefficient sequence."""
    if p == 2:
        raise InputError("obs_dade_odd needs an odd prime")
    if not len(a_geq2(G, p)):
        return FormulaResult(AbGroup(), ["A_>=2(G) is empty"])
    C = orbit_space_complex(G, p, ZZ, augmented=False)
    f, ker = induced_map_on_cohomology(C, 1, 2)
    notes = [f"H^1(Z) = {f.source}", f"H^1(Z/2) = {f.target}",
             "Obs(D(G)) = H^1(D_G^*; C_b) = H^1(A_>=2/G; A); kernel taken by exactness"]
    return FormulaResult(ker, notes)


def obs_df_odd(G: FinGroup, p: int) -> FormulaResult:
    """``Obs(D_f(G)) = H^1(A_>=2(G)/G; Z)``."""
    if p == 2:
        raise InputError("obs_df_odd needs an odd prime")
    return FormulaResult(h1_orbit(G, p, ZZ))


def circle_complex() -> ChainComplex:
    """Cochains of a triangle boundary: ``H^1 = Z``."""
    d0 = SparseMatrix.from_dense([[-1, 1, 0], [0, -1, 1], [-1, 0, 1]])
    return ChainComplex([3, 3], [d0], lo=0)


# ---------------------------------------------------------------------------
# cross validation


ROUTES = ("direct", "bar", "oliver", "formula", "orbit")


def cross_validate(G: FinGroup, p: int, functor=None, table: DelPartialTable | None = None,
                   routes=("direct", "bar", "oliver"), degrees=(-1, 0, 1),
                   collection: str = "proper", chain_cap: int | None = None) -> Report:
    """Run the requested routes and compare their groups degree by degree."""
    from .engine import CHAIN_CAP, bar_complex, obs_direct
    from .oliver import oliver_complex
    name = functor.describe() if functor is not None else (table.name if table else "-")
    rep = Report(f"cross-validate {G.label}, {name}")
    results: dict[str, dict[int, AbGroup]] = {}
    for route in routes:
        if route not in ROUTES:
            raise InputError(f"unknown route {route!r}")
        if route in ("direct", "bar", "oliver") and functor is None:
            raise InputError(f"route {route} needs a functor")
        if route in ("formula", "orbit") and table is None:
            raise InputError(f"route {route} needs a table")
        if route == "direct":
            ker, obs = obs_direct(functor)
            results[route] = {d: h for d, h in ((-1, ker), (0, obs)) if d in degrees}
        elif route == "bar":
            top = max(max(degrees) + 1, 1)
            B = bar_complex(functor, collection, top, chain_cap or CHAIN_CAP, p)
            results[route] = {d: cohomology(B.complex, d, functor.ring) for d in degrees}
        elif route == "oliver":
            OC = oliver_complex(functor, p)
            results[route] = {d: OC.cohomology(d) for d in degrees}
        elif route == "formula":
            res = obs_rhetorical(G, p, table)
            results[route] = {0: res.group}
            rep.details["formula_notes"] = res.notes
            if res.s_set is not None:
                rep.details["S"] = res.s_set.to_json()
        elif route == "orbit":
            if table.constant is None:
                raise InputError("the orbit route needs a constant table")
            if center_rank(G, p) >= 2:
                results[route] = {0: AbGroup()}
            else:
                results[route] = {0: reduced_h0_orbit_space(G, p, table.constant)}
    rep.details["results"] = {r: {str(d): h.to_json() for d, h in sorted(v.items())}
                              for r, v in results.items()}
    names = list(results)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            for d in sorted(set(results[a]) & set(results[b])):
                if results[a][d] != results[b][d]:
                    rep.fail(f"degree {d}: {a} gives {results[a][d]}, {b} gives {results[b][d]}")
    rep.details["agree"] = rep.ok
    return rep
