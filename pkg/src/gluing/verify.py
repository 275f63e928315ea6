"""Batch verifiers: one invariant suite per theorem, run over catalog groups.

Each verifier takes a catalog spec and returns a :class:`Report`; the CLI and
the acceptance tests fan these out over the corpus.
"""

from __future__ import annotations

from typing import Callable

from .catalog import CORPUS, catalog
from .engine import (bar_complex, check_limit_iso, faithful_part, gluing_system, obs_direct,
                     _kernel_columns)
from .errors import CapExceeded, RankTooSmall
from .functors import (AtomicFunctor, BurnsideDual, ConstantFunctor, DestrictionFunctor,
                       default_atomic_section)
from .homalg import GF, QQ, ZZ, AbGroup, cohomology, induced_map_on_cohomology, rank
from .obstruction import (TABLES, center_rank, check_s_set, circle_complex, constant_table,
                          h1_invariant_cocycles, h1_orbit, obs_dade_odd, obs_dt_2group,
                          obs_dt_odd, obs_rhetorical, obs_rq_dual, orbit_space_complex,
                          reduced_h0_orbit_space)
from .oliver import oliver_complex
from .groups import p_rank
from .sections import (Report, Section, a_geq2, check_opposite_iso_c_vs_quillen,
                       check_reduction_hypothesis)

# bar complexes with chains of length 3 are only built up to this order
BAR_DEGREE2_MAX_ORDER = 16


def prime_of(G) -> int | None:
    ps = G.prime_divisors
    return ps[0] if len(ps) == 1 else None


def standard_functors(G, p: int) -> list[DestrictionFunctor]:
    """Constant Z, constant F_p, the Burnside dual and one atomic functor."""
    return [ConstantFunctor(G), ConstantFunctor(G, ring=GF(p)), BurnsideDual(G),
            AtomicFunctor(G, default_atomic_section(G))]


def _s(h: AbGroup) -> str:
    return str(h)


# ---------------------------------------------------------------------------
# individual verifiers


def verify_bstar(spec: str) -> Report:
    G = catalog(spec)
    rep = Report(f"B* gluing on {spec}")
    ker, obs = obs_direct(BurnsideDual(G))
    rep.details.update(ker=_s(ker), obs=_s(obs))
    if ker != AbGroup(1) or not obs.is_zero:
        rep.fail(f"expected Ker = Z, Obs = 0; got Ker = {ker}, Obs = {obs}")
    return rep


def verify_cyclic(spec: str) -> Report:
    """Obs = 0 and Ker = Z spanned by the indicator of the trivial subgroup."""
    G = catalog(spec)
    rep = Report(f"cyclic B* on {spec}")
    F = BurnsideDual(G)
    ker, obs = obs_direct(F)
    S = gluing_system(F)
    K = _kernel_columns(S.detection, ZZ, S.detection.shape[1])
    whole = Section(G.full_mask, 1)
    reps, _ = F.basis(whole)
    pattern = [int(W == 1) for W in reps]
    rep.details.update(ker=_s(ker), obs=_s(obs), generator=K[0] if len(K) == 1 else K)
    if not obs.is_zero:
        rep.fail(f"Obs = {obs}")
    if len(K) != 1 or [abs(x) for x in K[0]] != pattern:
        rep.fail(f"kernel is not spanned by the trivial-subgroup indicator: {K}")
    return rep


def verify_shape_d8() -> Report:
    G = catalog("D8")
    rep = Report("Oliver complex shape on D8")
    OC = oliver_complex(BurnsideDual(G), 2)
    dims = OC.complex.dims
    rep.details["dims"] = dims
    blocks = [[(bin(G.centralizer_mask(E)).count("1"), bin(E).count("1"), d)
               for E, _, d in level] for level in OC.blocks]
    rep.details["blocks"] = blocks
    if dims != [8, 9, 2]:
        rep.fail(f"ranks {dims}, expected [8, 9, 2]")
    want = [[(8, 1, 8)], [(8, 2, 5), (4, 2, 2), (4, 2, 2)], [(4, 4, 1), (4, 4, 1)]]
    if sorted(map(sorted, blocks)) != sorted(map(sorted, want)):
        rep.fail(f"summands {blocks} differ from F(G) | F(G/Z)+F(E1/Q1)+F(E2/Q2) | F(E1/E1)+F(E2/E2)")
    return rep


def verify_routes(spec: str) -> Report:
    """Direct, bar and Oliver routes agree in degrees -1, 0, 1."""
    G = catalog(spec)
    p = prime_of(G)
    rep = Report(f"route agreement on {spec}")
    rows = {}
    for F in standard_functors(G, p):
        d = dict(zip((-1, 0), obs_direct(F)))
        B = bar_complex(F, "proper", 2)
        b = {n: cohomology(B.complex, n, F.ring) for n in (-1, 0, 1)}
        OC = oliver_complex(F, p)
        o = {n: OC.cohomology(n) for n in (-1, 0, 1)}
        rows[F.describe()] = {"direct": [_s(d[n]) for n in (-1, 0)],
                              "bar": [_s(b[n]) for n in (-1, 0, 1)],
                              "oliver": [_s(o[n]) for n in (-1, 0, 1)]}
        for n in (-1, 0, 1):
            if b[n] != o[n] or (n < 1 and d[n] != b[n]):
                rep.fail(f"{F.describe()} degree {n}: direct {d.get(n)}, bar {b[n]}, oliver {o[n]}")
    rep.details["results"] = rows
    return rep


def verify_limit_iso(spec: str) -> Report:
    G = catalog(spec)
    p = prime_of(G)
    rep = Report(f"limit isomorphism on {spec}")
    for F in standard_functors(G, p):
        r = check_limit_iso(F)
        for f in r.failures:
            rep.fail(f"{F.describe()}: {f}")
    return rep


def verify_reduction(spec: str) -> Report:
    """Reduced cohomology over proper, e and c collections agree; comma posets are acyclic."""
    G = catalog(spec)
    p = prime_of(G)
    rep = Report(f"collection reduction on {spec}")
    rows = {}
    for F in standard_functors(G, p):
        vals = {}
        for coll in ("proper", "e", "c"):
            B = bar_complex(F, coll, 2, p=p)
            vals[coll] = [cohomology(B.complex, n, F.ring) for n in (-1, 0, 1)]
        rows[F.describe()] = {k: [_s(h) for h in v] for k, v in vals.items()}
        if not vals["proper"] == vals["e"] == vals["c"]:
            rep.fail(f"{F.describe()}: {rows[F.describe()]}")
    rep.details["results"] = rows
    for sub, sup in (("e", "p"), ("c", "e")):
        r = check_reduction_hypothesis(G, sub, sup, p)
        rep.details[f"{sub} in {sup}"] = r.details.get("checked")
        for f in r.failures:
            rep.fail(f"{sub} in {sup}: {f}")
    return rep


def verify_rank_vanishing(spec: str) -> Report:
    """``H̃^i = 0`` for ``i >= rk(G)``: Oliver over Q and F_p in degrees rk..2, bar where feasible."""
    G = catalog(spec)
    p = prime_of(G)
    rk = p_rank(G, p)
    rep = Report(f"vanishing above the rank on {spec}")
    checked = []
    for base in (ConstantFunctor(G), BurnsideDual(G)):
        for ring in (QQ, GF(p)):
            F = type(base)(G, ring=ring)
            degrees = [i for i in range(rk, max(rk, 2) + 1)]
            OC = oliver_complex(F, p)
            for i in degrees:
                h = OC.cohomology(i)
                checked.append(("oliver", F.describe(), i))
                if not h.is_zero:
                    rep.fail(f"oliver {F.describe()} degree {i}: {h}")
            bar_degrees = [i for i in degrees if i <= 1 or G.order <= BAR_DEGREE2_MAX_ORDER]
            if bar_degrees and max(bar_degrees) <= 2:
                B = bar_complex(F, "proper", max(bar_degrees) + 1)
                for i in bar_degrees:
                    h = cohomology(B.complex, i, ring)
                    checked.append(("bar", F.describe(), i))
                    if not h.is_zero:
                        rep.fail(f"bar {F.describe()} degree {i}: {h}")
    rep.details.update(rank=rk, checked=len(checked),
                       bar_degrees=sorted({c[2] for c in checked if c[0] == "bar"}))
    return rep


def verify_constant_vanishing(spec: str) -> Report:
    """Constant coefficients over Q and F_p have vanishing reduced cohomology in degrees <= 2."""
    G = catalog(spec)
    p = prime_of(G)
    rep = Report(f"constant-coefficient vanishing on {spec}")
    for ring in (QQ, GF(p)):
        F = ConstantFunctor(G, ring=ring)
        OC = oliver_complex(F, p)
        for i in (-1, 0, 1, 2):
            h = OC.cohomology(i)
            if not h.is_zero:
                rep.fail(f"oliver over {ring} degree {i}: {h}")
        top = 3 if G.order <= BAR_DEGREE2_MAX_ORDER else 2
        B = bar_complex(F, "proper", top)
        for i in range(-1, top):
            h = cohomology(B.complex, i, ring)
            if not h.is_zero:
                rep.fail(f"bar over {ring} degree {i}: {h}")
        rep.details[f"bar_top_degree_{ring}"] = top - 1
    return rep


def verify_elementary(spec: str) -> Report:
    """Obs = 0 and Ker = ∂F(E) (as sublattices of F(E)) for the built-in functors."""
    G = catalog(spec)
    p = prime_of(G)
    rep = Report(f"elementary abelian on {spec}")
    whole = Section(G.full_mask, 1)
    fs = [ConstantFunctor(G), ConstantFunctor(G, ring=GF(p)), BurnsideDual(G),
          AtomicFunctor(G, whole)]
    rows = {}
    for F in fs:
        ker, obs = obs_direct(F)
        dF, dbasis = faithful_part(F)
        S = gluing_system(F)
        kbasis = _kernel_columns(S.detection, F.ring, S.detection.shape[1])
        rows[F.describe()] = {"ker": _s(ker), "obs": _s(obs), "faithful": _s(dF)}
        if not obs.is_zero:
            rep.fail(f"{F.describe()}: Obs = {obs}")
        if ker != dF or not _same_span(kbasis, dbasis, F.ring):
            rep.fail(f"{F.describe()}: Ker = {ker} but ∂F(E) = {dF}")
    rep.details["results"] = rows
    return rep


def _same_span(A: list[list[int]], B: list[list[int]], ring) -> bool:
    from .homalg import SparseMatrix
    if len(A) != len(B):
        return False
    if not A:
        return True
    n = len(A[0])
    both = SparseMatrix.from_dense([[v[i] for v in A + B] for i in range(n)], len(A) + len(B))
    return rank(both, ring if ring.modulus else QQ) == len(A)


def verify_central_rank(spec: str) -> Report:
    G = catalog(spec)
    p = prime_of(G)
    rep = Report(f"central rank regime on {spec}")
    rz = center_rank(G, p)
    rep.details["center_rank"] = rz
    if rz < 2:
        return rep
    vals = {"rhetorical Z": obs_rhetorical(G, p, TABLES["rq"]).group,
            "rhetorical Z/2": obs_rhetorical(G, p, constant_table(AbGroup(0, (2,)))).group,
            "rq": obs_rq_dual(G, p).group,
            "dt": obs_dt_2group(G).group if p == 2 else obs_dt_odd(G, p).group,
            "direct B*": obs_direct(BurnsideDual(G))[1]}
    rep.details["results"] = {k: _s(v) for k, v in vals.items()}
    for k, v in vals.items():
        if not v.is_zero:
            rep.fail(f"{k} gives {v}")
    return rep


def verify_rhetorical(spec: str) -> Report:
    """The sum over 𝒮 with a constant table equals the reduced H^0 of the orbit space."""
    G = catalog(spec)
    p = prime_of(G)
    rep = Report(f"rhetorical formula on {spec}")
    if not len(a_geq2(G, p)):
        rep.details["skipped"] = "rank < 2"
        return rep
    rows = {}
    for A in (AbGroup(1), AbGroup(0, (2,)), AbGroup(0, (p,)), AbGroup(2)):
        formula = obs_rhetorical(G, p, constant_table(A)).group
        h0 = reduced_h0_orbit_space(G, p, A)
        rows[str(A)] = [_s(formula), _s(h0)]
        if formula != h0:
            rep.fail(f"A = {A}: formula {formula}, orbit space {h0}")
    rep.details["results"] = rows
    s = check_s_set(G, p)
    for f in s.failures:
        rep.fail(f)
    return rep


def verify_dt_odd(spec: str) -> Report:
    G = catalog(spec)
    p = prime_of(G)
    rep = Report(f"torsion Dade formula on {spec}")
    if p == 2 or not len(a_geq2(G, p)):
        rep.details["skipped"] = "needs odd p and rank >= 2"
        return rep
    a, b = obs_dt_odd(G, p).group, obs_rhetorical(G, p, TABLES["dt"]).group
    rep.details["results"] = [_s(a), _s(b)]
    if a != b:
        rep.fail(f"orbit space {a}, sum over S {b}")
    return rep


def verify_h1(spec: str) -> Report:
    G = catalog(spec)
    p = prime_of(G)
    rep = Report(f"H^1 of the orbit space on {spec}")
    a, b = h1_invariant_cocycles(G, p), h1_orbit(G, p, ZZ)
    rep.details["results"] = [_s(a), _s(b)]
    if a != b:
        rep.fail(f"invariant cocycles {a}, orbit complex {b}")
    return rep


def verify_dade_kernel(spec: str | None = None) -> Report:
    """Mod-2 reduction kernel: Z on a circle, 0 whenever H^1 of the orbit space vanishes."""
    if spec is None:
        rep = Report("mod-2 kernel on a circle")
        _, ker = induced_map_on_cohomology(circle_complex(), 1, 2)
        rep.details["kernel"] = _s(ker)
        if ker != AbGroup(1):
            rep.fail(f"kernel {ker}, expected Z")
        return rep
    G = catalog(spec)
    p = prime_of(G)
    rep = Report(f"mod-2 kernel on {spec}")
    if not len(a_geq2(G, p)):
        rep.details["skipped"] = "rank < 2"
        return rep
    C = orbit_space_complex(G, p, ZZ, augmented=False)
    h1 = cohomology(C, 1, ZZ)
    _, ker = induced_map_on_cohomology(C, 1, 2)
    rep.details["results"] = {"H1": _s(h1), "kernel": _s(ker)}
    if p != 2:
        rep.details["obs_dade"] = _s(obs_dade_odd(G, p).group)
    if h1.is_zero and not ker.is_zero:
        rep.fail(f"H^1 = 0 but kernel = {ker}")
    return rep


def verify_opposite(spec: str) -> Report:
    G = catalog(spec)
    return check_opposite_iso_c_vs_quillen(G, prime_of(G))


# ---------------------------------------------------------------------------
# registry


def _is_p_group(spec: str) -> bool:
    return prime_of(catalog(spec)) is not None


def _small(spec: str, n: int = 32) -> bool:
    return catalog(spec).order <= n


VERIFIERS: dict[str, tuple[Callable[[str], Report], Callable[[str], bool], str]] = {
    "bstar": (verify_bstar, _is_p_group, "Ker = Z and Obs = 0 for the Burnside dual"),
    "cyclic": (verify_cyclic, lambda s: catalog(s).is_abelian and
               catalog(s).exponent == catalog(s).order and catalog(s).order > 1,
               "cyclic groups: kernel spanned by the trivial-subgroup indicator"),
    "limit-iso": (verify_limit_iso, _small, "gluing limit equals the limit over the orbit category"),
    "routes": (verify_routes, _small, "direct, bar and Oliver routes agree in degrees -1..1"),
    "reduction": (verify_reduction, _small, "proper, e and c collections give the same cohomology"),
    "rank-vanishing": (verify_rank_vanishing, _is_p_group, "reduced cohomology vanishes from the rank up"),
    "constant-vanishing": (verify_constant_vanishing, _is_p_group,
                           "constant coefficients over Q and F_p are acyclic"),
    "elementary": (verify_elementary, lambda s: s in ELEMENTARY,
                   "Obs = 0 and Ker = faithful part on elementary abelian groups"),
    "central-rank": (verify_central_rank, _is_p_group, "everything vanishes when rk Z(G) >= 2"),
    "rhetorical": (verify_rhetorical, _is_p_group, "sum over S equals the reduced H^0 of A>=2/G"),
    "dt-odd": (verify_dt_odd, _is_p_group, "torsion Dade group for odd p"),
    "h1": (verify_h1, _is_p_group, "invariant cocycles and orbit cochains give the same H^1"),
    "dade-kernel": (verify_dade_kernel, _is_p_group, "mod-2 reduction kernel on H^1"),
    "opposite": (verify_opposite, lambda s: _small(s, 16), "centralizer sections versus the Quillen category"),
}

ELEMENTARY = ["C2xC2", "EA(2,3)", "C3xC3", "EA(3,3)"]


def corpus_for(theorem: str, groups: list[str] | None = None, max_order: int | None = None,
               prime: int | None = None) -> list[str]:
    _, applies, _ = VERIFIERS[theorem]
    pool = groups if groups else (CORPUS + [g for g in ELEMENTARY if g not in CORPUS])
    out = []
    for spec in pool:
        G = catalog(spec)
        if max_order is not None and G.order > max_order:
            continue
        if prime is not None and prime_of(G) != prime:
            continue
        if groups or applies(spec):
            out.append(spec)
    return out


def run_verifier(theorem: str, spec: str) -> Report:
    fn = VERIFIERS[theorem][0]
    try:
        return fn(spec)
    except (CapExceeded, RankTooSmall) as exc:
        rep = Report(f"{theorem} on {spec}")
        rep.fail(f"{type(exc).__name__}: {exc}")
        return rep
