"""Gluing data, detection maps and cohomology of the orbit category of sections.

Two independent routes to ``Ker`` and ``Obs`` of the detection map live here:

* the direct route solves the gluing-data system over conjugacy-class
  representatives of nontrivial subgroups;
* the bar route builds the normalized nerve cochain complex of a skeleton of
  the orbit category (one object per conjugacy class of sections), augmented
  by ``F(G)`` in degree -1.

Both complexes have integral matrices; a functor's ``ring`` says how they are
read (``Z``, ``Q`` or ``F_p``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .errors import BarSizeBound, CollectionTooSmall, InputError
from .functors import DestrictionFunctor, TabulatedFunctor
from .groups import FinGroup, _small_generating_set, bits
from .homalg import (ZZ, AbGroup, AbMap, ChainComplex, Ring, SparseMatrix, cohomology,
                     elementary_divisors, hstack, kernel_basis, rank, solve, vstack)
from .sections import (Report, Section, canonical_right_coset, conj_section, hom_sections,
                       sections)

CHAIN_CAP = 2_000_000


def _transporter_cache(G: FinGroup) -> dict:
    cache = getattr(G, "_transporters", None)
    if cache is None:
        cache = G._transporters = {}
    return cache


def subgroup_transporter(G: FinGroup, src: int, dst: int) -> int:
    """Least ``t`` with ``^t src = dst``."""
    cache = _transporter_cache(G)
    key = (src, dst)
    t = cache.get(key)
    if t is None:
        t = G.transporter(src, dst)
        if t is None:
            raise InputError("subgroups are not conjugate")
        cache[key] = t
    return t


def _whole(G: FinGroup) -> Section:
    return Section(G.full_mask, 1)


def _require(F: DestrictionFunctor, needed: list[Section]) -> None:
    if isinstance(F, TabulatedFunctor):
        missing = [s for s in needed if s not in F.dims]
        if missing:
            raise CollectionTooSmall(
                f"functor lacks {len(missing)} section(s) needed here, e.g. {missing[0]}")


# ---------------------------------------------------------------------------
# direct route


@dataclass
class GluingSystem:
    """The linear system of gluing data, with the detection map.

    ``complex`` is ``F(G) --D--> ⊕_H F(N_G(H)/H) --W--> constraints``; gluing
    data are the kernel of ``W`` and ``D`` is the detection map.
    """
    F: DestrictionFunctor
    reps: list[int]                      # subgroup masks
    blocks: list[tuple[Section, int, int]]  # (N_G(H)/H, offset, dim)
    detection: SparseMatrix
    constraints: SparseMatrix
    row_labels: list[str] = field(default_factory=list)

    @property
    def nvars(self) -> int:
        return self.detection.shape[0]

    @cached_property
    def complex(self) -> ChainComplex:
        n = self.nvars
        return ChainComplex([self.detection.shape[1], n, self.constraints.shape[0]],
                            [self.detection, self.constraints], lo=-1)


def gluing_system(F: DestrictionFunctor) -> GluingSystem:
    G = F.G
    reps = [cl[0] for cl in G.subgroup_classes if cl[0] != 1]
    secs = {H: Section(G.normalizer_mask(H), H) for H in reps}
    whole = _whole(G)
    _require(F, [whole] + list(secs.values()))
    blocks, offset = [], 0
    where = {}
    for H in reps:
        d = F.dim(secs[H])
        blocks.append((secs[H], offset, d))
        where[H] = (offset, d)
        offset += d
    nvars = offset
    nG = F.dim(whole)

    D = SparseMatrix(nvars, nG)
    for H in reps:
        off, _ = where[H]
        for i, row in F.des(whole, secs[H]).rows.items():
            D.rows[off + i] = dict(row)

    rows: list[dict[int, int]] = []
    labels: list[str] = []

    def put(blocks_: list[tuple[int, SparseMatrix]], label: str) -> None:
        height = blocks_[0][1].shape[0]
        new = [dict() for _ in range(height)]
        for off, M in blocks_:
            for i, row in M.rows.items():
                tgt = new[i]
                for j, v in row.items():
                    w = tgt.get(off + j, 0) + v
                    if w:
                        tgt[off + j] = w
                    else:
                        tgt.pop(off + j, None)
        for r in new:
            if r:
                rows.append(r)
                labels.append(label)

    pos = G.subgroup_position
    cls = G.class_of_subgroup
    for H in reps:
        sH = secs[H]
        off, d = where[H]
        if not d:
            continue
        # (i) invariance under N_G(H), imposed on generators
        for n in _small_generating_set(G, sH.U):
            M = F.conj(n, sH) - SparseMatrix.identity(d)
            put([(off, M)], f"conj H={pos[H]} n={n}")
    for H in reps:
        sH = secs[H]
        offH, dH = where[H]
        NH = sH.U
        # (ii) for every nontrivial proper K normal in H
        for K in G._subgroup_masks:
            if K == 1 or K == H or K & ~H or not G.is_normal_mask(K, H):
                continue
            rK = G.subgroup_classes[cls[K]][0]
            offK, dK = where[rK]
            x = Section(NH & G.normalizer_mask(K), H)
            if not F.dim(x):
                continue
            t = subgroup_transporter(G, rK, K)
            left = F.des(Section(G.normalizer_mask(K), K), x) @ F.conj(t, secs[rK])
            right = F.des(sH, x).scale(-1)
            parts = []
            if dK:
                parts.append((offK, left))
            if dH:
                parts.append((offH, right))
            if parts:
                put(parts, f"des H={pos[H]} K={pos[K]}")
    W = SparseMatrix(len(rows), nvars, {i: r for i, r in enumerate(rows)})
    return GluingSystem(F, reps, blocks, D, W, labels)


def gluing_limit(F: DestrictionFunctor) -> tuple[AbGroup, list[list[int]]]:
    """The group of gluing data and a basis (vectors over the representatives' blocks)."""
    S = gluing_system(F)
    basis = _kernel_columns(S.constraints, F.ring, S.nvars)
    return AbGroup.over(F.ring, len(basis)), basis


def _kernel_columns(M: SparseMatrix, ring: Ring, ncols: int) -> list[list[int]]:
    if ncols == 0:
        return []
    if M.shape[0] == 0:
        return [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    K = kernel_basis(M, ring, ncols)
    k = len(K[0]) if K and K[0] else 0
    return [[K[i][c] for i in range(ncols)] for c in range(k)]


def detection_map(F: DestrictionFunctor) -> AbMap:
    """``r^F_G : F(G) -> lim``, written in the basis returned by :func:`gluing_limit`."""
    S = gluing_system(F)
    basis = _kernel_columns(S.constraints, F.ring, S.nvars)
    A = [[b[i] for b in basis] for i in range(S.nvars)]
    D = S.detection.to_dense()
    nG = S.detection.shape[1]
    cols = []
    for j in range(nG):
        v = [D[i][j] for i in range(S.nvars)]
        if F.ring.modulus:
            from .homalg import solve_mod
            cols.append(solve_mod(A, v, F.ring.modulus, len(basis)))
        else:
            cols.append(solve(A, v, len(basis)))
    matrix = tuple(tuple(cols[j][i] for j in range(nG)) for i in range(len(basis)))
    return AbMap(AbGroup.over(F.ring, nG), AbGroup.over(F.ring, len(basis)), matrix)


def obs_direct(F: DestrictionFunctor) -> tuple[AbGroup, AbGroup]:
    """``(Ker r^F_G, Obs F(G))`` from the gluing system."""
    C = gluing_system(F).complex
    return cohomology(C, -1, F.ring), cohomology(C, 0, F.ring)


# ---------------------------------------------------------------------------
# bar route


@dataclass
class Skeleton:
    """One object per conjugacy class of sections in a collection, with all morphisms."""
    G: FinGroup
    objects: list[Section]
    morphisms: list[tuple[int, int, int]]     # (source, target, coset label)
    by_source: list[list[int]]
    index: dict[tuple[int, int, int], int]

    def compose(self, b: int, a: int) -> int | None:
        """Id of ``b ∘ a`` (``a`` first), or None for an identity."""
        x, _, g = self.morphisms[a]
        _, z, h = self.morphisms[b]
        lab = canonical_right_coset(self.G, self.objects[z].U, self.G.mul[h][g])
        if x == z and lab == 0:
            return None
        return self.index[x, z, lab]


def skeleton(G: FinGroup, collection_id: str, p: int | None = None) -> Skeleton:
    cache = getattr(G, "_skeletons", None)
    if cache is None:
        cache = G._skeletons = {}
    key = (collection_id, p)
    if key not in cache:
        cache[key] = _build_skeleton(G, collection_id, p)
    return cache[key]


def _build_skeleton(G: FinGroup, collection_id: str, p: int | None) -> Skeleton:
    P = sections(G, collection_id, p)
    objs = [P.elements[i] for i in P.representatives]
    mors: list[tuple[int, int, int]] = []
    for a, x in enumerate(objs):
        for b, y in enumerate(objs):
            if bin(x.U).count("1") > bin(y.U).count("1") or \
                    bin(y.V).count("1") > bin(x.V).count("1"):
                continue
            for lab in hom_sections(G, x, y):
                if a == b and lab == 0:
                    continue
                mors.append((a, b, lab))
    by_source: list[list[int]] = [[] for _ in objs]
    for i, (a, _, _) in enumerate(mors):
        by_source[a].append(i)
    return Skeleton(G, objs, mors, by_source, {m: i for i, m in enumerate(mors)})


@dataclass
class BarComplex:
    skeleton: Skeleton
    complex: ChainComplex       # degrees -1 .. top
    chains: list[list[tuple[int, ...]]]


def bar_complex(F: DestrictionFunctor, collection_id: str = "proper", top: int = 2,
                chain_cap: int = CHAIN_CAP, p: int | None = None) -> BarComplex:
    """Augmented normalized nerve cochains ``F(G) -> C^0 -> ... -> C^top``.

    ``C^n`` is the product over chains ``x0 -a1-> x1 -> ... -an-> xn`` of
    non-identity morphisms of ``F(x0)``, with differential

        (dφ)(a1..a_{n+1}) = F(a1) φ(a2..) + Σ_i (-1)^i φ(.., a_{i+1}∘a_i, ..)
                            + (-1)^{n+1} φ(a1..an)

    where a composite that is an identity contributes nothing.
    """
    G = F.G
    S = skeleton(G, collection_id, p)
    objs = S.objects
    whole = _whole(G)
    _require(F, [whole] + objs)
    fmat: dict[int, SparseMatrix] = {}

    def Fm(m: int) -> SparseMatrix:
        M = fmat.get(m)
        if M is None:
            a, b, g = S.morphisms[m]
            M = fmat[m] = F.morphism(objs[b], objs[a], g)
        return M

    # chains by length; length-0 chains are objects
    chains: list[list[tuple[int, ...]]] = [[(x,) for x in range(len(objs))]]
    total = 0
    for n in range(1, top + 1):
        nxt = []
        for ch in chains[-1]:
            last = ch[-1] if n > 1 else None
            if n == 1:
                starts = S.by_source[ch[0]]
            else:
                starts = S.by_source[S.morphisms[last][1]]
            for m in starts:
                nxt.append(ch + (m,) if n > 1 else (m,))
        total += len(nxt)
        if total > chain_cap:
            raise BarSizeBound(f"nerve has more than {chain_cap} chains up to length {n}")
        chains.append(nxt)

    def src(ch: tuple[int, ...], n: int) -> int:
        return ch[0] if n == 0 else S.morphisms[ch[0]][0]

    offsets = []
    dims = []
    for n, level in enumerate(chains):
        offs, o = {}, 0
        for ch in level:
            offs[ch] = o
            o += F.dim(objs[src(ch, n)])
        offsets.append(offs)
        dims.append(o)
    nG = F.dim(whole)

    diffs = []
    aug = SparseMatrix(dims[0], nG)
    for (x,), o in offsets[0].items():
        for i, row in F.des(whole, objs[x]).rows.items():
            aug.rows[o + i] = dict(row)
    diffs.append(aug)

    for n in range(0, top):
        D = SparseMatrix(dims[n + 1], dims[n])
        for ch, o in offsets[n + 1].items():
            x0 = S.morphisms[ch[0]][0]
            d0 = F.dim(objs[x0])
            if not d0:
                continue
            # face 0: F(a1) φ(a2 ..)
            if n == 0:
                tail = (S.morphisms[ch[0]][1],)
            else:
                tail = ch[1:]
            _add_block(D, o, offsets[n][tail], Fm(ch[0]), 1)
            # inner faces
            for i in range(n):
                c = S.compose(ch[i + 1], ch[i])
                if c is None:
                    continue
                face = ch[:i] + (c,) + ch[i + 2:]
                _add_identity(D, o, offsets[n][face], d0, (-1) ** (i + 1))
            # last face
            last = (x0,) if n == 0 else ch[:-1]
            _add_identity(D, o, offsets[n][last], d0, (-1) ** (n + 1))
        diffs.append(D)
    C = ChainComplex([nG] + dims, diffs, lo=-1)
    return BarComplex(S, C, chains)


def _add_block(D: SparseMatrix, r0: int, c0: int, M: SparseMatrix, sign: int) -> None:
    for i, row in M.rows.items():
        tgt = D.rows.setdefault(r0 + i, {})
        for j, v in row.items():
            w = tgt.get(c0 + j, 0) + sign * v
            if w:
                tgt[c0 + j] = w
            else:
                tgt.pop(c0 + j, None)


def _add_identity(D: SparseMatrix, r0: int, c0: int, d: int, sign: int) -> None:
    for i in range(d):
        tgt = D.rows.setdefault(r0 + i, {})
        w = tgt.get(c0 + i, 0) + sign
        if w:
            tgt[c0 + i] = w
        else:
            tgt.pop(c0 + i, None)


def category_cohomology(F: DestrictionFunctor, collection_id: str = "proper", n: int = 0,
                        chain_cap: int = CHAIN_CAP, p: int | None = None) -> AbGroup:
    """``H^n`` of the orbit category over a collection (unreduced), ``0 <= n <= 2``."""
    if not 0 <= n <= 2:
        raise InputError("category cohomology is computed in degrees 0..2")
    B = bar_complex(F, collection_id, n + 1, chain_cap, p)
    C = B.complex
    plain = ChainComplex(C.dims[1:], C.diffs[1:], lo=0)
    return cohomology(plain, n, F.ring)


def reduced_cohomology(F: DestrictionFunctor, collection_id: str = "proper", n: int = 0,
                       chain_cap: int = CHAIN_CAP, p: int | None = None) -> AbGroup:
    """Reduced cohomology: kernel/cokernel of detection for ``n = -1, 0``, else ``H^n``."""
    if not -1 <= n <= 2:
        raise InputError("reduced cohomology is computed in degrees -1..2")
    B = bar_complex(F, collection_id, max(n + 1, 1), chain_cap, p)
    return cohomology(B.complex, n, F.ring)


def reduced_cohomology_all(F: DestrictionFunctor, collection_id: str = "proper",
                           degrees=(-1, 0, 1), chain_cap: int = CHAIN_CAP,
                           p: int | None = None) -> dict[int, AbGroup]:
    """Several degrees from one complex."""
    B = bar_complex(F, collection_id, max(degrees) + 1, chain_cap, p)
    return {n: cohomology(B.complex, n, F.ring) for n in degrees}


def limit_over_category(F: DestrictionFunctor, collection_id: str = "proper",
                        p: int | None = None) -> AbGroup:
    B = bar_complex(F, collection_id, 1, p=p)
    C = B.complex
    plain = ChainComplex(C.dims[1:], C.diffs[1:], lo=0)
    return cohomology(plain, 0, F.ring)


def check_limit_iso(F: DestrictionFunctor) -> Report:
    """The map taking a compatible family ``(ψ_x)`` over the proper orbit category to
    the gluing data ``f_H = ψ_{(N_G(H),H)}`` is an isomorphism and carries the
    bar-side detection map to the direct one."""
    G = F.G
    rep = Report(f"limit iso for {F.describe()} on {G.label}")
    B = bar_complex(F, "proper", 1)
    S = B.skeleton
    C = B.complex
    d0 = C.diffs[1]
    n0 = C.dims[1]
    lim_bar = _kernel_columns(d0, F.ring, n0)
    sysd = gluing_system(F)
    lim_dir = _kernel_columns(sysd.constraints, F.ring, sysd.nvars)
    offs = {}
    o = 0
    for x, s in enumerate(S.objects):
        offs[s] = o
        o += F.dim(s)
    P = sections(G, "proper")
    rep_of = {P.elements[i]: P.elements[P.orbits[P.orbit_of[i]][0]] for i in range(len(P))}
    trans = {P.elements[i]: P.transporters[i] for i in range(len(P))}
    # Φ : C^0(bar) -> C^0(direct)
    Phi = SparseMatrix(sysd.nvars, n0)
    for sH, off, d in sysd.blocks:
        r = rep_of[sH]
        _add_block(Phi, off, offs[r], F.conj(trans[sH], r), 1)
    m = F.ring.modulus
    if not (Phi @ C.diffs[0] - sysd.detection).is_zero(m):
        rep.fail("Φ does not intertwine the two detection maps")
    if len(lim_bar) != len(lim_dir):
        rep.fail(f"limits differ in rank: {len(lim_bar)} vs {len(lim_dir)}")
        return rep
    if not lim_bar:
        return rep
    images = [Phi.apply(v) for v in lim_bar]
    if not (sysd.constraints @ SparseMatrix.from_dense(
            [[v[i] for v in images] for i in range(sysd.nvars)], len(images))).is_zero(m):
        rep.fail("Φ does not land in the gluing data")
        return rep
    A = [[b[i] for b in lim_dir] for i in range(sysd.nvars)]
    coords = []
    for v in images:
        if m:
            from .homalg import solve_mod
            coords.append(solve_mod(A, v, m, len(lim_dir)))
        else:
            coords.append(solve(A, v, len(lim_dir)))
    T = [[coords[j][i] for j in range(len(coords))] for i in range(len(lim_dir))]
    if m:
        ok = rank(SparseMatrix.from_dense(T), F.ring) == len(T)
    else:
        ok = elementary_divisors(T) == [1] * len(T)
    if not ok:
        rep.fail("Φ is not invertible on the limits")
    rep.details["rank"] = len(lim_dir)
    return rep


# ---------------------------------------------------------------------------
# faithful parts and HTW sequences


def minimal_normal_subgroups(G: FinGroup, U: int, V: int) -> list[int]:
    """Masks ``N`` with ``V < N ⊴ U`` minimal (the minimal normal subgroups of ``U/V``)."""
    cands = [H for H in G._subgroup_masks
             if H != V and V & ~H == 0 and H & ~U == 0 and G.is_normal_mask(H, U)]
    return [N for N in cands if not any(M != N and M & ~N == 0 for M in cands)]


def faithful_part(F: DestrictionFunctor, section: Section | None = None
                  ) -> tuple[AbGroup, list[list[int]]]:
    """``∂F(U/V)``: the common kernel of all deflations to proper quotients.

    Every deflation to ``U/N`` with ``N > V`` factors through one to ``U/N0``
    for a minimal ``N0 <= N``, so minimal normal subgroups suffice.
    """
    G = F.G
    s = section or _whole(G)
    d = F.dim(s)
    mats = [F.des(s, Section(s.U, N)) for N in minimal_normal_subgroups(G, s.U, s.V)]
    if not mats:
        basis = [[int(i == j) for i in range(d)] for j in range(d)]
    else:
        basis = _kernel_columns(vstack(mats, d), F.ring, d)
    return AbGroup.over(F.ring, len(basis)), basis


def check_htw_sequences(F: DestrictionFunctor, K: int) -> Report:
    """Exactness of the deflation/restriction sequences attached to a normal
    ``K ≅ C_p × C_p``; recorded only, never assumed."""
    G = F.G
    rep = Report(f"HTW sequence for {F.describe()} on {G.label}")
    if not G.is_normal_mask(K, G.full_mask):
        rep.fail("K is not normal")
        return rep
    p = G.element_orders[bits(K)[1]]
    cyc = sorted((H for H in G._subgroup_masks
                  if H != 1 and H & ~K == 0 and bin(H).count("1") == p),
                 key=G.subgroup_position.__getitem__)
    if len(cyc) != p + 1 or bin(K).count("1") != p * p:
        rep.fail("K is not elementary abelian of rank 2")
        return rep
    whole = _whole(G)
    Zm = G.centralizer_mask(G.full_mask)
    central = K & ~Zm == 0
    rep.details["central"] = central
    if central:
        C0, rest = cyc[0], cyc[1:]
        tgtK = Section(G.full_mask, K)
        alpha = vstack([F.des(whole, Section(G.full_mask, C)) for C in cyc], F.dim(whole))
        dK = F.dim(tgtK)
        blocks_row = []
        defK0 = F.des(Section(G.full_mask, C0), tgtK)
        for i, C in enumerate(rest):
            row = [defK0.scale(-1)] + [F.des(Section(G.full_mask, D), tgtK) if j == i
                                        else SparseMatrix.zero(dK, F.dim(Section(G.full_mask, D)))
                                        for j, D in enumerate(rest)]
            blocks_row.append(hstack(row, dK))
        beta = vstack(blocks_row, alpha.shape[0])
    else:
        C0 = next(C for C in cyc if C & ~Zm == 0)
        C1 = next(C for C in cyc if C != C0)
        G0 = G.centralizer_mask(K)
        s0, s1, sK = Section(G.full_mask, C0), Section(G0, C1), Section(G0, K)
        alpha = vstack([F.des(whole, s0), F.des(whole, s1)], F.dim(whole))
        beta = hstack([F.des(s0, sK).scale(-1), F.des(s1, sK)], F.dim(sK))
    rep.details.update(_exactness(alpha, beta, F.ring, rep))
    return rep


def _exactness(alpha: SparseMatrix, beta: SparseMatrix, ring: Ring, rep: Report) -> dict:
    n_in, n_mid, n_out = alpha.shape[1], alpha.shape[0], beta.shape[0]
    m = ring.modulus
    if not (beta @ alpha).is_zero(m):
        rep.fail("β∘α != 0")
    ra, rb = rank(alpha, ring), rank(beta, ring)
    if ra != n_in:
        rep.fail("α is not injective")
    if rb != n_out:
        rep.fail("β is not surjective")
    if ra + rb != n_mid:
        rep.fail("ker β != im α")
    if not m and rep.ok:
        if any(d != 1 for d in elementary_divisors(alpha)) or \
                any(d != 1 for d in elementary_divisors(beta)):
            rep.fail("sequence is exact over Q but not over Z")
    return {"rank_alpha": ra, "rank_beta": rb, "middle": n_mid}
