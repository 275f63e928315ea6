"""Sections, section posets, orbit categories and order complexes.

A section ``(U, V)`` is stored as a pair of subgroup masks.  Section posets
carry the conjugation action of ``G`` and their orbit decomposition; the
orbit category of sections and the Quillen category are exposed as explicit
finite categories whose morphisms are labelled by canonical coset
representatives.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Callable, Hashable, NamedTuple, Sequence

from .errors import InputError, NotNormal, RankTooSmall
from .groups import FinGroup, Subgroup, bits
from .homalg import (ZZ, AbGroup, ChainComplex, Ring, SparseMatrix, cohomology,
                     elementary_divisors, rank)


class Section(NamedTuple):
    U: int
    V: int

    def leq(self, other: "Section") -> bool:
        """``(U,V) ⪯ (M,L)`` iff ``L <= V <= U <= M``."""
        return (other.V & ~self.V == 0 and self.V & ~self.U == 0
                and self.U & ~other.U == 0)


def is_section(G: FinGroup, U: int, V: int) -> bool:
    return G.is_normal_mask(V, U)


def conj_section(G: FinGroup, g: int, s: Section) -> Section:
    return Section(G.conjugate_mask(g, s.U), G.conjugate_mask(g, s.V))


def section_normalizer(G: FinGroup, s: Section) -> int:
    return G.normalizer_mask(s.U) & G.normalizer_mask(s.V)


def make_section(G: FinGroup, U: Subgroup | int, V: Subgroup | int) -> Section:
    u = U if isinstance(U, int) else U.mask
    v = V if isinstance(V, int) else V.mask
    if not is_section(G, u, v):
        raise NotNormal("V must be a normal subgroup of U")
    return Section(u, v)


def _popcount(m: int) -> int:
    return bin(m).count("1")


def is_elementary_mask(G: FinGroup, mask: int, p: int) -> bool:
    if mask == 1:
        return True
    n = _popcount(mask)
    while n % p == 0:
        n //= p
    if n != 1:
        return False
    orders = G.element_orders
    mul = G.mul
    ms = bits(mask)
    if any(orders[x] != p for x in ms if x):
        return False
    gens = G._gensets.get(mask) or ms
    return all(mul[a][b] == mul[b][a] for a in gens for b in gens)


def is_p_mask(mask: int, p: int) -> bool:
    n = _popcount(mask)
    while n % p == 0:
        n //= p
    return n == 1


def elementary_rank(mask: int, p: int) -> int:
    n, k = _popcount(mask), 0
    while n > 1:
        n //= p
        k += 1
    return k


# ---------------------------------------------------------------------------
# collections


COLLECTIONS = ("all", "proper", "p", "e", "c", "subnormal")


def parse_collection(token: str) -> tuple[str, int | None]:
    """CLI tokens: ``all | proper | e | c | p=<prime> | subnormal | ageq2=<prime>``."""
    t = token.strip()
    if "=" in t:
        name, _, val = t.partition("=")
        if name not in ("p", "e", "c", "ageq2") or not val.isdigit():
            raise InputError(f"bad collection token {token!r}")
        return name, int(val)
    if t in COLLECTIONS:
        return t, None
    raise InputError(f"unknown collection {token!r}")


def _all_sections(G: FinGroup) -> list[Section]:
    out = []
    masks = [H.mask for H in G.subgroups]
    for U in masks:
        NU = U
        for V in masks:
            if V & ~U == 0 and G.is_normal_mask(V, U):
                out.append(Section(U, V))
    return out


def _subnormal_normalizers(G: FinGroup) -> dict[int, set[int]]:
    """For each nontrivial ``L``, the normalizers of subnormal series ``1 < L0 ⊴ ... ⊴ Ln = L``."""
    masks = [H.mask for H in G.subgroups if H.mask != 1]
    out: dict[int, set[int]] = {}
    for L in masks:  # increasing order, so proper subgroups are done first
        norms = {G.normalizer_mask(L)}
        NL = G.normalizer_mask(L)
        for K in masks:
            if K != L and K & ~L == 0 and G.is_normal_mask(K, L):
                for N in out[K]:
                    norms.add(N & NL)
        out[L] = norms
    return out


def collection_members(G: FinGroup, collection_id: str, p: int | None = None) -> list[Section]:
    if collection_id in ("all", "proper"):
        secs = _all_sections(G)
        if collection_id == "proper":
            secs = [s for s in secs if s.V != 1]
        return secs
    if collection_id in ("p", "e", "c"):
        if p is None:
            ps = G.prime_divisors
            if len(ps) != 1:
                raise InputError(f"collection {collection_id} needs a prime")
            p = ps[0]
        if collection_id == "p":
            return [s for s in _all_sections(G) if s.V != 1 and is_p_mask(s.U, p)]
        elem = [H.mask for H in G.subgroups if H.mask != 1 and is_elementary_mask(G, H.mask, p)]
        if collection_id == "c":
            return [Section(G.centralizer_mask(E), E) for E in elem]
        out = []
        for E in elem:
            C = G.centralizer_mask(E)
            for H in G.subgroups:
                if H.mask & ~C == 0 and E & ~H.mask == 0 and is_p_mask(H.mask, p):
                    out.append(Section(H.mask, E))
        return out
    if collection_id == "subnormal":
        out = []
        for L, norms in _subnormal_normalizers(G).items():
            for N in norms:
                # the series normalizer need not contain L; only genuine sections are kept
                if L & ~N == 0:
                    out.append(Section(N, L))
        return out
    raise InputError(f"unknown collection {collection_id!r}")


class SectionPoset:
    """Conjugation-closed set of sections ordered by ``⪯``."""

    def __init__(self, G: FinGroup, collection_id: str, elements: Sequence[Section],
                 p: int | None = None):
        self.G = G
        self.collection_id = collection_id
        self.p = p
        pos = G.subgroup_position
        self.elements: list[Section] = sorted(set(elements), key=lambda s: (pos[s.U], pos[s.V]))
        self.index = {s: i for i, s in enumerate(self.elements)}
        for s in self.elements:
            for g in G.generators:
                if conj_section(G, g, s) not in self.index:
                    raise InputError("collection is not closed under conjugation")

    def __len__(self) -> int:
        return len(self.elements)

    def leq(self, i: int, j: int) -> bool:
        return self.elements[i].leq(self.elements[j])

    @cached_property
    def order(self) -> list[list[bool]]:
        n = len(self.elements)
        return [[self.leq(i, j) for j in range(n)] for i in range(n)]

    @cached_property
    def g_action(self) -> list[list[int]]:
        """Permutation of element indices for each generator of ``G``."""
        return [[self.index[conj_section(self.G, g, s)] for s in self.elements]
                for g in self.G.generators]

    def act(self, g: int, i: int) -> int:
        return self.index[conj_section(self.G, g, self.elements[i])]

    @cached_property
    def orbits(self) -> list[list[int]]:
        seen = [False] * len(self.elements)
        out = []
        for i in range(len(self.elements)):
            if seen[i]:
                continue
            orb = [i]
            seen[i] = True
            queue = [i]
            while queue:
                x = queue.pop()
                for perm in self.g_action:
                    y = perm[x]
                    if not seen[y]:
                        seen[y] = True
                        orb.append(y)
                        queue.append(y)
            out.append(sorted(orb))
        return out

    @cached_property
    def representatives(self) -> list[int]:
        return [orb[0] for orb in self.orbits]

    @cached_property
    def orbit_of(self) -> list[int]:
        out = [0] * len(self.elements)
        for k, orb in enumerate(self.orbits):
            for i in orb:
                out[i] = k
        return out

    @cached_property
    def transporters(self) -> list[int]:
        """``t[i]`` with ``^t rep = element i`` (BFS over generators from the representative)."""
        G = self.G
        out = [-1] * len(self.elements)
        for orb in self.orbits:
            r = orb[0]
            out[r] = 0
            queue = deque([r])
            while queue:
                x = queue.popleft()
                for k, perm in enumerate(self.g_action):
                    y = perm[x]
                    if out[y] < 0:
                        out[y] = G.mul[G.generators[k]][out[x]]
                        queue.append(y)
        return out

    def lower_covers(self, i: int) -> list[int]:
        below = [j for j in range(len(self.elements)) if j != i and self.order[j][i]]
        return [j for j in below if not any(k != j and self.order[j][k] for k in below)]


def sections(G: FinGroup, collection_id: str = "proper", p: int | None = None) -> SectionPoset:
    return SectionPoset(G, collection_id, collection_members(G, collection_id, p), p)


# ---------------------------------------------------------------------------
# finite categories


class Morphism(NamedTuple):
    source: int
    target: int
    label: int


@dataclass
class FinCategory:
    """Finite category with explicit hom-sets and a composition rule.

    ``compose(f, g)`` is ``f ∘ g`` (``g`` first).
    """
    objects: list
    homs: dict[tuple[int, int], list[Morphism]]
    composer: Callable[[Morphism, Morphism], Morphism]
    identity_label: Callable[[int], int]
    name: str = ""
    ei: bool = False

    def hom(self, x: int, y: int) -> list[Morphism]:
        return self.homs.get((x, y), [])

    def identity(self, x: int) -> Morphism:
        return Morphism(x, x, self.identity_label(x))

    def compose(self, f: Morphism, g: Morphism) -> Morphism:
        if g.target != f.source:
            raise ValueError("morphisms are not composable")
        return self.composer(f, g)

    def morphisms(self):
        for key in sorted(self.homs):
            yield from self.homs[key]

    def check_laws(self) -> list[str]:
        """Associativity, units and (if flagged) the EI property on the full table."""
        bad = []
        n = len(self.objects)
        for x in range(n):
            idx = self.identity(x)
            if idx not in self.hom(x, x):
                bad.append(f"identity of {x} missing")
            for y in range(n):
                for f in self.hom(x, y):
                    if self.compose(f, idx) != f or self.compose(self.identity(y), f) != f:
                        bad.append(f"unit law fails at {f}")
        for x in range(n):
            for y in range(n):
                for f in self.hom(x, y):
                    for z in range(n):
                        for g in self.hom(y, z):
                            gf = self.compose(g, f)
                            if gf not in self.hom(x, z):
                                bad.append(f"composite {g}∘{f} not in hom({x},{z})")
                                continue
                            for w in range(n):
                                for h in self.hom(z, w):
                                    if self.compose(h, gf) != self.compose(self.compose(h, g), f):
                                        bad.append(f"associativity fails at {h},{g},{f}")
        if self.ei:
            for x in range(n):
                ends = self.hom(x, x)
                for f in ends:
                    if not any(self.compose(g, f) == self.identity(x) for g in ends):
                        bad.append(f"endomorphism {f} is not invertible")
        return bad


def canonical_right_coset(G: FinGroup, M: int, g: int) -> int:
    """Least element of the right coset ``M g``."""
    mul = G.mul
    return min(mul[m][g] for m in bits(M))


def canonical_left_coset(G: FinGroup, g: int, C: int) -> int:
    """Least element of the left coset ``g C``."""
    mul = G.mul
    return min(mul[g][c] for c in bits(C))


def hom_sections(G: FinGroup, x: Section, y: Section) -> list[int]:
    """Canonical representatives of the cosets ``Mg`` with ``^g x ⪯ y`` (``y = (M, L)``)."""
    found = set()
    for g in range(G.order):
        if conj_section(G, g, x).leq(y):
            found.add(canonical_right_coset(G, y.U, g))
    return sorted(found)


def orbit_category(G: FinGroup, collection_id: str = "proper", p: int | None = None,
                   objects: Sequence[Section] | None = None) -> FinCategory:
    """The orbit category of sections over a collection (all objects)."""
    if objects is None:
        objects = sections(G, collection_id, p).elements
    objects = list(objects)
    homs: dict[tuple[int, int], list[Morphism]] = {}
    for a, x in enumerate(objects):
        for b, y in enumerate(objects):
            labels = hom_sections(G, x, y)
            if labels:
                homs[a, b] = [Morphism(a, b, g) for g in labels]

    def compose(f: Morphism, g: Morphism) -> Morphism:
        # (N h) ∘ (M g) = N h g
        N = objects[f.target].U
        return Morphism(g.source, f.target, canonical_right_coset(G, N, G.mul[f.label][g.label]))

    def ident(x: int) -> int:
        return canonical_right_coset(G, objects[x].U, 0)

    return FinCategory(objects, homs, compose, ident, f"D_{G.label}^{collection_id}", ei=True)


def quillen_category(G: FinGroup, p: int, include_trivial: bool = False) -> FinCategory:
    """Elementary abelian ``p``-subgroups with morphisms ``g C_G(E1)``, ``^g E1 <= E2``."""
    objects = [H.mask for H in G.subgroups
               if is_elementary_mask(G, H.mask, p) and (include_trivial or H.mask != 1)]
    homs: dict[tuple[int, int], list[Morphism]] = {}
    for a, E1 in enumerate(objects):
        C1 = G.centralizer_mask(E1)
        for b, E2 in enumerate(objects):
            found = set()
            for g in range(G.order):
                if G.conjugate_mask(g, E1) & ~E2 == 0:
                    found.add(canonical_left_coset(G, g, C1))
            if found:
                homs[a, b] = [Morphism(a, b, g) for g in sorted(found)]

    def compose(f: Morphism, g: Morphism) -> Morphism:
        C = G.centralizer_mask(objects[g.source])
        return Morphism(g.source, f.target, canonical_left_coset(G, G.mul[f.label][g.label], C))

    def ident(x: int) -> int:
        return canonical_left_coset(G, 0, G.centralizer_mask(objects[x]))

    return FinCategory(objects, homs, compose, ident, f"A_{p}({G.label})", ei=True)


@dataclass
class Report:
    name: str
    ok: bool = True
    failures: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def fail(self, msg: str) -> None:
        self.ok = False
        self.failures.append(msg)

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "failures": self.failures,
                "details": self.details}


def check_opposite_iso_c_vs_quillen(G: FinGroup, p: int) -> Report:
    """The functor ``E -> (C_G(E), E)``, ``g C_G(E1) -> C_G(E1) g^-1`` from the Quillen
    category to the opposite of the centralizer orbit category is an isomorphism."""
    rep = Report("opposite iso D^c vs A_p")
    A = quillen_category(G, p)
    objs = [Section(G.centralizer_mask(E), E) for E in A.objects]
    D = orbit_category(G, objects=objs)
    inv = G.inv
    if len(set(objs)) != len(objs):
        rep.fail("object map is not injective")
    n = len(A.objects)
    image: dict[Morphism, Morphism] = {}
    for a in range(n):
        for b in range(n):
            src = A.hom(a, b)
            dst = D.hom(b, a)
            mapped = set()
            for f in src:
                C1 = objs[a].U
                h = canonical_right_coset(G, C1, inv[f.label])
                m = Morphism(b, a, h)
                image[f] = m
                mapped.add(m)
            if mapped != set(dst) or len(src) != len(dst):
                rep.fail(f"hom({a},{b}) has {len(src)} morphisms, opposite hom has {len(dst)}")
    for a in range(n):
        for b in range(n):
            for f in A.hom(a, b):
                for c in range(n):
                    for g in A.hom(b, c):
                        lhs = image[A.compose(g, f)]
                        rhs = D.compose(image[f], image[g])
                        if lhs != rhs:
                            rep.fail(f"composition not preserved at {g}∘{f}")
    rep.details["objects"] = n
    rep.details["morphisms"] = sum(len(v) for v in A.homs.values())
    return rep


# ---------------------------------------------------------------------------
# the poset of elementary abelian subgroups of rank >= 2


class SubgroupPoset:
    """A conjugation-closed family of subgroups ordered by inclusion."""

    def __init__(self, G: FinGroup, masks: Sequence[int], name: str = ""):
        pos = G.subgroup_position
        self.G = G
        self.name = name
        self.elements = sorted(set(masks), key=pos.__getitem__)
        self.index = {m: i for i, m in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def leq(self, i: int, j: int) -> bool:
        return self.elements[i] & ~self.elements[j] == 0

    def act(self, g: int, i: int) -> int:
        return self.index[self.G.conjugate_mask(g, self.elements[i])]

    @cached_property
    def g_action(self) -> list[list[int]]:
        return [[self.act(g, i) for i in range(len(self))] for g in self.G.generators]


def a_geq2(G: FinGroup, p: int) -> SubgroupPoset:
    masks = [H.mask for H in G.subgroups
             if is_elementary_mask(G, H.mask, p) and elementary_rank(H.mask, p) >= 2]
    return SubgroupPoset(G, masks, f"A>=2({G.label})")


def _components(P) -> list[list[int]]:
    n = len(P)
    seen = [False] * n
    comps = []
    for i in range(n):
        if seen[i]:
            continue
        comp, queue = [], [i]
        seen[i] = True
        while queue:
            x = queue.pop()
            comp.append(x)
            for y in range(n):
                if not seen[y] and (P.leq(x, y) or P.leq(y, x)):
                    seen[y] = True
                    queue.append(y)
        comps.append(sorted(comp))
    return comps


@dataclass
class Components:
    poset: SubgroupPoset
    big: list[int]            # indices of B(G)
    big_orbit: list[int]      # union of the G-conjugates of B(G)
    isolated: list[int]       # remaining vertices
    choice: str               # how B(G) was picked


def components_a_geq2(G: FinGroup, p: int) -> Components:
    """Split ``A_>=2(G)`` into the distinguished component ``B(G)`` and the rest.

    With rank 2 every component is a point and ``B(G)`` is the least normal
    vertex if there is one, else the least vertex.  With rank at least 3,
    ``B(G)`` is the component containing the least normal rank-2 subgroup.
    The G-conjugates of ``B(G)`` are also set aside so the isolated list is
    conjugation-closed.
    """
    P = a_geq2(G, p)
    if not len(P):
        raise RankTooSmall(f"{G.label} has {p}-rank < 2")
    comps = _components(P)
    rk = max(elementary_rank(m, p) for m in P.elements)
    normal = [i for i, m in enumerate(P.elements)
              if elementary_rank(m, p) == 2 and G.is_normal_mask(m, G.full_mask)]
    if normal:
        anchor, choice = normal[0], "least normal rank-2 subgroup"
    else:
        anchor, choice = 0, "least rank-2 subgroup (none normal)"
    if rk >= 3:
        big = next(c for c in comps if anchor in c)
        choice = "component of the " + choice
    else:
        big = [anchor]
    orbit = set(big)
    frontier = list(big)
    while frontier:
        x = frontier.pop()
        for perm in P.g_action:
            y = perm[x]
            if y not in orbit:
                orbit.add(y)
                frontier.append(y)
    # conjugates of B(G) are whole components, so anything touching them belongs to them
    isolated = [i for i in range(len(P)) if i not in orbit]
    return Components(P, big, sorted(orbit), isolated, choice)


# ---------------------------------------------------------------------------
# order complexes and orbit cochains


@dataclass
class SimplicialData:
    """Simplices of an order complex, each a tuple of vertex indices in increasing order."""
    n_vertices: int
    simplices: list[list[tuple[int, ...]]]
    vertex_action: list[list[int]]   # one permutation of vertices per group generator
    orientation: str = "increasing vertex index"

    @cached_property
    def simplex_index(self) -> list[dict[tuple[int, ...], int]]:
        return [{s: i for i, s in enumerate(dim)} for dim in self.simplices]

    def dimension(self) -> int:
        return len(self.simplices) - 1


def order_complex(P, max_dim: int | None = None) -> SimplicialData:
    """Chains of a finite poset; vertices are ordered along a linear extension."""
    n = len(P)
    # linear extension: sort by number of elements below
    below = [sum(1 for j in range(n) if P.leq(j, i)) for i in range(n)]
    ext = sorted(range(n), key=lambda i: (below[i], i))
    relabel = {v: k for k, v in enumerate(ext)}
    up = [[relabel[j] for j in range(n) if j != i and P.leq(i, j)] for i in ext]
    simplices: list[list[tuple[int, ...]]] = [[(k,) for k in range(n)]]
    while simplices[-1] and (max_dim is None or len(simplices) <= max_dim):
        nxt = []
        for s in simplices[-1]:
            for v in up[s[-1]]:
                nxt.append(s + (v,))
        if not nxt:
            break
        nxt.sort()
        simplices.append(nxt)
    action = [[relabel[perm[ext[k]]] for k in range(n)] for perm in getattr(P, "g_action", [])]
    return SimplicialData(n, simplices, action, "linear-extension order")


def _group_closure(perms: list[list[int]], n: int) -> list[list[int]]:
    ident = list(range(n))
    seen = {tuple(ident)}
    out = [ident]
    queue = [ident]
    while queue:
        x = queue.pop()
        for s in perms:
            y = [s[v] for v in x]
            t = tuple(y)
            if t not in seen:
                seen.add(t)
                out.append(y)
                queue.append(y)
    return out


def _sort_sign(seq: Sequence[int]) -> tuple[tuple[int, ...], int]:
    arr = list(seq)
    sign = 1
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return tuple(arr), sign


def orbit_cochain_complex(X: SimplicialData, ring: Ring = ZZ, augmented: bool = False,
                          group_elements: list[list[int]] | None = None) -> ChainComplex:
    """Invariant cochains ``Hom_G(C_*(X), A)``: one coordinate per orbit of simplices.

    An orbit whose stabilizer reverses the orientation of its simplex admits
    only cochains with ``2 c = 0``; it is dropped unless the coefficients have
    characteristic 2.  The result lives over ``ring`` (its matrices are to be
    read modulo the ring's modulus).
    """
    elems = group_elements or _group_closure(X.vertex_action, X.n_vertices)
    char2 = ring.modulus == 2
    if ring.modulus and not ring.is_field:
        from .errors import UnsupportedValue
        raise UnsupportedValue("orbit cochains are implemented over Z, Q and prime fields")
    orbit_id: list[dict[tuple[int, ...], tuple[int, int]]] = []   # simplex -> (orbit, sign)
    reps: list[list[tuple[int, ...]]] = []
    for dim in X.simplices:
        ids: dict[tuple[int, ...], tuple[int, int]] = {}
        dim_reps = []
        for s in dim:
            if s in ids:
                continue
            k = len(dim_reps)
            killed = False
            members: dict[tuple[int, ...], int] = {}
            for g in elems:
                t, sign = _sort_sign([g[v] for v in s])
                if t in members:
                    if members[t] != sign and not char2:
                        killed = True
                else:
                    members[t] = sign
            for t, sign in members.items():
                ids[t] = (-1 if killed else k, sign)
            if not killed:
                dim_reps.append(s)
            else:
                dim_reps.append(None)  # placeholder keeps numbering simple
        # renumber to drop killed orbits
        live = [i for i, r in enumerate(dim_reps) if r is not None]
        renum = {old: new for new, old in enumerate(live)}
        orbit_id.append({t: (renum[o] if o >= 0 else -1, sg) for t, (o, sg) in ids.items()})
        reps.append([dim_reps[i] for i in live])
    dims = [len(r) for r in reps]
    diffs = []
    for k in range(len(reps) - 1):
        D = SparseMatrix(dims[k + 1], dims[k])
        for row, tau in enumerate(reps[k + 1]):
            for i in range(len(tau)):
                face = tau[:i] + tau[i + 1:]
                o, sg = orbit_id[k][face]
                if o >= 0:
                    D.add(row, o, (-1) ** i * sg)
        diffs.append(D.mod(ring.modulus) if ring.modulus else D)
    lo = 0
    if augmented:
        aug = SparseMatrix(dims[0] if dims else 0, 1, {i: {0: 1} for i in range(dims[0] if dims else 0)})
        dims = [1] + dims
        diffs = [aug] + diffs
        lo = -1
    if not dims:
        dims = [0]
    return ChainComplex(dims, diffs, lo)


def full_cochain_complex(X: SimplicialData, augmented: bool = False) -> ChainComplex:
    """Ordinary simplicial cochains of ``X`` (no invariance)."""
    dims = [len(d) for d in X.simplices]
    diffs = []
    for k in range(len(X.simplices) - 1):
        idx = X.simplex_index[k]
        D = SparseMatrix(dims[k + 1], dims[k])
        for row, tau in enumerate(X.simplices[k + 1]):
            for i in range(len(tau)):
                D.add(row, idx[tau[:i] + tau[i + 1:]], (-1) ** i)
        diffs.append(D)
    lo = 0
    if augmented:
        n0 = dims[0] if dims else 0
        diffs = [SparseMatrix(n0, 1, {i: {0: 1} for i in range(n0)})] + diffs
        dims = [1] + dims
        lo = -1
    return ChainComplex(dims or [0], diffs, lo)


def reduced_homology_is_zero(P) -> tuple[bool, str]:
    """Whether the order complex of ``P`` is Z-acyclic; beat points are removed first."""
    n = len(P)
    if n == 0:
        return False, "empty poset"
    alive = set(range(n))
    changed = True
    while changed and len(alive) > 1:
        changed = False
        for x in sorted(alive):
            ups = [y for y in alive if y != x and P.leq(x, y)]
            downs = [y for y in alive if y != x and P.leq(y, x)]
            for nbrs, up in ((ups, True), (downs, False)):
                if not nbrs:
                    continue
                if up:
                    ext = [m for m in nbrs if all(P.leq(m, y) for y in nbrs)]
                else:
                    ext = [m for m in nbrs if all(P.leq(y, m) for y in nbrs)]
                if ext:
                    alive.discard(x)
                    changed = True
                    break
            if changed:
                break
    if len(alive) == 1:
        return True, "contractible (beat points)"
    core = _SubPoset(P, sorted(alive))
    X = order_complex(core)
    C = full_cochain_complex(X, augmented=True)
    # Z-acyclic iff reduced cochain complex is acyclic over Z
    for k in range(C.lo, C.hi + 1):
        if not cohomology(C, k, ZZ).is_zero:
            return False, f"core of size {len(alive)} has reduced cohomology in degree {k}"
    return True, f"acyclic core of size {len(alive)}"


class _SubPoset:
    def __init__(self, P, keep: list[int]):
        self.P = P
        self.keep = keep

    def __len__(self) -> int:
        return len(self.keep)

    def leq(self, i: int, j: int) -> bool:
        return self.P.leq(self.keep[i], self.keep[j])


class _ListPoset:
    def __init__(self, elements: list[Section]):
        self.elements = elements

    def __len__(self) -> int:
        return len(self.elements)

    def leq(self, i: int, j: int) -> bool:
        return self.elements[i].leq(self.elements[j])


def check_reduction_hypothesis(G: FinGroup, sub_collection: str, super_collection: str,
                               p: int | None = None) -> Report:
    """Every comma poset ``w\\i = {w' in sub : w ⪯ w'}`` (w in super) is Z-acyclic."""
    rep = Report(f"reduction {sub_collection} in {super_collection}")
    sub = collection_members(G, sub_collection, p)
    sup = collection_members(G, super_collection, p)
    subset = set(sub)
    missing = [s for s in sub if s not in set(sup)]
    if missing:
        rep.fail(f"{len(missing)} sections of {sub_collection} are not in {super_collection}")
    checked = 0
    for w in sup:
        comma = [s for s in sub if w.leq(s)]
        ok, why = reduced_homology_is_zero(_ListPoset(comma))
        checked += 1
        if not ok:
            rep.fail(f"comma poset over {w} is not acyclic: {why}")
    rep.details["checked"] = checked
    rep.details["sub_size"] = len(subset)
    return rep
