"""Exact permutation-group arithmetic.

Elements of a :class:`FinGroup` are stored as image tuples and addressed by
their index in the lexicographically sorted element list, so the identity is
always index 0.  Products follow the convention ``(a*b)(i) = a[b[i]]`` (apply
``b`` first) and conjugation is ``^g x = g x g^-1``.

Subgroups are bitmasks over element indices.  Everything is immutable after
construction; the derived tables (multiplication, inverses, subgroup lattice)
are computed lazily and cached on the instance.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import NotAHomomorphism, NotAPermutation, NotASubgroup, NotNormal, OrderBound

ELEMENT_CAP = 4096
SUBGROUP_ORDER_CAP = 128

Perm = tuple[int, ...]


def _check_perm(img: Sequence[int], degree: int) -> Perm:
    img = tuple(int(x) for x in img)
    if len(img) != degree or sorted(img) != list(range(degree)):
        raise NotAPermutation(f"{list(img)} is not a permutation of 0..{degree - 1}")
    return img


def _compose(a: Perm, b: Perm) -> Perm:
    return tuple(a[i] for i in b)


def group_from_generators(degree: int, gens: Iterable[Sequence[int]], label: str = "",
                          cap: int | None = None) -> "FinGroup":
    """Close ``gens`` under composition and return the generated group.

    ``cap`` defaults to the module-level ``ELEMENT_CAP`` at call time.
    """
    if cap is None:
        cap = ELEMENT_CAP
    gens = [_check_perm(g, degree) for g in gens]
    ident = tuple(range(degree))
    seen = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = _compose(x, s)
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise OrderBound(f"closure exceeds element cap {cap}")
                queue.append(y)
    return FinGroup(degree, tuple(sorted(seen)), tuple(gens), label)


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class FinGroup:
    """A finite permutation group with a complete, sorted element list."""

    def __init__(self, degree: int, elements: tuple[Perm, ...], generators: tuple[Perm, ...],
                 label: str = ""):
        self.degree = degree
        self.elements = elements
        self.index = {e: i for i, e in enumerate(elements)}
        self.generators = tuple(self.index[g] for g in generators)
        self.order = len(elements)
        self.label = label or f"G{self.order}"
        self._gensets: dict[int, list[int]] = {}
        self._normalizers: dict[int, int] = {}
        self._centralizers: dict[int, int] = {}

    def __repr__(self) -> str:
        return f"FinGroup({self.label!r}, order={self.order})"

    # -- tables -----------------------------------------------------------
    @cached_property
    def mul(self) -> list[list[int]]:
        idx = self.index
        els = self.elements
        return [[idx[_compose(a, b)] for b in els] for a in els]

    @cached_property
    def inv(self) -> list[int]:
        out = [0] * self.order
        for i, e in enumerate(self.elements):
            r = [0] * self.degree
            for k, v in enumerate(e):
                r[v] = k
            out[i] = self.index[tuple(r)]
        return out

    @cached_property
    def conj(self) -> list[list[int]]:
        """``conj[g][x]`` is the index of ``g x g^-1``."""
        mul, inv = self.mul, self.inv
        return [[mul[mul[g][x]][inv[g]] for x in range(self.order)] for g in range(self.order)]

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.order) - 1

    @cached_property
    def element_orders(self) -> list[int]:
        mul = self.mul
        out = []
        for g in range(self.order):
            k, x = 1, g
            while x != 0:
                x = mul[x][g]
                k += 1
            out.append(k)
        return out

    @cached_property
    def words(self) -> list[list[int]]:
        """For each element a word in the generators (list of generator positions),
        read left to right: ``words[x] = [i1, i2, ...]`` means ``x = s_i1 s_i2 ...``."""
        out: list[list[int] | None] = [None] * self.order
        out[0] = []
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for pos, s in enumerate(self.generators):
                y = self.mul[x][s]
                if out[y] is None:
                    out[y] = out[x] + [pos]
                    queue.append(y)
        return out  # type: ignore[return-value]

    # -- subgroups --------------------------------------------------------
    def closure(self, gens: Iterable[int], start: int = 1) -> int:
        """Mask of the subgroup generated by ``gens`` together with the subgroup ``start``."""
        gens = list(gens)
        mul = self.mul
        mask = start | 1
        frontier = bits(mask)
        for g in gens:
            if not mask >> g & 1:
                mask |= 1 << g
                frontier.append(g)
        gens_all = gens + _small_generating_set(self, start)
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens_all:
                    y = mul[x][s]
                    if not mask >> y & 1:
                        mask |= 1 << y
                        nxt.append(y)
            frontier = nxt
        return mask

    def subgroup(self, mask_or_members) -> "Subgroup":
        if isinstance(mask_or_members, int):
            mask = mask_or_members
        else:
            mask = 0
            for m in mask_or_members:
                mask |= 1 << m
        return Subgroup(self, mask)

    def generated(self, gens: Iterable[int]) -> "Subgroup":
        return Subgroup(self, self.closure(gens))

    @cached_property
    def trivial(self) -> "Subgroup":
        return Subgroup(self, 1)

    @cached_property
    def whole(self) -> "Subgroup":
        return Subgroup(self, self.full_mask)

    @cached_property
    def _subgroup_masks(self) -> list[int]:
        if self.order > SUBGROUP_ORDER_CAP:
            raise OrderBound(f"subgroup enumeration capped at order {SUBGROUP_ORDER_CAP}")
        cyclic_gens: dict[int, int] = {}
        for g in range(self.order):
            m = self.closure([g])
            cyclic_gens.setdefault(m, g)
        found = {1}
        queue = deque([1])
        while queue:
            h = queue.popleft()
            for cm, g in cyclic_gens.items():
                if cm & ~h:
                    k = self.closure([g], start=h)
                    if k not in found:
                        found.add(k)
                        queue.append(k)
        return sorted(found, key=lambda m: (bin(m).count("1"), bits(m)))

    @cached_property
    def subgroups(self) -> list["Subgroup"]:
        return [Subgroup(self, m) for m in self._subgroup_masks]

    @cached_property
    def subgroup_position(self) -> dict[int, int]:
        return {m: i for i, m in enumerate(self._subgroup_masks)}

    def conjugate_mask(self, g: int, mask: int) -> int:
        row = self.conj[g]
        out = 0
        for x in bits(mask):
            out |= 1 << row[x]
        return out

    @cached_property
    def subgroup_classes(self) -> list[list[int]]:
        """Conjugacy classes of subgroups as lists of masks; the first entry is
        the representative (least in the canonical order)."""
        pos = self.subgroup_position
        seen: set[int] = set()
        classes = []
        for m in self._subgroup_masks:
            if m in seen:
                continue
            orbit = {m}
            queue = [m]
            while queue:
                h = queue.pop()
                for s in self.generators:
                    k = self.conjugate_mask(s, h)
                    if k not in orbit:
                        orbit.add(k)
                        queue.append(k)
            seen |= orbit
            classes.append(sorted(orbit, key=pos.__getitem__))
        return classes

    @cached_property
    def class_of_subgroup(self) -> dict[int, int]:
        out = {}
        for ci, cl in enumerate(self.subgroup_classes):
            for m in cl:
                out[m] = ci
        return out

    def transporter(self, src: int, dst: int) -> int | None:
        """Some element ``g`` with ``^g src = dst`` (subgroup masks), or None."""
        for g in range(self.order):
            if self.conjugate_mask(g, src) == dst:
                return g
        return None

    def normalizer_mask(self, mask: int) -> int:
        out = self._normalizers.get(mask)
        if out is None:
            conj, gens = self.conj, _small_generating_set(self, mask)
            out = 0
            for g in range(self.order):
                row = conj[g]
                if all(mask >> row[h] & 1 for h in gens):
                    out |= 1 << g
            self._normalizers[mask] = out
        return out

    def centralizer_mask(self, mask: int) -> int:
        out = self._centralizers.get(mask)
        if out is None:
            mul, gens = self.mul, _small_generating_set(self, mask)
            out = 0
            for g in range(self.order):
                if all(mul[g][h] == mul[h][g] for h in gens):
                    out |= 1 << g
            self._centralizers[mask] = out
        return out

    def is_normal_mask(self, sub: int, sup: int) -> bool:
        """Whether ``sub`` is a normal subgroup of ``sup`` (both masks)."""
        return sub & ~sup == 0 and sup & ~self.normalizer_mask(sub) == 0

    # -- small utilities --------------------------------------------------
    def power(self, g: int, k: int) -> int:
        x = 0
        for _ in range(k % self.element_orders[g]):
            x = self.mul[x][g]
        return x

    @cached_property
    def is_abelian(self) -> bool:
        mul = self.mul
        gs = self.generators
        return all(mul[a][b] == mul[b][a] for a in gs for b in gs)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.element_orders) if self.order > 1 else 1

    @cached_property
    def prime_divisors(self) -> list[int]:
        n, out, d = self.order, [], 2
        while d * d <= n:
            if n % d == 0:
                out.append(d)
                while n % d == 0:
                    n //= d
            d += 1
        if n > 1:
            out.append(n)
        return out

    def is_p_group(self, p: int | None = None) -> bool:
        if self.order == 1:
            return True
        ps = self.prime_divisors
        return len(ps) == 1 and (p is None or ps[0] == p)

    def to_json(self) -> dict:
        return {"degree": self.degree,
                "generators": [list(self.elements[g]) for g in self.generators],
                "label": self.label}


def _small_generating_set(G: FinGroup, mask: int) -> list[int]:
    """A generating set for the subgroup ``mask`` (greedy, deterministic)."""
    if mask == 1:
        return []
    cached = G._gensets.get(mask)
    if cached is not None:
        return cached
    gens: list[int] = []
    cur = 1
    for x in bits(mask):
        if not cur >> x & 1:
            gens.append(x)
            cur = G.closure(gens)
            if cur == mask:
                break
    G._gensets[mask] = gens
    return gens


@dataclass(frozen=True)
class Subgroup:
    ambient: FinGroup = field(compare=False, hash=False, repr=False)
    mask: int

    def __post_init__(self):
        if not self.mask & 1:
            raise NotASubgroup("subgroup must contain the identity")

    @property
    def members(self) -> list[int]:
        return bits(self.mask)

    @property
    def order(self) -> int:
        return bin(self.mask).count("1")

    @property
    def gens(self) -> list[int]:
        return _small_generating_set(self.ambient, self.mask)

    def __contains__(self, g: int) -> bool:
        return bool(self.mask >> g & 1)

    def __le__(self, other: "Subgroup") -> bool:
        return self.mask & ~other.mask == 0

    def __lt__(self, other: "Subgroup") -> bool:
        return self.mask != other.mask and self <= other

    def __and__(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.ambient, self.mask & other.mask)

    def join(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.ambient, self.ambient.closure(other.gens, start=self.mask))

    def conjugate(self, g: int) -> "Subgroup":
        return Subgroup(self.ambient, self.ambient.conjugate_mask(g, self.mask))

    def is_closed(self) -> bool:
        mul, inv = self.ambient.mul, self.ambient.inv
        ms = self.members
        return all(self.mask >> inv[a] & 1 for a in ms) and all(
            self.mask >> mul[a][b] & 1 for a in ms for b in ms)

    def sort_key(self):
        return (self.order, self.members)

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, mask={self.mask:#x})"


def check_subgroup(G: FinGroup, H: Subgroup) -> None:
    if H.ambient is not G or not H.is_closed():
        raise NotASubgroup("not a subgroup of the given group")


def all_subgroups(G: FinGroup) -> list[Subgroup]:
    return list(G.subgroups)


def conjugacy_classes_of_subgroups(G: FinGroup) -> list[tuple[Subgroup, list[Subgroup]]]:
    return [(Subgroup(G, cl[0]), [Subgroup(G, m) for m in cl]) for cl in G.subgroup_classes]


def normalizer(G: FinGroup, H: Subgroup) -> Subgroup:
    check_subgroup(G, H)
    return Subgroup(G, G.normalizer_mask(H.mask))


def centralizer(G: FinGroup, H: Subgroup) -> Subgroup:
    check_subgroup(G, H)
    return Subgroup(G, G.centralizer_mask(H.mask))


def center(G: FinGroup) -> Subgroup:
    return centralizer(G, G.whole)


def is_normal(G: FinGroup, H: Subgroup) -> bool:
    check_subgroup(G, H)
    return all(G.conjugate_mask(s, H.mask) == H.mask for s in G.generators)


def is_normal_in(N: Subgroup, U: Subgroup) -> bool:
    """Whether ``N`` is a normal subgroup of ``U`` (both inside one ambient group)."""
    if not N <= U:
        return False
    G = U.ambient
    conj = G.conj
    return all(N.mask >> conj[u][n] & 1 for u in U.gens for n in N.gens)


def section_normalizer(G: FinGroup, U: Subgroup, V: Subgroup) -> Subgroup:
    """``N_G(U, V) = N_G(U) ∩ N_G(V)``."""
    return normalizer(G, U) & normalizer(G, V)


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism given by the images of the source generators."""
    source: FinGroup
    target: FinGroup
    images: tuple[int, ...]

    @cached_property
    def table(self) -> list[int]:
        """Image of every source element; raises if the generator images do not
        extend to a homomorphism."""
        S, T = self.source, self.target
        out: list[int | None] = [None] * S.order
        out[0] = 0
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for pos, s in enumerate(S.generators):
                y = S.mul[x][s]
                img = T.mul[out[x]][self.images[pos]]
                if out[y] is None:
                    out[y] = img
                    queue.append(y)
                elif out[y] != img:
                    raise NotAHomomorphism("generator images violate a relation")
        return out  # type: ignore[return-value]

    def __call__(self, x: int) -> int:
        return self.table[x]

    def kernel(self) -> Subgroup:
        return self.source.subgroup([x for x, y in enumerate(self.table) if y == 0])

    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.target.order


def quotient(G: FinGroup, N: Subgroup, label: str = "") -> tuple[FinGroup, GroupHom]:
    """Permutation model of ``G/N`` acting on the left cosets of ``N``."""
    if not is_normal(G, N):
        raise NotNormal("quotient requires a normal subgroup")
    mul = G.mul
    coset_of = [-1] * G.order
    reps = []
    for g in range(G.order):
        if coset_of[g] < 0:
            c = len(reps)
            reps.append(g)
            for n in N.members:
                coset_of[mul[g][n]] = c
    k = len(reps)

    def action(x: int) -> Perm:
        return tuple(coset_of[mul[x][r]] for r in reps)

    gens = [action(s) for s in G.generators]
    Q = group_from_generators(k, gens, label or f"{G.label}/N{N.order}")
    images = tuple(Q.index[action(s)] for s in G.generators)
    return Q, GroupHom(G, Q, images)


def is_elementary_abelian(H: Subgroup, p: int) -> bool:
    G = H.ambient
    if H.order == 1:
        return True
    n = H.order
    while n % p == 0:
        n //= p
    if n != 1:
        return False
    mul = G.mul
    gens = H.gens
    if any(mul[a][b] != mul[b][a] for a in gens for b in gens):
        return False
    return all(G.element_orders[x] in (1, p) for x in gens)


def elementary_abelian_subgroups(G: FinGroup, p: int) -> list[Subgroup]:
    return [H for H in G.subgroups if is_elementary_abelian(H, p)]


def p_rank(G: FinGroup, p: int) -> int:
    best = 0
    for H in elementary_abelian_subgroups(G, p):
        best = max(best, _log(H.order, p))
    return best


def _log(n: int, p: int) -> int:
    k = 0
    while n > 1:
        n //= p
        k += 1
    return k


def rank_of_elementary(H: Subgroup, p: int) -> int:
    return _log(H.order, p)


def subgroup_as_group(H: Subgroup, label: str = "") -> FinGroup:
    G = H.ambient
    return group_from_generators(G.degree, [G.elements[g] for g in H.gens], label)


def section_group(U: Subgroup, V: Subgroup, label: str = "") -> FinGroup:
    """The subquotient ``U/V`` as a fresh permutation group."""
    if not is_normal_in(V, U):
        raise NotNormal("V must be normal in U")
    UG = subgroup_as_group(U)
    G = U.ambient
    Vin = UG.subgroup([UG.index[G.elements[v]] for v in V.members])
    Q, _ = quotient(UG, Vin, label)
    return Q


def abelian_invariants(G: FinGroup) -> list[int]:
    """Invariant factors ``d1 | d2 | ...`` of an abelian group."""
    if not G.is_abelian:
        raise ValueError("group is not abelian")
    orders = G.element_orders
    primary: dict[int, list[int]] = {}
    for p in G.prime_divisors:
        # |Omega_k| = p^(sum_i min(k, e_i)); successive differences count factors of exponent >= k
        logs = [0]
        k = 1
        while True:
            c = sum(1 for o in orders if p ** k % o == 0)
            logs.append(_log(c, p))
            if logs[-1] == logs[-2]:
                break
            k += 1
        at_least = [logs[k] - logs[k - 1] for k in range(1, len(logs))] + [0]
        exps = []
        for k in range(len(at_least) - 1):
            exps += [k + 1] * (at_least[k] - at_least[k + 1])
        primary[p] = sorted(exps)
    length = max((len(v) for v in primary.values()), default=0)
    out = [1] * length
    for p, exps in primary.items():
        exps = [0] * (length - len(exps)) + exps
        for i, e in enumerate(exps):
            out[i] *= p ** e
    return [d for d in out if d > 1]


def _p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def classify_small(G: FinGroup) -> str:
    """Coarse isomorphism type: one of ``trivial``, ``cyclic``, ``quaternion``,
    ``dihedral``, ``semidihedral``, ``other``.

    Only the families needed for the 2-group obstruction tables are
    distinguished; the tests rely on order, exponent and involution counts,
    which separate these families among 2-groups.
    """
    n = G.order
    if n == 1:
        return "trivial"
    if G.exponent == n:
        return "cyclic"
    if not G.is_p_group(2) or n < 8 or G.exponent != n // 2:
        return "other"
    involutions = sum(1 for o in G.element_orders if o == 2)
    if involutions == 1:
        return "quaternion"
    # maximal-class 2-groups with a cyclic subgroup of index 2
    if G.is_abelian:
        return "other"
    if involutions == n // 2 + 1:
        return "dihedral"
    if n >= 16 and involutions == n // 4 + 1:
        # semidihedral has n/4 + 1 involutions; the modular group M_n has 3
        order4 = sum(1 for o in G.element_orders if o == 4)
        if order4 == n // 4 + 2:
            return "semidihedral"
    return "other"
