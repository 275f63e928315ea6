"""Destriction functors as explicit matrix data.

A functor assigns a free module ``F(U/V)`` to each section and matrices for
destrictions ``F(M/L) -> F(U/V)`` (for ``(U,V) ⪯ (M,L)``) and conjugations
``F(U/V) -> F(^g U / ^g V)``.  Values with torsion are not representable;
finite coefficient rings are handled by attaching ``ring`` to a functor with
integral matrices (for instance the constant functor ``F_p`` is the constant
functor ``Z`` read over ``F_p``).

The built-in functors compute their maps directly from the group; the
tabulated functor reads everything from a file and composes covers and
generator conjugations on demand.
"""

from __future__ import annotations

import json
from collections import deque
from functools import cached_property

from .errors import InputError, UnsupportedValue
from .groups import FinGroup, bits, group_from_generators
from .homalg import QQ, ZZ, AbGroup, Ring, SparseMatrix, parse_ring
from .sections import (Report, Section, collection_members, conj_section, is_section,
                       section_normalizer)


class DestrictionFunctor:
    """Base class; subclasses implement ``dim``, ``_des`` and ``_conj``."""

    name = "functor"

    def __init__(self, G: FinGroup, collection_id: str = "all", ring: Ring = ZZ):
        self.G = G
        self.collection_id = collection_id
        self.ring = ring
        self._des_cache: dict[tuple[Section, Section], SparseMatrix] = {}
        self._conj_cache: dict[tuple[int, Section], SparseMatrix] = {}

    def dim(self, s: Section) -> int:
        raise NotImplementedError

    def value(self, s: Section) -> AbGroup:
        return AbGroup.over(self.ring, self.dim(s))

    def des(self, big: Section, small: Section) -> SparseMatrix:
        """``Defres`` from ``F(big)`` to ``F(small)``; requires ``small ⪯ big``."""
        key = (big, small)
        out = self._des_cache.get(key)
        if out is None:
            if not small.leq(big):
                raise InputError("destriction needs small ⪯ big")
            if big == small:
                out = SparseMatrix.identity(self.dim(big))
            else:
                out = self._des(big, small)
            self._des_cache[key] = out
        return out

    def conj(self, g: int, s: Section) -> SparseMatrix:
        """``c_g : F(s) -> F(^g s)``."""
        key = (g, s)
        out = self._conj_cache.get(key)
        if out is None:
            out = SparseMatrix.identity(self.dim(s)) if g == 0 else self._conj(g, s)
            self._conj_cache[key] = out
        return out

    def morphism(self, target: Section, source: Section, g: int) -> SparseMatrix:
        """Matrix of the morphism ``Mg : source -> target`` of the orbit category,
        acting as ``F(target) -> F(source)``: conjugate back after destricting
        to ``^g source``."""
        G = self.G
        gs = conj_section(G, g, source)
        return self.conj(G.inv[g], gs) @ self.des(target, gs)

    def _des(self, big: Section, small: Section) -> SparseMatrix:
        raise NotImplementedError

    def _conj(self, g: int, s: Section) -> SparseMatrix:
        raise NotImplementedError

    def describe(self) -> str:
        return f"{self.name} over {self.ring}"


class ConstantFunctor(DestrictionFunctor):
    name = "constant"

    def __init__(self, G: FinGroup, collection_id: str = "all", rank: int = 1, ring: Ring = ZZ):
        super().__init__(G, collection_id, ring)
        self.rank = rank

    def dim(self, s: Section) -> int:
        return self.rank

    def _des(self, big, small):
        return SparseMatrix.identity(self.rank)

    def _conj(self, g, s):
        return SparseMatrix.identity(self.rank)


class BurnsideDual(DestrictionFunctor):
    """``F(U/V)`` = functions on ``U``-classes of subgroups ``W`` with ``V <= W <= U``."""

    name = "bdual"

    def __init__(self, G: FinGroup, collection_id: str = "all", ring: Ring = ZZ):
        super().__init__(G, collection_id, ring)
        self._bases: dict[Section, tuple[list[int], dict[int, int]]] = {}

    def basis(self, s: Section) -> tuple[list[int], dict[int, int]]:
        """Class representatives (subgroup masks) and a map subgroup -> basis position."""
        out = self._bases.get(s)
        if out is None:
            G = self.G
            inside = [H.mask for H in G.subgroups
                      if s.V & ~H.mask == 0 and H.mask & ~s.U == 0]
            ugens = G._gensets.get(s.U)
            if ugens is None:
                from .groups import _small_generating_set
                ugens = _small_generating_set(G, s.U)
            where: dict[int, int] = {}
            reps: list[int] = []
            for W in inside:
                if W in where:
                    continue
                k = len(reps)
                reps.append(W)
                orbit = [W]
                where[W] = k
                while orbit:
                    x = orbit.pop()
                    for u in ugens:
                        y = G.conjugate_mask(u, x)
                        if y not in where:
                            where[y] = k
                            orbit.append(y)
            out = (reps, where)
            self._bases[s] = out
        return out

    def dim(self, s: Section) -> int:
        return len(self.basis(s)[0])

    def _des(self, big, small):
        reps_s, _ = self.basis(small)
        _, where_b = self.basis(big)
        M = SparseMatrix(len(reps_s), self.dim(big))
        for i, W in enumerate(reps_s):
            M.rows[i] = {where_b[W]: 1}
        return M

    def _conj(self, g, s):
        G = self.G
        t = conj_section(G, g, s)
        reps_t, _ = self.basis(t)
        _, where_s = self.basis(s)
        ginv = G.inv[g]
        M = SparseMatrix(len(reps_t), self.dim(s))
        for i, W in enumerate(reps_t):
            M.rows[i] = {where_s[G.conjugate_mask(ginv, W)]: 1}
        return M

    def basis_labels(self, s: Section) -> list[int]:
        """Orders of the class representatives, for readable output."""
        return [bin(W).count("1") for W in self.basis(s)[0]]


class AtomicFunctor(DestrictionFunctor):
    """Value ``Z^rank`` on one conjugacy class of sections, zero elsewhere."""

    name = "atomic"

    def __init__(self, G: FinGroup, section: Section, collection_id: str = "all",
                 rank: int = 1, ring: Ring = ZZ):
        super().__init__(G, collection_id, ring)
        if not is_section(G, section.U, section.V):
            raise InputError("atomic functor needs a section")
        self.section = section
        self.rank = rank
        orbit = {section}
        frontier = [section]
        while frontier:
            x = frontier.pop()
            for s in G.generators:
                y = conj_section(G, s, x)
                if y not in orbit:
                    orbit.add(y)
                    frontier.append(y)
        self.support = orbit

    def dim(self, s):
        return self.rank if s in self.support else 0

    def _des(self, big, small):
        return SparseMatrix.zero(self.dim(small), self.dim(big))

    def _conj(self, g, s):
        return SparseMatrix.identity(self.dim(s))

    def describe(self) -> str:
        G = self.G
        return (f"atomic at ({bin(self.section.U).count('1')},{bin(self.section.V).count('1')})"
                f" over {self.ring}")


class TabulatedFunctor(DestrictionFunctor):
    """Functor given by values on every section of a collection, destrictions on
    covers and conjugations by the generators of ``G``."""

    name = "tabulated"

    def __init__(self, G: FinGroup, collection_id: str, dims: dict[Section, int],
                 cover_des: dict[tuple[Section, Section], SparseMatrix],
                 gen_conj: dict[tuple[int, Section], SparseMatrix], ring: Ring = ZZ,
                 name: str = "tabulated"):
        super().__init__(G, collection_id, ring)
        self.dims = dims
        self.cover_des = cover_des
        self.gen_conj = gen_conj
        self.name = name

    def dim(self, s):
        try:
            return self.dims[s]
        except KeyError:
            raise InputError(f"section {s} is outside the functor's collection") from None

    @cached_property
    def _covers_below(self) -> dict[Section, list[Section]]:
        out: dict[Section, list[Section]] = {s: [] for s in self.dims}
        for big, small in self.cover_des:
            out[big].append(small)
        return out

    def _des(self, big, small):
        # BFS down the cover graph to find a chain big > ... > small
        prev: dict[Section, Section] = {big: big}
        queue = deque([big])
        while queue:
            x = queue.popleft()
            if x == small:
                break
            for y in self._covers_below.get(x, []):
                if y not in prev and small.leq(y):
                    prev[y] = x
                    queue.append(y)
        if small not in prev:
            raise InputError(f"no cover chain from {big} down to {small}")
        chain = [small]
        while chain[-1] != big:
            chain.append(prev[chain[-1]])
        chain.reverse()
        M = SparseMatrix.identity(self.dim(big))
        for a, b in zip(chain, chain[1:]):
            M = self.cover_des[a, b] @ M
        return M

    def _conj(self, g, s):
        G = self.G
        M = SparseMatrix.identity(self.dim(s))
        cur = s
        for pos in reversed(G.words[g]):
            gen = G.generators[pos]
            M = self.gen_conj[pos, cur] @ M
            cur = conj_section(G, gen, cur)
        return M


# ---------------------------------------------------------------------------
# constructors


def builtin_constant(G: FinGroup, collection_id: str = "all", A: AbGroup = AbGroup(1)
                     ) -> ConstantFunctor:
    """Constant functor with value ``A``; ``A`` must be free or elementary ``(Z/p)^r``."""
    if A.rank and A.torsion:
        raise UnsupportedValue("mixed free and torsion values are not supported")
    if A.torsion:
        ps = set(A.torsion)
        if len(ps) != 1 or not _is_prime(next(iter(ps))):
            raise UnsupportedValue("torsion values must be elementary abelian (Z/p)^r")
        p = A.torsion[0]
        return ConstantFunctor(G, collection_id, len(A.torsion), Ring(p, True))
    return ConstantFunctor(G, collection_id, A.rank, ZZ)


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


def builtin_burnside_dual(G: FinGroup, collection_id: str = "all") -> BurnsideDual:
    return BurnsideDual(G, collection_id)


def builtin_atomic(G: FinGroup, collection_id: str, section: Section,
                   A: AbGroup = AbGroup(1)) -> AtomicFunctor:
    if A.torsion:
        if A.rank or len(set(A.torsion)) != 1 or not _is_prime(A.torsion[0]):
            raise UnsupportedValue("atomic values must be free or elementary abelian")
        return AtomicFunctor(G, section, collection_id, len(A.torsion), Ring(A.torsion[0], True))
    return AtomicFunctor(G, section, collection_id, A.rank, ZZ)


def default_atomic_section(G: FinGroup) -> Section:
    """``(G, Z)`` with ``Z`` the least central subgroup of prime order (``(G,1)`` if trivial)."""
    Zmask = G.centralizer_mask(G.full_mask)
    for H in G.subgroups:
        if H.mask != 1 and H.mask & ~Zmask == 0 and _is_prime(H.order):
            return Section(G.full_mask, H.mask)
    return Section(G.full_mask, 1)


def parse_functor(spec: str, G: FinGroup, collection_id: str = "all") -> DestrictionFunctor:
    """``constant[:<ring>]``, ``bdual``, ``atomic[:<U>:<V>][:<ring>]`` or a file path.

    In the atomic form ``U`` and ``V`` are positions in the sorted subgroup list.
    """
    import os
    if os.path.exists(spec):
        return load_functor(spec, G)
    parts = spec.split(":")
    kind = parts[0]
    if kind == "constant":
        ring = parse_ring(parts[1]) if len(parts) > 1 else ZZ
        return _constant_over(G, collection_id, ring)
    if kind == "bdual":
        return BurnsideDual(G, collection_id)
    if kind == "atomic":
        rest = parts[1:]
        ring = ZZ
        if rest and not rest[-1].isdigit():
            ring = parse_ring(rest.pop())
        if len(rest) == 2:
            subs = G.subgroups
            try:
                sec = Section(subs[int(rest[0])].mask, subs[int(rest[1])].mask)
            except IndexError:
                raise InputError("subgroup position out of range") from None
        elif not rest:
            sec = default_atomic_section(G)
        else:
            raise InputError(f"bad atomic spec {spec!r}")
        if not is_section(G, sec.U, sec.V):
            raise InputError(f"{spec!r} does not name a section")
        return AtomicFunctor(G, sec, collection_id, 1, ring)
    raise InputError(f"unknown functor {spec!r}")


def _constant_over(G: FinGroup, collection_id: str, ring: Ring) -> ConstantFunctor:
    if ring.modulus and not ring.is_field:
        raise UnsupportedValue("constant functors over Z/m need m prime")
    return ConstantFunctor(G, collection_id, 1, ring)


# ---------------------------------------------------------------------------
# validation


def _covers(secs: list[Section]) -> dict[Section, list[Section]]:
    """Lower covers inside a section list."""
    out = {}
    for big in secs:
        below = [s for s in secs if s != big and s.leq(big)]
        out[big] = [s for s in below if not any(t != s and s.leq(t) for t in below)]
    return out


def validate_functor(F: DestrictionFunctor, collection: list[Section] | None = None) -> Report:
    """Check the destriction-algebra relations exhaustively on a collection.

    (R1) ``c_u`` is the identity on ``F(U/V)`` for ``u`` in ``U``;
    (R2) destrictions compose along every cover followed by any further destriction,
         and conjugations compose as the group does;
    (R3) ``c_g ∘ Des = Des ∘ c_g`` on covers, for the generators of ``G``.
    """
    G = F.G
    rep = Report(f"validate {F.describe()} on {G.label}")
    secs = collection if collection is not None else collection_members(G, F.collection_id)
    secset = set(secs)
    m = F.ring.modulus

    def same(A: SparseMatrix, B: SparseMatrix) -> bool:
        return A.shape == B.shape and (A - B).is_zero(m)

    from .groups import _small_generating_set
    for s in secs:
        for u in _small_generating_set(G, s.U):
            if not same(F.conj(u, s), SparseMatrix.identity(F.dim(s))):
                rep.fail(f"R1: c_{u} is not the identity on section {s}")
    covers = _covers(secs)
    for big, lows in covers.items():
        for mid in lows:
            for small in secs:
                if small.leq(mid) and small != mid:
                    if not same(F.des(mid, small) @ F.des(big, mid), F.des(big, small)):
                        rep.fail(f"R2: Des({big}->{mid}->{small}) differs from Des({big}->{small})")
    for s in secs:
        for k, g in enumerate(G.generators):
            for x in range(G.order):
                gx = G.mul[g][x]
                lhs = F.conj(gx, s)
                rhs = F.conj(g, conj_section(G, x, s)) @ F.conj(x, s)
                if not same(lhs, rhs):
                    rep.fail(f"R2: c_(g{k}*{x}) != c_g{k} ∘ c_{x} on {s}")
                    break
    for big, lows in covers.items():
        for small in lows:
            for g in G.generators:
                gb, gs = conj_section(G, g, big), conj_section(G, g, small)
                if gb not in secset or gs not in secset:
                    continue
                lhs = F.conj(g, small) @ F.des(big, small)
                rhs = F.des(gb, gs) @ F.conj(g, big)
                if not same(lhs, rhs):
                    rep.fail(f"R3: conjugation by {g} does not commute with Des({big}->{small})")
    rep.details["sections"] = len(secs)
    return rep


# ---------------------------------------------------------------------------
# files


def _label(G: FinGroup, s: Section) -> str:
    pos = G.subgroup_position
    return f"U={pos[s.U]}/V={pos[s.V]}"


def _unlabel(G: FinGroup, label: str) -> Section:
    try:
        u, v = label.split("/")
        U = G.subgroups[int(u.split("=")[1])].mask
        V = G.subgroups[int(v.split("=")[1])].mask
    except (ValueError, IndexError):
        raise InputError(f"bad section label {label!r}") from None
    if not is_section(G, U, V):
        raise InputError(f"{label} is not a section")
    return Section(U, V)


def save_functor(F: DestrictionFunctor, path: str, collection: list[Section] | None = None) -> None:
    """Write ``F`` restricted to a collection in the tabulated file format."""
    G = F.G
    secs = collection if collection is not None else collection_members(G, F.collection_id)
    pos = G.subgroup_position
    secs = sorted(secs, key=lambda s: (pos[s.U], pos[s.V]))
    data = {
        "group": G.to_json(),
        "collection": F.collection_id,
        "ring": str(F.ring),
        "name": F.name,
        "values": {_label(G, s): {"rank": F.dim(s), "torsion": []} for s in secs},
        "des": [],
        "conj": [],
    }
    for big, lows in _covers(secs).items():
        for small in lows:
            data["des"].append({"source": _label(G, big), "target": _label(G, small),
                                "matrix": F.des(big, small).to_dense()})
    for s in secs:
        for k, g in enumerate(G.generators):
            data["conj"].append({"section": _label(G, s), "generator": k,
                                 "matrix": F.conj(g, s).to_dense()})
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)


def load_functor(path: str, G: FinGroup | None = None) -> TabulatedFunctor:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read functor file {path}: {exc}") from exc
    try:
        gdata = data["group"]
        fileG = group_from_generators(int(gdata["degree"]), gdata["generators"],
                                      gdata.get("label", ""))
        if G is None:
            G = fileG
        elif fileG.elements != G.elements or fileG.generators != G.generators:
            raise InputError("functor file was written for a different permutation group")
        ring = parse_ring(data.get("ring", "Z"))
        dims = {}
        for label, val in data["values"].items():
            A = AbGroup.from_json(val)
            if A.torsion:
                raise UnsupportedValue(f"torsion value at {label}; use a ring instead")
            dims[_unlabel(G, label)] = A.rank
        cover = {}
        for e in data["des"]:
            big, small = _unlabel(G, e["source"]), _unlabel(G, e["target"])
            M = SparseMatrix.from_dense(e["matrix"], dims[big])
            if M.shape != (dims[small], dims[big]):
                raise InputError(f"des {e['source']}->{e['target']} has shape {M.shape}")
            cover[big, small] = M
        conj = {}
        for e in data["conj"]:
            s = _unlabel(G, e["section"])
            k = int(e["generator"])
            t = conj_section(G, G.generators[k], s)
            M = SparseMatrix.from_dense(e["matrix"], dims[s])
            if M.shape != (dims[t], dims[s]):
                raise InputError(f"conj at {e['section']} has shape {M.shape}")
            conj[k, s] = M
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed functor file {path}: {exc}") from exc
    return TabulatedFunctor(G, data.get("collection", "all"), dims, cover, conj, ring,
                            data.get("name", "tabulated"))
