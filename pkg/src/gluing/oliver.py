"""Oliver's cochain complex over the Quillen category.

For a ``p``-group ``G`` the reduced cohomology of the proper orbit category is
computed by a complex whose ``i``-th term is

    ⊕_{E ∈ ℰ_{i+1}} Hom_{Aut_G(E)}(St_E, F(C_G(E)/E))

with ``ℰ_k`` representatives of the rank-``k`` elementary abelian subgroups
and ``St_E`` the Steinberg module.  ``St_E`` is realized as the top cycles
of the chain complex of flags of nontrivial proper subgroups of ``E``; a flag
``A_1 < ... < A_{r-1}`` truncates to ``A_1 < ... < A_{r-2}`` in ``St_{A_{r-1}}``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CoefficientScope, NotIndexP, NotPGroup, RankCap
from .functors import DestrictionFunctor
from .groups import FinGroup, _small_generating_set
from .homalg import (ZZ, AbGroup, ChainComplex, Ring, SparseMatrix, cohomology,
                     kernel_basis, smith_normal_form, solve_mod)
from .sections import Section, elementary_rank, is_elementary_mask

RANK_CAP = 3

Flag = tuple[int, ...]


def _popcount(m: int) -> int:
    return bin(m).count("1")


def _subgroups_of(G: FinGroup, E: int) -> list[int]:
    return [H for H in G._subgroup_masks if H & ~E == 0]


def _flags(G: FinGroup, E: int, p: int, r: int) -> list[Flag]:
    """Complete flags ``A_1 < ... < A_{r-1}`` of nontrivial proper subgroups of ``E``."""
    subs = [H for H in _subgroups_of(G, E) if H not in (1, E)]
    by_order: dict[int, list[int]] = {}
    for H in subs:
        by_order.setdefault(_popcount(H), []).append(H)
    flags: list[Flag] = [()]
    for k in range(1, r):
        nxt = []
        for f in flags:
            for H in by_order.get(p ** k, []):
                if not f or f[-1] & ~H == 0:
                    nxt.append(f + (H,))
        flags = nxt
    return flags


def _left_inverse(B: list[list[int]], modulus: int) -> list[list[int]]:
    """``L`` with ``L B = I`` for a full-column-rank ``B`` (saturated when ``modulus == 0``)."""
    t = len(B)
    s = len(B[0]) if t else 0
    if not s:
        return []
    if modulus:
        Bt = [[B[i][j] for i in range(t)] for j in range(s)]
        rows = [solve_mod(Bt, [int(i == k) for i in range(s)], modulus, t) for k in range(s)]
        return rows
    S, U, V = smith_normal_form(B, s)
    if any(S[i][i] != 1 for i in range(s)):
        raise ValueError("basis is not saturated")
    return [[sum(V[i][k] * U[k][j] for k in range(s)) for j in range(t)] for i in range(s)]


def _matvec(M, v):
    return [sum(a * b for a, b in zip(row, v)) for row in M]


@dataclass
class SteinbergModule:
    G: FinGroup
    E: int
    p: int
    rank: int
    flags: list[Flag]
    basis: list[list[int]]          # columns of cycles in flag coordinates (t x s)
    left_inverse: list[list[int]]   # s x t

    @property
    def dim(self) -> int:
        return len(self.basis[0]) if self.basis and self.basis[0] else 0

    def flag_index(self) -> dict[Flag, int]:
        return {f: i for i, f in enumerate(self.flags)}

    def coordinates(self, v: list[int]) -> list[int]:
        return _matvec(self.left_inverse, v)

    def action(self, g: int) -> list[list[int]]:
        """Matrix of ``g`` (normalizing ``E``) on ``St_E`` in the stored basis."""
        G = self.G
        idx = self.flag_index()
        perm = [idx[tuple(G.conjugate_mask(g, A) for A in f)] for f in self.flags]
        cols = []
        for j in range(self.dim):
            v = [0] * len(self.flags)
            for i in range(len(self.flags)):
                v[perm[i]] += self.basis[i][j]
            cols.append(self.coordinates(v))
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]


def steinberg_module(G: FinGroup, E: int, p: int) -> SteinbergModule:
    cache = G.__dict__.setdefault("_steinberg", {})
    key = (E, p)
    if key in cache:
        return cache[key]
    if not is_elementary_mask(G, E, p):
        raise NotPGroup("Steinberg modules need an elementary abelian p-subgroup")
    r = elementary_rank(E, p)
    if r > RANK_CAP:
        raise RankCap(f"rank {r} exceeds the Steinberg cap {RANK_CAP}")
    if r <= 1:
        flags: list[Flag] = [()]
        basis = [[1]]
    else:
        flags = _flags(G, E, p, r)
        if r == 2:
            # H~_0 of p+1 points: kernel of the augmentation
            D = [[1] * len(flags)]
        else:
            pts = sorted({H for f in flags for H in f})
            pidx = {H: i for i, H in enumerate(pts)}
            D = [[0] * len(flags) for _ in pts]
            for j, (a, b) in enumerate(flags):
                D[pidx[b]][j] += 1
                D[pidx[a]][j] -= 1
        basis = kernel_basis(D, ZZ, len(flags))
    mod = SteinbergModule(G, E, p, r, flags, basis, _left_inverse(basis, 0))
    cache[key] = mod
    return mod


def truncation_map(G: FinGroup, E: int, A: int, p: int) -> list[list[int]]:
    """Matrix ``St_E -> St_A`` on the stored bases, for ``A`` of index ``p`` in ``E``."""
    if A & ~E or _popcount(E) != p * _popcount(A):
        raise NotIndexP("A must be a subgroup of index p")
    SE, SA = steinberg_module(G, E, p), steinberg_module(G, A, p)
    aidx = SA.flag_index()
    cols = []
    for j in range(SE.dim):
        v = [0] * len(SA.flags)
        for i, f in enumerate(SE.flags):
            c = SE.basis[i][j]
            if c and (not f or f[-1] == A):
                v[aidx[f[:-1]]] += c
        cols.append(SA.coordinates(v))
    return [[cols[j][i] for j in range(SE.dim)] for i in range(SA.dim)]


def equivariant_hom(F: DestrictionFunctor, E: int, p: int, ring: Ring | None = None
                    ) -> tuple[AbGroup, list[list[int]], int, int]:
    """Fixed points of ``N_G(E)`` on ``Hom(St_E, F(C_G(E)/E))``.

    Returns the group, a basis of ``m x s`` matrices flattened row-major, and
    ``(m, s)``.  Over ``F_p`` the fixed points are computed mod ``p``.
    """
    ring = ring or F.ring
    G = F.G
    St = steinberg_module(G, E, p)
    sec = Section(G.centralizer_mask(E), E)
    m, s = F.dim(sec), St.dim
    n = m * s
    rows: list[list[int]] = []
    N = G.normalizer_mask(E)
    for g in _small_generating_set(G, N):
        Cg = F.conj(g, sec).to_dense() if m else []
        Sg = St.action(g)
        # c_g φ - φ S_g = 0, entrywise in φ
        for a in range(m):
            for b in range(s):
                row = [0] * n
                for k in range(m):
                    if Cg[a][k]:
                        row[k * s + b] += Cg[a][k]
                for k in range(s):
                    if Sg[k][b]:
                        row[a * s + k] -= Sg[k][b]
                if any(row):
                    rows.append(row)
    if n == 0:
        basis: list[list[int]] = []
    elif not rows:
        basis = [[int(i == j) for i in range(n)] for j in range(n)]
    else:
        K = kernel_basis(rows, ring if ring.modulus else ZZ, n)
        k = len(K[0]) if K and K[0] else 0
        basis = [[K[i][c] for i in range(n)] for c in range(k)]
    return AbGroup.over(ring, len(basis)), basis, m, s


def elementary_reps(G: FinGroup, p: int, k: int) -> list[int]:
    """Conjugacy-class representatives of rank-``k`` elementary abelian ``p``-subgroups."""
    return [cl[0] for cl in G.subgroup_classes
            if is_elementary_mask(G, cl[0], p) and elementary_rank(cl[0], p) == k]


@dataclass
class OliverComplex:
    G: FinGroup
    p: int
    ring: Ring
    reps: list[list[int]]            # reps[i+1] = ℰ_{i+1}
    complex: ChainComplex            # degrees -1 .. rk(G) - 1
    blocks: list[list[tuple[int, int, int]]]   # per degree: (E, offset, dim)

    def cohomology(self, i: int) -> AbGroup:
        if i >= 2 and self.ring == ZZ:
            raise CoefficientScope("degrees >= 2 need p-local coefficients (Q or F_p)")
        return cohomology(self.complex, i, self.ring)


def oliver_complex(F: DestrictionFunctor, p: int, ring: Ring | None = None) -> OliverComplex:
    ring = ring or F.ring
    G = F.G
    if not G.is_p_group(p):
        raise NotPGroup(f"{G.label} is not a {p}-group")
    ranks = [k for k in range(0, 64) if elementary_reps(G, p, k)]
    top = max(ranks)
    if top > RANK_CAP:
        raise RankCap(f"p-rank {top} exceeds the Steinberg cap {RANK_CAP}")
    mod = ring.modulus
    reps = [elementary_reps(G, p, k) for k in range(top + 1)]
    homs: dict[int, tuple[list[list[int]], int, int, list[list[int]]]] = {}
    blocks = []
    dims = []
    for level in reps:
        o, bl = 0, []
        for E in level:
            _, basis, m, s = equivariant_hom(F, E, p, ring)
            cols = [[b[i] for b in basis] for i in range(m * s)]
            linv = _left_inverse(cols, mod) if basis else []
            homs[E] = (basis, m, s, linv)
            bl.append((E, o, len(basis)))
            o += len(basis)
        blocks.append(bl)
        dims.append(o)

    cls = G.class_of_subgroup
    diffs = []
    for k in range(top):
        D = SparseMatrix(dims[k + 1], dims[k])
        offs = {E: off for E, off, _ in blocks[k]}
        for E, offE, dE in blocks[k + 1]:
            if not dE:
                continue
            basisE, mE, sE, linvE = homs[E]
            secE = Section(G.centralizer_mask(E), E)
            maximal = [A for A in _subgroups_of(G, E) if _popcount(A) * p == _popcount(E)]
            for A in maximal:
                A0 = G.subgroup_classes[cls[A]][0]
                basis0, m0, s0, _ = homs[A0]
                if not basis0:
                    continue
                g = G.transporter(A0, A)
                sec0 = Section(G.centralizer_mask(A0), A0)
                secA = Section(G.centralizer_mask(A), A)
                # St_E --trunc--> St_A --g^-1--> St_A0
                T = truncation_map(G, E, A, p)
                Sback = _conj_steinberg(G, A, A0, G.inv[g], p)
                pre = _matmul(Sback, T)                        # s0 x sE
                post = (F.des(secA, secE) @ F.conj(g, sec0)).to_dense() if mE else []
                for c, vec in enumerate(basis0):
                    phi = [vec[a * s0:(a + 1) * s0] for a in range(m0)]
                    img = _matmul(post, _matmul(phi, pre)) if mE and m0 else \
                        [[0] * sE for _ in range(mE)]
                    flat = [x for row in img for x in row]
                    coords = _matvec(linvE, flat)
                    if mod:
                        coords = [x % mod for x in coords]
                    for i, x in enumerate(coords):
                        if x:
                            D.add(offE + i, offs[A0] + c, x)
        diffs.append(D)
    C = ChainComplex(dims, diffs, lo=-1)
    C.check(mod)
    return OliverComplex(G, p, ring, reps, C, blocks)


def _matmul(A, B):
    if not A:
        return []
    n = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(n)]
            for i in range(len(A))]


def _conj_steinberg(G: FinGroup, A: int, A0: int, g: int, p: int) -> list[list[int]]:
    """``St_A -> St_{^g A}`` induced by conjugation (here ``^g A = A0``)."""
    SA, S0 = steinberg_module(G, A, p), steinberg_module(G, A0, p)
    idx = S0.flag_index()
    cols = []
    for j in range(SA.dim):
        v = [0] * len(S0.flags)
        for i, f in enumerate(SA.flags):
            c = SA.basis[i][j]
            if c:
                v[idx[tuple(G.conjugate_mask(g, H) for H in f)]] += c
        cols.append(S0.coordinates(v))
    return [[cols[j][i] for j in range(SA.dim)] for i in range(S0.dim)]


def oliver_cohomology(F: DestrictionFunctor, p: int, degrees=(-1, 0, 1),
                      ring: Ring | None = None) -> dict[int, AbGroup]:
    ring = ring or F.ring
    if ring == ZZ and any(i >= 2 for i in degrees):
        raise CoefficientScope("degrees >= 2 over Z are outside the Oliver route's scope")
    OC = oliver_complex(F, p, ring)
    return {i: cohomology(OC.complex, i, ring) for i in degrees}
