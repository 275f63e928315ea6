"""Exact linear algebra over the integers and their quotients.

Matrices are :class:`SparseMatrix` objects (row dictionaries of Python ints)
or plain nested lists for small dense work.  The workhorse is a sparse
elimination that only ever pivots on units, which keeps integer arithmetic
unimodular; whatever is left over goes through a dense Smith normal form.

Cohomology of a cochain complex of free modules ``X --A--> Y --B--> Z`` at
``Y`` over the integers is ``Z^(dim Y - rk A - rk B)`` plus the torsion of
``coker A`` (torsion of ``Y / im A`` lies in ``ker B`` because ``Z`` is free).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .errors import NoSolution, NotAComplex

Dense = list[list[int]]


# ---------------------------------------------------------------------------
# coefficient rings


@dataclass(frozen=True)
class Ring:
    """``Ring(0, False)`` is Z, ``Ring(0, True)`` is Q, ``Ring(m, ...)`` is Z/m."""
    modulus: int = 0
    field: bool = False

    @property
    def is_field(self) -> bool:
        return self.field

    def __str__(self) -> str:
        if self.modulus == 0:
            return "Q" if self.field else "Z"
        return f"F{self.modulus}" if self.field else f"Z/{self.modulus}"

    def reduce(self, x: int) -> int:
        return x % self.modulus if self.modulus else x


ZZ = Ring(0, False)
QQ = Ring(0, True)


def GF(p: int) -> Ring:
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"{p} is not prime")
    return Ring(p, True)


def parse_ring(token: str) -> Ring:
    t = token.strip().upper().replace("ℤ", "Z").replace("ℚ", "Q").replace("𝔽", "F")
    if t == "Z":
        return ZZ
    if t == "Q":
        return QQ
    for prefix in ("F", "GF", "Z/"):
        if t.startswith(prefix) and t[len(prefix):].isdigit():
            m = int(t[len(prefix):])
            try:
                return GF(m)
            except ValueError:
                if prefix == "Z/" and m >= 2:
                    return Ring(m, False)
                raise
    raise ValueError(f"unknown coefficient ring {token!r}")


# ---------------------------------------------------------------------------
# abelian groups


@dataclass(frozen=True, order=True)
class AbGroup:
    """Finitely generated abelian group ``Z^rank + sum Z/d_i`` with ``d_1 | d_2 | ...``."""
    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", _canonical_torsion(self.torsion))

    @classmethod
    def free(cls, n: int) -> "AbGroup":
        return cls(n, ())

    @classmethod
    def over(cls, ring: Ring, dim: int) -> "AbGroup":
        """The free ``ring``-module of dimension ``dim`` as an abelian group."""
        if ring.modulus == 0:
            return cls(dim, ())
        return cls(0, (ring.modulus,) * dim)

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    def __add__(self, other: "AbGroup") -> "AbGroup":
        return AbGroup(self.rank + other.rank, self.torsion + other.torsion)

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        counts: dict[int, int] = {}
        for d in self.torsion:
            counts[d] = counts.get(d, 0) + 1
        for d, c in counts.items():
            parts.append(f"(Z/{d})" + (f"^{c}" if c > 1 else ""))
        return " + ".join(parts) or "0"

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, data: dict) -> "AbGroup":
        return cls(int(data.get("rank", 0)), tuple(int(d) for d in data.get("torsion", [])))


def _canonical_torsion(ds: Iterable[int]) -> tuple[int, ...]:
    """Invariant factors from an arbitrary list of cyclic orders."""
    primary: dict[int, list[int]] = {}
    for d in ds:
        d = abs(int(d))
        if d == 0:
            raise ValueError("torsion coefficient 0; use rank instead")
        for p, e in _factor(d).items():
            primary.setdefault(p, []).append(p ** e)
    if not primary:
        return ()
    length = max(len(v) for v in primary.values())
    out = [1] * length
    for p, qs in primary.items():
        qs = [1] * (length - len(qs)) + sorted(qs)
        for i, q in enumerate(qs):
            out[i] *= q
    return tuple(d for d in out if d > 1)


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------------------
# sparse matrices


class SparseMatrix:
    """Integer matrix stored as ``{row: {col: value}}`` with no explicit zeros."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: dict[int, dict[int, int]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows: dict[int, dict[int, int]] = rows if rows is not None else {}

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]], ncols: int | None = None) -> "SparseMatrix":
        nrows = len(dense)
        ncols = len(dense[0]) if dense else (ncols or 0)
        rows = {}
        for i, r in enumerate(dense):
            d = {j: int(v) for j, v in enumerate(r) if v}
            if d:
                rows[i] = d
        return cls(nrows, ncols, rows)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {i: {i: 1} for i in range(n)})

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(nrows, ncols, {})

    def add(self, i: int, j: int, v: int) -> None:
        if not v:
            return
        row = self.rows.setdefault(i, {})
        nv = row.get(j, 0) + v
        if nv:
            row[j] = nv
        else:
            del row[j]
            if not row:
                del self.rows[i]

    def get(self, i: int, j: int) -> int:
        return self.rows.get(i, {}).get(j, 0)

    def to_dense(self) -> Dense:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for i, r in self.rows.items():
            for j, v in r.items():
                out[i][j] = v
        return out

    def copy(self) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols, {i: dict(r) for i, r in self.rows.items()})

    def transpose(self) -> "SparseMatrix":
        out: dict[int, dict[int, int]] = {}
        for i, r in self.rows.items():
            for j, v in r.items():
                out.setdefault(j, {})[i] = v
        return SparseMatrix(self.ncols, self.nrows, out)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out: dict[int, dict[int, int]] = {}
        orows = other.rows
        for i, r in self.rows.items():
            acc: dict[int, int] = {}
            for k, a in r.items():
                ok = orows.get(k)
                if ok:
                    for j, b in ok.items():
                        acc[j] = acc.get(j, 0) + a * b
            acc = {j: v for j, v in acc.items() if v}
            if acc:
                out[i] = acc
        return SparseMatrix(self.nrows, other.ncols, out)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        out = self.copy()
        for i, r in other.rows.items():
            for j, v in r.items():
                out.add(i, j, -v)
        return out

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        out = self.copy()
        for i, r in other.rows.items():
            for j, v in r.items():
                out.add(i, j, v)
        return out

    def scale(self, c: int) -> "SparseMatrix":
        if c == 0:
            return SparseMatrix.zero(self.nrows, self.ncols)
        return SparseMatrix(self.nrows, self.ncols,
                            {i: {j: c * v for j, v in r.items()} for i, r in self.rows.items()})

    def mod(self, m: int) -> "SparseMatrix":
        if not m:
            return self.copy()
        rows = {}
        for i, r in self.rows.items():
            d = {j: v % m for j, v in r.items() if v % m}
            if d:
                rows[i] = d
        return SparseMatrix(self.nrows, self.ncols, rows)

    def apply(self, vec: Sequence[int]) -> list[int]:
        out = [0] * self.nrows
        for i, r in self.rows.items():
            out[i] = sum(v * vec[j] for j, v in r.items())
        return out

    def is_zero(self, modulus: int = 0) -> bool:
        if not modulus:
            return not self.rows
        return all(v % modulus == 0 for r in self.rows.values() for v in r.values())

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def __eq__(self, other) -> bool:
        return (isinstance(other, SparseMatrix) and self.shape == other.shape
                and self.rows == other.rows)

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


def as_sparse(m) -> SparseMatrix:
    return m if isinstance(m, SparseMatrix) else SparseMatrix.from_dense(m)


def block_diagonal(blocks: Sequence[SparseMatrix]) -> SparseMatrix:
    out = SparseMatrix(sum(b.nrows for b in blocks), sum(b.ncols for b in blocks))
    r0 = c0 = 0
    for b in blocks:
        for i, row in b.rows.items():
            out.rows[r0 + i] = {c0 + j: v for j, v in row.items()}
        r0 += b.nrows
        c0 += b.ncols
    return out


def vstack(blocks: Sequence[SparseMatrix], ncols: int | None = None) -> SparseMatrix:
    ncols = blocks[0].ncols if blocks else (ncols or 0)
    out = SparseMatrix(0, ncols)
    for b in blocks:
        if b.ncols != ncols:
            raise ValueError("column mismatch in vstack")
        for i, row in b.rows.items():
            out.rows[out.nrows + i] = dict(row)
        out.nrows += b.nrows
    return out


def hstack(blocks: Sequence[SparseMatrix], nrows: int | None = None) -> SparseMatrix:
    return vstack([b.transpose() for b in blocks], nrows).transpose()


# ---------------------------------------------------------------------------
# sparse unit-pivot elimination


def _unit_inverse(v: int, modulus: int) -> int | None:
    if modulus:
        v %= modulus
        if v == 0 or math.gcd(v, modulus) != 1:
            return None
        return pow(v, -1, modulus)
    return v if v in (1, -1) else None


def _eliminate(M: SparseMatrix, modulus: int = 0, record: list | None = None
               ) -> tuple[int, dict[int, dict[int, int]]]:
    """Pivot on unit entries until none remain.

    Returns the pivot count and the leftover rows.  Over a prime modulus the
    leftover is empty; over the integers it has no entry equal to +-1.  Row
    and column operations used are unimodular, so the leftover has the same
    nontrivial elementary divisors as ``M``.  With ``record`` given, each pivot
    is appended as ``(column, inverse, row)``; later pivot rows never mention
    earlier pivot columns, and the leftover mentions no pivot column.
    """
    rows = {i: dict(r) for i, r in M.mod(modulus).rows.items()} if modulus else \
        {i: dict(r) for i, r in M.rows.items()}
    cols: dict[int, set[int]] = {}
    for i, r in rows.items():
        for j in r:
            cols.setdefault(j, set()).add(i)
    heap = [(len(r), i) for i, r in rows.items()]
    heapq.heapify(heap)
    pivots = 0
    while heap:
        length, i = heapq.heappop(heap)
        row = rows.get(i)
        if row is None or len(row) != length:
            continue
        best = None
        for j, v in row.items():
            if _unit_inverse(v, modulus) is not None:
                c = len(cols[j])
                if best is None or c < best[0]:
                    best = (c, j)
                    if c == 1:
                        break
        if best is None:
            continue
        j = best[1]
        inv = _unit_inverse(row[j], modulus)
        if record is not None:
            record.append((j, inv, row))
        del rows[i]
        for k in row:
            cols[k].discard(i)
        for i2 in list(cols[j]):
            r2 = rows[i2]
            f = r2[j] * inv
            if modulus:
                f %= modulus
            for k, v in row.items():
                nv = r2.get(k, 0) - f * v
                if modulus:
                    nv %= modulus
                if nv:
                    if k not in r2:
                        cols[k].add(i2)
                    r2[k] = nv
                elif k in r2:
                    del r2[k]
                    cols[k].discard(i2)
            if r2:
                heapq.heappush(heap, (len(r2), i2))
            else:
                del rows[i2]
        del cols[j]
        pivots += 1
    return pivots, rows


def _compress(rows: dict[int, dict[int, int]]) -> Dense:
    ri = sorted(rows)
    ci = sorted({j for r in rows.values() for j in r})
    cpos = {j: k for k, j in enumerate(ci)}
    out = [[0] * len(ci) for _ in ri]
    for a, i in enumerate(ri):
        for j, v in rows[i].items():
            out[a][cpos[j]] = v
    return out


def rank(M, ring: Ring = QQ) -> int:
    """Rank over a field (Q or F_p); over Z this is the Q-rank."""
    M = as_sparse(M)
    if ring.modulus:
        if not ring.is_field:
            raise ValueError("rank over a non-field quotient ring is not defined here")
        pivots, rest = _eliminate(M, ring.modulus)
        return pivots
    pivots, rest = _eliminate(M)
    return pivots + len(_diagonal(_compress(rest))) if rest else pivots


def elementary_divisors(M) -> list[int]:
    """Nonzero Smith invariants of an integer matrix, including 1s."""
    M = as_sparse(M)
    pivots, rest = _eliminate(M)
    return [1] * pivots + (_diagonal(_compress(rest)) if rest else [])


# ---------------------------------------------------------------------------
# dense Smith normal form


def _identity(n: int) -> Dense:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None
                      ) -> tuple[Dense, Dense, Dense]:
    """Return ``(S, U, V)`` with ``U M V = S`` diagonal, ``d1 | d2 | ...``, U and V unimodular.

    Pivots are chosen by smallest absolute value; non-divisible entries are
    folded into the pivot row or column until the pivot divides everything
    left in the trailing block.
    """
    A = [list(map(int, r)) for r in M]
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    U = _identity(m)
    V = _identity(n)
    _snf_inplace(A, m, n, U, V)
    return A, U, V


def _diagonal(M: Dense) -> list[int]:
    A = [list(r) for r in M]
    m = len(A)
    n = len(A[0]) if m else 0
    _snf_inplace(A, m, n, None, None)
    return [A[i][i] for i in range(min(m, n)) if A[i][i]]


def _snf_inplace(A: Dense, m: int, n: int, U: Dense | None, V: Dense | None) -> None:
    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        if V is not None:
            for r in V:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        if f:
            rd, rs = A[dst], A[src]
            for k in range(n):
                if rs[k]:
                    rd[k] += f * rs[k]
            if U is not None:
                ud, us = U[dst], U[src]
                for k in range(m):
                    if us[k]:
                        ud[k] += f * us[k]

    def add_col(dst, src, f):  # col_dst += f * col_src
        if f:
            for r in A:
                if r[src]:
                    r[dst] += f * r[src]
            if V is not None:
                for r in V:
                    if r[src]:
                        r[dst] += f * r[src]

    def negate_row(i):
        A[i] = [-x for x in A[i]]
        if U is not None:
            U[i] = [-x for x in U[i]]

    t = 0
    while t < min(m, n):
        # smallest nonzero entry in the trailing block
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            return
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        done = False
            if not done:
                # move the smallest remainder into the pivot position
                best = None
                for i in range(t + 1, m):
                    if A[i][t] and (best is None or abs(A[i][t]) < best[0]):
                        best = (abs(A[i][t]), i, None)
                for j in range(t + 1, n):
                    if A[t][j] and (best is None or abs(A[t][j]) < best[0]):
                        best = (abs(A[t][j]), None, j)
                if best[1] is not None:
                    swap_rows(t, best[1])
                else:
                    swap_cols(t, best[2])
                continue
            # pivot must divide the whole trailing block
            bad = None
            for i in range(t + 1, m):
                row = A[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            negate_row(t)
        t += 1


def hermite_kernel_basis(M: Dense, ncols: int) -> Dense:
    """Columns spanning the integer kernel of ``M`` (a saturated lattice)."""
    S, U, V = smith_normal_form(M, ncols)
    r = sum(1 for i in range(min(len(S), ncols)) if S[i][i])
    return [[V[i][j] for j in range(r, ncols)] for i in range(ncols)]


# ---------------------------------------------------------------------------
# solving


def solve(A: Sequence[Sequence[int]], b: Sequence[int], ncols: int | None = None) -> list[int]:
    """An integer solution ``x`` of ``A x = b``; raises :class:`NoSolution`."""
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    S, U, V = smith_normal_form(A, n)
    ub = [sum(U[i][k] * b[k] for k in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(m):
        d = S[i][i] if i < n else 0
        if d:
            if ub[i] % d:
                raise NoSolution("no integer solution")
            y[i] = ub[i] // d
        elif ub[i]:
            raise NoSolution("inconsistent system")
    return [sum(V[i][k] * y[k] for k in range(n)) for i in range(n)]


def solve_mod(A: Sequence[Sequence[int]], b: Sequence[int], p: int, ncols: int | None = None
              ) -> list[int]:
    """A solution of ``A x = b`` over ``F_p``; raises :class:`NoSolution`."""
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    aug = [[A[i][j] % p for j in range(n)] + [b[i] % p] for i in range(m)]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if aug[i][c]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = pow(aug[r][c], -1, p)
        aug[r] = [x * inv % p for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(x - f * y) % p for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    if any(aug[i][n] for i in range(r, m)):
        raise NoSolution("inconsistent system mod p")
    x = [0] * n
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][n]
    return x


def kernel_basis_mod(M: Sequence[Sequence[int]], p: int, ncols: int) -> Dense:
    """Columns spanning the kernel of ``M`` over ``F_p``."""
    m = len(M)
    A = [[M[i][j] % p for j in range(ncols)] for i in range(m)]
    piv_cols = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, m) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in set(piv_cols)]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, c in enumerate(piv_cols):
            v[c] = (-A[i][fc]) % p
        basis.append(v)
    return [[basis[k][i] for k in range(len(basis))] for i in range(ncols)]


def kernel_basis(M, ring: Ring, ncols: int) -> Dense:
    """Kernel columns over ``ring`` (saturated integer kernel for Z and Q).

    Unit pivots are eliminated sparsely; only the leftover block goes through
    dense elimination, and pivot variables are then back-substituted.
    """
    if not isinstance(M, SparseMatrix):
        M = SparseMatrix.from_dense(M, ncols) if M else SparseMatrix(0, ncols)
    m = ring.modulus
    pivots: list[tuple[int, int, dict[int, int]]] = []
    _, rest = _eliminate(M, m, pivots)
    pivot_cols = {j for j, _, _ in pivots}
    free = [c for c in range(ncols) if c not in pivot_cols]
    fpos = {c: k for k, c in enumerate(free)}
    small = [[0] * len(free) for _ in rest]
    for a, r in enumerate(rest.values()):
        for j, v in r.items():
            small[a][fpos[j]] = v
    if not free:
        Kf = []
    elif not small:
        Kf = _identity(len(free))
    elif m:
        Kf = kernel_basis_mod(small, m, len(free))
    else:
        Kf = hermite_kernel_basis(small, len(free))
    nk = len(Kf[0]) if Kf and Kf[0] else 0
    out = [[0] * nk for _ in range(ncols)]
    for c in range(nk):
        x = [0] * ncols
        for k, col in enumerate(free):
            x[col] = Kf[k][c]
        for j, inv, row in reversed(pivots):
            t = sum(v * x[k] for k, v in row.items() if k != j)
            x[j] = (-inv * t) % m if m else -inv * t
        for i in range(ncols):
            out[i][c] = x[i]
    return out


# ---------------------------------------------------------------------------
# maps between finitely generated abelian groups


@dataclass(frozen=True)
class AbMap:
    """Homomorphism given on the canonical generators of ``source`` and ``target``.

    Generators of an :class:`AbGroup` are the ``rank`` free ones followed by
    one generator per torsion coefficient.
    """
    source: AbGroup
    target: AbGroup
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        mat = tuple(tuple(int(x) for x in r) for r in self.matrix)
        object.__setattr__(self, "matrix", mat)
        if len(mat) != self.target.ngens or any(len(r) != self.source.ngens for r in mat):
            raise ValueError("matrix shape does not match generator counts")
        # each source relation d e_i must land in the target relation lattice
        rel_t = _relations(self.target)
        for k, d in enumerate(self.source.torsion):
            col = self.source.rank + k
            img = [d * mat[i][col] for i in range(self.target.ngens)]
            if not _in_lattice(rel_t, img, self.target.ngens):
                raise ValueError("matrix does not respect the source relations")


def _relations(A: AbGroup) -> Dense:
    """Relation columns of ``A`` as an ``ngens x len(torsion)`` matrix."""
    n = A.ngens
    rel = [[0] * len(A.torsion) for _ in range(n)]
    for k, d in enumerate(A.torsion):
        rel[A.rank + k][k] = d
    return rel


def _in_lattice(cols: Dense, v: Sequence[int], n: int) -> bool:
    if not any(v):
        return True
    if not cols or not cols[0]:
        return False
    try:
        solve(cols, v)
        return True
    except NoSolution:
        return False


def _quotient_of_lattices(basis: Dense, sub: Dense, n: int) -> AbGroup:
    """``span(basis) / span(sub)`` where the columns of ``sub`` lie in the span of ``basis``
    and ``basis`` has independent columns."""
    k = len(basis[0]) if basis else 0
    if k == 0:
        return AbGroup()
    coords = []
    s = len(sub[0]) if sub else 0
    for c in range(s):
        coords.append(solve(basis, [sub[i][c] for i in range(n)], k))
    if not coords:
        return AbGroup(k)
    C = [[coords[c][i] for c in range(s)] for i in range(k)]
    ds = _diagonal(C)
    return AbGroup(k - len(ds), tuple(d for d in ds if d > 1))


def kernel_cokernel(f: AbMap) -> tuple[AbGroup, AbGroup]:
    """Kernel and cokernel of ``f`` as abstract groups."""
    s, t = f.source.ngens, f.target.ngens
    M = [list(r) for r in f.matrix]
    rel_t = _relations(f.target)
    rel_s = _relations(f.source)
    # cokernel: Z^t / (im M + relations)
    gens = [M[i] + rel_t[i] for i in range(t)]
    ds = _diagonal(gens) if t and gens and gens[0] else []
    coker = AbGroup(t - len(ds), tuple(d for d in ds if d > 1))
    # kernel: {x : M x in rel_t lattice} / rel_s lattice
    combo = [M[i] + [-x for x in rel_t[i]] for i in range(t)]
    width = s + len(f.target.torsion)
    if t:
        K = hermite_kernel_basis(combo, width)
    else:
        K = _identity(width)
    P = [K[i] for i in range(s)]
    P = _column_basis(P, s)
    kernel = _quotient_of_lattices(P, rel_s, s) if P and P[0] else AbGroup()
    return kernel, coker


def _column_basis(M: Dense, n: int) -> Dense:
    """A basis (independent columns) of the column lattice of ``M``."""
    if not M or not M[0]:
        return [[] for _ in range(n)]
    # column HNF via SNF: M V = U^-1 S; nonzero columns of M V form a basis
    S, U, V = smith_normal_form(M)
    r = sum(1 for i in range(min(len(S), len(S[0]))) if S[i][i])
    cols = len(M[0])
    MV = [[sum(M[i][k] * V[k][j] for k in range(cols)) for j in range(r)] for i in range(n)]
    return MV


def intersection_of_kernels(maps: Sequence[AbMap]) -> AbGroup:
    """Common kernel of maps out of one source."""
    if not maps:
        raise ValueError("need at least one map")
    src = maps[0].source
    if any(m.source != src for m in maps):
        raise ValueError("maps must share a source")
    free_rows, tors_rows, tors = [], [], []
    for m in maps:
        free_rows += list(m.matrix[:m.target.rank])
        tors_rows += list(m.matrix[m.target.rank:])
        tors += list(m.target.torsion)
    return _kernel_presented(src, free_rows, tors_rows, tors)


def _kernel_presented(src: AbGroup, free_rows, tors_rows, tors: list[int]) -> AbGroup:
    s = src.ngens
    M = [list(r) for r in free_rows] + [list(r) for r in tors_rows]
    t = len(M)
    rel = [[0] * len(tors) for _ in range(t)]
    for k, d in enumerate(tors):
        rel[len(free_rows) + k][k] = d
    combo = [M[i] + [-x for x in rel[i]] for i in range(t)]
    if not combo:
        K = _identity(s + len(tors))
    else:
        K = hermite_kernel_basis(combo, s + len(tors))
    P = _column_basis([K[i] for i in range(s)], s)
    return _quotient_of_lattices(P, _relations(src), s) if P and P[0] else AbGroup()


# ---------------------------------------------------------------------------
# cochain complexes


@dataclass
class ChainComplex:
    """Cochain complex ``C^lo -> C^(lo+1) -> ...`` of free modules.

    ``diffs[k]`` is the matrix of ``C^(lo+k) -> C^(lo+k+1)``, shape
    ``dims[k+1] x dims[k]``.
    """
    dims: list[int]
    diffs: list[SparseMatrix]
    lo: int = 0
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        self.diffs = [as_sparse(d) for d in self.diffs]
        if len(self.diffs) != max(len(self.dims) - 1, 0):
            raise ValueError("need one differential between consecutive terms")
        for k, d in enumerate(self.diffs):
            if d.shape != (self.dims[k + 1], self.dims[k]):
                raise ValueError(f"differential {k} has shape {d.shape}, "
                                 f"expected {(self.dims[k + 1], self.dims[k])}")

    @property
    def hi(self) -> int:
        return self.lo + len(self.dims) - 1

    def dim(self, n: int) -> int:
        return self.dims[n - self.lo] if self.lo <= n <= self.hi else 0

    def d(self, n: int) -> SparseMatrix:
        """Differential out of degree ``n``."""
        if self.lo <= n < self.hi:
            return self.diffs[n - self.lo]
        return SparseMatrix.zero(self.dim(n + 1), self.dim(n))

    def check(self, modulus: int = 0) -> None:
        for k in range(len(self.diffs) - 1):
            prod = self.diffs[k + 1] @ self.diffs[k]
            if not prod.is_zero(modulus):
                raise NotAComplex(f"d^{self.lo + k + 1} o d^{self.lo + k} != 0")


def cohomology(C: ChainComplex, n: int, ring: Ring = ZZ, check: bool = True) -> AbGroup:
    """``H^n`` of ``C`` tensored with ``ring``."""
    A = C.d(n - 1)
    B = C.d(n)
    dim = C.dim(n)
    if check:
        prod = B @ A
        if not prod.is_zero(ring.modulus):
            raise NotAComplex(f"differentials around degree {n} do not compose to zero")
    if ring.is_field:
        h = dim - rank(A, ring) - rank(B, ring)
        return AbGroup.over(ring, h)
    if ring.modulus == 0:
        ea = elementary_divisors(A)
        h = dim - len(ea) - rank(B)
        return AbGroup(h, tuple(d for d in ea if d > 1))
    # composite Z/m: universal coefficients on the integral complex
    m = ring.modulus
    ea = elementary_divisors(A)
    eb = elementary_divisors(B)
    free = dim - len(ea) - len(eb)
    parts = [m] * free
    parts += [math.gcd(d, m) for d in ea if d > 1]
    parts += [math.gcd(d, m) for d in eb if d > 1]
    return AbGroup(0, tuple(x for x in parts if x > 1))


def euler_characteristic(C: ChainComplex) -> int:
    return sum((-1) ** (C.lo + k) * d for k, d in enumerate(C.dims))


def induced_map_on_cohomology(C: ChainComplex, n: int, m: int = 2) -> tuple[AbMap, AbGroup]:
    """Reduction ``H^n(C; Z) -> H^n(C; Z/m)`` and its kernel.

    The kernel is computed as ``(Z ∩ (B + mC)) / B`` with ``Z`` the integral
    cocycles and ``B`` the integral coboundaries; the map itself is written
    on the canonical generators of both groups.
    """
    A = C.d(n - 1).to_dense()
    Bm = C.d(n).to_dense()
    dim = C.dim(n)
    if not (C.d(n) @ C.d(n - 1)).is_zero():
        raise NotAComplex(f"differentials around degree {n} do not compose to zero")
    zeros = [[] for _ in range(dim)]
    Zb = hermite_kernel_basis(Bm, dim) if Bm else _identity(dim)
    Bb = _column_basis(A, dim) if A and A[0] else zeros
    # B + mC, then intersect with Z
    BmC = [Bb[i] + [m if j == i else 0 for j in range(dim)] for i in range(dim)]
    BmC = _column_basis(BmC, dim)
    L = _intersect_lattices(Zb, BmC, dim)
    kernel = _quotient_of_lattices(L, Bb, dim) if L and L[0] else AbGroup()
    source = _quotient_of_lattices(Zb, Bb, dim) if Zb and Zb[0] else AbGroup()
    target = cohomology(C, n, Ring(m, _is_prime(m)))
    gens_s = _quotient_generators(Zb, Bb, dim)
    gens_t, t_coord = _mod_quotient_coordinates(C, n, m)
    matrix = [[0] * source.ngens for _ in range(target.ngens)]
    for j, z in enumerate(gens_s):
        for i, v in enumerate(t_coord(z)):
            matrix[i][j] = v
    return AbMap(source, target, tuple(tuple(r) for r in matrix)), kernel


def _is_prime(m: int) -> bool:
    return m >= 2 and all(m % d for d in range(2, int(m ** 0.5) + 1))


def _intersect_lattices(L1: Dense, L2: Dense, n: int) -> Dense:
    k1 = len(L1[0]) if L1 and L1[0] else 0
    k2 = len(L2[0]) if L2 and L2[0] else 0
    if not k1 or not k2:
        return [[] for _ in range(n)]
    combo = [L1[i] + [-x for x in L2[i]] for i in range(n)]
    K = hermite_kernel_basis(combo, k1 + k2)
    if not K or not K[0]:
        return [[] for _ in range(n)]
    pts = [[sum(L1[i][a] * K[a][c] for a in range(k1)) for c in range(len(K[0]))] for i in range(n)]
    return _column_basis(pts, n)


def _quotient_generators(basis: Dense, sub: Dense, n: int) -> list[list[int]]:
    """Representatives in ``Z^n`` of the canonical generators of ``span(basis)/span(sub)``."""
    k = len(basis[0]) if basis and basis[0] else 0
    if not k:
        return []
    s = len(sub[0]) if sub and sub[0] else 0
    coords = [solve(basis, [sub[i][c] for i in range(n)], k) for c in range(s)]
    C = [[coords[c][i] for c in range(s)] for i in range(k)] if s else [[0] for _ in range(k)]
    S, U, V = smith_normal_form(C)
    Uinv = _inverse_unimodular(U)
    diag = [S[i][i] if i < len(S[0]) else 0 for i in range(k)]
    # new basis of span(basis): basis * U^-1; generator i has order diag[i]
    newb = [[sum(basis[r][a] * Uinv[a][i] for a in range(k)) for i in range(k)] for r in range(n)]
    free = [i for i in range(k) if diag[i] == 0]
    tors = [i for i in range(k) if diag[i] > 1]
    return [[newb[r][i] for r in range(n)] for i in free + tors]


def _inverse_unimodular(U: Dense) -> Dense:
    n = len(U)
    cols = [solve(U, [int(r == j) for r in range(n)], n) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _mod_quotient_coordinates(C: ChainComplex, n: int, m: int):
    """Generators of ``H^n(C; Z/m)`` and a coordinate function for cocycles."""
    A = C.d(n - 1).to_dense()
    dim = C.dim(n)
    # work in Z^dim: H^n(Z/m) = {z : Bz ≡ 0} / (im A + m Z^dim)
    Bm = C.d(n).to_dense()
    wide = [[Bm[i][j] for j in range(dim)] + [m if k == i else 0 for k in range(len(Bm))]
            for i in range(len(Bm))]
    if Bm:
        K = hermite_kernel_basis(wide, dim + len(Bm))
        Zm = _column_basis([K[i] for i in range(dim)], dim)
    else:
        Zm = _identity(dim)
    sub = [(A[i] if A and A[0] else []) + [m if j == i else 0 for j in range(dim)] for i in range(dim)]
    sub = _column_basis(sub, dim)
    gens = _quotient_generators(Zm, sub, dim)
    k = len(Zm[0]) if Zm and Zm[0] else 0
    s = len(sub[0]) if sub and sub[0] else 0
    coords = [solve(Zm, [sub[i][c] for i in range(dim)], k) for c in range(s)]
    Cm = [[coords[c][i] for c in range(s)] for i in range(k)]
    S, U, V = smith_normal_form(Cm)
    diag = [S[i][i] if i < len(S[0]) else 0 for i in range(k)]
    keep = [i for i in range(k) if diag[i] == 0] + [i for i in range(k) if diag[i] > 1]

    def coordinates(z: Sequence[int]) -> list[int]:
        c = solve(Zm, list(z), k)
        uc = [sum(U[i][a] * c[a] for a in range(k)) for i in range(k)]
        return [uc[i] % diag[i] if diag[i] else uc[i] for i in keep]

    return gens, coordinates


# ---------------------------------------------------------------------------
# posets


def mobius(elements: Sequence[Hashable], leq: Callable[[Hashable, Hashable], bool]
           ) -> dict[tuple[Hashable, Hashable], int]:
    """Möbius function ``mu(x, y)`` for all ``x <= y`` of a finite poset."""
    elements = list(elements)
    below = {y: [x for x in elements if leq(x, y)] for y in elements}
    # a linear extension: sort by number of elements below
    order = sorted(elements, key=lambda y: len(below[y]))
    mu: dict[tuple[Hashable, Hashable], int] = {}
    for x in elements:
        for y in order:
            if not leq(x, y):
                continue
            if x == y:
                mu[x, y] = 1
            else:
                mu[x, y] = -sum(mu[x, z] for z in below[y] if z != y and leq(x, z))
    return mu
