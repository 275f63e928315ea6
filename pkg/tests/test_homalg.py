import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ as SZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from gluing.errors import NoSolution, NotAComplex
from gluing.homalg import (GF, QQ, ZZ, AbGroup, AbMap, ChainComplex, SparseMatrix, cohomology,
                           elementary_divisors, induced_map_on_cohomology,
                           intersection_of_kernels, kernel_basis, kernel_cokernel, mobius,
                           parse_ring, rank, smith_normal_form, solve, solve_mod)

small_ints = st.integers(min_value=-9, max_value=9)


@st.composite
def int_matrices(draw, max_dim=5):
    m = draw(st.integers(1, max_dim))
    n = draw(st.integers(1, max_dim))
    return [draw(st.lists(small_ints, min_size=n, max_size=n)) for _ in range(m)]


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
            for i in range(len(A))]


def _sympy_divisors(M):
    S = sympy_snf(Matrix(M), domain=SZZ)
    return sorted(abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0)


@settings(max_examples=200, deadline=None)
@given(int_matrices())
def test_snf_against_sympy(M):
    S, U, V = smith_normal_form(M)
    assert _matmul(_matmul(U, M), V) == S
    diag = [S[i][i] for i in range(min(len(S), len(S[0])))]
    assert all(S[i][j] == 0 for i in range(len(S)) for j in range(len(S[0])) if i != j)
    nz = [abs(d) for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert sorted(nz) == _sympy_divisors(M)
    assert sorted(elementary_divisors(SparseMatrix.from_dense(M))) == _sympy_divisors(M)


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_rank_and_kernel(M):
    n = len(M[0])
    assert rank(SparseMatrix.from_dense(M), QQ) == Matrix(M).rank()
    K = kernel_basis(M, ZZ, n)
    nk = len(K[0]) if K else 0
    assert nk == n - Matrix(M).rank()
    cols = [[K[i][j] for i in range(n)] for j in range(nk)]
    for v in cols:
        assert all(sum(r[i] * v[i] for i in range(n)) == 0 for r in M)


@settings(max_examples=100, deadline=None)
@given(int_matrices(max_dim=7))
def test_kernel_saturated_and_mod_p(M):
    from sympy import GF as SymGF
    from sympy.polys.matrices import DomainMatrix
    n = len(M[0])
    K = kernel_basis(SparseMatrix.from_dense(M), ZZ, n)
    nk = len(K[0]) if K else 0
    if nk:
        assert elementary_divisors(K) == [1] * nk
    dm = DomainMatrix([[SymGF(3)(x) for x in r] for r in M], (len(M), n), SymGF(3))
    K3 = kernel_basis(M, GF(3), n)
    nk3 = len(K3[0]) if K3 else 0
    assert nk3 == n - dm.rank()
    for j in range(nk3):
        assert all(sum(r[i] * K3[i][j] for i in range(n)) % 3 == 0 for r in M)


@settings(max_examples=100, deadline=None)
@given(int_matrices(), st.lists(small_ints, min_size=5, max_size=5))
def test_solve_roundtrip(M, x):
    n = len(M[0])
    x = x[:n]
    b = [sum(r[i] * x[i] for i in range(n)) for r in M]
    y = solve(M, b)
    assert [sum(r[i] * y[i] for i in range(n)) for r in M] == b
    z = solve_mod(M, b, 5)
    assert [sum(r[i] * z[i] for i in range(n)) % 5 for r in M] == [v % 5 for v in b]


def test_snf_examples():
    S, _, _ = smith_normal_form([[2, 4], [6, 8]])
    assert [abs(S[0][0]), abs(S[1][1])] == [2, 4]
    assert smith_normal_form([[1, 0], [0, 1]])[0] == [[1, 0], [0, 1]]
    assert smith_normal_form([[0, 0], [0, 0]])[0] == [[0, 0], [0, 0]]


def test_solve_no_solution():
    with pytest.raises(NoSolution):
        solve([[2]], [1])


def test_cohomology_examples():
    free = ChainComplex([0, 2, 0], [SparseMatrix.zero(2, 0), SparseMatrix.zero(0, 2)], lo=-1)
    assert cohomology(free, 0) == AbGroup(2)
    doubling = ChainComplex([1, 1], [SparseMatrix.from_dense([[2]])])
    assert cohomology(doubling, 1) == AbGroup(0, (2,))
    assert cohomology(doubling, 0) == AbGroup()
    circle = ChainComplex([1, 1], [SparseMatrix.from_dense([[0]])])
    assert cohomology(circle, 1, GF(2)) == AbGroup(0, (2,))
    assert cohomology(doubling, 1, QQ).is_zero


def test_induced_map_kernels():
    circle = ChainComplex([1, 1], [SparseMatrix.from_dense([[0]])])
    _, ker = induced_map_on_cohomology(circle, 1, 2)
    assert ker == AbGroup(1)
    zero = ChainComplex([1, 1], [SparseMatrix.from_dense([[1]])])
    assert induced_map_on_cohomology(zero, 1, 2)[1].is_zero
    # Z --2--> Z has H^1 = Z/2, which maps isomorphically to H^1(; F_2)
    moore = ChainComplex([1, 1], [SparseMatrix.from_dense([[2]])])
    assert induced_map_on_cohomology(moore, 1, 2)[1].is_zero


def test_kernel_cokernel_examples():
    z2, z1 = AbGroup(2), AbGroup(1)
    assert kernel_cokernel(AbMap(z2, z1, [[1, 1]]))[0] == z1
    assert kernel_cokernel(AbMap(z1, z1, [[3]]))[1] == AbGroup(0, (3,))
    assert intersection_of_kernels([AbMap(z2, z1, [[1, 0]]), AbMap(z2, z1, [[0, 1]])]).is_zero


def test_abgroup_canonical_form():
    assert AbGroup(0, (2, 3)) == AbGroup(0, (6,))
    assert AbGroup(0, (2,)) + AbGroup(0, (2,)) == AbGroup(0, (2, 2))
    assert str(AbGroup(1, (2,))) == "Z + (Z/2)"
    assert AbGroup.from_json(AbGroup(2, (4,)).to_json()) == AbGroup(2, (4,))
    assert AbGroup.over(GF(3), 2) == AbGroup(0, (3, 3))


def test_parse_ring():
    assert parse_ring("Z") == ZZ and parse_ring("Q") == QQ and parse_ring("F3") == GF(3)


def test_mobius_chain_and_boolean():
    mu = mobius([0, 1, 2], lambda a, b: a <= b)
    assert mu[0, 1] == -1 and mu[0, 2] == 0
    subsets = [frozenset(s) for s in ([], [1], [2], [1, 2])]
    mu = mobius(subsets, lambda a, b: a <= b)
    assert mu[subsets[0], subsets[3]] == 1


def test_differential_square_check():
    bad = ChainComplex([1, 1, 1], [SparseMatrix.from_dense([[1]]), SparseMatrix.from_dense([[1]])])
    with pytest.raises(NotAComplex):
        bad.check()
