import os
import random
import subprocess
import sys
from itertools import product

import pytest

from dkh import _gf2_py
from dkh.f2core import (DENSE_LIMIT, BigradedComplex, ComplexError, F2Matrix, Laurent, bits,
                        graded_euler_characteristic, homology, induced_rank, kernel_backend,
                        nullspace, rank, solve, solve_sparse)

try:
    from dkh import _gf2
except ImportError:
    _gf2 = None


def random_matrix(rng, r, c, density=0.4):
    return F2Matrix.from_dense([[int(rng.random() < density) for _ in range(c)] for _ in range(r)], c)


def dense_mul(a, b):
    A, B = a.to_dense(), b.to_dense()
    return [[sum(A[i][k] & B[k][j] for k in range(len(B))) % 2 for j in range(len(B[0]))]
            for i in range(len(A))]


def brute_rank(m):
    # size of the row space, found by enumerating combinations
    rows = m.int_rows()
    span = {0}
    for r in rows:
        span |= {v ^ r for v in span}
    return len(span).bit_length() - 1


def test_bits_and_identity():
    assert list(bits(0b101001)) == [0, 3, 5]
    assert list(bits(0)) == []
    i = F2Matrix.identity(5)
    assert i.to_dense() == [[int(r == c) for c in range(5)] for r in range(5)]
    assert F2Matrix.zeros(3, 4).is_zero()


def test_matrix_algebra_matches_dense():
    rng = random.Random(7)
    for _ in range(30):
        a = random_matrix(rng, 5, 6)
        b = random_matrix(rng, 6, 4)
        assert (a @ b).to_dense() == dense_mul(a, b)
        assert a.transpose().transpose() == a
        assert (a + a).is_zero()
        assert a.nnz() == sum(map(sum, a.to_dense()))


def test_from_entries_and_submatrix():
    m = F2Matrix.from_entries(3, 3, [(0, 1), (2, 2), (0, 1)])
    assert m.entries == {(2, 2)}
    s = F2Matrix.from_entries(3, 3, [(0, 0), (1, 2), (2, 1)]).submatrix([1, 2], [1, 2])
    assert s.to_dense() == [[0, 1], [1, 0]]


def test_rank_against_enumeration():
    rng = random.Random(1)
    for _ in range(60):
        m = random_matrix(rng, rng.randint(1, 7), rng.randint(1, 7))
        assert rank(m) == brute_rank(m)


def test_solve_finds_solutions_and_reports_inconsistency():
    rng = random.Random(2)
    for _ in range(40):
        a = random_matrix(rng, 6, 5)
        x = random_matrix(rng, 5, 3)
        b = a @ x
        sol = solve(a, b)
        assert sol is not None and a @ sol == b
    a = F2Matrix.from_dense([[1, 1], [1, 1]])
    b = F2Matrix.from_dense([[1], [0]])
    assert solve(a, b) is None
    with pytest.raises(ValueError):
        solve(a, F2Matrix.zeros(3, 1))


def test_solve_sparse():
    # x0 + x1 = 1, x1 = 1
    assert solve_sparse([0b111, 0b110], 2) == 0b10
    assert solve_sparse([0b001, 0b101], 2) is None


def test_nullspace_is_exact_kernel():
    rng = random.Random(3)
    for _ in range(40):
        nc = rng.randint(1, 7)
        m = random_matrix(rng, rng.randint(1, 6), nc)
        rows = m.int_rows()
        basis = nullspace(rows, nc)
        assert len(basis) == nc - rank(m)
        for v in basis:
            assert m.apply(v) == 0
        kernel = [v for v in range(1 << nc) if m.apply(v) == 0]
        span = {0}
        for v in basis:
            span |= {w ^ v for w in span}
        assert span == set(kernel)


def test_wide_matrices_use_sparse_rows():
    n = DENSE_LIMIT + 10
    m = F2Matrix.from_entries(3, n, [(0, 0), (0, n - 1), (1, n - 1), (2, 0)])
    assert rank(m) == 2
    assert m.transpose().shape == (n, 3)


@pytest.mark.skipif(_gf2 is None, reason="compiled kernel not built")
@pytest.mark.parametrize("seed", range(8))
def test_compiled_kernel_matches_python(seed):
    rng = random.Random(seed)
    for ncols in (1, 5, 63, 64, 65, 130, 300):
        rows = [rng.getrandbits(ncols) & rng.getrandbits(ncols) for _ in range(rng.randint(1, 90))]
        assert _gf2.rank(rows, ncols) == _gf2_py.rank(rows, ncols)
        assert _gf2.rref(rows, ncols) == _gf2_py.rref(rows, ncols)
        limit = rng.randint(0, ncols)
        pa, ra, res_a = _gf2.rref(rows, ncols, limit)
        pb, rb, res_b = _gf2_py.rref(rows, ncols, limit)
        assert pa == pb
        # below the limit the reduced form is unique; above it rows agree up to the residual span
        mask = (1 << limit) - 1
        assert [r & mask for r in ra] == [r & mask for r in rb]
        k = _gf2_py.rank(res_a, ncols)
        assert k == _gf2_py.rank(res_b, ncols) == _gf2_py.rank(res_a + res_b, ncols)
        assert _gf2_py.rank(res_a + [x ^ y for x, y in zip(ra, rb)], ncols) == k


def test_backend_selection_respects_env():
    env = dict(os.environ, DKH_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import dkh; print(dkh.kernel_backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert kernel_backend() in ("compiled", "python")


def koszul():
    # F --x--> F in degrees (0, 0) -> (1, 0), plus a lone class in (0, 2)
    return BigradedComplex(((0, 0), (1, 0), (0, 2)), F2Matrix.from_entries(3, 3, [(1, 0)]))


def test_homology_and_euler():
    c = koszul()
    assert homology(c) == {(0, 2): 1}
    assert graded_euler_characteristic(c) == Laurent({2: 1})
    assert homology(BigradedComplex(((0, 0), (1, 0)), F2Matrix.zeros(2, 2))) == {(0, 0): 1, (1, 0): 1}


def test_check_rejects_bad_complexes():
    bad_degree = BigradedComplex(((0, 0), (1, 2)), F2Matrix.from_entries(2, 2, [(1, 0)]))
    with pytest.raises(ComplexError):
        bad_degree.check()
    # a -> b -> c with both arrows nonzero squares to a nonzero map
    bad_square = BigradedComplex(((0, 0), (1, 0), (2, 0)), F2Matrix.from_entries(3, 3, [(1, 0), (2, 1)]))
    with pytest.raises(ComplexError):
        homology(bad_square)
    with pytest.raises(ComplexError):
        BigradedComplex(((0, 0),), F2Matrix.zeros(2, 2))


def test_induced_rank_identity_and_zero():
    gr = ((0, 0), (0, 0), (1, 0))
    c = BigradedComplex(gr, F2Matrix.from_entries(3, 3, [(2, 0)]))
    assert induced_rank(F2Matrix.identity(3), c, c, (0, 0), (0, 0)) == 1
    assert induced_rank(F2Matrix.zeros(3, 3), c, c, (0, 0), (0, 0)) == 0


def test_laurent_arithmetic():
    q = Laurent({1: 1})
    loop = Laurent({1: 1, -1: 1})
    assert loop * loop == Laurent({2: 1, 0: 2, -2: 1})
    assert (loop - q) == Laurent({-1: 1})
    assert Laurent.monomial(3, 0) == Laurent()


def test_dense_roundtrip_all_2x2():
    for vals in product((0, 1), repeat=4):
        t = [list(vals[:2]), list(vals[2:])]
        assert F2Matrix.from_dense(t).to_dense() == t
