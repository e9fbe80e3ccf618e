"""Exact linear algebra over GF(2) and homology of bigraded complexes.

Matrices keep one Python int per row (bit ``j`` is column ``j``) while the
column count is at most ``DENSE_LIMIT``; wider matrices keep frozensets of
column positions.  Elimination goes through the compiled kernel when it is
importable, otherwise through the pure-Python one.  Set ``DKH_PURE_PYTHON=1``
to force the fallback.
"""
from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import _gf2_py

if os.environ.get("DKH_PURE_PYTHON"):
    _kernel = _gf2_py
else:
    try:
        from . import _gf2 as _kernel
    except ImportError:  # extension not built
        _kernel = _gf2_py

__all__ = [
    "DENSE_LIMIT",
    "F2Matrix",
    "BigradedComplex",
    "ComplexError",
    "rank",
    "solve",
    "solve_sparse",
    "nullspace",
    "homology",
    "graded_euler_characteristic",
    "kernel_backend",
    "bits",
    "Laurent",
]

DENSE_LIMIT = 1 << 16


class ComplexError(ValueError):
    pass


def kernel_backend() -> str:
    return _kernel.BACKEND


def bits(x: int):
    """Yield the set bit positions of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _popcount(x: int) -> int:
    return bin(x).count("1")


class F2Matrix:
    """A ``nrows x ncols`` matrix over GF(2)."""

    __slots__ = ("nrows", "ncols", "_rows", "_sparse")

    def __init__(self, nrows: int, ncols: int, rows=None):
        self.nrows = nrows
        self.ncols = ncols
        self._sparse = ncols > DENSE_LIMIT
        if rows is None:
            self._rows = [frozenset() if self._sparse else 0] * nrows
            return
        rows = list(rows)
        if len(rows) != nrows:
            raise ValueError(f"expected {nrows} rows, got {len(rows)}")
        if self._sparse:
            self._rows = [r if isinstance(r, frozenset) else frozenset(bits(r) if isinstance(r, int) else r)
                          for r in rows]
            for r in self._rows:
                if r and (min(r) < 0 or max(r) >= ncols):
                    raise ValueError("entry outside matrix")
        else:
            out = []
            for r in rows:
                if not isinstance(r, int):
                    v = 0
                    for c in r:
                        v ^= 1 << c
                    r = v
                if r >> ncols:
                    raise ValueError("entry outside matrix")
                out.append(r)
            self._rows = out

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, nrows, ncols):
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n):
        return cls(n, n, [1 << i for i in range(n)] if n <= DENSE_LIMIT else [frozenset((i,)) for i in range(n)])

    @classmethod
    def from_entries(cls, nrows, ncols, entries: Iterable[tuple[int, int]]):
        acc = defaultdict(int)
        for r, c in entries:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise ValueError(f"entry {(r, c)} outside {nrows}x{ncols}")
            acc[r] ^= 1 << c
        return cls(nrows, ncols, [acc.get(i, 0) for i in range(nrows)])

    @classmethod
    def from_dense(cls, table: Sequence[Sequence[int]], ncols=None):
        nrows = len(table)
        if ncols is None:
            ncols = len(table[0]) if nrows else 0
        rows = []
        for row in table:
            v = 0
            for j, a in enumerate(row):
                if a & 1:
                    v |= 1 << j
            rows.append(v)
        return cls(nrows, ncols, rows)

    # access ---------------------------------------------------------------
    def row(self, i) -> int:
        """Row ``i`` as an int bitset."""
        r = self._rows[i]
        if self._sparse:
            v = 0
            for c in r:
                v |= 1 << c
            return v
        return r

    def row_support(self, i):
        r = self._rows[i]
        return sorted(r) if self._sparse else list(bits(r))

    def int_rows(self) -> list[int]:
        return [self.row(i) for i in range(self.nrows)]

    @property
    def entries(self) -> frozenset:
        return frozenset((i, c) for i in range(self.nrows) for c in self.row_support(i))

    def __getitem__(self, ij):
        i, j = ij
        r = self._rows[i]
        return int(j in r) if self._sparse else (r >> j) & 1

    def to_dense(self):
        return [[self[i, j] for j in range(self.ncols)] for i in range(self.nrows)]

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def nnz(self):
        if self._sparse:
            return sum(len(r) for r in self._rows)
        return sum(_popcount(r) for r in self._rows)

    def is_zero(self):
        return not any(self._rows)

    def __eq__(self, other):
        if not isinstance(other, F2Matrix):
            return NotImplemented
        return self.shape == other.shape and self.int_rows() == other.int_rows()

    def __hash__(self):
        return hash((self.shape, tuple(self.int_rows())))

    def __repr__(self):
        return f"F2Matrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"

    # algebra -------------------------------------------------------------
    def _check_same(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same(other)
        if self._sparse:
            return F2Matrix(self.nrows, self.ncols, [a ^ b for a, b in zip(self._rows, other._rows)])
        return F2Matrix(self.nrows, self.ncols, [a ^ b for a, b in zip(self._rows, other._rows)])

    __sub__ = __add__

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot compose {self.shape} @ {other.shape}")
        orows = other.int_rows() if other._sparse else other._rows
        out = []
        for i in range(self.nrows):
            acc = 0
            for k in self.row_support(i) if self._sparse else bits(self._rows[i]):
                acc ^= orows[k]
            out.append(acc)
        return F2Matrix(self.nrows, other.ncols, out)

    def transpose(self) -> "F2Matrix":
        cols = [0] * self.ncols
        for i in range(self.nrows):
            b = 1 << i
            for c in self.row_support(i):
                cols[c] |= b
        return F2Matrix(self.ncols, self.nrows, cols)

    T = property(transpose)

    def apply(self, v: int) -> int:
        """Image of the column vector with support ``v`` (an int bitset)."""
        out = 0
        for i in range(self.nrows):
            r = self.row(i)
            if _popcount(r & v) & 1:
                out |= 1 << i
        return out

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "F2Matrix":
        pos = {c: j for j, c in enumerate(col_idx)}
        out = []
        for i in row_idx:
            v = 0
            for c in self.row_support(i):
                j = pos.get(c)
                if j is not None:
                    v |= 1 << j
            out.append(v)
        return F2Matrix(len(row_idx), len(col_idx), out)

    def first_entry(self):
        """Lowest (row, col) holding a 1, or None."""
        for i in range(self.nrows):
            s = self.row_support(i)
            if s:
                return (i, s[0])
        return None


def rank(m: F2Matrix) -> int:
    if m.nrows == 0 or m.ncols == 0:
        return 0
    if m._sparse:
        return _gf2_py.rank(m.int_rows(), m.ncols)
    return _kernel.rank(m._rows, m.ncols)


def _rank_rows(rows: list[int], ncols: int) -> int:
    rows = [r for r in rows if r]
    if not rows:
        return 0
    if ncols <= DENSE_LIMIT:
        return _kernel.rank(rows, ncols)
    return _gf2_py.rank(rows, ncols)


def solve(a: F2Matrix, b: F2Matrix) -> F2Matrix | None:
    """Some ``X`` with ``a @ X == b``, free variables set to zero, or None."""
    if a.nrows != b.nrows:
        raise ValueError(f"solve: a has {a.nrows} rows but b has {b.nrows}")
    n, k = a.ncols, b.ncols
    rows = [a.row(i) | (b.row(i) << n) for i in range(a.nrows)]
    kern = _kernel if n + k <= DENSE_LIMIT else _gf2_py
    pivots, prow, residual = kern.rref(rows, n + k, n)
    if any(residual):
        return None
    xrows = [0] * n
    for p, r in zip(pivots, prow):
        xrows[p] = r >> n
    return F2Matrix(n, k, xrows)


def solve_sparse(rows: list[int], ncols: int) -> int | None:
    """Solve a system whose equations are int rows with the RHS at bit ``ncols``.

    Returns the solution as an int bitset (free variables zero) or None when
    the system is inconsistent.  Always uses incremental elimination, which
    suits the very sparse systems built by the homotopy solver.
    """
    pivots, prow, residual = _gf2_py.rref(rows, ncols + 1, ncols)
    if any(residual):
        return None
    x = 0
    for p, r in zip(pivots, prow):
        if (r >> ncols) & 1:
            x |= 1 << p
    return x


def nullspace(rows: list[int], ncols: int) -> list[int]:
    """Basis of ``{v : M v = 0}`` for the matrix with the given int rows."""
    rows = [r for r in rows if r]
    if not rows:
        return [1 << j for j in range(ncols)]
    kern = _kernel if ncols <= DENSE_LIMIT else _gf2_py
    pivots, prow, _ = kern.rref(rows, ncols)
    pset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pset:
            continue
        v = 1 << f
        fb = 1 << f
        for p, r in zip(pivots, prow):
            if r & fb:
                v |= 1 << p
        basis.append(v)
    return basis


# --------------------------------------------------------------------------
# Laurent polynomials in q, as {exponent: coefficient}


class Laurent(dict):
    """Integer Laurent polynomial in q; zero coefficients are dropped."""

    @classmethod
    def monomial(cls, e, c=1):
        return cls({e: c}) if c else cls()

    def _clean(self):
        for k in [k for k, v in self.items() if v == 0]:
            del self[k]
        return self

    def __add__(self, other):
        out = Laurent(self)
        for k, v in other.items():
            out[k] = out.get(k, 0) + v
        return out._clean()

    def __neg__(self):
        return Laurent({k: -v for k, v in self.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return Laurent({k: v * other for k, v in self.items()})._clean()
        out = Laurent()
        for a, x in self.items():
            for b, y in other.items():
                out[a + b] = out.get(a + b, 0) + x * y
        return out._clean()

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, dict):
            return dict(self._strip()) == dict(Laurent(other)._strip())
        return NotImplemented

    def _strip(self):
        return {k: v for k, v in self.items() if v}

    __hash__ = None

    def __repr__(self):
        if not self._strip():
            return "0"
        terms = []
        for e in sorted(self._strip()):
            c = self[e]
            terms.append(f"{c}*q^{e}")
        return " + ".join(terms)


# --------------------------------------------------------------------------
# bigraded complexes


@dataclass(frozen=True, eq=False)
class BigradedComplex:
    """Generators with (h, q) gradings and a differential of bidegree (1, 0).

    ``differential`` has one row per target generator.
    """

    gradings: tuple
    differential: F2Matrix
    labels: tuple | None = None

    def __post_init__(self):
        n = len(self.gradings)
        if self.differential.shape != (n, n):
            raise ComplexError(f"differential shape {self.differential.shape} for {n} generators")

    @property
    def dim(self):
        return len(self.gradings)

    def check(self):
        """Raise ComplexError unless the differential has bidegree (1,0) and squares to zero."""
        d = self.differential
        g = self.gradings
        for t in range(d.nrows):
            ht, qt = g[t]
            for s in d.row_support(t):
                hs, qs = g[s]
                if (ht - hs, qt - qs) != (1, 0):
                    raise ComplexError(f"differential entry ({t},{s}) has bidegree {(ht - hs, qt - qs)}")
        sq = d @ d
        e = sq.first_entry()
        if e is not None:
            raise ComplexError(f"differential squared is nonzero at {e}")
        return self

    def slices(self):
        """Map (h, q) -> sorted list of generator indices."""
        out = defaultdict(list)
        for i, hq in enumerate(self.gradings):
            out[tuple(hq)].append(i)
        return dict(out)


def _block_rows(d: F2Matrix, rows_idx, col_pos) -> list[int]:
    out = []
    for t in rows_idx:
        v = 0
        for c in d.row_support(t):
            j = col_pos.get(c)
            if j is not None:
                v |= 1 << j
        out.append(v)
    return out


def homology(c: BigradedComplex, check: bool = True) -> dict:
    """Dimensions of homology per (h, q), computed slice by slice."""
    if check:
        c.check()
    sl = c.slices()
    d = c.differential
    rank_out = {}
    for (h, q), idx in sl.items():
        tgt = sl.get((h + 1, q))
        if not tgt:
            rank_out[(h, q)] = 0
            continue
        pos = {g: j for j, g in enumerate(idx)}
        rank_out[(h, q)] = _rank_rows(_block_rows(d, tgt, pos), len(idx))
    out = {}
    for (h, q), idx in sorted(sl.items()):
        dimh = len(idx) - rank_out[(h, q)] - rank_out.get((h - 1, q), 0)
        if dimh:
            out[(h, q)] = dimh
    return out


def graded_euler_characteristic(c: BigradedComplex) -> Laurent:
    out = Laurent()
    for h, q in c.gradings:
        out[q] = out.get(q, 0) + (-1 if h % 2 else 1)
    return out._clean()


def euler_of_table(table: dict) -> Laurent:
    out = Laurent()
    for (h, q), n in table.items():
        out[q] = out.get(q, 0) + (-n if h % 2 else n)
    return out._clean()


# --------------------------------------------------------------------------
# homology-level data used for induced maps


@dataclass
class SliceHomology:
    """Cycles and boundaries of one (h, q) slice in local coordinates."""

    index: list
    cycles: list
    boundaries: list
    boundary_rank: int


def slice_homology(c: BigradedComplex, hq, sl=None) -> SliceHomology:
    sl = sl if sl is not None else c.slices()
    h, q = hq
    idx = sl.get(hq, [])
    pos = {g: j for j, g in enumerate(idx)}
    d = c.differential
    tgt = sl.get((h + 1, q), [])
    out_rows = _block_rows(d, tgt, pos) if tgt else []
    cycles = nullspace(out_rows, len(idx)) if idx else []
    src = sl.get((h - 1, q), [])
    bnd = []
    if src:
        # image of the incoming block: columns of d restricted to (idx x src)
        spos = {g: j for j, g in enumerate(src)}
        rows_in = _block_rows(d, idx, spos)
        # transpose to get the images of the sources as vectors over idx
        cols = [0] * len(src)
        for i, r in enumerate(rows_in):
            for j in bits(r):
                cols[j] |= 1 << i
        bnd = [v for v in cols if v]
    return SliceHomology(idx, cycles, bnd, _rank_rows(list(bnd), len(idx)))


def induced_rank(f: F2Matrix, src: BigradedComplex, tgt: BigradedComplex, src_hq, tgt_hq,
                 src_sl=None, tgt_sl=None) -> int:
    """Rank of the map induced by ``f`` from H at ``src_hq`` to H at ``tgt_hq``."""
    a = slice_homology(src, src_hq, src_sl)
    b = slice_homology(tgt, tgt_hq, tgt_sl)
    if not a.cycles or not b.index:
        return 0
    imgs = map_vectors_restricted(f, a.index, a.cycles, b.index)
    return _rank_rows(b.boundaries + imgs, len(b.index)) - b.boundary_rank


def map_vectors_restricted(f: F2Matrix, src_idx, vectors, tgt_idx) -> list[int]:
    """Like map_vectors but silently drops components outside ``tgt_idx``."""
    tpos = {g: j for j, g in enumerate(tgt_idx)}
    want = {g: j for j, g in enumerate(src_idx)}
    cols = defaultdict(int)
    for t in range(f.nrows):
        k = tpos.get(t)
        if k is None:
            continue
        for s in f.row_support(t):
            j = want.get(s)
            if j is not None:
                cols[j] |= 1 << k
    out = []
    for v in vectors:
        acc = 0
        for j in bits(v):
            acc ^= cols.get(j, 0)
        out.append(acc)
    return out
