"""Derived invariants of resolved complexes.

Collapsing a resolution against a test module M replaces the free factor
R_X by M, giving an honest finite GF(2) complex

    C ⊗ M ⊗ Ξ,   ∂ = ∂_C ⊗ 1 ⊗ 1 + Σ_x (ρ(x) ⊗ 1 + 1 ⊗ μ(x)) ⊗ ξ_x

whose homology on the validity window computes Tor against M.  The module
also holds the homotopy solver: ∂h + h∂ = f + g is a finite GF(2) system,
so a missing solution is a proof that no homotopy exists.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import product

from .cube import ChainMap, CubeComplex, build_cube
from .diagram import PointedDiagram
from .f2core import (BigradedComplex, ComplexError, F2Matrix, bits, homology, induced_rank,
                     nullspace, solve_sparse)
from .movie import MovieScript, run
from .resolution import (ResolvedComplex, ValidityWindow, common_window, resolve,
                         resolved_run, validity_window)

__all__ = [
    "TestModule",
    "TRIVIAL",
    "FX2",
    "RX",
    "collapse",
    "collapse_map",
    "rank_table",
    "table_records",
    "InducedMap",
    "induced_map",
    "maps_agree",
    "hkh",
    "hkh_map",
    "HomotopyCertificate",
    "homotopy_solver",
    "chain_map_space",
    "quasi_isomorphism",
    "all_combinations",
    "MatrixSystem",
    "graded_entries",
]


@dataclass(frozen=True)
class TestModule:
    """A test module for Tor: trivial F, F[X]/X^2 or R_X itself."""

    __test__ = False  # not a pytest class
    kind: str

    def __post_init__(self):
        if self.kind not in ("trivial", "fx2", "rx"):
            raise ValueError(f"unknown test module {self.kind!r}")

    def structure(self, ncolors):
        """(q shifts of the basis, list of mu(x) matrices)."""
        if self.kind == "trivial":
            return (0,), [F2Matrix.zeros(1, 1) for _ in range(ncolors)]
        if self.kind == "fx2":
            x = F2Matrix(2, 2, [0, 1])  # 1 -> X
            return (0, -2), [x] * ncolors
        n = 1 << ncolors
        qs = tuple(-2 * bin(r).count("1") for r in range(n))
        mus = []
        for k in range(ncolors):
            rows = [0] * n
            for r in range(n):
                if not (r >> k) & 1:
                    rows[r | (1 << k)] |= 1 << r
            mus.append(F2Matrix(n, n, rows))
        return qs, mus

    def __str__(self):
        return {"trivial": "F", "fx2": "F[X]/X^2", "rx": "R_X"}[self.kind]


TRIVIAL = TestModule("trivial")
FX2 = TestModule("fx2")
RX = TestModule("rx")


def _module(m):
    return m if isinstance(m, TestModule) else TestModule(m)


def _rho(rc: ResolvedComplex):
    c = rc.base
    out = []
    for x in rc.colors:
        out.append(c.action_matrix(x) if x in c.colors else F2Matrix.zeros(c.dim, c.dim))
    return out


@dataclass(eq=False)
class Collapsed:
    """A collapsed resolution; ``complex.labels`` holds each generator's xi-weight."""

    source: ResolvedComplex
    module: TestModule
    complex: BigradedComplex
    window: ValidityWindow

    @property
    def dim(self):
        return self.complex.dim

    @property
    def gradings(self):
        return self.complex.gradings

    @property
    def differential(self):
        return self.complex.differential


def collapse(rc: ResolvedComplex, m=TRIVIAL) -> Collapsed:
    m = _module(m)
    qs, mus = m.structure(len(rc.colors))
    dm, n, nx = len(qs), rc.base.dim, len(rc.xis)
    rho = _rho(rc)
    dc = rc.base.differential
    total = n * dm * nx
    rows = [0] * total
    grads, weights = [], []
    for xi_i, xi in enumerate(rc.xis):
        wh, wq = xi.bidegree
        for b in range(dm):
            blk = (xi_i * dm + b) * n
            for cg in range(n):
                h, q = rc.base.gradings[cg]
                grads.append((h + wh, q + qs[b] + wq))
                weights.append(xi.weight)
            for t in range(n):
                row = dc.row(t)
                if row:
                    rows[blk + t] ^= row << blk
            for k in range(len(rc.colors)):
                nxt = xi.times_xi(k)
                if nxt is None:
                    continue
                base = rc.xi_index[nxt] * dm
                tblk = (base + b) * n
                for t in range(n):
                    row = rho[k].row(t)
                    if row:
                        rows[tblk + t] ^= row << blk
                for b2 in range(dm):
                    if mus[k].row(b2) >> b & 1:
                        tblk2 = (base + b2) * n
                        for cg in range(n):
                            rows[tblk2 + cg] ^= 1 << (blk + cg)
    comp = BigradedComplex(tuple(grads), F2Matrix(total, total, rows), tuple(weights))
    window = validity_window(rc)
    if _split_by_weight(comp):
        # each weight block is a direct summand, present in full up to the depth
        window = ValidityWindow(None, rc.depth)
    return Collapsed(rc, m, comp, window)


def _check_linear(f: ChainMap):
    a, b = f.source, f.target
    for x in a.colors:
        lhs = f.matrix @ a.action(x).matrix
        rhs = b.action(x).matrix @ f.matrix
        if lhs != rhs:
            raise ComplexError(f"map is not R_X-linear (color {x}, entry {(lhs + rhs).first_entry()})")


def collapse_map(f: ChainMap, m=TRIVIAL, src: Collapsed = None, tgt: Collapsed = None) -> ChainMap:
    """f ⊗_{R_X} M for an R_X-linear map between resolutions."""
    m = _module(m)
    a, b = f.source, f.target
    if a.colors != b.colors:
        raise ComplexError("resolutions have different colors")
    _check_linear(f)
    src = src or collapse(a, m)
    tgt = tgt or collapse(b, m)
    qs, mus = m.structure(len(a.colors))
    dm = len(qs)
    # mu(r) column by column: mu_cols[r][b] = basis elements of mu(r) b
    mu_cols = []
    for r in range(a.nr):
        mat = F2Matrix.identity(dm)
        for k in bits(r):
            mat = mus[k] @ mat
        mt = mat.transpose()
        mu_cols.append([mt.row_support(bb) for bb in range(dm)])
    ft = f.matrix.transpose()
    na, nb = a.base.dim, b.base.dim
    rows = [0] * tgt.dim
    for xi_i, xi in enumerate(a.xis):
        for c in range(na):
            s = a.index(c, 0, xi)
            for t in ft.row_support(s):
                c2, r2, xi2 = b.split(t)
                x2 = b.xi_index[xi2]
                for bb in range(dm):
                    src_bit = 1 << ((xi_i * dm + bb) * na + c)
                    for b2 in mu_cols[r2][bb]:
                        rows[(x2 * dm + b2) * nb + c2] ^= src_bit
    return ChainMap(src, tgt, f.bidegree, F2Matrix(tgt.dim, src.dim, rows)).verify()


def _split_by_weight(c: BigradedComplex):
    """True when the differential preserves the weight labels."""
    if c.labels is None:
        return False
    d = c.differential
    for t in range(d.nrows):
        for s in d.row_support(t):
            if c.labels[s] != c.labels[t]:
                return False
    return True


def rank_table(col: Collapsed, window=None) -> dict:
    """{(h, q, weight): dim} on the window; weight is None if the complex mixes weights."""
    window = window or col.window
    c = col.complex
    out = {}
    if _split_by_weight(c):
        for w in sorted(set(c.labels)):
            idx = [i for i, lw in enumerate(c.labels) if lw == w]
            pos = {g: j for j, g in enumerate(idx)}
            sub = F2Matrix(len(idx), len(idx),
                           [sum(1 << pos[s] for s in c.differential.row_support(t)) for t in idx])
            hom = homology(BigradedComplex(tuple(c.gradings[i] for i in idx), sub), check=False)
            for (h, q), n in hom.items():
                if window.contains(h):
                    out[(h, q, w)] = n
    else:
        for (h, q), n in homology(c).items():
            if window.contains(h):
                out[(h, q, None)] = n
    return dict(sorted(out.items(), key=lambda kv: (kv[0][2] if kv[0][2] is not None else -1,) + kv[0][:2]))


def table_records(table: dict) -> list:
    return [{"bidegree": [h, q], "xi_weight": w, "dim": n} for (h, q, w), n in table.items()]


@dataclass
class InducedMap:
    bidegree: tuple
    window: ValidityWindow
    source_table: dict  # (h, q) -> dim
    target_table: dict
    ranks: dict  # source (h, q) -> rank of the induced map

    @property
    def total_rank(self):
        return sum(self.ranks.values())

    def is_zero(self):
        return self.total_rank == 0

    def is_isomorphism(self):
        dh, dq = self.bidegree
        for (h, q), n in self.source_table.items():
            if self.ranks.get((h, q), 0) != n:
                return False
        for (h, q), n in self.target_table.items():
            if self.window.contains(h - dh) and self.ranks.get((h - dh, q - dq), 0) != n:
                return False
        return True


def _induced(fm: ChainMap, src: Collapsed, tgt: Collapsed, window) -> InducedMap:
    dh, dq = fm.bidegree
    s_sl, t_sl = src.complex.slices(), tgt.complex.slices()
    s_tab = {k: n for k, n in homology(src.complex).items() if window.contains(k[0])}
    t_tab = {k: n for k, n in homology(tgt.complex).items() if window.contains(k[0])}
    ranks = {}
    for (h, q) in s_tab:
        if not window.contains(h + dh):
            continue
        ranks[(h, q)] = induced_rank(fm.matrix, src.complex, tgt.complex, (h, q), (h + dh, q + dq),
                                     s_sl, t_sl)
    return InducedMap(fm.bidegree, window, s_tab, t_tab, ranks)


def induced_map(f: ChainMap, m=TRIVIAL) -> InducedMap:
    """Ranks of the map induced on collapsed homology, per source bidegree on the window."""
    src, tgt = collapse(f.source, m), collapse(f.target, m)
    fm = collapse_map(f, m, src, tgt)
    return _induced(fm, src, tgt, common_window(src.window, tgt.window))


def maps_agree(f: ChainMap, g: ChainMap, m=TRIVIAL) -> bool:
    """True when f and g induce the same map on collapsed homology on the window."""
    if f.bidegree != g.bidegree:
        raise ComplexError("maps have different bidegrees")
    return induced_map(f + g, m).is_zero()


# --------------------------------------------------------------------------
# HKh


def _unpointed(d: PointedDiagram):
    if d.basepoints:
        raise ComplexError("HKh is defined for diagrams without basepoints")


def hkh(d: PointedDiagram, depth=4, color="x") -> dict:
    """{(h, q, weight): dim} of the trivial collapse of the one-color resolution."""
    _unpointed(d)
    rc = resolve(build_cube(d), depth, (color,))
    return rank_table(collapse(rc, TRIVIAL))


def hkh_map(s: MovieScript, depth=4, color="x", plain_run=None) -> InducedMap:
    r = plain_run or run(s)
    _unpointed(r.diagrams[0])
    _unpointed(r.diagrams[-1])
    rr = resolved_run(s, depth, (color,), r)
    return induced_map(rr.total, TRIVIAL)


# --------------------------------------------------------------------------
# homotopy solver


@dataclass
class HomotopyCertificate:
    """∂h + h∂ = f + g, exactly, on sources of weight <= max_weight (all if None)."""

    f: ChainMap
    g: ChainMap
    h: F2Matrix
    linear: bool
    max_weight: int | None = None
    unknowns: int = 0
    equations: int = 0
    blocks: int = 0

    def check(self):
        a, b = self.f.source, self.f.target
        lhs = b.differential @ self.h + self.h @ a.differential
        diff = lhs + self.f.matrix + self.g.matrix
        for t in range(diff.nrows):
            for s in diff.row_support(t):
                if self.max_weight is None or _weight(a, s) <= self.max_weight:
                    raise ComplexError(f"homotopy equation fails at {(t, s)}")
        if self.linear:
            for x in a.colors:
                if self.h @ a.action(x).matrix != b.action(x).matrix @ self.h:
                    raise ComplexError(f"homotopy does not commute with color {x}")
        return True

    def summary(self):
        return {"unknowns": self.unknowns, "equations": self.equations, "blocks": self.blocks,
                "nnz": self.h.nnz(), "linear": self.linear, "max_weight": self.max_weight}


def _weight(cx, g):
    return cx.weight(g) if isinstance(cx, ResolvedComplex) else 0


class _Frame:
    """Basis sources and the R_X action, or the plain frame."""

    def __init__(self, cx, linear):
        self.cx = cx
        self.linear = linear
        if linear:
            self.basis = [g for g in range(cx.dim) if cx.split(g)[1] == 0]
        else:
            self.basis = list(range(cx.dim))

    def decompose(self, g):
        if not self.linear:
            return g, 0
        c, r, xi = self.cx.split(g)
        return self.cx.index(c, 0, xi), r

    def act(self, r, g):
        if not r:
            return g
        return self.cx.act_monomial(r, g)


class _UnionFind:
    def __init__(self):
        self.p = {}

    def find(self, a):
        p = self.p
        p.setdefault(a, a)
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[max(ra, rb)] = min(ra, rb)


def homotopy_solver(f: ChainMap, g: ChainMap, constraint="plain", max_weight=None):
    """Find h with ∂h + h∂ = f + g, or None when none exists.

    ``constraint="rx"`` restricts to R_X-linear h (sources must be
    resolutions).  ``max_weight`` imposes the equation only on sources of
    xi-weight at most that value; None means the whole truncation.
    """
    if f.source is not g.source or f.target is not g.target:
        if f.source.dim != g.source.dim or f.target.dim != g.target.dim:
            raise ComplexError("maps have different source or target")
    if f.bidegree != g.bidegree:
        raise ComplexError("maps have different bidegrees")
    linear = constraint in ("rx", "R_X", "linear")
    if constraint not in ("plain", "rx", "R_X", "linear"):
        raise ValueError(f"unknown constraint {constraint!r}")
    a, b = f.source, f.target
    if linear and not (isinstance(a, ResolvedComplex) and isinstance(b, ResolvedComplex)):
        raise ComplexError("R_X-linear solving needs resolved complexes")
    fa, fb = _Frame(a, linear), _Frame(b, linear)
    dh, dq = f.bidegree
    hh, hq = dh - 1, dq
    tsl = defaultdict(list)
    for t, gr in enumerate(b.gradings):
        tsl[gr].append(t)
    da_t = a.differential.transpose()
    db_t = b.differential.transpose()
    rhs_t = (f.matrix + g.matrix).transpose()

    # couple basis sources that see each other through ∂_A
    uf = _UnionFind()
    for s in fa.basis:
        uf.find(s)
        for v in da_t.row_support(s):
            uf.union(s, fa.decompose(v)[0])
    comps = defaultdict(list)
    for s in fa.basis:
        comps[uf.find(s)].append(s)

    h_rows = defaultdict(int)
    stats = [0, 0, 0]
    for root in sorted(comps):
        srcs = comps[root]
        var = {}
        for s in srcs:
            hs, qs = a.gradings[s]
            for t in tsl.get((hs + hh, qs + hq), ()):
                var[(t, s)] = len(var)
        nv = len(var)
        eqs = defaultdict(int)
        for (u, s), j in var.items():
            for t in db_t.row_support(u):
                eqs[(t, s)] ^= 1 << j
        for s in srcs:
            for v in da_t.row_support(s):
                v0, r = fa.decompose(v)
                hs, qs = a.gradings[v0]
                for t0 in tsl.get((hs + hh, qs + hq), ()):
                    t = fb.act(r, t0)
                    if t is not None:
                        eqs[(t, s)] ^= 1 << var[(t0, v0)]
            for t in rhs_t.row_support(s):
                eqs[(t, s)] ^= 1 << nv
        rows = [r for (t, s), r in eqs.items()
                if r and (max_weight is None or _weight(a, s) <= max_weight)]
        stats[0] += nv
        stats[1] += len(rows)
        stats[2] += 1
        if not rows:
            continue
        if not nv:
            return None
        x = solve_sparse(rows, nv)
        if x is None:
            return None
        inv = {j: k for k, j in var.items()}
        for j in bits(x):
            t, s = inv[j]
            h_rows[t] |= 1 << s
    # extend from basis sources by R_X-linearity
    if linear:
        nr = a.nr
        for t0, row in list(h_rows.items()):
            for s0 in bits(row):
                for r in range(1, nr):
                    s = fa.act(r, s0)
                    t = fb.act(r, t0)
                    if s is not None and t is not None:
                        h_rows[t] |= 1 << s
    h = F2Matrix(b.dim, a.dim, [h_rows.get(t, 0) for t in range(b.dim)])
    cert = HomotopyCertificate(f, g, h, linear, max_weight, *stats)
    cert.check()
    return cert


# --------------------------------------------------------------------------
# spaces of chain maps between small complexes


def chain_map_space(a, b, bidegree, actions=()):
    """Basis of all chain maps a -> b of the given bidegree.

    ``actions`` lists pairs (rho_a, rho_b) of matrices the maps must
    intertwine.  Returns a list of F2Matrix.
    """
    dh, dq = bidegree
    var = {}
    for s, (h, q) in enumerate(a.gradings):
        for t, gr in enumerate(b.gradings):
            if gr == (h + dh, q + dq):
                var[(t, s)] = len(var)
    eqs = defaultdict(int)
    da, db = a.differential, b.differential
    db_t = db.transpose()
    for (u, s), j in var.items():
        # (∂_b F)[t, s] = Σ_u ∂_b[t, u] F[u, s]
        for t in db_t.row_support(u):
            eqs[("d", t, s)] ^= 1 << j
        # (F ∂_a)[u, s'] = Σ_s F[u, s] ∂_a[s, s']
        for s2 in da.row_support(s):
            eqs[("d", u, s2)] ^= 1 << j
    for k, (ra, rb) in enumerate(actions):
        rb_t = rb.transpose()
        for (u, s), j in var.items():
            for t in rb_t.row_support(u):
                eqs[("a", k, t, s)] ^= 1 << j
            for s2 in ra.row_support(s):
                eqs[("a", k, u, s2)] ^= 1 << j
    basis = nullspace([r for r in eqs.values() if r], len(var))
    inv = {j: key for key, j in var.items()}
    out = []
    for v in basis:
        rows = [0] * b.dim
        for j in bits(v):
            t, s = inv[j]
            rows[t] |= 1 << s
        out.append(F2Matrix(b.dim, a.dim, rows))
    return out


def quasi_isomorphism(f: F2Matrix, a, b, bidegree=(0, 0)) -> bool:
    """Does f induce an isomorphism on homology (all bidegrees)?"""
    dh, dq = bidegree
    ha = homology(a.base if isinstance(a, CubeComplex) else a)
    hb = homology(b.base if isinstance(b, CubeComplex) else b)
    if sorted(((h + dh, q + dq), n) for (h, q), n in ha.items()) != sorted(hb.items()):
        return False
    ca = a.base if isinstance(a, CubeComplex) else a
    cb = b.base if isinstance(b, CubeComplex) else b
    for (h, q), n in ha.items():
        if induced_rank(f, ca, cb, (h, q), (h + dh, q + dq)) != n:
            return False
    return True


def all_combinations(basis, shape):
    """Every element of the span of ``basis`` (2^len of them)."""
    rows, cols = shape
    for coeffs in product((0, 1), repeat=len(basis)):
        m = F2Matrix.zeros(rows, cols)
        for c, v in zip(coeffs, basis):
            if c:
                m = m + v
        yield m


# --------------------------------------------------------------------------
# linear systems in unknown matrices


class MatrixSystem:
    """Linear equations Σ L·U·R = C in unknown GF(2) matrices U.

    Unknown blocks are declared with the (row, col) entries they may use;
    each equation is a list of terms (L, name, R) with L or R None for the
    identity, plus a constant matrix.  ``source_filter`` limits which columns
    of an equation are imposed.
    """

    def __init__(self):
        self.blocks = {}
        self.var = {}
        self.rows = []

    def unknown(self, name, shape, entries):
        if name in self.blocks:
            raise ValueError(f"duplicate unknown {name}")
        idx = {}
        for e in entries:
            idx[e] = len(self.var)
            self.var[(name, e)] = idx[e]
        self.blocks[name] = (shape, idx)

    def equation(self, terms, const: F2Matrix | None = None, source_filter=None):
        eqs = defaultdict(int)
        for L, name, R in terms:
            _, idx = self.blocks[name]
            lt = L.transpose() if L is not None else None
            for (a, b), j in idx.items():
                ts = lt.row_support(a) if lt is not None else (a,)
                ss = R.row_support(b) if R is not None else (b,)
                bit = 1 << j
                for t in ts:
                    for s in ss:
                        eqs[(t, s)] ^= bit
        consts = set()
        if const is not None:
            for t in range(const.nrows):
                for s in const.row_support(t):
                    consts.add((t, s))
        for key in set(eqs) | consts:
            if source_filter is not None and not source_filter(key[1]):
                continue
            r, c = eqs.get(key, 0), key in consts
            if r or c:
                self.rows.append((r, c))

    def solve(self):
        """{name: F2Matrix} or None when inconsistent."""
        nv = len(self.var)
        rows = [r | (1 << nv) if c else r for r, c in self.rows]
        x = solve_sparse(rows, nv)
        if x is None:
            return None
        out = {}
        for name, ((nr, nc), idx) in self.blocks.items():
            mrows = [0] * nr
            for (a, b), j in idx.items():
                if (x >> j) & 1:
                    mrows[a] |= 1 << b
            out[name] = F2Matrix(nr, nc, mrows)
        return out

    @property
    def size(self):
        return len(self.var), len(self.rows)


def graded_entries(src_gradings, tgt_gradings, bidegree):
    """All (t, s) with grading(t) = grading(s) + bidegree."""
    dh, dq = bidegree
    by = defaultdict(list)
    for t, g in enumerate(tgt_gradings):
        by[g].append(t)
    out = []
    for s, (h, q) in enumerate(src_gradings):
        for t in by.get((h + dh, q + dq), ()):
            out.append((t, s))
    return out
