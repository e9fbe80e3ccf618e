"""Pointed Khovanov complexes C ⊗_{R_X} K_X and their cobordism maps.

K_X is the Koszul complex ⊗_x (R_X --x--> ξ_x R_X), so the pointed complex
has generators c ⊗ ξ_Z for subsets Z of the colors, in bidegree
(h + |Z|, q + 2|Z|), with

    ∂(c ⊗ ξ_Z) = ∂c ⊗ ξ_Z + Σ_{x ∉ Z} ρ(x)c ⊗ ξ_{Z ∪ x}.

A cobordism acts through the preferred resolution: section f, then the
resolved map tensored with K_X, then q.
"""
from __future__ import annotations

from dataclasses import dataclass

from .cube import ChainMap, CubeComplex, build_cube
from .f2core import BigradedComplex, ComplexError, F2Matrix, bits, homology, induced_rank
from .movie import MovieScript, run
from .resolution import ResolvedComplex, XiMonomial, resolved_run

__all__ = [
    "PointedComplex",
    "pointed_complex",
    "pointed_map",
    "pointed_cobordism_map",
    "PointedMap",
    "k_complex",
    "ainf_section",
]


@dataclass(eq=False)
class PointedComplex:
    base: CubeComplex
    colors: tuple
    complex: BigradedComplex

    @property
    def dim(self):
        return self.complex.dim

    @property
    def gradings(self):
        return self.complex.gradings

    @property
    def differential(self):
        return self.complex.differential

    def index(self, c, z):
        return z * self.base.dim + c

    def homology(self):
        return homology(self.complex)

    def rank(self):
        return sum(self.homology().values())


def _rho(cube: CubeComplex, colors):
    return [cube.action_matrix(x) if x in cube.colors else F2Matrix.zeros(cube.dim, cube.dim)
            for x in colors]


def k_complex(colors) -> BigradedComplex:
    """K_X with R_X coefficients written out over GF(2): basis r ⊗ ξ_Z."""
    k = len(colors)
    nz = 1 << k
    grads, rows = [], [0] * (nz * nz)
    for z in range(nz):
        for r in range(nz):
            grads.append((bin(z).count("1"), 2 * bin(z).count("1") - 2 * bin(r).count("1")))
    for z in range(nz):
        for r in range(nz):
            src = z * nz + r
            for x in range(k):
                if not (z >> x) & 1 and not (r >> x) & 1:
                    rows[(z | 1 << x) * nz + (r | 1 << x)] |= 1 << src
    return BigradedComplex(tuple(grads), F2Matrix(nz * nz, nz * nz, rows))


def pointed_complex(d, colors=None) -> PointedComplex:
    """DKh(L) ⊗_{R_X} K_X for a diagram or cube complex."""
    cube = d if isinstance(d, CubeComplex) else build_cube(d)
    colors = tuple(colors if colors is not None else cube.colors)
    n = cube.dim
    nz = 1 << len(colors)
    rho = _rho(cube, colors)
    dc = cube.differential
    grads = []
    rows = [0] * (n * nz)
    for z in range(nz):
        blk = z * n
        w = bin(z).count("1")
        for h, q in cube.gradings:
            grads.append((h + w, q + 2 * w))
        for t in range(n):
            row = dc.row(t)
            if row:
                rows[blk + t] ^= row << blk
        for x in range(len(colors)):
            if (z >> x) & 1:
                continue
            tblk = (z | 1 << x) * n
            for t in range(n):
                row = rho[x].row(t)
                if row:
                    rows[tblk + t] ^= row << blk
    return PointedComplex(cube, colors, BigradedComplex(tuple(grads), F2Matrix(n * nz, n * nz, rows)))


def _xi_of(y, k):
    return XiMonomial(tuple((y >> i) & 1 for i in range(k)))


def pointed_map(F: ChainMap, src: PointedComplex, tgt: PointedComplex) -> ChainMap:
    """(q ⊗ Id) ∘ (F ⊗ Id) ∘ f for an R_X-linear resolved map F."""
    a, b = F.source, F.target
    if not (isinstance(a, ResolvedComplex) and isinstance(b, ResolvedComplex)):
        raise ComplexError("pointed maps need a resolved map")
    colors = a.colors
    if src.colors != colors or tgt.colors != colors:
        raise ComplexError("pointed complexes and resolution use different colors")
    k = len(colors)
    if a.depth < k:
        raise ComplexError(f"depth {a.depth} is below the number of colors {k}")
    nz = 1 << k
    full = nz - 1
    rho_r = []
    rho = _rho(b.base, colors)
    for r in range(b.nr):
        m = F2Matrix.identity(b.base.dim)
        for i in bits(r):
            m = rho[i] @ m
        rho_r.append(m.transpose())
    ft = F.matrix.transpose()
    zero = XiMonomial((0,) * k)
    rows = [0] * tgt.dim
    for z in range(nz):
        rest = full & ~z
        ys = [y for y in range(nz) if y & rest == y]
        for c in range(src.base.dim):
            sbit = 1 << src.index(c, z)
            for y in ys:
                g = a.index(c, 0, _xi_of(y, k))
                for t in ft.row_support(g):
                    c2, r2, xi2 = b.split(t)
                    if xi2 != zero:
                        continue
                    for c3 in rho_r[r2].row_support(c2):
                        rows[tgt.index(c3, y | z)] ^= sbit
    dh, dq = F.bidegree
    return ChainMap(src, tgt, (dh, dq), F2Matrix(tgt.dim, src.dim, rows)).verify()


@dataclass
class PointedMap:
    map: ChainMap
    source_table: dict
    target_table: dict
    ranks: dict

    @property
    def total_rank(self):
        return sum(self.ranks.values())

    def is_isomorphism(self):
        return (self.total_rank == sum(self.source_table.values())
                == sum(self.target_table.values()))


def _induced(m: ChainMap) -> PointedMap:
    src, tgt = m.source.complex, m.target.complex
    dh, dq = m.bidegree
    st, tt = homology(src), homology(tgt)
    s_sl, t_sl = src.slices(), tgt.slices()
    ranks = {hq: induced_rank(m.matrix, src, tgt, hq, (hq[0] + dh, hq[1] + dq), s_sl, t_sl)
             for hq in st}
    return PointedMap(m, st, tt, ranks)


def pointed_cobordism_map(s: MovieScript, depth=None, plain_run=None) -> PointedMap:
    r = plain_run or run(s)
    colors = r.diagrams[0].colors
    if tuple(r.diagrams[-1].colors) != tuple(colors):
        raise ComplexError("movie endpoints have different colors")
    depth = max(len(colors), depth or 0)
    rr = resolved_run(s, depth, colors, r)
    src = pointed_complex(r.cubes[0], colors)
    tgt = pointed_complex(r.cubes[-1], colors)
    return _induced(pointed_map(rr.total, src, tgt))


def ainf_section(m: int, n: int, d: int, letters, rc: ResolvedComplex):
    """Index of f_{m,1,n}(w...w ⊗ d ⊗ x...x) in ``rc``, or None for zero.

    ``letters`` lists the m + n inputs as color names or "1"; the
    resolution must have colors (w, x).
    """
    if tuple(rc.colors) != ("w", "x"):
        raise ComplexError("the section formula is stated for colors (w, x)")
    letters = list(letters)
    if m < 0 or n < 0 or len(letters) != m + n:
        raise ValueError(f"expected {m + n} letters, got {len(letters)}")
    if m + n > rc.depth:
        raise ComplexError(f"xi-weight {m + n} exceeds depth {rc.depth}")
    if not 0 <= d < rc.base.dim:
        raise ValueError(f"generator {d} out of range")
    if any(a != "w" for a in letters[:m]) or any(a != "x" for a in letters[m:]):
        return None
    return rc.index(d, 0, XiMonomial((m, n)))

