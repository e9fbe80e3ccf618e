"""Depth-truncated preferred free resolutions C ⊗ R_X ⊗ Ξ_X.

A generator is ``(c, r, n)``: a cube generator ``c``, a subset ``r`` of the
colors (a square-free monomial in R_X, as a bitmask over the color order)
and an exponent vector ``n`` standing for the monomial prod xi_x^(-n_x).
The truncation keeps sum(n) <= depth.  Multiplication by xi_x lowers n_x,
so the differential never raises the xi-weight and the truncation is a
subcomplex.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .cube import ChainMap, CubeComplex, build_cube, sliding_homotopy
from .f2core import BigradedComplex, ComplexError, F2Matrix, bits
from .diagram import PointedDiagram
from .movie import MovieScript, run

__all__ = [
    "XiMonomial",
    "xi_monomials",
    "ResolvedComplex",
    "ValidityWindow",
    "resolve",
    "q_map",
    "f_map",
    "lift_event",
    "lift_map",
    "compile_resolved",
    "xi_multiplication",
    "validity_window",
    "common_window",
    "resolved_run",
    "base_cube",
]


@dataclass(frozen=True, order=True)
class XiMonomial:
    exps: tuple

    @property
    def weight(self):
        return sum(self.exps)

    @property
    def bidegree(self):
        w = self.weight
        return (-w, -2 * w)

    def times_xi(self, k):
        """Multiply by xi_k; None when the exponent is already zero."""
        if self.exps[k] == 0:
            return None
        e = list(self.exps)
        e[k] -= 1
        return XiMonomial(tuple(e))

    def __str__(self):
        parts = [f"xi{k}^-{n}" for k, n in enumerate(self.exps) if n]
        return "*".join(parts) or "1"


def xi_monomials(ncolors, depth):
    """All monomials of weight <= depth, by weight then exponent vector."""
    out = [XiMonomial(e) for e in product(range(depth + 1), repeat=ncolors) if sum(e) <= depth]
    out.sort(key=lambda m: (m.weight, m.exps))
    return out


@dataclass(frozen=True)
class ValidityWindow:
    """Homological degrees h >= lowest are unaffected by the truncation.

    ``lowest=None`` marks a truncation that is a direct summand, valid everywhere.
    """

    lowest: int | None
    depth: int

    def contains(self, h):
        return self.lowest is None or h >= self.lowest


@dataclass(eq=False)
class ResolvedComplex:
    base: CubeComplex
    colors: tuple
    depth: int
    xis: list
    complex: BigradedComplex
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return self.complex.dim

    @property
    def gradings(self):
        return self.complex.gradings

    @property
    def differential(self):
        return self.complex.differential

    @property
    def nr(self):
        return 1 << len(self.colors)

    def index(self, c, r, xi):
        return (self.xi_index[xi] * self.nr + r) * self.base.dim + c

    @property
    def xi_index(self):
        if "xi" not in self._cache:
            self._cache["xi"] = {m: i for i, m in enumerate(self.xis)}
        return self._cache["xi"]

    def split(self, g):
        """Generator index -> (c, r, xi)."""
        n = self.base.dim
        c = g % n
        rest = g // n
        return c, rest % self.nr, self.xis[rest // self.nr]

    def weight(self, g):
        return self.xis[g // (self.base.dim * self.nr)].weight

    def action(self, color):
        """rho-bar(x): c⊗r⊗ξ -> c⊗(xr)⊗ξ."""
        key = ("act", color)
        if key not in self._cache:
            k = self.colors.index(color)
            rows = [0] * self.dim
            for g in range(self.dim):
                c, r, xi = self.split(g)
                if not (r >> k) & 1:
                    rows[self.index(c, r | (1 << k), xi)] |= 1 << g
            self._cache[key] = ChainMap(self, self, (0, -2), F2Matrix(self.dim, self.dim, rows))
        return self._cache[key]

    def act_monomial(self, r_add, g):
        """Index of rho-bar(r_add) applied to generator g, or None."""
        c, r, xi = self.split(g)
        if r & r_add:
            return None
        return self.index(c, r | r_add, xi)


def _color_matrices(cube: CubeComplex, colors):
    mats = []
    for x in colors:
        if x in cube.colors:
            mats.append(cube.action_matrix(x))
        else:
            mats.append(F2Matrix.zeros(cube.dim, cube.dim))
    return mats


def resolve(c: CubeComplex, depth: int, colors=None) -> ResolvedComplex:
    """Preferred free resolution truncated at xi-weight ``depth``.

    ``colors`` defaults to the diagram's colors; a color without basepoints
    still contributes its R_x and Ξ_x factors.
    """
    if depth < 0:
        raise ComplexError("depth must be >= 0")
    colors = tuple(colors if colors is not None else c.colors)
    k = len(colors)
    xis = xi_monomials(k, depth)
    nr = 1 << k
    n = c.dim
    total = n * nr * len(xis)
    rho = _color_matrices(c, colors)
    dc = c.differential
    xi_at = {m: i for i, m in enumerate(xis)}
    grads = []
    rows = [0] * total
    for xi_i, xi in enumerate(xis):
        wh, wq = xi.bidegree
        for r in range(nr):
            rq = -2 * bin(r).count("1")
            blk = (xi_i * nr + r) * n
            for cg in range(n):
                h, q = c.gradings[cg]
                grads.append((h + wh, q + rq + wq))
            # ∂_C ⊗ 1 ⊗ 1: column cg of dc maps blk+cg to blk+target
            for t in range(n):
                row = dc.row(t)
                if row:
                    rows[blk + t] ^= row << blk
            for kx in range(k):
                nxt = xi.times_xi(kx)
                if nxt is None:
                    continue
                tblk = (xi_at[nxt] * nr + r) * n
                for t in range(n):
                    row = rho[kx].row(t)
                    if row:
                        rows[tblk + t] ^= row << blk
                if not (r >> kx) & 1:
                    tblk2 = (xi_at[nxt] * nr + (r | (1 << kx))) * n
                    for cg in range(n):
                        rows[tblk2 + cg] ^= 1 << (blk + cg)
    comp = BigradedComplex(tuple(grads), F2Matrix(total, total, rows))
    return ResolvedComplex(c, colors, depth, xis, comp)


def q_map(rc: ResolvedComplex) -> ChainMap:
    """c⊗r⊗1 -> rho(r)c and c⊗r⊗ξ -> 0 for ξ != 1."""
    c = rc.base
    rho = _color_matrices(c, rc.colors)
    rows = [0] * c.dim
    for r in range(rc.nr):
        m = F2Matrix.identity(c.dim)
        for k in bits(r):
            m = rho[k] @ m
        blk = r * c.dim  # xi = 1 is the first monomial
        for t in range(c.dim):
            rows[t] |= m.row(t) << blk
    return ChainMap(rc, c, (0, 0), F2Matrix(c.dim, rc.dim, rows))


def f_map(rc: ResolvedComplex) -> ChainMap:
    """c -> c⊗1⊗1; a chain map over GF(2) that is not R_X-linear."""
    n = rc.base.dim
    rows = [0] * rc.dim
    for cg in range(n):
        rows[cg] = 1 << cg
    return ChainMap(rc.base, rc, (0, 0), F2Matrix(rc.dim, n, rows))


def lift_map(rc_in: ResolvedComplex, rc_out: ResolvedComplex, plain: F2Matrix, bidegree,
             homotopy: F2Matrix | None = None, color=None) -> ChainMap:
    """plain ⊗ Id, plus homotopy ⊗ Id ⊗ xi_color when given."""
    if rc_in.colors != rc_out.colors or rc_in.depth != rc_out.depth:
        raise ComplexError("resolutions differ in colors or depth")
    n_in, n_out = rc_in.base.dim, rc_out.base.dim
    nr = rc_in.nr
    rows = [0] * rc_out.dim
    k = rc_in.colors.index(color) if homotopy is not None else None
    for xi_i, xi in enumerate(rc_in.xis):
        nxt = xi.times_xi(k) if homotopy is not None else None
        for r in range(nr):
            sblk = (xi_i * nr + r) * n_in
            tblk = (xi_i * nr + r) * n_out
            for t in range(n_out):
                row = plain.row(t)
                if row:
                    rows[tblk + t] ^= row << sblk
            if nxt is not None:
                hblk = (rc_out.xi_index[nxt] * nr + r) * n_out
                for t in range(n_out):
                    row = homotopy.row(t)
                    if row:
                        rows[hblk + t] ^= row << sblk
    return ChainMap(rc_in, rc_out, bidegree, F2Matrix(rc_out.dim, rc_in.dim, rows))


def lift_event(rc_in: ResolvedComplex, rc_out: ResolvedComplex, plain: ChainMap, info) -> ChainMap:
    """Resolved map of one event given its plain map and surgery record."""
    if info.kind == "slide":
        h = sliding_homotopy(rc_in.base, info.crossing).matrix
        return lift_map(rc_in, rc_out, plain.matrix, plain.bidegree, h, info.color)
    return lift_map(rc_in, rc_out, plain.matrix, plain.bidegree)


def xi_multiplication(rc: ResolvedComplex, color, power=1) -> ChainMap:
    """Id_C ⊗ Id ⊗ xi_color^power."""
    k = rc.colors.index(color)
    n, nr = rc.base.dim, rc.nr
    rows = [0] * rc.dim
    for xi_i, xi in enumerate(rc.xis):
        t = xi
        for _ in range(power):
            t = t.times_xi(k) if t is not None else None
        if t is None:
            continue
        for r in range(nr):
            sblk = (xi_i * nr + r) * n
            tblk = (rc.xi_index[t] * nr + r) * n
            for cg in range(n):
                rows[tblk + cg] |= 1 << (sblk + cg)
    return ChainMap(rc, rc, (power, 2 * power), F2Matrix(rc.dim, rc.dim, rows))


@dataclass
class ResolvedRun:
    plain: object
    complexes: list
    maps: list
    total: ChainMap


def compile_resolved(s: MovieScript, depth: int, colors=None, plain_run=None) -> ChainMap:
    return resolved_run(s, depth, colors, plain_run).total


def resolved_run(s: MovieScript, depth: int, colors=None, plain_run=None) -> ResolvedRun:
    r = plain_run or run(s)
    colors = tuple(colors if colors is not None else r.diagrams[0].colors)
    rcs = [resolve(c, depth, colors) for c in r.cubes]
    maps = []
    for i, info in enumerate(r.infos):
        m = lift_event(rcs[i], rcs[i + 1], r.maps[i], info)
        maps.append(m)
    total = ChainMap(rcs[0], rcs[0], (0, 0), F2Matrix.identity(rcs[0].dim))
    for m in maps:
        total = total.then(m)
    return ResolvedRun(r, rcs, maps, total)


def validity_window(rc: ResolvedComplex) -> ValidityWindow:
    """Degrees h > h_max(base) - depth: every generator in degrees h-1 and h
    of the untruncated resolution is present."""
    hs = [h for h, _ in rc.base.gradings] or [0]
    return ValidityWindow(max(hs) - rc.depth + 1, rc.depth)


def common_window(*rcs) -> ValidityWindow:
    ws = [r if isinstance(r, ValidityWindow) else validity_window(r) for r in rcs]
    lows = [w.lowest for w in ws if w.lowest is not None]
    return ValidityWindow(max(lows) if lows else None, min(w.depth for w in ws))


def base_cube(d, colors=None):
    """Cube of ``d`` with its colors replaced (convenience for tests)."""
    if colors is not None and tuple(colors) != tuple(d.colors):
        d = PointedDiagram.build(d.crossings, d.edges, d.basepoints, list(colors), check_planar=False)
    return build_cube(d)

