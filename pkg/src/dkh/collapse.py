"""Merging basepoint colors along a surjection σ: W -> X.

R_σ sends x to the sum of the w over it, Ξ_σ spreads ξ_x^{-n} over all ways
of splitting n along the fiber, and σ̄ = Id ⊗ R_σ ⊗ Ξ_σ compares the
resolution with W colors to the one whose basepoints were recolored by σ.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace
from itertools import product

from .cube import ChainMap, build_cube
from .derived import MatrixSystem, graded_entries
from .diagram import Basepoint, PointedDiagram
from .f2core import ComplexError, F2Matrix, bits
from .movie import MovieScript, run
from .resolution import ResolvedComplex, XiMonomial, lift_event, resolve, xi_monomials

__all__ = [
    "ColorSurjection",
    "r_sigma",
    "xi_sigma",
    "sigma_bar",
    "recolor",
    "psi",
    "diagonal_action",
    "collapse_square",
    "SquareReport",
    "homotopy_inverse",
    "InverseCertificate",
]


@dataclass(frozen=True)
class ColorSurjection:
    """σ: W -> X, stored as a tuple of (w, σ(w)) pairs in W order."""

    pairs: tuple
    target: tuple

    @classmethod
    def of(cls, mapping: dict, source=None, target=None):
        source = tuple(source or mapping)
        for w in source:
            if w not in mapping:
                raise ValueError(f"color {w!r} has no image")
        target = tuple(target or dict.fromkeys(mapping[w] for w in source))
        for w in source:
            if mapping[w] not in target:
                raise ValueError(f"image {mapping[w]!r} is not a target color")
        hit = {mapping[w] for w in source}
        missing = [x for x in target if x not in hit]
        if missing:
            raise ValueError(f"not surjective: nothing maps to {missing}")
        return cls(tuple((w, mapping[w]) for w in source), target)

    @property
    def source(self):
        return tuple(w for w, _ in self.pairs)

    def __call__(self, w):
        return dict(self.pairs)[w]

    def fiber(self, x):
        return tuple(w for w, y in self.pairs if y == x)

    def fiber_indices(self, k):
        x = self.target[k]
        return [i for i, (_, y) in enumerate(self.pairs) if y == x]


def r_sigma(sigma: ColorSurjection) -> F2Matrix:
    """Matrix of R_X -> R_W on square-free monomials (columns indexed by subsets of X)."""
    nx, nw = len(sigma.target), len(sigma.source)
    cols = []
    for r in range(1 << nx):
        img = {0: 1}
        for k in bits(r):
            nxt = defaultdict(int)
            for mono, c in img.items():
                for i in sigma.fiber_indices(k):
                    if not (mono >> i) & 1:
                        nxt[mono | 1 << i] ^= c
            img = {m: c for m, c in nxt.items() if c}
        cols.append(sum(1 << m for m, c in img.items() if c))
    rows = [0] * (1 << nw)
    for r, col in enumerate(cols):
        for m in bits(col):
            rows[m] |= 1 << r
    return F2Matrix(1 << nw, 1 << nx, rows)


def _compositions(n, parts):
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def xi_sigma(sigma: ColorSurjection, depth: int, xis_x=None, xis_w=None) -> F2Matrix:
    """Ξ_X -> Ξ_W truncated at ``depth``; columns follow xi_monomials order."""
    xis_x = xis_x or xi_monomials(len(sigma.target), depth)
    xis_w = xis_w or xi_monomials(len(sigma.source), depth)
    at = {m: i for i, m in enumerate(xis_w)}
    rows = [0] * len(xis_w)
    fibers = [sigma.fiber_indices(k) for k in range(len(sigma.target))]
    nw = len(sigma.source)
    for j, m in enumerate(xis_x):
        choices = [list(_compositions(n, len(f))) for n, f in zip(m.exps, fibers)]
        for combo in product(*choices):
            e = [0] * nw
            for f, parts in zip(fibers, combo):
                for i, p in zip(f, parts):
                    e[i] = p
            rows[at[XiMonomial(tuple(e))]] ^= 1 << j
    return F2Matrix(len(xis_w), len(xis_x), rows)


def recolor(d: PointedDiagram, sigma: ColorSurjection) -> PointedDiagram:
    """The same diagram with every basepoint color pushed through σ."""
    bps = [Basepoint(b.id, b.edge, b.pos, sigma(b.color)) for b in d.basepoints]
    return PointedDiagram.build(d.crossings, d.edges, bps, list(sigma.target), check_planar=False)


def sigma_bar(rc_x: ResolvedComplex, rc_w: ResolvedComplex, sigma: ColorSurjection) -> ChainMap:
    """Id_C ⊗ R_σ ⊗ Ξ_σ : rc_x -> rc_w."""
    if rc_x.base.dim != rc_w.base.dim or rc_x.base.gradings != rc_w.base.gradings:
        raise ComplexError("resolutions have different base complexes")
    if tuple(rc_x.colors) != tuple(sigma.target) or tuple(rc_w.colors) != tuple(sigma.source):
        raise ComplexError("resolution colors do not match σ")
    if rc_x.depth != rc_w.depth:
        raise ComplexError("resolutions have different depths")
    R = r_sigma(sigma).transpose()
    X = xi_sigma(sigma, rc_x.depth, rc_x.xis, rc_w.xis).transpose()
    n = rc_x.base.dim
    rows = [0] * rc_w.dim
    for xi_i, xi in enumerate(rc_x.xis):
        for r in range(rc_x.nr):
            for xw in X.row_support(xi_i):
                for rw in R.row_support(r):
                    for c in range(n):
                        s = rc_x.index(c, r, xi)
                        t = rc_w.index(c, rw, rc_w.xis[xw])
                        rows[t] |= 1 << s
    return ChainMap(rc_x, rc_w, (0, 0), F2Matrix(rc_w.dim, rc_x.dim, rows))


def pulled_action(rc_w: ResolvedComplex, sigma: ColorSurjection, x) -> F2Matrix:
    """R_X acting on rc_w through R_σ: Σ_{σ(w)=x} ρ̄(w)."""
    m = F2Matrix.zeros(rc_w.dim, rc_w.dim)
    for w in sigma.fiber(x):
        m = m + rc_w.action(w).matrix
    return m


def psi(rc: ResolvedComplex) -> ChainMap:
    """Change of basis c⊗r_Z⊗ξ -> Σ_{Y⊆Z} ρ(x_{Z∖Y})c ⊗ r_Y ⊗ ξ.

    It is an involution and carries ρ̄ to the diagonal action
    ρ(x)⊗1 + 1⊗x.  It is not a chain map for the resolution differential,
    so the returned ChainMap is flagged accordingly.
    """
    c = rc.base
    rho = [c.action_matrix(x) if x in c.colors else F2Matrix.zeros(c.dim, c.dim) for x in rc.colors]
    mono = []
    for r in range(rc.nr):
        m = F2Matrix.identity(c.dim)
        for k in bits(r):
            m = rho[k] @ m
        mono.append(m.transpose())
    rows = [0] * rc.dim
    for xi in rc.xis:
        for z in range(rc.nr):
            y = z
            while True:  # every subset y of z
                mt = mono[z & ~y]
                for cg in range(c.dim):
                    s = rc.index(cg, z, xi)
                    for t in mt.row_support(cg):
                        rows[rc.index(t, y, xi)] ^= 1 << s
                if y == 0:
                    break
                y = (y - 1) & z
    return ChainMap(rc, rc, (0, 0), F2Matrix(rc.dim, rc.dim, rows), is_chain_map=False)


def diagonal_action(rc: ResolvedComplex, color) -> F2Matrix:
    """ρ(x) ⊗ 1 ⊗ 1 + ρ̄(x)."""
    c = rc.base
    k = rc.colors.index(color)
    rows = [0] * rc.dim
    rho = c.action_matrix(color).transpose() if color in c.colors else None
    for g in range(rc.dim):
        cg, r, xi = rc.split(g)
        if rho is not None:
            for t in rho.row_support(cg):
                rows[rc.index(t, r, xi)] ^= 1 << g
        if not (r >> k) & 1:
            rows[rc.index(cg, r | 1 << k, xi)] ^= 1 << g
    return F2Matrix(rc.dim, rc.dim, rows)


# --------------------------------------------------------------------------
# the collapsing square for a movie


@dataclass
class SquareReport:
    kind: str
    line: int
    commutes: bool
    first_violation: tuple | None


def collapse_square(s: MovieScript, sigma: ColorSurjection, depth: int, plain_run=None):
    """For each event check σ̄_out ∘ F_X = F_W ∘ σ̄_in exactly."""
    r = plain_run or run(s)
    if tuple(r.diagrams[0].colors) != tuple(sigma.source):
        raise ComplexError("script colors differ from the source of σ")
    cubes_x = [build_cube(recolor(d, sigma)) for d in r.diagrams]
    rcs_w = [resolve(c, depth, sigma.source) for c in r.cubes]
    rcs_x = [resolve(c, depth, sigma.target) for c in cubes_x]
    bars = [sigma_bar(a, b, sigma) for a, b in zip(rcs_x, rcs_w)]
    out = []
    for i, (ev, info) in enumerate(zip(s.events, r.infos)):
        plain_w = r.maps[i]
        plain_x = ChainMap(cubes_x[i], cubes_x[i + 1], plain_w.bidegree, plain_w.matrix)
        fw = lift_event(rcs_w[i], rcs_w[i + 1], plain_w, info)
        info_x = info
        if info.kind == "slide":
            info_x = replace(info, color=sigma(info.color))
        fx = lift_event(rcs_x[i], rcs_x[i + 1], plain_x, info_x)
        lhs = bars[i + 1].matrix @ fx.matrix
        rhs = fw.matrix @ bars[i].matrix
        diff = lhs + rhs
        out.append(SquareReport(ev.kind, ev.line, diff.is_zero(), diff.first_entry()))
    return out


# --------------------------------------------------------------------------
# homotopy inverse of σ̄


@dataclass
class InverseCertificate:
    sbar: ChainMap
    g: F2Matrix
    h_x: F2Matrix  # ∂h + h∂ = Id + g∘σ̄ on rc_x
    h_w: F2Matrix  # ∂k + k∂ = Id + σ̄∘g on rc_w
    max_weight: int | None
    unknowns: int
    equations: int
    pulled: dict = field(default_factory=dict, repr=False)

    def check(self):
        a, b = self.sbar.source, self.sbar.target
        s, g = self.sbar.matrix, self.g
        ok_w = _filter(self.max_weight, b)
        ok_x = _filter(self.max_weight, a)
        checks = [
            (b.differential @ s + s @ a.differential, ok_x, "σ̄ chain map"),
            (a.differential @ g + g @ b.differential, ok_w, "g chain map"),
            (a.differential @ self.h_x + self.h_x @ a.differential + F2Matrix.identity(a.dim) + g @ s,
             ok_x, "g∘σ̄ ≃ Id"),
            (b.differential @ self.h_w + self.h_w @ b.differential + F2Matrix.identity(b.dim) + s @ g,
             ok_w, "σ̄∘g ≃ Id"),
        ]
        for m, ok, what in checks:
            for t in range(m.nrows):
                for col in m.row_support(t):
                    if ok is None or ok(col):
                        raise ComplexError(f"{what} fails at {(t, col)}")
        sigma_x = a.colors
        for x in sigma_x:
            ax = a.action(x).matrix
            pw = self.pulled[x]
            if ax @ g != g @ pw or self.h_x @ ax != ax @ self.h_x or self.h_w @ pw != pw @ self.h_w:
                raise ComplexError(f"certificate is not R_X-linear for {x}")
        return True


def _filter(max_weight, rc):
    if max_weight is None:
        return None
    return lambda g: rc.weight(g) <= max_weight


def homotopy_inverse(rc_x: ResolvedComplex, rc_w: ResolvedComplex, sigma: ColorSurjection,
                     max_weight=None):
    """Search for an R_X-linear g: rc_w -> rc_x inverse to σ̄ up to homotopy.

    All unknowns (g and both homotopies) enter one linear system, so a
    missing solution rules out such an inverse on the imposed sources.
    """
    sb = sigma_bar(rc_x, rc_w, sigma)
    S = sb.matrix
    dx, dw = rc_x.differential, rc_w.differential
    sysm = MatrixSystem()
    sysm.unknown("g", (rc_x.dim, rc_w.dim), graded_entries(rc_w.gradings, rc_x.gradings, (0, 0)))
    sysm.unknown("hx", (rc_x.dim, rc_x.dim), graded_entries(rc_x.gradings, rc_x.gradings, (-1, 0)))
    sysm.unknown("hw", (rc_w.dim, rc_w.dim), graded_entries(rc_w.gradings, rc_w.gradings, (-1, 0)))
    fx, fw = _filter(max_weight, rc_x), _filter(max_weight, rc_w)
    sysm.equation([(dx, "g", None), (None, "g", dw)], None, fw)
    sysm.equation([(None, "g", S), (dx, "hx", None), (None, "hx", dx)], F2Matrix.identity(rc_x.dim), fx)
    sysm.equation([(S, "g", None), (dw, "hw", None), (None, "hw", dw)], F2Matrix.identity(rc_w.dim), fw)
    pulled = {}
    for x in sigma.target:
        ax = rc_x.action(x).matrix
        pw = pulled_action(rc_w, sigma, x)
        pulled[x] = pw
        sysm.equation([(ax, "g", None), (None, "g", pw)])
        sysm.equation([(ax, "hx", None), (None, "hx", ax)])
        sysm.equation([(pw, "hw", None), (None, "hw", pw)])
    nv, ne = sysm.size
    sol = sysm.solve()
    if sol is None:
        return None
    cert = InverseCertificate(sb, sol["g"], sol["hx"], sol["hw"], max_weight, nv, ne, pulled)
    cert.check()
    return cert
