"""The Khovanov cube of a pointed diagram with basepoint and slide operators.

A generator is ``(mask, labels)``: bit i of ``mask`` is the smoothing of
crossing i and bit j of ``labels`` is 1 when circle j carries X.  Generators
are ordered by mask, then labels.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import DiagramError, PointedDiagram, writhe_shifts
from .f2core import BigradedComplex, ComplexError, F2Matrix, bits

__all__ = [
    "ChainMap",
    "CubeComplex",
    "build_cube",
    "basepoint_action",
    "color_action",
    "edge_action",
    "sliding_homotopy",
    "verify_lemma_2_3",
    "tensor_disjoint",
    "disjoint_union",
    "relabel_map",
    "saddle_table",
]


def _pop(x):
    return bin(x).count("1")


@dataclass(eq=False)
class ChainMap:
    """A GF(2) map between complexes with a declared (h, q) bidegree.

    ``matrix`` has one row per target generator.
    """

    source: object
    target: object
    bidegree: tuple
    matrix: F2Matrix
    is_chain_map: bool = True

    def __post_init__(self):
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise ComplexError(f"map shape {self.matrix.shape} != {(self.target.dim, self.source.dim)}")

    def homogeneity_violation(self):
        dh, dq = self.bidegree
        sg, tg = self.source.gradings, self.target.gradings
        m = self.matrix
        for t in range(m.nrows):
            for s in m.row_support(t):
                if (tg[t][0] - sg[s][0], tg[t][1] - sg[s][1]) != (dh, dq):
                    return (t, s)
        return None

    def chain_violation(self):
        lhs = self.target.differential @ self.matrix
        rhs = self.matrix @ self.source.differential
        return (lhs + rhs).first_entry()

    def verify(self):
        v = self.homogeneity_violation()
        if v is not None:
            raise ComplexError(f"entry {v} breaks bidegree {self.bidegree}")
        if self.is_chain_map:
            v = self.chain_violation()
            if v is not None:
                raise ComplexError(f"chain-map equation fails at {v}")
        return self

    def then(self, other: "ChainMap") -> "ChainMap":
        """``other`` after ``self``."""
        if other.source.dim != self.target.dim:
            raise ComplexError("composition of incompatible maps")
        return ChainMap(self.source, other.target,
                        (self.bidegree[0] + other.bidegree[0], self.bidegree[1] + other.bidegree[1]),
                        other.matrix @ self.matrix, self.is_chain_map and other.is_chain_map)

    def __add__(self, other):
        return ChainMap(self.source, self.target, self.bidegree, self.matrix + other.matrix,
                        self.is_chain_map and other.is_chain_map)

    def is_zero(self):
        return self.matrix.is_zero()


@dataclass(eq=False)
class CubeComplex:
    diagram: PointedDiagram
    base: BigradedComplex
    keys: list
    offsets: dict
    circ: list
    ncirc: list
    _actions: dict = field(default_factory=dict, repr=False)
    _homotopies: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return self.base.dim

    @property
    def gradings(self):
        return self.base.gradings

    @property
    def differential(self):
        return self.base.differential

    @property
    def colors(self):
        return self.diagram.colors

    def index(self, mask, labels):
        return self.offsets[mask] + labels

    def circle_of_edge(self, mask, edge):
        return self.circ[mask][self.diagram.edge_index(edge)]

    @property
    def actions(self):
        """color -> ChainMap of bidegree (0, -2)."""
        for x in self.colors:
            if x not in self._actions:
                self._actions[x] = color_action(self, x)
        return self._actions

    def action_matrix(self, color):
        return self.actions[color].matrix

    @property
    def homotopies(self):
        for c in self.diagram.crossings:
            if c.id not in self._homotopies:
                self._homotopies[c.id] = sliding_homotopy(self, c.id)
        return self._homotopies


def saddle_table(src_k, carry, src_touch, dst_touch):
    """Images of every labeling under a merge or split.

    ``carry[j]`` is the target circle of untouched source circle j (-1 if j
    is touched).  A merge has two source and one target touched circles; a
    split one and two.
    """
    table = []
    if len(src_touch) == 2 and len(dst_touch) == 1:
        a, b = src_touch
        m = dst_touch[0]
        for lab in range(1 << src_k):
            base = 0
            for j in bits(lab):
                t = carry[j]
                if t >= 0:
                    base |= 1 << t
            la, lb = (lab >> a) & 1, (lab >> b) & 1
            table.append([] if la and lb else [base | ((la | lb) << m)])
    elif len(src_touch) == 1 and len(dst_touch) == 2:
        c = src_touch[0]
        c1, c2 = dst_touch
        for lab in range(1 << src_k):
            base = 0
            for j in bits(lab):
                t = carry[j]
                if t >= 0:
                    base |= 1 << t
            if (lab >> c) & 1:
                table.append([base | (1 << c1) | (1 << c2)])
            else:
                table.append([base | (1 << c1), base | (1 << c2)])
    else:
        raise ComplexError(f"saddle touches {len(src_touch)} -> {len(dst_touch)} circles")
    return table


def _transition(cube, m_src, m_dst, src_pair, dst_pair):
    """Saddle table between two states of one cube, touching given edge indices."""
    cs, ks = cube.circ[m_src], cube.ncirc[m_src]
    cd = cube.circ[m_dst]
    st = sorted({cs[e] for e in src_pair})
    dt = sorted({cd[e] for e in dst_pair})
    carry = [-1] * ks
    for e, j in enumerate(cs):
        if j not in st:
            carry[j] = cd[e]
    return saddle_table(ks, carry, st, dt)


def build_cube(d: PointedDiagram) -> CubeComplex:
    """Cube of resolutions with the standard rank-2 Frobenius algebra."""
    n = d.n_crossings
    npos, nneg = writhe_shifts(d)
    circ, ncirc, offsets, keys, grad = [], [], {}, [], []
    for m in range(1 << n):
        c, k = d.circles_of(m)
        circ.append(c)
        ncirc.append(k)
        offsets[m] = len(keys)
        h = _pop(m) - nneg
        for lab in range(1 << k):
            keys.append((m, lab))
            grad.append((h, k - 2 * _pop(lab) + _pop(m) + npos - 2 * nneg))
    rows = [0] * len(keys)
    cube = CubeComplex(d, None, keys, offsets, circ, ncirc)
    slot_idx = d._slot_idx()
    for m in range(1 << n):
        for i in range(n):
            if (m >> i) & 1:
                continue
            m2 = m | (1 << i)
            s0, s1, s2, s3 = slot_idx[i]
            table = _transition(cube, m, m2, (s0, s2), (s0, s1))
            so, to = offsets[m], offsets[m2]
            for lab, images in enumerate(table):
                for lab2 in images:
                    rows[to + lab2] ^= 1 << (so + lab)
    cube.base = BigradedComplex(tuple(grad), F2Matrix(len(keys), len(keys), rows), tuple(keys))
    return cube


def edge_action(cube: CubeComplex, edge: str) -> F2Matrix:
    """Multiplication by X on the circle through ``edge`` in every state."""
    e = cube.diagram.edge_index(edge)
    rows = [0] * cube.dim
    for m, off in cube.offsets.items():
        j = cube.circ[m][e]
        for lab in range(1 << cube.ncirc[m]):
            if not (lab >> j) & 1:
                rows[off + (lab | (1 << j))] |= 1 << (off + lab)
    return F2Matrix(cube.dim, cube.dim, rows)


def basepoint_action(cube: CubeComplex, bid: str) -> ChainMap:
    b = cube.diagram.basepoint(bid)
    return ChainMap(cube, cube, (0, -2), edge_action(cube, b.edge))


def color_action(cube: CubeComplex, color: str) -> ChainMap:
    if color not in cube.diagram.colors:
        raise DiagramError(f"unknown color {color!r}")
    m = F2Matrix.zeros(cube.dim, cube.dim)
    for b in cube.diagram.color_basepoints(color):
        m = m + edge_action(cube, b.edge)
    return ChainMap(cube, cube, (0, -2), m)


def sliding_homotopy(cube: CubeComplex, cid: str) -> ChainMap:
    """Sum of saddles from the 1- to the 0-smoothing at crossing ``cid``."""
    d = cube.diagram
    i = d.crossing_index(cid)
    s0, s1, s2, s3 = d._slot_idx()[i]
    rows = [0] * cube.dim
    for m in range(1 << d.n_crossings):
        if not (m >> i) & 1:
            continue
        m2 = m ^ (1 << i)
        table = _transition(cube, m, m2, (s0, s1), (s0, s2))
        so, to = cube.offsets[m], cube.offsets[m2]
        for lab, images in enumerate(table):
            for lab2 in images:
                rows[to + lab2] ^= 1 << (so + lab)
    return ChainMap(cube, cube, (-1, -2), F2Matrix(cube.dim, cube.dim, rows), is_chain_map=False)


def verify_lemma_2_3(cube: CubeComplex, cid: str) -> dict:
    """Check the eight chain-level identities for the slide homotopy at ``cid``.

    p1, p2 sit on the under strand (incoming and outgoing edge), q1, q2 on
    the over strand; r ranges over every edge of the diagram.
    """
    d = cube.diagram
    c = d.crossing(cid)
    H = sliding_homotopy(cube, cid).matrix
    dd = cube.differential
    p1, p2 = edge_action(cube, c.slots[0]), edge_action(cube, c.slots[2])
    q1, q2 = edge_action(cube, c.slots[1]), edge_action(cube, c.slots[3])
    dH = dd @ H + H @ dd
    zero = F2Matrix.zeros(cube.dim, cube.dim)
    checks = {
        "dH+Hd=p1+p2": (dH, p1 + p2),
        "dH+Hd=q1+q2": (dH, q1 + q2),
        "Hr=rH": None,
        "H^2=0": (H @ H, zero),
        "Hp1=p2H": (H @ p1, p2 @ H),
        "Hp2=p1H": (H @ p2, p1 @ H),
        "Hq1=q2H": (H @ q1, q2 @ H),
        "Hq2=q1H": (H @ q2, q1 @ H),
    }
    report = {}
    for name, pair in checks.items():
        if pair is None:
            bad = None
            for e in d.edges:
                r = edge_action(cube, e)
                bad = (H @ r + r @ H).first_entry()
                if bad is not None:
                    bad = {"edge": e, "entry": bad}
                    break
            report[name] = bad
        else:
            report[name] = (pair[0] + pair[1]).first_entry()
    return report


def disjoint_union(a: PointedDiagram, b: PointedDiagram, merge_colors=False) -> PointedDiagram:
    ids_a = {c.id for c in a.crossings} | set(a.edges) | {p.id for p in a.basepoints}
    ids_b = {c.id for c in b.crossings} | set(b.edges) | {p.id for p in b.basepoints}
    clash = ids_a & ids_b
    if clash:
        raise DiagramError(f"id collision: {sorted(clash)}")
    shared = set(a.colors) & set(b.colors)
    if shared and not merge_colors:
        raise DiagramError(f"shared colors {sorted(shared)}; pass merge_colors=True")
    colors = list(a.colors) + [x for x in b.colors if x not in a.colors]
    return PointedDiagram.build(a.crossings + b.crossings, a.edges + b.edges,
                                a.basepoints + b.basepoints, colors, check_planar=False)


def tensor_disjoint(a: CubeComplex, b: CubeComplex, merge_colors=False) -> CubeComplex:
    """Cube of the disjoint union; generator (ma, la) x (mb, lb) is
    (ma | mb << na, la | lb << ka)."""
    return build_cube(disjoint_union(a.diagram, b.diagram, merge_colors))


def relabel_map(src: CubeComplex, dst: CubeComplex, crossing_map=None, edge_map=None) -> F2Matrix:
    """Identity-type isomorphism between cubes of diagrams with the same strands.

    Crossings and edges of ``src`` are renamed by the given maps (identity
    by default); circles are matched through their edges.
    """
    ds, dt = src.diagram, dst.diagram
    crossing_map = crossing_map or {}
    edge_map = edge_map or {}
    perm = []
    for c in ds.crossings:
        perm.append(dt.crossing_index(crossing_map.get(c.id, c.id)))
    if len(set(perm)) != dt.n_crossings or ds.n_crossings != dt.n_crossings:
        raise ComplexError("crossings do not correspond")
    try:
        eix = [dt.edge_index(edge_map.get(e, e)) for e in ds.edges]
    except KeyError as exc:
        raise ComplexError(f"edge {exc} has no counterpart") from None
    rows = [0] * dst.dim
    for ms, off in src.offsets.items():
        mt = 0
        for i in bits(ms):
            mt |= 1 << perm[i]
        cs, ct = src.circ[ms], dst.circ[mt]
        cmap = {}
        for e, j in enumerate(cs):
            t = ct[eix[e]]
            if cmap.setdefault(j, t) != t:
                raise ComplexError("circles do not correspond")
        if len(set(cmap.values())) != dst.ncirc[mt] or len(cmap) != src.ncirc[ms]:
            raise ComplexError("circles do not correspond")
        ot = dst.offsets[mt]
        for lab in range(1 << src.ncirc[ms]):
            lt = 0
            for j in bits(lab):
                lt |= 1 << cmap[j]
            rows[ot + lt] |= 1 << (off + lab)
    return F2Matrix(dst.dim, src.dim, rows)
