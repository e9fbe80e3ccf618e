"""Pointed link diagrams as PD codes with colored basepoints.

Crossing slots are listed counterclockwise starting from the incoming
under-strand.  A positive crossing reads (under in, over out, under out,
over in) and a negative one (under in, over in, under out, over out), so the
slot pattern alone fixes every edge direction.  The 0-smoothing joins slots
(0,1) and (2,3); the 1-smoothing joins (0,3) and (1,2).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .f2core import Laurent

__all__ = [
    "DiagramError",
    "Crossing",
    "Basepoint",
    "PointedDiagram",
    "ResolutionState",
    "parse",
    "load",
    "dumps",
    "resolve",
    "writhe_shifts",
    "kauffman_bracket",
    "jones_from_bracket",
    "is_planar",
    "from_braid",
    "slot_is_out",
    "OUT_SLOTS",
    "IN_SLOTS",
]


class DiagramError(ValueError):
    pass


OUT_SLOTS = {1: (1, 2), -1: (2, 3)}
IN_SLOTS = {1: (0, 3), -1: (0, 1)}


def slot_is_out(sign: int, slot: int) -> bool:
    return slot in OUT_SLOTS[sign]


@dataclass(frozen=True)
class Crossing:
    id: str
    slots: tuple
    sign: int

    @property
    def under(self):
        return (self.slots[0], self.slots[2])

    @property
    def over(self):
        return (self.slots[3], self.slots[1]) if self.sign > 0 else (self.slots[1], self.slots[3])


@dataclass(frozen=True)
class Basepoint:
    id: str
    edge: str
    pos: int
    color: str


@dataclass(frozen=True, eq=False)
class PointedDiagram:
    crossings: tuple
    edges: tuple
    basepoints: tuple
    colors: tuple
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # -- construction ------------------------------------------------------
    @classmethod
    def build(cls, crossings, edges, basepoints=(), colors=None, check_planar=True):
        crossings = tuple(Crossing(c.id, tuple(c.slots), int(c.sign)) for c in crossings)
        edges = tuple(edges)
        bps = list(basepoints)
        if colors is None:
            colors = []
            for b in bps:
                if b.color not in colors:
                    colors.append(b.color)
        colors = tuple(colors)
        # normalize positions to 0..k-1 per edge, keeping order
        by_edge: dict = {}
        for i, b in enumerate(bps):
            by_edge.setdefault(b.edge, []).append((b.pos, i, b))
        norm = []
        for e in edges:
            for k, (_, _, b) in enumerate(sorted(by_edge.get(e, []), key=lambda t: (t[0], t[1]))):
                norm.append(Basepoint(b.id, e, k, b.color))
        d = cls(crossings, edges, tuple(norm), colors)
        d._validate(bps)
        if check_planar and not is_planar(d):
            raise DiagramError("diagram is not planar")
        return d

    def _validate(self, raw_bps):
        ids = [c.id for c in self.crossings]
        if len(set(ids)) != len(ids):
            raise DiagramError("duplicate crossing id")
        if len(set(self.edges)) != len(self.edges):
            raise DiagramError("duplicate edge id")
        if len(set(self.colors)) != len(self.colors):
            raise DiagramError("duplicate color name")
        for name in list(ids) + list(self.edges):
            if not isinstance(name, str) or not name:
                raise DiagramError(f"malformed id {name!r}")
        eset = set(self.edges)
        cset = set(ids)
        outs: dict = {}
        ins: dict = {}
        for c in self.crossings:
            if c.sign not in (1, -1):
                raise DiagramError(f"crossing {c.id}: sign must be + or -")
            if len(c.slots) != 4:
                raise DiagramError(f"crossing {c.id}: needs four edges")
            for s, e in enumerate(c.slots):
                if e not in eset:
                    raise DiagramError(f"crossing {c.id}: unknown edge {e!r}")
                book = outs if slot_is_out(c.sign, s) else ins
                if e in book:
                    raise DiagramError(f"inconsistent orientation: edge {e} at crossing {c.id}")
                book[e] = (c.id, s)
        for e in self.edges:
            if (e in outs) != (e in ins):
                raise DiagramError(f"dangling edge {e}")
        bids = set()
        for b in raw_bps:
            if b.id in bids:
                raise DiagramError(f"duplicate basepoint id {b.id}")
            bids.add(b.id)
            if b.edge in cset:
                raise DiagramError(f"basepoint {b.id} on crossing {b.edge}")
            if b.edge not in eset:
                raise DiagramError(f"basepoint {b.id}: unknown edge {b.edge!r}")
            if b.color not in self.colors:
                raise DiagramError(f"basepoint {b.id}: unknown color {b.color!r}")

    # -- lookups -----------------------------------------------------------
    def _index(self):
        ix = self._cache.get("index")
        if ix is None:
            eidx = {e: i for i, e in enumerate(self.edges)}
            cidx = {c.id: i for i, c in enumerate(self.crossings)}
            tail = {}
            head = {}
            for i, c in enumerate(self.crossings):
                for s, e in enumerate(c.slots):
                    if slot_is_out(c.sign, s):
                        tail[e] = (i, s)
                    else:
                        head[e] = (i, s)
            bp = {b.id: b for b in self.basepoints}
            ix = dict(eidx=eidx, cidx=cidx, tail=tail, head=head, bp=bp)
            self._cache["index"] = ix
        return ix

    def edge_index(self, e):
        return self._index()["eidx"][e]

    def crossing_index(self, cid):
        try:
            return self._index()["cidx"][cid]
        except KeyError:
            raise DiagramError(f"unknown crossing {cid!r}") from None

    def crossing(self, cid) -> Crossing:
        return self.crossings[self.crossing_index(cid)]

    def basepoint(self, bid) -> Basepoint:
        try:
            return self._index()["bp"][bid]
        except KeyError:
            raise DiagramError(f"unknown basepoint {bid!r}") from None

    def has_edge(self, e):
        return e in self._index()["eidx"]

    def tail(self, e):
        """(crossing index, slot) where edge ``e`` starts, None for a loop."""
        return self._index()["tail"].get(e)

    def head(self, e):
        return self._index()["head"].get(e)

    def is_loop(self, e):
        return self.tail(e) is None

    def basepoints_on(self, e):
        return [b for b in self.basepoints if b.edge == e]

    def color_basepoints(self, color):
        return [b for b in self.basepoints if b.color == color]

    @property
    def n_crossings(self):
        return len(self.crossings)

    def next_edge(self, cross_i, slot):
        """Edge leaving the crossing on the same strand as the edge at ``slot``."""
        return self.crossings[cross_i].slots[(slot + 2) % 4]

    def components(self):
        """Link components as lists of edge ids in traversal order."""
        comps = self._cache.get("components")
        if comps is not None:
            return comps
        seen = set()
        comps = []
        for e0 in self.edges:
            if e0 in seen:
                continue
            comp = []
            e = e0
            while e not in seen:
                seen.add(e)
                comp.append(e)
                h = self.head(e)
                if h is None:
                    break
                e = self.next_edge(*h)
            comps.append(comp)
        self._cache["components"] = comps
        return comps

    def with_basepoints(self, basepoints, colors=None):
        return PointedDiagram.build(self.crossings, self.edges, basepoints,
                                    self.colors if colors is None else colors, check_planar=False)

    def signature(self):
        """Hashable description used for equality of diagrams."""
        return (tuple((c.id, c.slots, c.sign) for c in self.crossings), self.edges,
                tuple((b.id, b.edge, b.pos, b.color) for b in self.basepoints), self.colors)

    def __eq__(self, other):
        return isinstance(other, PointedDiagram) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    # -- smoothings ----------------------------------------------------------
    def _slot_idx(self):
        si = self._cache.get("slot_idx")
        if si is None:
            eidx = self._index()["eidx"]
            si = [tuple(eidx[e] for e in c.slots) for c in self.crossings]
            self._cache["slot_idx"] = si
        return si

    def circles_of(self, mask: int):
        """(circle index per edge index, number of circles) for state ``mask``.

        Bit i of ``mask`` is the smoothing of crossing i.  Circles are
        numbered by their smallest edge index.
        """
        n = len(self.edges)
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, (a, b, c, d) in enumerate(self._slot_idx()):
            if (mask >> i) & 1:
                pairs = ((a, d), (b, c))
            else:
                pairs = ((a, b), (c, d))
            for x, y in pairs:
                rx, ry = find(x), find(y)
                if rx != ry:
                    if rx < ry:
                        parent[ry] = rx
                    else:
                        parent[rx] = ry
        label = {}
        out = [0] * n
        for e in range(n):
            r = find(e)
            if r not in label:
                label[r] = len(label)
            out[e] = label[r]
        return out, len(label)


@dataclass(frozen=True)
class ResolutionState:
    eps: tuple
    circles: tuple
    basepoint_circle: Mapping

    @property
    def n_circles(self):
        return len(self.circles)


def _mask_of(d: PointedDiagram, eps) -> int:
    if isinstance(eps, int):
        return eps
    if isinstance(eps, Mapping):
        m = 0
        for cid, v in eps.items():
            if v:
                m |= 1 << d.crossing_index(cid)
        return m
    m = 0
    for i, v in enumerate(eps):
        if v:
            m |= 1 << i
    return m


def resolve(d: PointedDiagram, eps) -> ResolutionState:
    """Kauffman state of ``d`` at ``eps`` (bitmask, sequence or crossing-id map)."""
    mask = _mask_of(d, eps)
    if mask >> d.n_crossings:
        raise DiagramError("state assigns crossings that do not exist")
    circ, k = d.circles_of(mask)
    groups = [[] for _ in range(k)]
    for i, e in enumerate(d.edges):
        groups[circ[i]].append(e)
    bpc = {b.id: circ[d.edge_index(b.edge)] for b in d.basepoints}
    bitsv = tuple((mask >> i) & 1 for i in range(d.n_crossings))
    return ResolutionState(bitsv, tuple(frozenset(g) for g in groups), bpc)


def writhe_shifts(d: PointedDiagram):
    """(n+, n-) counts of positive and negative crossings."""
    # orientation consistency is checked again in case the diagram was built unchecked
    seen_out, seen_in = set(), set()
    for c in d.crossings:
        for s, e in enumerate(c.slots):
            book = seen_out if slot_is_out(c.sign, s) else seen_in
            if e in book:
                raise DiagramError(f"inconsistent orientation: edge {e} at crossing {c.id}")
            book.add(e)
    if seen_out != seen_in:
        raise DiagramError("inconsistent orientation")
    npos = sum(1 for c in d.crossings if c.sign > 0)
    return npos, d.n_crossings - npos


# -- planarity -----------------------------------------------------------------


def is_planar(d: PointedDiagram) -> bool:
    """Check that the PD code embeds in the sphere, one sphere per component."""
    n = len(d.crossings)
    if n == 0:
        return True
    where: dict = {}
    for i, c in enumerate(d.crossings):
        for s, e in enumerate(c.slots):
            where.setdefault(e, []).append((i, s))
    for e, ends in where.items():
        if len(ends) != 2:
            return False

    def alpha(dart):
        e = d.crossings[dart[0]].slots[dart[1]]
        a, b = where[e]
        return b if a == dart else a

    # connected components of the crossing graph
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in where.values():
        ra, rb = find(a[0]), find(b[0])
        if ra != rb:
            parent[ra] = rb
    seen = set()
    faces: dict = {}
    for i in range(n):
        for s in range(4):
            if (i, s) in seen:
                continue
            dart = (i, s)
            while dart not in seen:
                seen.add(dart)
                j, t = alpha(dart)
                dart = (j, (t + 1) % 4)
            r = find(i)
            faces[r] = faces.get(r, 0) + 1
    verts: dict = {}
    for i in range(n):
        r = find(i)
        verts[r] = verts.get(r, 0) + 1
    # V - E + F = 2 with E = 2V
    return all(faces[r] - verts[r] == 2 for r in verts)


# -- the Kauffman bracket oracle -----------------------------------------------


def kauffman_bracket(d: PointedDiagram) -> Laurent:
    """Unnormalized bracket times (-1)^{n-} q^{n+ - 2 n-}, by skein recursion.

    Each crossing is replaced by its two smoothings as arc pairs; once no
    crossings remain the loops are counted on the arc graph.  The recursion
    <D> = <D_0> - q <D_1> and <O u D> = (q + 1/q) <D> matches the grading
    convention of the cube.
    """
    loop = Laurent({1: 1, -1: 1})
    crossings = [c.slots for c in d.crossings]
    edges = list(d.edges)

    def count_loops(arcs):
        adj = {e: [] for e in edges}
        for a, b in arcs:
            adj[a].append(b)
            adj[b].append(a)
        seen = set()
        loops = 0
        for e in edges:
            if e in seen:
                continue
            loops += 1
            stack = [e]
            while stack:
                x = stack.pop()
                if x in seen:
                    continue
                seen.add(x)
                stack.extend(adj[x])
        return loops

    def rec(k, arcs):
        if k == len(crossings):
            out = Laurent({0: 1})
            for _ in range(count_loops(arcs)):
                out = out * loop
            return out
        a, b, c, e = crossings[k]
        zero = rec(k + 1, arcs + [(a, b), (c, e)])
        one = rec(k + 1, arcs + [(a, e), (b, c)])
        return zero - one * Laurent({1: 1})

    npos, nneg = writhe_shifts(d)
    sign = -1 if nneg % 2 else 1
    return rec(0, []) * Laurent({npos - 2 * nneg: sign})


def jones_from_bracket(d: PointedDiagram) -> Laurent:
    return kauffman_bracket(d)


# -- documents -------------------------------------------------------------------


def _sign_of(v):
    if v in (1, "+", "+1", "pos", "positive"):
        return 1
    if v in (-1, "-", "-1", "neg", "negative"):
        return -1
    raise DiagramError(f"bad crossing sign {v!r}")


def parse(doc) -> PointedDiagram:
    """Build a validated diagram from a JSON string or an already-decoded dict."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise DiagramError(f"malformed document: {exc}") from None
    if not isinstance(doc, Mapping):
        raise DiagramError("document must be an object")
    try:
        raw_c = doc.get("crossings", [])
        raw_e = doc.get("edges", [])
        raw_b = doc.get("basepoints", [])
        colors = doc.get("colors")
        crossings = []
        for c in raw_c:
            if not isinstance(c.get("id"), str):
                raise DiagramError(f"malformed crossing id {c.get('id')!r}")
            edges = c.get("edges")
            if not isinstance(edges, list) or len(edges) != 4:
                raise DiagramError(f"crossing {c['id']}: needs four edges")
            crossings.append(Crossing(c["id"], tuple(edges), _sign_of(c.get("sign"))))
        edge_ids = []
        ends = {}
        for e in raw_e:
            eid = e["id"] if isinstance(e, Mapping) else e
            if not isinstance(eid, str) or not eid:
                raise DiagramError(f"malformed edge id {eid!r}")
            edge_ids.append(eid)
            if isinstance(e, Mapping):
                ends[eid] = (e.get("from"), e.get("to"))
        bps = []
        for b in raw_b:
            if not isinstance(b.get("id"), str):
                raise DiagramError(f"malformed basepoint id {b.get('id')!r}")
            if "crossing" in b:
                raise DiagramError(f"basepoint {b['id']} on crossing {b['crossing']}")
            bps.append(Basepoint(b["id"], b.get("edge"), int(b.get("pos", 0)), b.get("color")))
    except (KeyError, TypeError, AttributeError) as exc:
        raise DiagramError(f"malformed document: {exc}") from None
    d = PointedDiagram.build(crossings, edge_ids, bps, colors)
    for eid, (fr, to) in ends.items():
        t, h = d.tail(eid), d.head(eid)
        got = (d.crossings[t[0]].id if t else None, d.crossings[h[0]].id if h else None)
        if (fr, to) != (None, None) and (fr, to) != got:
            raise DiagramError(f"inconsistent orientation: edge {eid} runs {got[0]}->{got[1]}")
    return d


def load(path) -> PointedDiagram:
    return parse(Path(path).read_text())


def to_document(d: PointedDiagram) -> dict:
    edges = []
    for e in d.edges:
        t, h = d.tail(e), d.head(e)
        edges.append({"id": e, "from": d.crossings[t[0]].id if t else None,
                      "to": d.crossings[h[0]].id if h else None})
    return {
        "crossings": [{"id": c.id, "edges": list(c.slots), "sign": "+" if c.sign > 0 else "-"}
                      for c in d.crossings],
        "edges": edges,
        "basepoints": [{"id": b.id, "edge": b.edge, "pos": b.pos, "color": b.color}
                       for b in d.basepoints],
        "colors": list(d.colors),
    }


def dumps(d: PointedDiagram) -> str:
    return json.dumps(to_document(d), indent=1)


# -- braid closures ----------------------------------------------------------------


def from_braid(n_strands: int, word: Sequence[int], basepoints=(), colors=None) -> PointedDiagram:
    """Closure of a braid word (letters +-i for sigma_i^{+-1}, 1-based).

    Edges are named e1, e2, ... in creation order, crossings c1, c2, ....
    ``basepoints`` entries are (id, edge, pos, color).
    """
    counter = iter(range(1, 10 ** 6))
    start = [f"e{next(counter)}" for _ in range(n_strands)]
    cur = list(start)
    edge_order = list(start)
    raw = []
    for k, letter in enumerate(word, 1):
        i = abs(letter) - 1
        if not 0 <= i < n_strands - 1:
            raise DiagramError(f"braid letter {letter} out of range")
        left_in, right_in = cur[i], cur[i + 1]
        new_left, new_right = f"e{next(counter)}", f"e{next(counter)}"
        edge_order += [new_left, new_right]
        if letter > 0:
            # left strand passes over to the right
            slots = [right_in, new_right, new_left, left_in]
        else:
            # left strand passes under to the right
            slots = [left_in, right_in, new_right, new_left]
        raw.append([f"c{k}", slots, 1 if letter > 0 else -1])
        cur[i], cur[i + 1] = new_left, new_right
    rename = {cur[p]: start[p] for p in range(n_strands) if cur[p] != start[p]}
    crossings = [Crossing(cid, tuple(rename.get(e, e) for e in slots), s) for cid, slots, s in raw]
    edges = [e for e in edge_order if e not in rename]
    bps = [Basepoint(*b) for b in basepoints]
    return PointedDiagram.build(crossings, edges, bps, colors)
