"""Diagram surgery behind the elementary movie events.

Every function takes a PointedDiagram and returns ``(new_diagram, info)``
where ``info`` records what the chain-level maps need: which crossings are
local to a Reidemeister move, which edges lie inside it, and how new edges
descend from old ones.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .diagram import Basepoint, Crossing, DiagramError, PointedDiagram, is_planar

__all__ = [
    "SurgeryError",
    "Info",
    "faces",
    "add_kink",
    "add_bigon",
    "remove_kink",
    "remove_bigon",
    "triangle_move",
    "birth",
    "death",
    "saddle",
    "cup",
    "cap",
    "swap",
    "slide",
    "rename",
]


class SurgeryError(DiagramError):
    pass


@dataclass
class Info:
    kind: str
    local: tuple = ()
    internal: tuple = ()
    internal_after: tuple = ()
    parent: dict = field(default_factory=dict)
    touched_before: tuple = ()
    touched_after: tuple = ()
    edge: str | None = None
    crossing: str | None = None
    color: str | None = None
    crossing_map: dict = field(default_factory=dict)
    edge_map: dict = field(default_factory=dict)
    moving: tuple = ()


def faces(d: PointedDiagram):
    """Faces of the diagram as lists of (crossing index, slot) darts.

    A dart leaves its crossing along the edge in that slot; crossingless
    loops are not included.
    """
    where: dict = {}
    for i, c in enumerate(d.crossings):
        for s, e in enumerate(c.slots):
            where.setdefault(e, []).append((i, s))

    def alpha(dart):
        e = d.crossings[dart[0]].slots[dart[1]]
        a, b = where[e]
        return b if a == dart else a

    seen = set()
    out = []
    for i in range(len(d.crossings)):
        for s in range(4):
            if (i, s) in seen:
                continue
            face = []
            dart = (i, s)
            while dart not in seen:
                seen.add(dart)
                face.append(dart)
                j, t = alpha(dart)
                dart = (j, (t + 1) % 4)
            out.append(face)
    return out


class _Work:
    """Mutable copy of a diagram; ports are (crossing id, slot)."""

    def __init__(self, d: PointedDiagram):
        self.colors = list(d.colors)
        self.cross = {c.id: list(c.slots) for c in d.crossings}
        self.corder = [c.id for c in d.crossings]
        self.eorder = list(d.edges)
        self.tail, self.head = {}, {}
        for e in d.edges:
            t, h = d.tail(e), d.head(e)
            self.tail[e] = (d.crossings[t[0]].id, t[1]) if t else None
            self.head[e] = (d.crossings[h[0]].id, h[1]) if h else None
        self.bps = {e: [] for e in d.edges}
        for b in d.basepoints:
            self.bps[b.edge].append((b.id, b.color))
        self.ids = set(self.cross) | set(self.eorder) | {b.id for b in d.basepoints}

    def fresh(self, prefix):
        top = 0
        pat = re.compile(re.escape(prefix) + r"(\d+)$")
        for x in self.ids:
            m = pat.match(x)
            if m:
                top = max(top, int(m.group(1)))
        name = f"{prefix}{top + 1}"
        self.ids.add(name)
        return name

    def claim(self, name):
        if name in self.ids:
            raise SurgeryError(f"id {name!r} already in use")
        self.ids.add(name)
        return name

    def new_edge(self, name, bps=()):
        self.eorder.append(name)
        self.bps[name] = list(bps)
        self.tail[name] = None
        self.head[name] = None

    def drop_edge(self, e):
        self.eorder.remove(e)
        del self.bps[e], self.tail[e], self.head[e]

    def place(self, e, port, end):
        """Attach ``e`` at ``port``; ``end`` is 'tail' or 'head'."""
        (self.tail if end == "tail" else self.head)[e] = port
        if port is not None:
            self.cross[port[0]][port[1]] = e

    def edge_at(self, port):
        return self.cross[port[0]][port[1]]

    def reverse(self, e):
        self.tail[e], self.head[e] = self.head[e], self.tail[e]
        self.bps[e].reverse()

    def orient(self, keep=()):
        """Make every component consistently oriented.

        In each component the first edge (by ``keep`` order, then diagram
        order) keeps its direction.
        """
        rank = {e: i for i, e in enumerate(list(keep) + [e for e in self.eorder if e not in keep])}
        done = set()
        for e0 in sorted(self.eorder, key=rank.__getitem__):
            if e0 in done:
                continue
            e = e0
            while e not in done:
                done.add(e)
                h = self.head[e]
                if h is None:
                    break
                port = (h[0], (h[1] + 2) % 4)
                nxt = self.edge_at(port)
                if nxt in done:
                    break
                if self.tail[nxt] != port:
                    self.reverse(nxt)
                e = nxt

    def build(self, check=True) -> PointedDiagram:
        # rotate crossings so slot 0 is the incoming under end
        for cid in self.corder:
            slots = self.cross[cid]
            if self.head[slots[0]] != (cid, 0):
                if self.head[slots[2]] != (cid, 2):
                    raise SurgeryError(f"under strand at {cid} is not oriented through")
                new = [slots[(s + 2) % 4] for s in range(4)]
                for s in range(4):
                    e = slots[s]
                    for book in (self.tail, self.head):
                        if book[e] == (cid, s):
                            book[e] = ("__tmp", cid, (s + 2) % 4)
                for book in (self.tail, self.head):
                    for e, p in book.items():
                        if p is not None and p[0] == "__tmp":
                            book[e] = (p[1], p[2])
                self.cross[cid] = new
        crossings = []
        for cid in self.corder:
            slots = self.cross[cid]
            sign = 1 if self.tail[slots[1]] == (cid, 1) else -1
            if sign == 1 and self.head[slots[3]] != (cid, 3):
                raise SurgeryError(f"over strand at {cid} is not oriented through")
            if sign == -1 and (self.head[slots[1]] != (cid, 1) or self.tail[slots[3]] != (cid, 3)):
                raise SurgeryError(f"over strand at {cid} is not oriented through")
            crossings.append(Crossing(cid, tuple(slots), sign))
        bps = []
        for e in self.eorder:
            for k, (bid, col) in enumerate(self.bps[e]):
                bps.append(Basepoint(bid, e, k, col))
        try:
            d = PointedDiagram.build(crossings, self.eorder, bps, self.colors, check_planar=False)
        except DiagramError as exc:
            raise SurgeryError(str(exc)) from None
        if check and not is_planar(d):
            raise SurgeryError("result is not planar")
        return d


def _slot(d: PointedDiagram, where):
    """Parse ``(edge, k)`` and check it against the diagram."""
    e, k = where
    if not d.has_edge(e):
        raise SurgeryError(f"unknown edge {e!r}")
    n = len(d.basepoints_on(e))
    if not 0 <= k <= n:
        raise SurgeryError(f"edge {e} has slots 0..{n}, got {k}")
    return e, k


# ---------------------------------------------------------------- passages


_SLOTS = {
    1: {"u_in": 0, "o_out": 1, "u_out": 2, "o_in": 3},
    -1: {"u_in": 0, "o_in": 1, "u_out": 2, "o_out": 3},
}


def _insert(w: _Work, inserts, parent, new_ids):
    """Cut edges at slots and thread them through new crossings.

    ``inserts`` maps edge -> list of (slot, [(crossing, role), ...]) in
    traversal order.  Returns {(crossing, role): (in_edge, out_edge)} and
    the list of pieces strictly between passages that were requested as
    internal (pieces flanked by passages on both sides).
    """
    ports = {}
    between = {}
    for e, ins in inserts.items():
        bps = w.bps[e]
        tokens = []
        ins = sorted(ins, key=lambda t: t[0])
        j = 0
        for k in range(len(bps) + 1):
            while j < len(ins) and ins[j][0] == k:
                for cr, role in ins[j][1]:
                    tokens.append(("pass", cr, role))
                j += 1
            if k < len(bps):
                tokens.append(("bp", bps[k]))
        loop = w.tail[e] is None
        old_tail, old_head = w.tail[e], w.head[e]
        if loop:
            last = max(i for i, t in enumerate(tokens) if t[0] == "pass")
            tokens = tokens[last + 1:] + tokens[:last + 1]
            # tokens now start right after the final passage; the leading
            # piece wraps around and keeps the id
        pieces = [[e, []]]
        seq = []
        for t in tokens:
            if t[0] == "bp":
                pieces[-1][1].append(t[1])
            else:
                seq.append((t[1], t[2], len(pieces) - 1))
                pieces.append([None, []])
        if loop:
            # the final open piece is the same as the wrap piece
            tail_piece = pieces.pop()
            pieces[0][1] = tail_piece[1] + pieces[0][1]
            seq = [(cr, role, i) for cr, role, i in seq]
        for p in pieces[1:]:
            p[0] = new_ids()
        w.bps[e] = pieces[0][1]
        for name, b in pieces[1:]:
            w.new_edge(name, b)
        names = [p[0] for p in pieces]
        for name in names:
            parent[name] = e
        npieces = len(pieces)
        for idx, (cr, role, before) in enumerate(seq):
            ein = names[before]
            eout = names[(before + 1) % npieces]
            ports[(cr, role)] = (ein, eout)
            if idx > 0:
                between.setdefault(e, []).append(ein)
        if not loop:
            w.tail[e] = old_tail
            w.place(names[-1], old_head, "head")
            if old_tail is not None:
                w.cross[old_tail[0]][old_tail[1]] = e
    return ports, between


def _make_crossing(w: _Work, cid, sign, ports):
    w.cross[cid] = [None] * 4
    w.corder.append(cid)
    tab = _SLOTS[sign]
    uin, uout = ports[(cid, "under")]
    oin, oout = ports[(cid, "over")]
    w.place(uin, (cid, tab["u_in"]), "head")
    w.place(uout, (cid, tab["u_out"]), "tail")
    w.place(oin, (cid, tab["o_in"]), "head")
    w.place(oout, (cid, tab["o_out"]), "tail")


def _check_no_bps(d: PointedDiagram, edges, what):
    for e in edges:
        if d.basepoints_on(e):
            raise SurgeryError(f"{what}: basepoints on internal edge {e}")


def add_kink(d: PointedDiagram, at, sign, first="under", cid=None, loop=None):
    e, k = _slot(d, at)
    if sign not in (1, -1):
        raise SurgeryError("kink sign must be + or -")
    if first not in ("under", "over"):
        raise SurgeryError("kink must start under or over")
    w = _Work(d)
    cid = w.claim(cid) if cid else w.fresh("c")
    other = "over" if first == "under" else "under"
    parent = {}
    names = iter([loop] if loop else [])

    def new_ids():
        nm = next(names, None)
        return w.claim(nm) if nm else w.fresh("e")

    ports, between = _insert(w, {e: [(k, [(cid, first), (cid, other)])]}, parent, new_ids)
    _make_crossing(w, cid, sign, ports)
    internal = tuple(between[e])
    for x in internal:
        parent[x] = None
    d2 = w.build()
    return d2, Info("radd", local=(cid,), internal=internal, parent=parent)


def add_bigon(d: PointedDiagram, over, under, first_sign=None, order=None, cids=None):
    """Push ``over`` across ``under`` creating two crossings.

    ``first_sign`` is the sign of the first crossing met along the over
    strand; ``order`` is 'same' when the under strand meets that crossing
    first too.  Unspecified choices are settled by planarity.
    """
    a, i = _slot(d, over)
    b, j = _slot(d, under)
    signs = [first_sign] if first_sign else [1, -1]
    orders = [order] if order else ["same", "opp"]
    found = []
    for s in signs:
        for o in orders:
            try:
                res = _bigon(d, a, i, b, j, s, o, cids)
            except SurgeryError:
                continue
            found.append((s, o, res))
    if not found:
        raise SurgeryError(f"no planar bigon between {a}:{i} and {b}:{j}")
    if len(found) > 1:
        opts = ", ".join(f"{'L' if s > 0 else 'R'} {o}" for s, o, _ in found)
        raise SurgeryError(f"ambiguous bigon, specify one of: {opts}")
    return found[0][2]


def _bigon(d, a, i, b, j, s, o, cids):
    w = _Work(d)
    if cids:
        c1, c2 = (w.claim(x) for x in cids)
    else:
        c1 = w.fresh("c")
        c2 = w.fresh("c")
    under_seq = [(c1, "under"), (c2, "under")] if o == "same" else [(c2, "under"), (c1, "under")]
    inserts = {}
    inserts.setdefault(a, []).append((i, [(c1, "over"), (c2, "over")]))
    inserts.setdefault(b, []).append((j, under_seq))
    parent = {}
    ports, between = _insert(w, inserts, parent, lambda: w.fresh("e"))
    _make_crossing(w, c1, s, ports)
    _make_crossing(w, c2, -s, ports)
    # the pieces strictly between the two passages on each strand
    internal = []
    for cr_a, cr_b in ((c1, c2),):
        internal.append(ports[(cr_a, "over")][1])
    first_u, second_u = under_seq[0][0], under_seq[1][0]
    internal.append(ports[(first_u, "under")][1])
    if ports[(c2, "over")][0] != internal[0] or ports[(second_u, "under")][0] != internal[1]:
        raise SurgeryError("bigon strands interleave")
    for x in internal:
        parent[x] = None
    d2 = w.build()
    return d2, Info("radd", local=(c1, c2), internal=tuple(internal), parent=parent)


def _excise(d: PointedDiagram, local, internal):
    """Delete crossings ``local`` and edges ``internal``; merge what remains."""
    local = set(local)
    internal = set(internal)
    _check_no_bps(d, internal, "removal")
    w = _Work(d)
    parent = {}
    # edges that survive: not internal
    keep = [e for e in d.edges if e not in internal]

    def step(e):
        """Edge following ``e`` along its strand, or None when leaving the region."""
        h = w.head[e]
        if h is None or h[0] not in local:
            return None
        return w.cross[h[0]][(h[1] + 2) % 4]

    chains = []
    used = set()
    starts = [e for e in keep if w.tail[e] is None or w.tail[e][0] not in local]
    for e0 in starts:
        chain = [e0]
        used.add(e0)
        e = e0
        while True:
            nxt = step(e)
            if nxt is None:
                break
            if nxt not in internal:
                chain.append(nxt)
                used.add(nxt)
            e = nxt
        chains.append(("open", chain))
    for e0 in keep:
        if e0 in used:
            continue
        chain = [e0]
        used.add(e0)
        e = e0
        while True:
            nxt = step(e)
            if nxt is None:
                raise SurgeryError("broken strand during removal")
            if nxt == e0:
                break
            if nxt not in internal:
                chain.append(nxt)
                used.add(nxt)
            e = nxt
        chains.append(("loop", chain))
    heads = {}
    for kind, chain in chains:
        first = chain[0]
        bps = []
        for x in chain:
            bps += w.bps[x]
            parent[x] = first
        heads[first] = (kind, chain[-1], bps)
    for x in internal:
        parent[x] = None
    new_head = {}
    for first, (kind, last, bps) in heads.items():
        new_head[first] = None if kind == "loop" else w.head[last]
    tails = {first: (None if heads[first][0] == "loop" else w.tail[first]) for first in heads}
    for cid in local:
        del w.cross[cid]
        w.corder.remove(cid)
    for e in list(w.eorder):
        if e not in heads:
            w.drop_edge(e)
    for first, (kind, last, bps) in heads.items():
        w.bps[first] = bps
        w.tail[first] = tails[first]
        w.head[first] = new_head[first]
        if tails[first] is not None:
            w.cross[tails[first][0]][tails[first][1]] = first
        if new_head[first] is not None:
            w.cross[new_head[first][0]][new_head[first][1]] = first
    return w, parent


def remove_kink(d: PointedDiagram, cid, loop=None):
    i = d.crossing_index(cid)
    mono = [f for f in faces(d) if len(f) == 1 and f[0][0] == i]
    cands = [d.crossings[i].slots[f[0][1]] for f in mono]
    if loop is not None:
        if loop not in cands:
            raise SurgeryError(f"edge {loop} does not bound a kink at {cid}")
        cands = [loop]
    if not cands:
        raise SurgeryError(f"crossing {cid} is not a kink")
    if len(set(cands)) > 1:
        raise SurgeryError(f"kink at {cid} is ambiguous; name the loop edge ({', '.join(cands)})")
    w, parent = _excise(d, (cid,), (cands[0],))
    return w.build(), Info("rdel", local=(cid,), internal=(cands[0],), parent=parent)


def remove_bigon(d: PointedDiagram, c1, c2, edges=None):
    i, j = d.crossing_index(c1), d.crossing_index(c2)
    if d.crossings[i].sign == d.crossings[j].sign:
        raise SurgeryError(f"{c1} and {c2} have equal signs")
    options = []
    for f in faces(d):
        if len(f) == 2 and {f[0][0], f[1][0]} == {i, j}:
            es = tuple(d.crossings[x].slots[s] for x, s in f)
            # both bigon edges must stay on one level: the same strand is over at both ends
            ok = True
            for e in es:
                t, h = d.tail(e), d.head(e)
                if (t[1] % 2) != (h[1] % 2):
                    ok = False
            if ok and not any(b.edge in es for b in d.basepoints):
                options.append(es)
    if edges is not None:
        options = [o for o in options if set(o) == set(edges)]
    if not options:
        raise SurgeryError(f"{c1}, {c2} do not bound a removable bigon")
    if len(options) > 1:
        raise SurgeryError(f"bigon at {c1}, {c2} is ambiguous; name its edges")
    w, parent = _excise(d, (c1, c2), options[0])
    return w.build(), Info("rdel", local=(c1, c2), internal=options[0], parent=parent)


def triangle_move(d: PointedDiagram, c1, c2, c3):
    """Reidemeister III across the triangle face spanned by three crossings."""
    idx = {d.crossing_index(c) for c in (c1, c2, c3)}
    if len(idx) != 3:
        raise SurgeryError("r3 needs three distinct crossings")
    tri = [f for f in faces(d) if len(f) == 3 and {x for x, _ in f} == idx]
    errors = []
    for f in tri:
        try:
            return _triangle(d, f)
        except SurgeryError as exc:
            errors.append(str(exc))
    if not tri:
        raise SurgeryError(f"{c1}, {c2}, {c3} do not bound a triangle")
    raise SurgeryError("; ".join(errors))


def _triangle(d, face):
    tri_edges = [d.crossings[x].slots[s] for x, s in face]
    if len(set(tri_edges)) != 3:
        raise SurgeryError("degenerate triangle")
    _check_no_bps(d, tri_edges, "r3")
    strands = []
    levels = []
    for t in tri_edges:
        (ia, sa), (ib, sb) = d.tail(t), d.head(t)
        ca, cb = d.crossings[ia], d.crossings[ib]
        x = ca.slots[(sa + 2) % 4]
        y = cb.slots[(sb + 2) % 4]
        strands.append(dict(t=t, a=ca.id, a_in=(sa + 2) % 4, a_out=sa, b=cb.id, b_in=sb,
                            b_out=(sb + 2) % 4, x=x, y=y))
        levels.append((sa % 2, sb % 2))  # odd slot means over strand
    if sorted(lv[0] + lv[1] for lv in levels) != [0, 1, 2]:
        raise SurgeryError("triangle is alternating; r3 does not apply")
    w = _Work(d)
    for st in strands:
        w.cross[st["a"]][st["a_in"]] = None
        w.cross[st["a"]][st["a_out"]] = None
        w.cross[st["b"]][st["b_in"]] = None
        w.cross[st["b"]][st["b_out"]] = None
    for st in strands:
        a, b = st["a"], st["b"]
        # the strand now meets b first, then a, using the same ports
        w.place(st["x"], (b, st["b_in"]), "head")
        w.place(st["t"], (b, st["b_out"]), "tail")
        w.place(st["t"], (a, st["a_in"]), "head")
        w.place(st["y"], (a, st["a_out"]), "tail")
    d2 = w.build()
    return d2, Info("r3", local=tuple(sorted({st["a"] for st in strands} | {st["b"] for st in strands},
                                               key=d.crossing_index)),
                    internal=tuple(tri_edges), internal_after=tuple(tri_edges))


# ------------------------------------------------------------------ morse


def birth(d: PointedDiagram, name=None):
    w = _Work(d)
    e = w.claim(name) if name else w.fresh("e")
    w.new_edge(e)
    return w.build(check=False), Info("birth", edge=e)


def death(d: PointedDiagram, e):
    if not d.has_edge(e):
        raise SurgeryError(f"unknown edge {e!r}")
    if not d.is_loop(e):
        raise SurgeryError(f"edge {e} is not a crossingless circle")
    if d.basepoints_on(e):
        raise SurgeryError(f"circle {e} still carries basepoints")
    w = _Work(d)
    w.drop_edge(e)
    return w.build(check=False), Info("death", edge=e)


def saddle(d: PointedDiagram, p, q, variant=None):
    """Band between slot ``p`` and slot ``q``.

    'orient' joins the strands compatibly with their directions, 'twist'
    joins them head to head and reorients what it must.  Without a variant
    the orientable band is tried first.
    """
    a, i = _slot(d, p)
    b, j = _slot(d, q)
    if a == b and i == j:
        raise SurgeryError("saddle needs two distinct attaching points")
    errors = []
    for v in ([variant] if variant else ["orient", "twist"]):
        try:
            return _saddle(d, a, i, b, j, v)
        except SurgeryError as exc:
            errors.append(f"{v}: {exc}")
    raise SurgeryError(f"no planar band between {a}:{i} and {b}:{j} ({'; '.join(errors)})")


def _saddle(d, a, i, b, j, variant):
    w = _Work(d)
    # cut points; P on a at slot i, Q on b at slot j
    cuts = {}
    cuts.setdefault(a, []).append((i, "P"))
    cuts.setdefault(b, []).append((j, "Q"))
    segs = []  # [start, end, bps, origin edge]
    for e, cl in cuts.items():
        cl = sorted(cl)
        bps = w.bps[e]
        marks = [k for k, _ in cl]
        names = [n for _, n in cl]
        t0 = ("port", w.tail[e]) if w.tail[e] else None
        h0 = ("port", w.head[e]) if w.head[e] else None
        pieces = []
        for idx in range(len(cl) + 1):
            lo = marks[idx - 1] if idx > 0 else 0
            hi = marks[idx] if idx < len(cl) else len(bps)
            start = ("cut", names[idx - 1], "+") if idx > 0 else t0
            end = ("cut", names[idx], "-") if idx < len(cl) else h0
            pieces.append([start, end, list(bps[lo:hi]), e])
        if t0 is None:
            # loop: glue last piece onto first
            last = pieces.pop()
            pieces[0] = [last[0], pieces[0][1], last[2] + pieces[0][2], e]
        segs += pieces
    if variant == "orient":
        join = {("P", "-"): ("Q", "+"), ("Q", "+"): ("P", "-"), ("Q", "-"): ("P", "+"), ("P", "+"): ("Q", "-")}
    else:
        join = {("P", "-"): ("Q", "-"), ("Q", "-"): ("P", "-"), ("P", "+"): ("Q", "+"), ("Q", "+"): ("P", "+")}
    end_of = {}
    for n, s in enumerate(segs):
        for which in (0, 1):
            x = s[which]
            if x is not None and x[0] == "cut":
                end_of[(x[1], x[2])] = (n, which)
    # build chains
    used = set()
    chains = []

    def walk(n, forward):
        chain = []
        while True:
            used.add(n)
            chain.append((n, forward))
            far = segs[n][1] if forward else segs[n][0]
            if far is None or far[0] == "port":
                return chain, far
            m, which = end_of[join[(far[1], far[2])]]
            if m in used:
                return chain, "cycle"
            n, forward = m, which == 0

    for n, s in enumerate(segs):
        if n in used:
            continue
        if s[0] is not None and s[0][0] == "port":
            chains.append(walk(n, True))
        elif s[1] is not None and s[1][0] == "port":
            ch, far = walk(n, False)
            chains.append((ch, far))
    for n in range(len(segs)):
        if n not in used:
            chains.append(walk(n, True))
    # remove old edges, lay down the chains
    old = {a, b}
    for e in old:
        w.drop_edge(e)
    taken = set()
    new_edges = []
    for ch, far in chains:
        n0, fw0 = ch[0]
        start = segs[n0][0] if fw0 else segs[n0][1]
        name = None
        for n, _ in ch:
            o = segs[n][3]
            if o not in taken:
                name = o
                break
        if name is None:
            name = w.fresh("e")
        taken.add(name)
        bps = []
        for n, fw in ch:
            bps += segs[n][2] if fw else list(reversed(segs[n][2]))
        w.new_edge(name, bps)
        tail = start[1] if start is not None and start[0] == "port" else None
        head = far[1] if far not in (None, "cycle") and far[0] == "port" else None
        if (tail is None) != (head is None):
            raise SurgeryError("band leaves an open strand")
        w.place(name, tail, "tail")
        w.place(name, head, "head")
        new_edges.append(name)
    # restore original order as far as possible
    order = [e for e in d.edges if e in w.eorder] + [e for e in w.eorder if e not in d.edges]
    w.eorder = order
    w.orient(keep=[e for e in d.edges if e in w.eorder])
    d2 = w.build()
    return d2, Info("saddle", touched_before=tuple(sorted(old, key=d.edges.index)),
                    touched_after=tuple(new_edges))


# ------------------------------------------------------------- basepoints


def cup(d: PointedDiagram, color, at, ids=None):
    if color not in d.colors:
        raise SurgeryError(f"unknown color {color!r}")
    e, k = _slot(d, at)
    w = _Work(d)
    if ids:
        p, q = (w.claim(x) for x in ids)
    else:
        p, q = w.fresh("p"), w.fresh("p")
    w.bps[e][k:k] = [(p, color), (q, color)]
    return w.build(check=False), Info("cup", edge=e)


def _adjacent(d, p, q, what):
    bp, bq = d.basepoint(p), d.basepoint(q)
    if bp.edge != bq.edge or abs(bp.pos - bq.pos) != 1:
        raise SurgeryError(f"{what}: {p} and {q} are not adjacent on one edge")
    return bp, bq


def cap(d: PointedDiagram, p, q):
    bp, bq = _adjacent(d, p, q, "cap")
    if bp.color != bq.color:
        raise SurgeryError(f"cap: {p} and {q} have different colors")
    w = _Work(d)
    w.bps[bp.edge] = [x for x in w.bps[bp.edge] if x[0] not in (p, q)]
    return w.build(check=False), Info("cap", edge=bp.edge)


def swap(d: PointedDiagram, p, q):
    bp, bq = _adjacent(d, p, q, "swap")
    w = _Work(d)
    lst = w.bps[bp.edge]
    lst[bp.pos], lst[bq.pos] = lst[bq.pos], lst[bp.pos]
    return w.build(check=False), Info("swap", edge=bp.edge)


def slide(d: PointedDiagram, p, cid, direction=None):
    """Move basepoint ``p`` across the adjacent crossing ``cid``."""
    b = d.basepoint(p)
    i = d.crossing_index(cid)
    on = d.basepoints_on(b.edge)
    fwd = d.head(b.edge) is not None and d.head(b.edge)[0] == i and b.pos == len(on) - 1
    back = d.tail(b.edge) is not None and d.tail(b.edge)[0] == i and b.pos == 0
    if direction == "fwd":
        back = False
    elif direction == "back":
        fwd = False
    if not (fwd or back):
        raise SurgeryError(f"slide: {p} is not next to crossing {cid}")
    w = _Work(d)
    w.bps[b.edge] = [x for x in w.bps[b.edge] if x[0] != p]
    if fwd:
        s = d.head(b.edge)[1]
        e2 = d.crossings[i].slots[(s + 2) % 4]
        w.bps[e2].insert(0, (p, b.color))
    else:
        s = d.tail(b.edge)[1]
        e2 = d.crossings[i].slots[(s + 2) % 4]
        w.bps[e2].append((p, b.color))
    return w.build(check=False), Info("slide", crossing=cid, color=b.color, edge=e2)


def rename(d: PointedDiagram, mapping: dict):
    """Rename crossing, edge and basepoint ids."""
    w = _Work(d)
    cm = {k: v for k, v in mapping.items() if k in w.cross}
    em = {k: v for k, v in mapping.items() if k in w.bps}
    bm = {k: v for k, v in mapping.items() if k not in cm and k not in em}
    known = {b.id for b in d.basepoints}
    for k in bm:
        if k not in known:
            raise SurgeryError(f"rename: unknown id {k!r}")
    crossings = [Crossing(cm.get(c.id, c.id), tuple(em.get(e, e) for e in c.slots), c.sign)
                 for c in d.crossings]
    edges = [em.get(e, e) for e in d.edges]
    bps = [Basepoint(bm.get(b.id, b.id), em.get(b.edge, b.edge), b.pos, b.color) for b in d.basepoints]
    try:
        d2 = PointedDiagram.build(crossings, edges, bps, d.colors, check_planar=False)
    except DiagramError as exc:
        raise SurgeryError(f"rename: {exc}") from None
    return d2, Info("relabel", crossing_map=cm, edge_map=em)
