"""Movie scripts and the chain maps of their elementary events.

A script is plain text: the first meaningful line is ``diagram PATH``, an
optional ``colors ...`` line follows, then one event per line.  ``#`` starts
a comment.  Positions are written ``edge:slot``; a bare edge means slot 0.

    planar [old=new ...]
    r1+ E:k +|- [under|over] [c=ID] [loop=ID]
    r1- C [LOOP]
    r2 A:i B:j [L|R] [same|opp]        A passes over B
    r2- C1 C2 [E1 E2]
    r3 C1 C2 C3
    birth [E]        death E
    saddle A:i B:j [orient|twist]
    cup COLOR E:k [E:k+1] [P Q]
    cap P Q          swap P Q
    slide P C [fwd|back]
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources

from . import surgery
from .cube import ChainMap, CubeComplex, build_cube, relabel_map, saddle_table
from .diagram import DiagramError, PointedDiagram, load, writhe_shifts
from .f2core import ComplexError, F2Matrix
from .reidemeister import move_maps, r3_map

__all__ = [
    "MovieError",
    "MovieEvent",
    "MovieScript",
    "parse_script",
    "load_script",
    "apply_event",
    "step",
    "event_map",
    "compile_plain",
    "Run",
    "run",
    "bundled_diagram",
    "bundled_movie",
]

KINDS = ("planar", "r1+", "r1-", "r2", "r2-", "r3", "birth", "death", "saddle",
         "cup", "cap", "swap", "slide")


class MovieError(ValueError):
    pass


@dataclass(frozen=True)
class MovieEvent:
    kind: str
    args: tuple
    options: tuple = ()
    line: int = 0

    def opt(self, key, default=None):
        return dict(self.options).get(key, default)

    def __str__(self):
        parts = [self.kind] + [a if isinstance(a, str) else f"{a[0]}:{a[1]}" for a in self.args]
        parts += [f"{k}={v}" for k, v in self.options]
        return " ".join(parts)


@dataclass
class MovieScript:
    diagram: PointedDiagram
    events: list
    source: str = ""
    colors: tuple | None = None


def _data_path(*parts):
    return resources.files("dkh").joinpath("data", *parts)


def bundled_diagram(name) -> PointedDiagram:
    p = _data_path("diagrams", name if name.endswith(".json") else name + ".json")
    if not p.is_file():
        raise MovieError(f"no bundled diagram {name!r}")
    return load(p)


def bundled_movie(name) -> "MovieScript":
    p = _data_path("movies", name if name.endswith(".mov") else name + ".mov")
    if not p.is_file():
        raise MovieError(f"no bundled movie {name!r}")
    return parse_script(p.read_text(), base=None, source=name)


def _token(tok):
    if ":" in tok:
        e, _, k = tok.rpartition(":")
        try:
            return (e, int(k))
        except ValueError:
            raise MovieError(f"bad position {tok!r}") from None
    return tok


def parse_script(text: str, base=None, source="") -> MovieScript:
    diagram = None
    colors = None
    events = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if diagram is None:
            if head != "diagram" or len(rest) != 1:
                raise MovieError(f"line {n}: script must start with 'diagram PATH'")
            diagram = _resolve_diagram(rest[0], base)
            continue
        if head == "colors":
            if events:
                raise MovieError(f"line {n}: colors must come before events")
            colors = tuple(rest)
            continue
        if head not in KINDS:
            raise MovieError(f"line {n}: unknown event {head!r}")
        args, opts = [], []
        for tok in rest:
            if "=" in tok:
                k, _, v = tok.partition("=")
                opts.append((k, v))
            else:
                args.append(_token(tok))
        events.append(MovieEvent(head, tuple(args), tuple(opts), n))
    if diagram is None:
        raise MovieError("empty script")
    if colors is not None:
        extra = [c for c in diagram.colors if c not in colors]
        used = {b.color for b in diagram.basepoints}
        if any(c in used for c in extra):
            raise MovieError("colors line drops a color that is in use")
        diagram = PointedDiagram.build(diagram.crossings, diagram.edges, diagram.basepoints,
                                       list(colors), check_planar=False)
    return MovieScript(diagram, events, source, colors)


def _resolve_diagram(ref, base):
    if base is not None:
        p = os.path.join(base, ref)
        if os.path.exists(p):
            return load(p)
    if os.path.isabs(ref) and os.path.exists(ref):
        return load(ref)
    return bundled_diagram(os.path.basename(ref))


def load_script(path) -> MovieScript:
    with open(path) as fh:
        text = fh.read()
    return parse_script(text, base=os.path.dirname(os.path.abspath(path)), source=str(path))


def _pos(a, ev):
    if isinstance(a, tuple):
        return a
    if isinstance(a, str):
        return (a, 0)
    raise MovieError(f"line {ev.line}: expected a position")


def _name(a, ev):
    if not isinstance(a, str):
        raise MovieError(f"line {ev.line}: expected a name, got {a}")
    return a


def step(d: PointedDiagram, ev: MovieEvent):
    """Apply one event; returns (new diagram, surgery info)."""
    k, a = ev.kind, list(ev.args)
    try:
        if k == "planar":
            return surgery.rename(d, dict(ev.options))
        if k == "r1+":
            sign = next(({"+": 1, "-": -1}[x] for x in a[1:] if x in ("+", "-")), None)
            if sign is None:
                raise MovieError(f"line {ev.line}: r1+ needs a sign")
            first = next((x for x in a[1:] if x in ("under", "over")), "under")
            return surgery.add_kink(d, _pos(a[0], ev), sign, first, ev.opt("c"), ev.opt("loop"))
        if k == "r1-":
            return surgery.remove_kink(d, _name(a[0], ev), a[1] if len(a) > 1 else None)
        if k == "r2":
            side = next((x for x in a[2:] if x in ("L", "R")), None)
            order = next((x for x in a[2:] if x in ("same", "opp")), None)
            cids = ev.opt("c")
            return surgery.add_bigon(d, _pos(a[0], ev), _pos(a[1], ev),
                                     {"L": 1, "R": -1}.get(side), order,
                                     cids.split(",") if cids else None)
        if k == "r2-":
            edges = a[2:4] if len(a) >= 4 else None
            return surgery.remove_bigon(d, _name(a[0], ev), _name(a[1], ev), edges)
        if k == "r3":
            return surgery.triangle_move(d, *[_name(x, ev) for x in a[:3]])
        if k == "birth":
            return surgery.birth(d, a[0] if a else None)
        if k == "death":
            return surgery.death(d, _name(a[0], ev))
        if k == "saddle":
            var = next((x for x in a[2:] if x in ("orient", "twist")), None)
            return surgery.saddle(d, _pos(a[0], ev), _pos(a[1], ev), var)
        if k == "cup":
            color = _name(a[0], ev)
            pos = _pos(a[1], ev)
            rest = a[2:]
            if rest and isinstance(rest[0], tuple):
                if rest[0] != (pos[0], pos[1] + 1):
                    raise MovieError(f"line {ev.line}: cup points must be adjacent")
                rest = rest[1:]
            ids = rest[:2] if len(rest) >= 2 else None
            return surgery.cup(d, color, pos, ids)
        if k == "cap":
            return surgery.cap(d, _name(a[0], ev), _name(a[1], ev))
        if k == "swap":
            return surgery.swap(d, _name(a[0], ev), _name(a[1], ev))
        if k == "slide":
            direction = next((x for x in a[2:] if x in ("fwd", "back")), None)
            return surgery.slide(d, _name(a[0], ev), _name(a[1], ev), direction)
    except (IndexError, StopIteration):
        raise MovieError(f"line {ev.line}: malformed '{ev}'") from None
    except (DiagramError, KeyError) as exc:
        raise MovieError(f"line {ev.line}: {ev.kind}: {exc}") from None
    raise MovieError(f"line {ev.line}: unknown event {k!r}")


def apply_event(d: PointedDiagram, ev: MovieEvent) -> PointedDiagram:
    return step(d, ev)[0]


# ------------------------------------------------------------------ maps


def _carry(src: CubeComplex, dst: CubeComplex, ms, md, skip_edges=(), skip_circles=()):
    """Target circle of each source circle found through shared edge ids."""
    ds, dt = src.diagram, dst.diagram
    carry = [-1] * src.ncirc[ms]
    for e, j in enumerate(src.circ[ms]):
        name = ds.edges[e]
        if j in skip_circles or name in skip_edges or not dt.has_edge(name):
            continue
        t = dst.circ[md][dt.edge_index(name)]
        if carry[j] not in (-1, t):
            raise ComplexError("circles do not correspond")
        carry[j] = t
    return carry


def _same_masks(src: CubeComplex, dst: CubeComplex):
    ds, dt = src.diagram, dst.diagram
    if [c.id for c in ds.crossings] != [c.id for c in dt.crossings]:
        raise ComplexError("event changed the crossings")
    return range(1 << ds.n_crossings)


def _shift_bidegree(src: CubeComplex, dst: CubeComplex, dq):
    ps, ns = writhe_shifts(src.diagram)
    pt, nt = writhe_shifts(dst.diagram)
    return (ns - nt, dq + (pt - ps) - 2 * (nt - ns))


def morse_map(src: CubeComplex, dst: CubeComplex, info) -> ChainMap:
    rows = [0] * dst.dim
    if info.kind == "birth":
        for m in _same_masks(src, dst):
            carry = _carry(src, dst, m, m)
            so, to = src.offsets[m], dst.offsets[m]
            for lab in range(1 << src.ncirc[m]):
                t = 0
                for j in range(src.ncirc[m]):
                    if (lab >> j) & 1:
                        t |= 1 << carry[j]
                rows[to + t] |= 1 << (so + lab)
        dq = 1
    elif info.kind == "death":
        e = src.diagram.edge_index(info.edge)
        for m in _same_masks(src, dst):
            carry = _carry(src, dst, m, m, skip_edges=(info.edge,))
            dead = src.circ[m][e]
            so, to = src.offsets[m], dst.offsets[m]
            for lab in range(1 << src.ncirc[m]):
                if not (lab >> dead) & 1:
                    continue
                t = 0
                for j in range(src.ncirc[m]):
                    if j != dead and (lab >> j) & 1:
                        t |= 1 << carry[j]
                rows[to + t] |= 1 << (so + lab)
        dq = 1
    else:  # saddle
        ds, dt = src.diagram, dst.diagram
        before = [ds.edge_index(e) for e in info.touched_before]
        after = [dt.edge_index(e) for e in info.touched_after]
        for m in _same_masks(src, dst):
            st = sorted({src.circ[m][e] for e in before})
            tt = sorted({dst.circ[m][e] for e in after})
            carry = _carry(src, dst, m, m, skip_circles=st)
            if len(st) == 1 and len(tt) == 1:
                continue  # a Moebius band between single circles is zero
            table = saddle_table(src.ncirc[m], carry, st, tt)
            so, to = src.offsets[m], dst.offsets[m]
            for lab, images in enumerate(table):
                for lab2 in images:
                    rows[to + lab2] ^= 1 << (so + lab)
        dq = -1
    bideg = _shift_bidegree(src, dst, dq)
    return ChainMap(src, dst, bideg, F2Matrix(dst.dim, src.dim, rows))


def event_map(src: CubeComplex, dst: CubeComplex, ev: MovieEvent, info) -> ChainMap:
    """Plain chain map C(src) -> C(dst) of one event."""
    k = info.kind
    if k in ("relabel", "cup", "cap", "swap", "slide"):
        m = relabel_map(src, dst, info.crossing_map, info.edge_map)
        return ChainMap(src, dst, (0, 0), m)
    if k in ("birth", "death", "saddle"):
        return morse_map(src, dst, info)
    if k == "radd":
        f, _ = move_maps(dst, src, info.local, info.internal, info.parent)
        return f
    if k == "rdel":
        _, g = move_maps(src, dst, info.local, info.internal, info.parent)
        return g
    if k == "r3":
        return r3_map(src, dst, info.local, info.internal, info.internal_after)
    raise MovieError(f"no map for event kind {k!r}")


@dataclass
class Run:
    """Diagrams, cubes, surgery records and plain maps along a movie."""

    script: MovieScript
    diagrams: list
    cubes: list
    infos: list
    maps: list = field(default_factory=list)

    @property
    def source(self):
        return self.cubes[0]

    @property
    def target(self):
        return self.cubes[-1]


def run(script: MovieScript, maps=True) -> Run:
    d = script.diagram
    diagrams, infos = [d], []
    for ev in script.events:
        d, info = step(d, ev)
        diagrams.append(d)
        infos.append(info)
    cubes = [build_cube(x) for x in diagrams]
    r = Run(script, diagrams, cubes, infos)
    if maps:
        for i, ev in enumerate(script.events):
            try:
                r.maps.append(event_map(cubes[i], cubes[i + 1], ev, infos[i]).verify())
            except ComplexError as exc:
                raise MovieError(f"line {ev.line}: {ev.kind}: {exc}") from None
    return r


def compile_plain(script: MovieScript) -> ChainMap:
    """Composite chain map C(D_0) -> C(D_n) of the whole movie."""
    r = run(script)
    total = ChainMap(r.source, r.source, (0, 0), F2Matrix.identity(r.source.dim))
    for m in r.maps:
        total = total.then(m)
    return total
