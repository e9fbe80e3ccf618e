"""Chain maps for Reidemeister moves by Gaussian elimination.

The larger diagram has a local state with a circle made only of edges inside
the move.  Cancelling the saddles that create or absorb that circle leaves a
reduced complex E together with the inclusion f: E -> C and projection
g: C -> E.  E is then matched generator by generator with the cube of the
smaller diagram (or, for R3, with the reduced complex of the other side).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .cube import ChainMap, CubeComplex
from .f2core import BigradedComplex, ComplexError, F2Matrix, bits, rank, solve

__all__ = ["Reduction", "reduce_move", "move_maps", "r3_map"]


@dataclass
class Reduction:
    complex: BigradedComplex
    f: F2Matrix  # E -> C
    g: F2Matrix  # C -> E
    keys: list  # per E generator: (local state, outside crossings, circles)
    local_states: tuple


def _circle_edges(cube, m):
    groups = {}
    for e, j in enumerate(cube.circ[m]):
        groups.setdefault(j, []).append(e)
    return groups


def _candidates(cube: CubeComplex, local, internal):
    """All (sigma_O, k1, k0) cancellation data for the move."""
    L = local
    out = []
    for sig in range(1 << len(L)):
        m = 0
        for t in range(len(L)):
            if (sig >> t) & 1:
                m |= 1 << L[t]
        groups = _circle_edges(cube, m)
        for j, es in groups.items():
            if all(e in internal for e in es):
                ones = [L[t] for t in range(len(L)) if (sig >> t) & 1]
                zeros = [L[t] for t in range(len(L)) if not (sig >> t) & 1]
                for k1 in ones or [None]:
                    for k0 in zeros or [None]:
                        out.append((m, es[0], k1, k0))
    return out


def _reduce(cube: CubeComplex, local, internal, parent, cand):
    d = cube.diagram
    m_o, e_o, k1, k0 = cand
    lmask = 0
    for i in local:
        lmask |= 1 << i
    outside = [i for i in range(d.n_crossings) if not (lmask >> i) & 1]
    B, D = [], []
    for sub in range(1 << len(outside)):
        mo = 0
        for t, i in enumerate(outside):
            if (sub >> t) & 1:
                mo |= 1 << i
        s = m_o | mo
        j = cube.circ[s][e_o]
        off = cube.offsets[s]
        ks = cube.ncirc[s]
        if k1 is not None:
            s2 = s ^ (1 << k1)
            off2 = cube.offsets[s2]
            B += [off2 + lab for lab in range(1 << cube.ncirc[s2])]
            D += [off + lab for lab in range(1 << ks) if (lab >> j) & 1]
        if k0 is not None:
            s2 = s | (1 << k0)
            off2 = cube.offsets[s2]
            B += [off + lab for lab in range(1 << ks) if not (lab >> j) & 1]
            D += [off2 + lab for lab in range(1 << cube.ncirc[s2])]
    if len(B) != len(D):
        return None
    gone = set(B) | set(D)
    E = [x for x in range(cube.dim) if x not in gone]
    dd = cube.differential
    phi = dd.submatrix(D, B)
    d_de = dd.submatrix(D, E)
    d_eb = dd.submatrix(E, B)
    d_ee = dd.submatrix(E, E)
    X = solve(phi, d_de)  # phi^-1 d_DE
    if X is None:
        return None
    if rank(phi) != len(B):
        return None
    Yt = solve(phi.transpose(), d_eb.transpose())  # (d_EB phi^-1)^T
    if Yt is None:
        return None
    Y = Yt.transpose()
    red = d_ee + d_eb @ X
    n, ne = cube.dim, len(E)
    f_rows = [0] * n
    for k, x in enumerate(E):
        f_rows[x] = 1 << k
    for r, b in enumerate(B):
        f_rows[b] = X.row(r)
    g_rows = [0] * ne
    for k, x in enumerate(E):
        g_rows[k] = 1 << x
    for k in range(ne):
        for c in Y.row_support(k):
            g_rows[k] |= 1 << D[c]
    grad = tuple(cube.gradings[x] for x in E)
    comp = BigradedComplex(grad, red)
    keys = []
    states = set()
    for x in E:
        m, lab = cube.keys[x]
        sig = m & lmask
        states.add(sig)
        out_ids = frozenset(d.crossings[i].id for i in outside if (m >> i) & 1)
        circles = []
        for j, es in _circle_edges(cube, m).items():
            # edges the move did not touch keep their names
            ps = frozenset(p for p in (parent.get(d.edges[e], d.edges[e]) for e in es) if p is not None)
            if ps:
                circles.append((ps, (lab >> j) & 1))
        keys.append((sig, out_ids, frozenset(circles)))
    return Reduction(comp, F2Matrix(n, ne, f_rows), F2Matrix(ne, n, g_rows), keys, tuple(sorted(states)))


def _small_keys(cube: CubeComplex):
    d = cube.diagram
    keys = []
    for m, lab in cube.keys:
        out_ids = frozenset(d.crossings[i].id for i in bits(m))
        circles = []
        for j, es in _circle_edges(cube, m).items():
            circles.append((frozenset(d.edges[e] for e in es), (lab >> j) & 1))
        keys.append((out_ids, frozenset(circles)))
    return keys


def _match(src_keys, dst_keys):
    """Permutation matrix sending generator i to the generator with the same key."""
    where = {k: i for i, k in enumerate(dst_keys)}
    if len(where) != len(dst_keys) or len(set(src_keys)) != len(dst_keys):
        return None
    rows = [0] * len(dst_keys)
    for i, k in enumerate(src_keys):
        t = where.get(k)
        if t is None:
            return None
        rows[t] |= 1 << i
    return F2Matrix(len(dst_keys), len(src_keys), rows)


def reduce_move(big: CubeComplex, small: CubeComplex, local_ids, internal_edges, parent):
    """Return (f, g) with f: C(small) -> C(big), g: C(big) -> C(small).

    ``parent`` sends each edge of the big diagram to its edge in the small
    one, or None for edges inside the move; unlisted edges map to themselves.
    """
    d = big.diagram
    local = [d.crossing_index(c) for c in local_ids]
    internal = {d.edge_index(e) for e in internal_edges}
    skeys = _small_keys(small)
    tried = 0
    for cand in _candidates(big, local, internal):
        red = _reduce(big, local, internal, parent, cand)
        tried += 1
        if red is None or len(red.local_states) != 1:
            continue
        iota = _match([k[1:] for k in red.keys], skeys)  # E -> small
        if iota is None:
            continue
        if iota @ red.complex.differential != small.differential @ iota:
            continue
        inv = iota.transpose()
        return red.f @ inv, iota @ red.g
    raise ComplexError(f"no cancellation identifies the move ({tried} tried)")


def move_maps(big: CubeComplex, small: CubeComplex, local_ids, internal_edges, parent):
    f, g = reduce_move(big, small, local_ids, internal_edges, parent)
    fm = ChainMap(small, big, (0, 0), f).verify()
    gm = ChainMap(big, small, (0, 0), g).verify()
    return fm, gm


def r3_map(src: CubeComplex, dst: CubeComplex, local_ids, internal_src, internal_dst) -> ChainMap:
    """Map C(src) -> C(dst) for a triangle move through both reductions."""
    par_s = {e: (None if e in internal_src else e) for e in src.diagram.edges}
    par_t = {e: (None if e in internal_dst else e) for e in dst.diagram.edges}
    ls = [src.diagram.crossing_index(c) for c in local_ids]
    lt = [dst.diagram.crossing_index(c) for c in local_ids]
    ins = {src.diagram.edge_index(e) for e in internal_src}
    int_ = {dst.diagram.edge_index(e) for e in internal_dst}
    reds_s = [r for r in (_reduce(src, ls, ins, par_s, c) for c in _candidates(src, ls, ins)) if r]
    reds_t = [r for r in (_reduce(dst, lt, int_, par_t, c) for c in _candidates(dst, lt, int_)) if r]

    for rs in reds_s:
        for rt in reds_t:
            if len(rs.local_states) != len(rt.local_states) or rs.complex.dim != rt.complex.dim:
                continue
            for perm in permutations(rt.local_states):
                pi = dict(zip(rs.local_states, perm))
                if any(bin(a).count("1") != bin(b).count("1") for a, b in pi.items()):
                    continue
                src_keys = [(pi[k[0]],) + k[1:] for k in rs.keys]
                iota = _match(src_keys, rt.keys)
                if iota is None:
                    continue
                if iota @ rs.complex.differential != rt.complex.differential @ iota:
                    continue
                m = rt.f @ iota @ rs.g
                return ChainMap(src, dst, (0, 0), m).verify()
    raise ComplexError("triangle move: reduced complexes could not be matched")
