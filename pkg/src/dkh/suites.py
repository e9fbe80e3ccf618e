"""Named acceptance suites.

Each check returns a :class:`Result` whose witness is plain JSON data, so a
report built from the same inputs is byte-identical between runs.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .collapse import (ColorSurjection, collapse_square, diagonal_action, homotopy_inverse, psi,
                       pulled_action, recolor, sigma_bar)
from .cube import ChainMap, build_cube, verify_lemma_2_3
from .derived import (FX2, RX, TRIVIAL, chain_map_space, collapse, common_window,
                      hkh, homotopy_solver, induced_map, quasi_isomorphism, rank_table,
                      table_records)
from .diagram import kauffman_bracket, to_document
from .f2core import BigradedComplex, F2Matrix, graded_euler_characteristic, homology
from .movie import MovieScript, bundled_diagram, bundled_movie, compile_plain, run
from .pointed import pointed_cobordism_map, pointed_complex
from .resolution import ValidityWindow, resolve, resolved_run, xi_multiplication

__all__ = ["Result", "SUITES", "run_suite", "suite_names", "CORPUS", "MOVES"]

CORPUS = ["unknot0", "unknot0_p", "unknot0_2c", "unknot1", "unknot1_sep", "unknot1_p", "unknot1_po",
          "u2", "u2_p", "hopf_pos", "hopf_neg", "hopf_p", "braid121_p", "braid121_2c", "trefoil",
          "figure8"]
MOVES = ["A", "B_II", "B_III", "F_birth", "F_band", "F_death", "K_reconnect", "K_loop", "sweep",
         "R1_inverse", "R2_inverse"]
TWO_TO_ONE = ColorSurjection.of({"x1": "x", "x2": "x"}, ("x1", "x2"), ("x",))


@dataclass
class Result:
    name: str
    passed: bool
    witness: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def status(self):
        return "pass" if self.passed else "fail"

    def record(self):
        return {"name": self.name, "status": self.status, "witness": self.witness}


def _hq(table):
    return [{"bidegree": [h, q], "dim": n} for (h, q), n in sorted(table.items())]


def _ranks(ranks):
    return [{"bidegree": [h, q], "rank": n} for (h, q), n in sorted(ranks.items())]


# ---------------------------------------------------------------- criterion 1


def slide_identities():
    out = {}
    ok = True
    for name in ("trefoil", "figure8", "hopf_pos", "hopf_neg"):
        cube = build_cube(bundled_diagram(name))
        for c in cube.diagram.crossings:
            rep = verify_lemma_2_3(cube, c.id)
            bad = {k: v for k, v in rep.items() if v is not None}
            out[f"{name}/{c.id}"] = {"identities": len(rep), "violations": bad}
            ok &= not bad
    return ok, {"crossings": out}


# ---------------------------------------------------------------- criterion 2


def euler_oracle():
    rows = {}
    ok = True
    for name in CORPUS:
        d = bundled_diagram(name)
        chi = graded_euler_characteristic(build_cube(d))
        br = kauffman_bracket(d)
        same = chi == br
        ok &= same
        rows[name] = {"agree": same, "chi": {str(k): v for k, v in sorted(chi.items()) if v}}
    return ok, {"diagrams": rows}


# ---------------------------------------------------------------- criterion 3


def _shuffled(c, seed):
    rng = random.Random(seed)
    perm = list(range(c.dim))
    rng.shuffle(perm)  # new position of old generator i is perm[i]
    rows = [0] * c.dim
    for t in range(c.dim):
        for s in c.differential.row_support(t):
            rows[perm[t]] |= 1 << perm[s]
    grads = [None] * c.dim
    for i, g in enumerate(c.gradings):
        grads[perm[i]] = g
    return BigradedComplex(tuple(grads), F2Matrix(c.dim, c.dim, rows))


def kh_ranks():
    want = {"unknot0": 2, "unknot1": 2, "u2": 4, "trefoil": 6}
    rows = {}
    ok = True
    for name, total in want.items():
        c = build_cube(bundled_diagram(name)).base
        tab = homology(c)
        again = [homology(_shuffled(c, seed)) for seed in (1, 2, 3)]
        agree = all(t == tab for t in again)
        got = sum(tab.values())
        ok &= agree and got == total
        rows[name] = {"total": got, "expected": total, "shuffled_agree": agree, "table": _hq(tab)}
    return ok, {"diagrams": rows}


# ---------------------------------------------------------------- criterion 4


def _r2_actions(a, b):
    return [(a.action_matrix(x), b.action_matrix(x)) for x in ("x1", "x2")]


def pointed_unknots(depth=3):
    """R_2/(X1+X2) against the mapping-cone unknot."""
    A = build_cube(bundled_diagram("unknot0_2c"))
    B = build_cube(bundled_diagram("unknot1_sep"))
    ab = chain_map_space(A, B, (0, 0), _r2_actions(A, B))
    ba = chain_map_space(B, A, (0, 0), _r2_actions(B, A))
    # a homotopy equivalence is a quasi-isomorphism in both directions; search every pair
    pairs, found = 0, 0
    for f in _span(ab, B.dim, A.dim):
        if not quasi_isomorphism(f, A, B):
            continue
        for g in _span(ba, A.dim, B.dim):
            pairs += 1
            if quasi_isomorphism(g, B, A):
                found += 1
    qi_ab = sum(1 for f in _span(ab, B.dim, A.dim) if quasi_isomorphism(f, A, B))
    ca = collapse(resolve(A, depth), FX2)
    cb = collapse(resolve(B, depth), FX2)
    win = common_window(ca.window, cb.window)
    ta, tb = rank_table(ca, win), rank_table(cb, win)
    ok = found == 0 and ta == tb
    return ok, {
        "dims": [A.dim, B.dim],
        "maps_A_to_B": len(ab), "maps_B_to_A": len(ba),
        "quasi_isos_A_to_B": qi_ab, "pairs_searched": pairs, "equivalences": found,
        "window_lowest": win.lowest, "fx2_A": table_records(ta), "fx2_B": table_records(tb),
    }


def _span(basis, rows, cols):
    n = len(basis)
    for mask in range(1 << n):
        m = F2Matrix.zeros(rows, cols)
        for i in range(n):
            if mask >> i & 1:
                m = m + basis[i]
        yield m


# ---------------------------------------------------------------- criteria 5, 6


def rp2_minus(depth=4):
    s = bundled_movie("rp2_minus")
    r = run(s)
    plain = compile_plain(s)
    total = resolved_run(s, depth, plain_run=r).total
    xi = xi_multiplication(total.source, "x")
    cert = None
    if total.bidegree == xi.bidegree:
        cert = homotopy_solver(total, ChainMap(total.source, total.target, xi.bidegree, xi.matrix), "rx")
    ok = plain.matrix.is_zero() and cert is not None
    return ok, {"plain_zero": plain.matrix.is_zero(), "bidegree": list(total.bidegree),
                "certificate": cert.summary() if cert else None, "depth": depth}


def rp2_plus(depth=4):
    s = bundled_movie("rp2_plus")
    r = run(s)
    plain = compile_plain(s)
    total = resolved_run(s, depth, plain_run=r).total
    induced = {}
    for m in (TRIVIAL, FX2, RX):
        im = induced_map(total, m)
        induced[str(m)] = im.total_rank
    ok = plain.matrix.is_zero() and all(v == 0 for v in induced.values())
    return ok, {"plain_zero": plain.matrix.is_zero(), "resolved_zero": total.matrix.is_zero(),
                "bidegree": list(total.bidegree), "induced_ranks": induced, "depth": depth}


# ---------------------------------------------------------------- criterion 7


def intro_example(depth=3):
    rc = resolve(build_cube(bundled_diagram("unknot0_2c")), depth)
    col = collapse(rc, FX2)
    tab = rank_table(col)
    per_h = {}
    for (h, _, _), n in tab.items():
        per_h[h] = per_h.get(h, 0) + n
    dims_ok = all(per_h.get(h, 0) == 2 for h in (0, -1, -2))
    # the twisted band U -> U carrying both arcs
    im = induced_map(resolved_run(bundled_movie("band_minus"), depth).total, FX2)
    dh, dq = im.bidegree
    hit = {k: n for k, n in im.source_table.items() if (k[0] + dh, k[1] + dq) in im.target_table}
    shift_ok = bool(hit) and all(im.ranks.get(k, 0) == n for k, n in hit.items())
    return dims_ok and shift_ok and (dh, dq) == (1, 2), {
        "table": table_records(tab), "per_degree": {str(h): per_h[h] for h in sorted(per_h)},
        "band_bidegree": list(im.bidegree), "band_ranks": _ranks(im.ranks),
        "band_source": _hq(im.source_table), "window_lowest": col.window.lowest,
    }


# ---------------------------------------------------------------- criterion 8


def _repeat(s: MovieScript, n):
    return MovieScript(s.diagram, list(s.events) * n, f"{s.source} x{n}", s.colors)


def connected_sum(depth=4):
    base = bundled_movie("rp2_minus")
    rows = {}
    ok = True
    for n in (1, 2):
        s = _repeat(base, n)
        total = resolved_run(s, depth).total
        xi = xi_multiplication(total.source, "x", n)
        same_bidegree = total.bidegree == xi.bidegree
        agree = False
        im = None
        if same_bidegree:
            diff = ChainMap(total.source, total.target, total.bidegree, total.matrix + xi.matrix)
            im = induced_map(diff, TRIVIAL)
            agree = im.is_zero()
        shift = induced_map(xi, TRIVIAL)
        ok &= agree and shift.total_rank > 0
        rows[str(n)] = {"bidegree": list(total.bidegree), "agrees_with_shift": agree,
                        "shift_rank": shift.total_rank, "exact": total.matrix == xi.matrix}
    return ok, {"N": rows, "depth": depth}


# ---------------------------------------------------------------- criterion 9


def pointed_gap():
    u = pointed_complex(bundled_diagram("u2_p"))
    h = pointed_complex(bundled_diagram("hopf_p"))
    ru, rh = u.rank(), h.rank()
    return ru != rh, {"U2": ru, "Hopf": rh, "U2_table": _hq(u.homology()), "Hopf_table": _hq(h.homology())}


def band_pair(depth=2):
    out = {}
    for n in ("band_minus", "band_plus"):
        pm = pointed_cobordism_map(bundled_movie(n), depth)
        out[n] = {"bidegree": list(pm.map.bidegree), "rank": pm.total_rank}
    return out["band_minus"]["rank"] != out["band_plus"]["rank"], out


# ---------------------------------------------------------------- criterion 10


def movie_moves(depth=4):
    rows = {}
    ok = True
    for name in MOVES:
        sa, sb = bundled_movie(f"moves/{name}_a"), bundled_movie(f"moves/{name}_b")
        ra, rb = run(sa), run(sb)
        same_end = to_document(ra.diagrams[-1]) == to_document(rb.diagrams[-1])
        cert = None
        if same_end:
            fa = resolved_run(sa, depth, plain_run=ra).total
            fb = resolved_run(sb, depth, plain_run=rb).total
            if fa.bidegree == fb.bidegree:
                cert = homotopy_solver(fa, ChainMap(fa.source, fa.target, fb.bidegree, fb.matrix), "rx")
        ok &= cert is not None
        rows[name] = {"same_end": same_end, "certificate": cert.summary() if cert else None}
    return ok, {"moves": rows, "depth": depth}


def sweep_external(depth=2):
    """External grading along the sweep: no event map raises it."""
    s = bundled_movie("moves/sweep_a")
    r = run(s)
    rr = resolved_run(s, depth, plain_run=r)
    moving = {"a", "b", "k"}  # crossings on the arc that sweeps

    def ext(rc, g):
        # homological contribution of the moving crossings: 1-resolutions minus negatives
        c, _, _ = rc.split(g)
        m, _ = rc.base.keys[c]
        d = rc.base.diagram
        return sum((m >> i & 1) - (x.sign < 0) for i, x in enumerate(d.crossings) if x.id in moving)

    raised = []
    for i, f in enumerate(rr.maps):
        a, b = rr.complexes[i], rr.complexes[i + 1]
        for t in range(f.matrix.nrows):
            for s_ in f.matrix.row_support(t):
                if ext(b, t) > ext(a, s_):
                    raised.append([i, t, s_])
                    break
            if raised and raised[-1][0] == i:
                break
    ends = [max((ext(rc, g) for g in range(rc.dim)), default=0) for rc in (rr.complexes[0], rr.complexes[-1])]
    ok = not raised and ends == [0, 0]
    return ok, {"raising_events": raised, "endpoint_max_external": ends}


# ---------------------------------------------------------------- criterion 11


def collapse_machinery(depth=3):
    w = {}
    ok = True
    rc = resolve(build_cube(bundled_diagram("unknot0_2c")), depth)
    p = psi(rc).matrix
    w["psi_squared_identity"] = p @ p == F2Matrix.identity(rc.dim)
    inter = True
    for x in rc.colors:
        inter &= p @ rc.action(x).matrix == diagonal_action(rc, x) @ p
    w["psi_intertwines"] = inter
    d1 = bundled_diagram("unknot0_2c")
    rc_x = resolve(build_cube(recolor(d1, TWO_TO_ONE)), depth, ("x",))
    sb = sigma_bar(rc_x, rc, TWO_TO_ONE)
    w["sigma_bar_chain"] = (rc.differential @ sb.matrix + sb.matrix @ rc_x.differential).is_zero()
    w["sigma_bar_linear"] = sb.matrix @ rc_x.action("x").matrix == pulled_action(rc, TWO_TO_ONE, "x") @ sb.matrix
    squares = {}
    for name in ("kinds", "kinds_r3"):
        for rep in collapse_square(bundled_movie(name), TWO_TO_ONE, depth):
            key = rep.kind
            squares[key] = squares.get(key, True) and rep.commutes
    w["squares"] = squares
    cert = homotopy_inverse(rc_x, rc, TWO_TO_ONE, max_weight=depth - 1)
    full = homotopy_inverse(rc_x, rc, TWO_TO_ONE, max_weight=None)
    w["inverse_certificate"] = None if cert is None else {
        "max_weight": cert.max_weight, "unknowns": cert.unknowns, "equations": cert.equations}
    w["inverse_on_full_truncation"] = full is not None
    ok = (w["psi_squared_identity"] and inter and w["sigma_bar_chain"] and w["sigma_bar_linear"]
          and all(squares.values()) and cert is not None)
    w["depth"] = depth
    return ok, w


# ---------------------------------------------------------------- criterion 12


def _restrict(table, window: ValidityWindow):
    return {k: v for k, v in table.items() if window.contains(k[0])}


def stabilization():
    w = {}
    ok = True
    # 5: the certificate exists again and the map is still ξ·Id
    for d in (4, 5):
        good, wit = rp2_minus(d)
        w[f"rp2_minus_D{d}"] = good
        ok &= good
    # 6: zero at D+1
    good, wit = rp2_plus(5)
    w["rp2_plus_D5"] = good
    ok &= good
    # 7: the collapse table and the band's induced ranks on the D=3 window
    a = rank_table(collapse(resolve(build_cube(bundled_diagram("unknot0_2c")), 3), FX2))
    col4 = collapse(resolve(build_cube(bundled_diagram("unknot0_2c")), 4), FX2)
    win3 = collapse(resolve(build_cube(bundled_diagram("unknot0_2c")), 3), FX2).window
    b = rank_table(col4, win3)
    w["fx2_table"] = a == b
    ok &= a == b
    ims = []
    for d in (3, 4):
        ims.append(induced_map(resolved_run(bundled_movie("band_minus"), d).total, FX2))
    lo = ims[0].window
    r3 = {k: v for k, v in ims[0].ranks.items()}
    r4 = {k: v for k, v in ims[1].ranks.items() if lo.contains(k[0]) and k in r3}
    w["band_fx2_ranks"] = r3 == r4
    ok &= r3 == r4
    # 8: HKh table and the ξ^N agreement one step deeper
    t4 = _window_hkh(4)
    t5 = _window_hkh(5, ValidityWindow(None, 4))
    w["hkh_table"] = t4 == t5
    ok &= t4 == t5
    good, _ = connected_sum(5)
    w["connected_sum_D5"] = good
    ok &= good
    # 9: pointed band ranks with one more level
    m = {}
    for d in (2, 3):
        _, wit = band_pair(d)
        m[d] = {k: v["rank"] for k, v in wit.items()}
    w["band_ranks"] = m[2] == m[3]
    ok &= m[2] == m[3]
    return ok, w


def _window_hkh(depth, window=None):
    tab = hkh(bundled_diagram("unknot0"), depth)
    # weights above the smaller depth only exist deeper down
    return {k: v for k, v in tab.items() if k[2] <= 4 and (window is None or window.contains(k[0]))}


# ---------------------------------------------------------------- suites


CRITERIA = {
    "c1": ("slide-homotopy identities on trefoil, figure-eight and Hopf", slide_identities),
    "c2": ("graded Euler characteristic equals the bracket oracle", euler_oracle),
    "c3": ("Khovanov ranks of unknot, U2 and trefoil", kh_ranks),
    "c4": ("pointed unknots: no R2-linear equivalence, equal F[X]/X^2 tables", pointed_unknots),
    "c5": ("RP2(-2) is homotopic to xi-multiplication, plain map zero", rp2_minus),
    "c6": ("RP2(+2) is zero and induces zero after every collapse", rp2_plus),
    "c7": ("two-basepoint unknot collapse and the twisted band shifted identity", intro_example),
    "c8": ("HKh map of identity # N RP2(-2) is the xi^N shift", connected_sum),
    "c9": ("pointed ranks of U2 and the Hopf link differ", pointed_gap),
    "c9b": ("band pair induces pointed maps of different ranks", band_pair),
    "c10": ("movie-move pairs are R_X-homotopic", movie_moves),
    "c10b": ("sweep-around external grading never rises", sweep_external),
    "c11": ("color collapse: psi, sigma-bar, squares and the homotopy inverse", collapse_machinery),
    "c12": ("windowed quantities are stable under depth + 1", stabilization),
}

SUITES = {
    "lemma23": ["c1"],
    "acceptance": list(CRITERIA),
    "quick": ["c1", "c2", "c3", "c9"],
}
SUITES.update({k: [k] for k in CRITERIA})


def suite_names():
    return sorted(SUITES)


def run_suite(name, depth=None):
    """Run every check of a suite.  ``depth`` overrides the default depth where one applies."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(suite_names())}")
    out = []
    for key in SUITES[name]:
        title, fn = CRITERIA[key]
        t = time.perf_counter()
        kwargs = {}
        if depth is not None and "depth" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
            kwargs["depth"] = depth
        passed, witness = fn(**kwargs)
        witness = {"title": title, **witness}
        out.append(Result(key, bool(passed), witness, time.perf_counter() - t))
    return out
