import random

import pytest

from dkh.cube import ChainMap, build_cube
from dkh.derived import (FX2, RX, TRIVIAL, MatrixSystem, TestModule, all_combinations, chain_map_space,
                         collapse, collapse_map, graded_entries, hkh, hkh_map, homotopy_solver,
                         induced_map, maps_agree, quasi_isomorphism, rank_table)
from dkh.f2core import BigradedComplex, ComplexError, F2Matrix, homology
from dkh.movie import bundled_diagram, bundled_movie, parse_script
from dkh.resolution import resolve, resolved_run, xi_multiplication


@pytest.fixture(scope="module")
def unknot_p():
    return resolve(build_cube(bundled_diagram("unknot0_p")), 3)


def test_module_kinds():
    with pytest.raises(ValueError):
        TestModule("zz")
    assert str(FX2) == "F[X]/X^2"
    qs, mus = RX.structure(2)
    assert qs == (0, -2, -2, -4)
    assert all((m @ m).is_zero() for m in mus)


@pytest.mark.parametrize("module, total", [(TRIVIAL, 1), (FX2, 2), (RX, 2)])
def test_pointed_unknot_collapses(unknot_p, module, total):
    col = collapse(unknot_p, module)
    col.complex.check()
    assert sum(rank_table(col).values()) == total


def test_trivial_collapse_of_one_point_is_reduced(unknot_p):
    assert rank_table(collapse(unknot_p, TRIVIAL)) == {(0, 1, None): 1}


def test_hkh_of_unpointed_diagrams_splits_by_weight():
    tab = hkh(bundled_diagram("trefoil"), 2)
    kh = homology(build_cube(bundled_diagram("trefoil")).base)
    for w in range(3):
        # weight w is a copy of Kh shifted by the bidegree of xi^-w
        layer = {(h + w, q + 2 * w): n for (h, q, ww), n in tab.items() if ww == w}
        assert layer == kh


def test_hkh_rejects_basepoints():
    with pytest.raises(ComplexError):
        hkh(bundled_diagram("unknot0_p"))


def test_hkh_map_of_a_sphere_is_an_isomorphism_shift():
    im = hkh_map(parse_script("diagram unknot0.json\nbirth o\nsaddle e1:0 o:0"), 2)
    assert im.is_isomorphism()


def test_collapse_map_of_identity(unknot_p):
    f = ChainMap(unknot_p, unknot_p, (0, 0), F2Matrix.identity(unknot_p.dim))
    for m in (TRIVIAL, FX2, RX):
        assert induced_map(f, m).is_isomorphism()
        assert maps_agree(f, f, m)
    g = collapse_map(f, FX2)
    assert g.matrix == F2Matrix.identity(g.source.dim)


def test_collapse_map_rejects_nonlinear_maps(unknot_p):
    c = unknot_p.base
    g = unknot_p.action("x").matrix @ F2Matrix.identity(unknot_p.dim)
    rows = [g.row(i) for i in range(g.nrows)]
    # move one entry off the R_X-linear pattern
    rows[0] ^= 1 << c.dim
    bad = ChainMap(unknot_p, unknot_p, (0, -2), F2Matrix(unknot_p.dim, unknot_p.dim, rows), False)
    with pytest.raises(ComplexError):
        collapse_map(bad, TRIVIAL)


def random_homotopy(cx, bidegree, seed):
    rng = random.Random(seed)
    ent = graded_entries(cx.gradings, cx.gradings, bidegree)
    return F2Matrix.from_entries(cx.dim, cx.dim, [e for e in ent if rng.random() < 0.3])


@pytest.mark.parametrize("seed", range(4))
def test_solver_recovers_planted_homotopies(unknot_p, seed):
    d = unknot_p.differential
    f = xi_multiplication(unknot_p, "x")
    h = random_homotopy(unknot_p, (0, 2), seed)
    g = ChainMap(unknot_p, unknot_p, f.bidegree, f.matrix + d @ h + h @ d)
    cert = homotopy_solver(f, g)
    assert cert is not None and cert.check()
    assert cert.summary()["linear"] is False


def test_solver_rejects_non_homotopic_maps(unknot_p):
    one = ChainMap(unknot_p, unknot_p, (0, 0), F2Matrix.identity(unknot_p.dim))
    zero = ChainMap(unknot_p, unknot_p, (0, 0), F2Matrix.zeros(unknot_p.dim, unknot_p.dim))
    assert homotopy_solver(one, zero) is None
    assert homotopy_solver(one, zero, "rx") is None
    with pytest.raises(ComplexError):
        homotopy_solver(one, xi_multiplication(unknot_p, "x"))


def test_linear_certificate_for_the_band_movie():
    total = resolved_run(bundled_movie("band_minus"), 3).total
    for x in ("x1", "x2"):
        xi = xi_multiplication(total.source, x)
        cert = homotopy_solver(total, ChainMap(total.source, total.target, xi.bidegree, xi.matrix), "rx")
        assert cert is not None and cert.check() and cert.linear


def koszul_pair():
    # A = (F -> F) acyclic, B = F in degree 0
    a = BigradedComplex(((0, 0), (1, 0)), F2Matrix.from_entries(2, 2, [(1, 0)]))
    b = BigradedComplex(((0, 0),), F2Matrix.zeros(1, 1))
    return a, b


def test_chain_map_space():
    a, b = koszul_pair()
    maps_ab = chain_map_space(a, b, (0, 0))
    # a0 -> b0 is unconstrained since a1 has no partner in B
    assert len(maps_ab) == 1
    maps_ba = chain_map_space(b, a, (0, 0))
    assert maps_ba == []  # b0 -> a0 would need d(a0) = 0
    assert len(list(all_combinations(maps_ab, (1, 2)))) == 2
    assert not quasi_isomorphism(maps_ab[0], a, b)
    assert quasi_isomorphism(F2Matrix.identity(1), b, b)


def test_matrix_system():
    s = MatrixSystem()
    a = F2Matrix.from_dense([[1, 1], [0, 1]])
    s.unknown("u", (2, 2), [(i, j) for i in range(2) for j in range(2)])
    s.equation([(a, "u", None)], F2Matrix.identity(2))
    sol = s.solve()
    assert a @ sol["u"] == F2Matrix.identity(2)
    assert s.size == (4, 4)
    with pytest.raises(ValueError):
        s.unknown("u", (1, 1), [(0, 0)])
    t = MatrixSystem()
    t.unknown("v", (1, 1), [])
    t.equation([(None, "v", None)], F2Matrix.identity(1))
    assert t.solve() is None
