from math import comb

import pytest

from dkh.cube import build_cube
from dkh.f2core import ComplexError, F2Matrix, homology
from dkh.movie import bundled_diagram, bundled_movie
from dkh.resolution import (ValidityWindow, common_window, f_map, lift_map, q_map, resolve, resolved_run,
                            validity_window, xi_monomials, xi_multiplication)

POINTED = ["unknot0_p", "unknot0_2c", "unknot1_p", "u2_p", "hopf_p", "braid121_p", "braid121_2c"]


@pytest.fixture(scope="module", params=POINTED)
def rc(request):
    return resolve(build_cube(bundled_diagram(request.param)), 3)


def test_monomial_count():
    for k in (1, 2, 3):
        for depth in (0, 2, 4):
            ms = xi_monomials(k, depth)
            assert len(ms) == comb(depth + k, k)
            assert [m.weight for m in ms] == sorted(m.weight for m in ms)


def test_monomial_lowering():
    m = xi_monomials(2, 2)[-1]
    assert m.bidegree == (-2, -4)
    lowered = m.times_xi(0) or m.times_xi(1)
    assert lowered.weight == 1


def test_resolution_is_a_complex(rc):
    rc.complex.check()
    assert rc.dim == rc.base.dim * rc.nr * len(rc.xis)
    for g in range(0, rc.dim, 7):
        c, r, xi = rc.split(g)
        assert rc.index(c, r, xi) == g


def test_q_and_f(rc):
    q, f = q_map(rc).verify(), f_map(rc).verify()
    assert q.matrix @ f.matrix == F2Matrix.identity(rc.base.dim)


def test_actions_are_square_zero_and_commute(rc):
    d = rc.differential
    mats = [rc.action(x).matrix for x in rc.colors]
    for a in mats:
        assert d @ a == a @ d
        assert (a @ a).is_zero()
        for b in mats:
            assert a @ b == b @ a


def test_window_homology_matches_the_cube(rc):
    w = validity_window(rc)
    top = max(h for h, _ in rc.base.gradings)
    assert w.lowest == top - rc.depth + 1
    got = {k: n for k, n in homology(rc.complex).items() if w.contains(k[0])}
    want = {k: n for k, n in homology(rc.base.base).items() if w.contains(k[0])}
    assert got == want


def test_xi_multiplication(rc):
    for x in rc.colors:
        m = xi_multiplication(rc, x).verify()
        assert m.bidegree == (1, 2)
        for y in rc.colors:
            a = rc.action(y).matrix
            assert m.matrix @ a == a @ m.matrix
        assert xi_multiplication(rc, x, rc.depth + 1).is_zero()
        assert not xi_multiplication(rc, x, rc.depth).is_zero()


def test_common_window():
    a, b = ValidityWindow(-2, 4), ValidityWindow(0, 3)
    assert common_window(a, b) == ValidityWindow(0, 3)
    assert common_window(ValidityWindow(None, 4)) == ValidityWindow(None, 4)
    assert ValidityWindow(None, 1).contains(-99)
    assert not a.contains(-3)


def test_lift_map_requires_matching_resolutions():
    c = build_cube(bundled_diagram("unknot0_p"))
    with pytest.raises(ComplexError):
        lift_map(resolve(c, 2), resolve(c, 3), F2Matrix.identity(c.dim), (0, 0))


@pytest.mark.parametrize("name", ["band_minus", "kinds", "kinds_r3", "rp2_minus"])
def test_resolved_events_are_linear_chain_maps(name):
    rr = resolved_run(bundled_movie(name), 3)
    for m in rr.maps:
        m.verify()
        for x in m.source.colors:
            assert m.matrix @ m.source.action(x).matrix == m.target.action(x).matrix @ m.matrix
    assert rr.total.source is rr.complexes[0]


def test_slide_lift_carries_a_xi_term():
    rr = resolved_run(bundled_movie("moves/A_a"), 2)
    slide = rr.maps[1]
    plain = rr.plain.maps[1].matrix
    assert plain == F2Matrix.identity(plain.nrows)
    assert slide.matrix != lift_map(slide.source, slide.target, plain, (0, 0)).matrix
