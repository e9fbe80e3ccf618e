import pytest

from dkh.collapse import (ColorSurjection, collapse_square, diagonal_action, homotopy_inverse, psi,
                          pulled_action, r_sigma, recolor, sigma_bar, xi_sigma)
from dkh.cube import build_cube
from dkh.f2core import F2Matrix
from dkh.movie import bundled_diagram, bundled_movie
from dkh.resolution import resolve

TWO = ColorSurjection.of({"x1": "x", "x2": "x"})


@pytest.fixture(scope="module")
def pair():
    d = bundled_diagram("unknot0_2c")
    rc_w = resolve(build_cube(d), 2)
    rc_x = resolve(build_cube(recolor(d, TWO)), 2)
    return rc_x, rc_w


def test_surjection_validation():
    assert TWO.source == ("x1", "x2") and TWO.target == ("x",)
    assert TWO("x2") == "x" and TWO.fiber("x") == ("x1", "x2")
    with pytest.raises(ValueError, match="no image"):
        ColorSurjection.of({"a": "x"}, ("a", "b"))
    with pytest.raises(ValueError, match="not surjective"):
        ColorSurjection.of({"a": "x"}, None, ("x", "y"))
    with pytest.raises(ValueError, match="not a target"):
        ColorSurjection.of({"a": "z"}, None, ("x",))


def test_r_sigma_sends_x_to_the_fiber_sum():
    assert r_sigma(TWO).to_dense() == [[1, 0], [0, 1], [0, 1], [0, 0]]
    three = ColorSurjection.of({"a": "x", "b": "x", "c": "y"})
    m = r_sigma(three)
    # xy -> (a + b) c
    assert m.shape == (8, 4)
    assert sorted(m.transpose().row_support(3)) == [0b101, 0b110]


def test_xi_sigma_spreads_powers():
    m = xi_sigma(TWO, 3)
    assert [len(m.transpose().row_support(j)) for j in range(4)] == [1, 2, 3, 4]


def test_recolor():
    d = recolor(bundled_diagram("unknot0_2c"), TWO)
    assert d.colors == ("x",) and {b.color for b in d.basepoints} == {"x"}


def test_psi(pair):
    _, rc_w = pair
    p = psi(rc_w)
    assert not p.is_chain_map
    assert p.matrix @ p.matrix == F2Matrix.identity(rc_w.dim)
    assert p.chain_violation() is not None
    for x in rc_w.colors:
        assert p.matrix @ rc_w.action(x).matrix @ p.matrix == diagonal_action(rc_w, x)


def test_sigma_bar_is_a_linear_chain_map(pair):
    rc_x, rc_w = pair
    sb = sigma_bar(rc_x, rc_w, TWO).verify()
    pw = pulled_action(rc_w, TWO, "x")
    assert sb.matrix @ rc_x.action("x").matrix == pw @ sb.matrix


@pytest.mark.parametrize("name", ["kinds", "kinds_r3"])
def test_collapse_squares_commute(name):
    reports = collapse_square(bundled_movie(name), TWO, 3)
    assert reports and all(r.commutes for r in reports), [r for r in reports if not r.commutes]
    kinds = {r.kind for r in reports}
    assert "slide" in kinds


def test_square_rejects_wrong_colors():
    with pytest.raises(ValueError):
        collapse_square(bundled_movie("rp2_minus"), TWO, 2)


def test_windowed_homotopy_inverse(pair):
    rc_x, rc_w = pair
    cert = homotopy_inverse(rc_x, rc_w, TWO, max_weight=rc_x.depth - 1)
    assert cert is not None and cert.check()
    assert cert.unknowns > 0 and cert.equations > 0
