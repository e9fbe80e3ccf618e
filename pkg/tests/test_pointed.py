import pytest

from dkh.cube import ChainMap, build_cube
from dkh.f2core import ComplexError, F2Matrix, homology
from dkh.movie import bundled_diagram, bundled_movie, parse_script
from dkh.pointed import ainf_section, k_complex, pointed_cobordism_map, pointed_complex, pointed_map
from dkh.resolution import XiMonomial, resolve


@pytest.mark.parametrize("k", [1, 2, 3])
def test_koszul_complex(k):
    kc = k_complex([f"x{i}" for i in range(k)])
    kc.check()
    assert kc.dim == 4 ** k
    # one color: ker x = (x) in degree 0 and coker x = F in degree 1
    assert sum(homology(kc).values()) == 2 ** k


@pytest.mark.parametrize("name, rank", [("unknot0_p", 2), ("unknot0_2c", 4), ("u2_p", 4), ("hopf_p", 8)])
def test_pointed_ranks(name, rank):
    pc = pointed_complex(bundled_diagram(name))
    pc.complex.check()
    assert pc.dim == pc.base.dim << len(pc.colors)
    assert pc.rank() == rank


def test_no_colors_gives_the_plain_complex():
    pc = pointed_complex(bundled_diagram("trefoil"))
    assert pc.homology() == homology(build_cube(bundled_diagram("trefoil")).base)


def test_extra_color_doubles_the_rank():
    d = bundled_diagram("unknot0_p")
    assert pointed_complex(d, ("x", "y")).rank() == 2 * pointed_complex(d).rank()


@pytest.mark.parametrize("text", [
    "diagram unknot1_p.json\nslide p1 c1 fwd",
    "diagram hopf_p.json\nr1+ e1:0 + c=k loop=l\nr1- k l",
])
def test_pointed_maps_of_invertible_movies(text):
    assert pointed_cobordism_map(parse_script(text), 2).is_isomorphism()


def test_pointed_map_needs_resolved_maps_of_enough_depth():
    d = bundled_diagram("unknot0_2c")
    cube = build_cube(d)
    pc = pointed_complex(cube)
    plain = ChainMap(cube, cube, (0, 0), F2Matrix.identity(cube.dim))
    with pytest.raises(ComplexError):
        pointed_map(plain, pc, pc)
    rc = resolve(cube, 1)
    ident = ChainMap(rc, rc, (0, 0), F2Matrix.identity(rc.dim))
    with pytest.raises(ComplexError):
        pointed_map(ident, pc, pc)
    rc = resolve(cube, 2)
    ident = ChainMap(rc, rc, (0, 0), F2Matrix.identity(rc.dim))
    assert pointed_map(ident, pc, pc).matrix == F2Matrix.identity(pc.dim)


def test_band_maps_have_different_pointed_ranks():
    minus = pointed_cobordism_map(bundled_movie("band_minus"), 2)
    plus = pointed_cobordism_map(bundled_movie("band_plus"), 2)
    assert minus.total_rank != plus.total_rank


def test_ainf_section():
    base = build_cube(bundled_diagram("unknot0"))
    rc = resolve(base, 3, ("w", "x"))
    assert ainf_section(1, 2, 0, ["w", "x", "x"], rc) == rc.index(0, 0, XiMonomial((1, 2)))
    assert ainf_section(0, 0, 1, [], rc) == rc.index(1, 0, XiMonomial((0, 0)))
    assert ainf_section(1, 1, 0, ["x", "w"], rc) is None
    assert ainf_section(1, 1, 0, ["1", "x"], rc) is None
    with pytest.raises(ValueError):
        ainf_section(1, 1, 0, ["w"], rc)
    with pytest.raises(ValueError):
        ainf_section(0, 0, base.dim, [], rc)
    with pytest.raises(ComplexError):
        ainf_section(2, 2, 0, ["w", "w", "x", "x"], rc)
    with pytest.raises(ComplexError):
        ainf_section(0, 0, 0, [], resolve(base, 3, ("x", "w")))
