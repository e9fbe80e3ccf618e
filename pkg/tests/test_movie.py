import pytest

from dkh.cube import ChainMap
from dkh.derived import quasi_isomorphism
from dkh.f2core import F2Matrix, homology
from dkh.movie import MovieError, bundled_diagram, bundled_movie, compile_plain, parse_script, run
from dkh.suites import MOVES

SCRIPTS = ["rp2_minus", "rp2_plus", "band_minus", "band_plus", "kinds", "kinds_r3"]
PAIRS = [f"moves/{m}_{s}" for m in MOVES for s in "ab"]


def events(text):
    return run(parse_script(text))


@pytest.mark.parametrize("text, msg", [
    ("", "empty"),
    ("birth o", "must start"),
    ("diagram unknot0.json\nwiggle e1", "unknown event"),
    ("diagram unknot0.json\nbirth o\ncolors x", "before events"),
    ("diagram unknot0_p.json\ncolors y", "in use"),
    ("diagram unknot0.json\nsaddle e1:q e1:1", "bad position"),
])
def test_parse_errors(text, msg):
    with pytest.raises(MovieError, match=msg):
        parse_script(text)


def test_comments_and_colors_line():
    s = parse_script("# a comment\ndiagram unknot0.json\ncolors x y  # trailing\n\nbirth o\n")
    assert s.diagram.colors == ("x", "y")
    assert [(e.kind, e.line) for e in s.events] == [("birth", 5)]


def test_missing_bundled_files():
    with pytest.raises(MovieError):
        bundled_movie("nope")
    with pytest.raises(MovieError):
        bundled_diagram("nope")


@pytest.mark.parametrize("name", SCRIPTS + PAIRS)
def test_bundled_scripts_run(name):
    r = run(bundled_movie(name))
    assert len(r.maps) == len(r.script.events)
    for m in r.maps:
        assert m.chain_violation() is None
        assert m.homogeneity_violation() is None


@pytest.mark.parametrize("text, bidegree", [
    ("diagram unknot0.json\nbirth o", (0, 1)),
    ("diagram unknot0.json\nbirth o\ndeath o", (0, 2)),
    ("diagram unknot0.json\nbirth o\nsaddle e1:0 o:0", (0, 0)),
])
def test_morse_bidegrees(text, bidegree):
    assert compile_plain(parse_script(text)).bidegree == bidegree


def test_birth_then_death_is_the_unit_counit_pairing():
    # counit after unit: 1 -> 1 -> 0 on the new circle, so the composite vanishes
    assert compile_plain(parse_script("diagram unknot0.json\nbirth o\ndeath o")).is_zero()


def test_sphere_from_saddles_is_the_identity_up_to_grading():
    # birth, merge into e1: the unit followed by multiplication is the identity
    f = compile_plain(parse_script("diagram unknot0.json\nbirth o\nsaddle e1:0 o:0"))
    assert f.matrix == F2Matrix.identity(f.source.dim)


@pytest.mark.parametrize("text", [
    "diagram unknot0.json\nr1+ e1:0 + c=k",
    "diagram unknot0.json\nr1+ e1:0 - over c=k",
    "diagram hopf_p.json\nr1+ e1:0 + c=k loop=l",
    "diagram trefoil.json\nr1+ e1:0 - c=k",
    "diagram u2.json\nr2 e2:0 e1:0 R opp c=a,b",
    "diagram u2_p.json\nr2 e2:0 e1:0 R opp c=a,b\nr2- a b",
    "diagram hopf_p.json\nr1+ e1:0 + c=k loop=l\nr1- k l",
    "diagram braid121_p.json\nr3 c1 c2 c3",
])
def test_reidemeister_maps_are_quasi_isomorphisms(text):
    r = events(text)
    for m in r.maps:
        assert m.bidegree == (0, 0)
        assert quasi_isomorphism(m.matrix, m.source, m.target)
    assert homology(r.source.base) == homology(r.target.base)


def test_slides_are_plain_identities():
    r = events("diagram unknot1_p.json\nslide p1 c1 fwd\nslide p1 c1 back")
    for m in r.maps:
        assert m.matrix == F2Matrix.identity(m.source.dim)
    assert r.diagrams[0] == r.diagrams[-1]


@pytest.mark.parametrize("text", [
    "diagram unknot0.json\ndeath e7",
    "diagram unknot0_p.json\ncap p1 p1",
    "diagram u2.json\nr3 c1 c2 c3",
    "diagram unknot0.json\nr1- c1",
    "diagram unknot1_p.json\nslide p1 c9",
])
def test_bad_events_raise_movie_errors(text):
    with pytest.raises(Exception) as info:
        events(text)
    assert isinstance(info.value, (MovieError, ValueError))


def test_rp2_scripts_are_endomorphisms():
    for name in ("rp2_minus", "rp2_plus", "band_minus", "band_plus"):
        r = run(bundled_movie(name))
        assert r.diagrams[0] == r.diagrams[-1]


def test_composition_order():
    r = events("diagram unknot0.json\nbirth o\nbirth m")
    a, b = r.maps
    both = a.then(b)
    assert isinstance(both, ChainMap)
    assert both.matrix == b.matrix @ a.matrix
    assert both.bidegree == (0, 2)
