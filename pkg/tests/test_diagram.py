import json

import pytest

from dkh.diagram import (DiagramError, PointedDiagram, dumps, from_braid, is_planar, kauffman_bracket,
                         parse, resolve, writhe_shifts)
from dkh.f2core import Laurent
from dkh.movie import bundled_diagram
from dkh.suites import CORPUS

KINK = {
    "crossings": [{"id": "c1", "edges": ["e1", "e1", "e2", "e2"], "sign": "+"}],
    "edges": ["e1", "e2"],
    "basepoints": [{"id": "p1", "edge": "e1", "pos": 0, "color": "x"}],
    "colors": ["x"],
}


def doc(**changes):
    d = json.loads(json.dumps(KINK))
    d.update(changes)
    return d


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_roundtrip(name):
    d = bundled_diagram(name)
    again = parse(dumps(d))
    assert again == d
    assert hash(again) == hash(d)
    assert is_planar(d)


def test_parse_accepts_dict_and_string():
    assert parse(KINK) == parse(json.dumps(KINK))
    d = parse(KINK)
    assert d.colors == ("x",)
    assert d.basepoint("p1").edge == "e1"
    assert [b.id for b in d.color_basepoints("x")] == ["p1"]


@pytest.mark.parametrize("bad, msg", [
    ("{not json", "malformed"),
    ("[]", "object"),
    (doc(basepoints=[{"id": "p1", "crossing": "c1", "color": "x"}]), "on crossing"),
    (doc(basepoints=[{"id": "p1", "edge": "e9", "color": "x"}]), "unknown edge"),
    (doc(basepoints=[{"id": "p1", "edge": "e1", "color": "y"}]), "unknown color"),
    (doc(crossings=[{"id": "c1", "edges": ["e1", "e1", "e2"], "sign": "+"}]), "four edges"),
    (doc(crossings=[{"id": "c1", "edges": ["e1", "e1", "e2", "e2"], "sign": "?"}]), "sign"),
    (doc(crossings=[{"id": "c1", "edges": ["e1", "e1", "e2", "e9"], "sign": "+"}]), "unknown edge"),
    (doc(crossings=[{"id": "c1", "edges": ["e1", "e2", "e1", "e2"], "sign": "+"}]), "planar"),
    (doc(crossings=[{"id": "c1", "edges": ["e2", "e1", "e1", "e2"], "sign": "+"}]), "orientation"),
    (doc(edges=["e1", "e2", "e3"]), None),
    (doc(edges=[{"id": "e1", "from": "c1", "to": "c1"}, {"id": "e2", "from": None, "to": "c1"}]),
     "orientation"),
])
def test_parse_rejects(bad, msg):
    if msg is None:
        # an extra edge with no crossing is a loop component, which is fine
        assert len(parse(bad).components()) == 2
        return
    with pytest.raises(DiagramError, match=msg):
        parse(bad)


def test_duplicate_ids_rejected():
    with pytest.raises(DiagramError, match="duplicate"):
        parse(doc(edges=["e1", "e1", "e2"]))
    with pytest.raises(DiagramError, match="duplicate"):
        parse(doc(basepoints=KINK["basepoints"] * 2))


def test_unknown_lookups():
    d = parse(KINK)
    with pytest.raises(DiagramError):
        d.crossing("c7")
    with pytest.raises(DiagramError):
        d.basepoint("p7")


def test_braid_closures():
    tre = from_braid(2, [1, 1, 1])
    assert tre.n_crossings == 3 and len(tre.components()) == 1
    assert writhe_shifts(tre) == (3, 0)
    assert len(from_braid(2, [1, 1]).components()) == 2
    assert writhe_shifts(from_braid(2, [-1, -1])) == (0, 2)
    with pytest.raises(DiagramError):
        from_braid(2, [2])


def test_states_count_circles():
    d = bundled_diagram("hopf_pos")
    counts = sorted(len(resolve(d, m).circles) for m in range(4))
    assert counts == [1, 1, 2, 2]
    with pytest.raises(DiagramError):
        resolve(d, 1 << 5)


@pytest.mark.parametrize("name, poly", [
    ("unknot0", {1: 1, -1: 1}),
    ("u2", {2: 1, 0: 2, -2: 1}),
    ("trefoil", {1: 1, 3: 1, 5: 1, 9: -1}),
    ("figure8", {-5: 1, 5: 1}),
])
def test_bracket_values(name, poly):
    assert kauffman_bracket(bundled_diagram(name)) == Laurent(poly)


def test_with_basepoints_keeps_crossings():
    d = bundled_diagram("unknot1_p")
    bare = d.with_basepoints([], ())
    assert bare.crossings == d.crossings and not bare.basepoints
    assert isinstance(bare, PointedDiagram)
