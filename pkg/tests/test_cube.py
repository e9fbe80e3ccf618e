import pytest

from dkh.cube import (basepoint_action, build_cube, color_action, disjoint_union, edge_action,
                      sliding_homotopy, tensor_disjoint, verify_lemma_2_3)
from dkh.diagram import DiagramError, kauffman_bracket
from dkh.f2core import F2Matrix, graded_euler_characteristic, homology
from dkh.movie import bundled_diagram
from dkh.suites import CORPUS
from dkh.surgery import rename

KH = {
    "unknot0": {(0, -1): 1, (0, 1): 1},
    "unknot1": {(0, -1): 1, (0, 1): 1},
    "u2": {(0, -2): 1, (0, 0): 2, (0, 2): 1},
    "hopf_pos": {(0, 0): 1, (0, 2): 1, (2, 4): 1, (2, 6): 1},
    "hopf_neg": {(-2, -6): 1, (-2, -4): 1, (0, -2): 1, (0, 0): 1},
    "trefoil": {(0, 1): 1, (0, 3): 1, (2, 5): 1, (2, 7): 1, (3, 7): 1, (3, 9): 1},
}


@pytest.fixture(scope="module")
def cubes():
    return {n: build_cube(bundled_diagram(n)) for n in CORPUS}


@pytest.mark.parametrize("name", CORPUS)
def test_cube_is_a_complex_with_bracket_euler(cubes, name):
    c = cubes[name]
    c.base.check()
    assert graded_euler_characteristic(c.base) == kauffman_bracket(c.diagram)


@pytest.mark.parametrize("name", sorted(KH))
def test_khovanov_tables(cubes, name):
    assert homology(cubes[name].base) == KH[name]


def test_figure_eight_total_rank(cubes):
    assert sum(homology(cubes["figure8"].base).values()) == 10


@pytest.mark.parametrize("name", CORPUS)
def test_edge_actions_are_dotted_chain_maps(cubes, name):
    c = cubes[name]
    dd = c.differential
    for e in c.diagram.edges:
        x = edge_action(c, e)
        assert (x @ x).is_zero()
        assert dd @ x == x @ dd
    for b in c.diagram.basepoints:
        assert basepoint_action(c, b.id).verify().bidegree == (0, -2)
    for col in c.colors:
        color_action(c, col).verify()


@pytest.mark.parametrize("name", ["trefoil", "figure8", "hopf_pos", "hopf_neg", "unknot1", "braid121_p"])
def test_slide_identities_every_crossing(cubes, name):
    c = cubes[name]
    for x in c.diagram.crossings:
        report = verify_lemma_2_3(c, x.id)
        assert len(report) == 8
        assert all(v is None for v in report.values()), report


def test_slide_homotopy_bidegree_and_nonzero(cubes):
    c = cubes["trefoil"]
    for x in c.diagram.crossings:
        h = sliding_homotopy(c, x.id)
        assert h.bidegree == (-1, -2)
        assert not h.is_zero()
        assert h.homogeneity_violation() is None


def test_identities_detect_a_broken_homotopy(cubes, monkeypatch):
    # corrupting the homotopy must be caught by the report
    import dkh.cube as cube_mod

    c = cubes["hopf_pos"]
    real = cube_mod.sliding_homotopy

    def broken(cube, cid):
        h = real(cube, cid)
        return type(h)(h.source, h.target, h.bidegree, F2Matrix.zeros(*h.matrix.shape), False)

    monkeypatch.setattr(cube_mod, "sliding_homotopy", broken)
    report = verify_lemma_2_3(c, "c1")
    assert report["dH+Hd=p1+p2"] is not None


def test_disjoint_union_is_a_tensor_product(cubes):
    a = bundled_diagram("hopf_pos")
    b, _ = rename(bundled_diagram("unknot0"), {"e1": "o1"})
    with pytest.raises(DiagramError, match="collision"):
        disjoint_union(a, bundled_diagram("unknot0"))
    u = build_cube(disjoint_union(a, b))
    t = tensor_disjoint(cubes["hopf_pos"], build_cube(b))
    ha = homology(cubes["hopf_pos"].base)
    expect = {}
    for (h, q), n in ha.items():
        for dq in (-1, 1):
            expect[(h, q + dq)] = expect.get((h, q + dq), 0) + n
    assert homology(u.base) == expect
    assert homology(t.base) == expect
