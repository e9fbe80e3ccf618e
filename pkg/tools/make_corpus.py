"""Regenerate the bundled diagram corpus under src/dkh/data/diagrams."""
import os
import sys

from dkh import surgery
from dkh.diagram import Basepoint, PointedDiagram, dumps, from_braid

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "dkh", "data", "diagrams")


def unknot(bps=(), colors=None):
    return PointedDiagram.build([], ["e1"], [Basepoint(*b) for b in bps], colors)


def corpus():
    out = {}
    out["unknot0"] = unknot()
    out["unknot0_p"] = unknot([("p1", "e1", 0, "x")])
    out["unknot0_2c"] = unknot([("p1", "e1", 0, "x1"), ("p2", "e1", 1, "x2")])
    out["unknot1"], _ = surgery.add_kink(unknot(), ("e1", 0), 1, cid="c1")
    # positive kink, p1 on the loop and p2 on the outer edge
    k, info = surgery.add_kink(unknot([("p2", "e1", 0, "x2")], ["x1", "x2"]), ("e1", 0), 1, cid="c1")
    loop = info.internal[0]
    out["unknot1_sep"] = PointedDiagram.build(
        k.crossings, k.edges, list(k.basepoints) + [Basepoint("p1", loop, 0, "x1")], ["x1", "x2"])
    # positive kink with p1 on the outer edge, alone and next to a free circle
    out["unknot1_p"], _ = surgery.add_kink(unknot([("p1", "e1", 0, "x")]), ("e1", 0), 1, cid="c1")
    out["unknot1_po"], _ = surgery.birth(out["unknot1_p"], "o")
    out["u2"] = PointedDiagram.build([], ["e1", "e2"])
    out["u2_p"] = PointedDiagram.build(
        [], ["e1", "e2"], [Basepoint("p1", "e1", 0, "x1"), Basepoint("p2", "e2", 0, "x2")])
    out["hopf_pos"] = from_braid(2, [1, 1])
    out["hopf_neg"] = from_braid(2, [-1, -1])
    out["hopf_p"] = from_braid(2, [1, 1], basepoints=(("p1", "e1", 0, "x1"), ("p2", "e2", 0, "x2")))
    out["braid121_p"] = from_braid(3, [1, 2, 1], basepoints=(("p1", "e1", 0, "x"),))
    out["braid121_2c"] = from_braid(3, [1, 2, 1], basepoints=(("p1", "e1", 0, "x1"), ("p2", "e2", 0, "x2")))
    out["trefoil"] = from_braid(2, [1, 1, 1])
    out["figure8"] = from_braid(3, [1, -2, 1, -2])
    return out


def main(argv=None):
    os.makedirs(OUT, exist_ok=True)
    for name, d in corpus().items():
        with open(os.path.join(OUT, name + ".json"), "w") as fh:
            fh.write(dumps(d) + "\n")
        print(name, len(d.crossings), "crossings")
    return 0


if __name__ == "__main__":
    sys.exit(main())
