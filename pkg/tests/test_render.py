import numpy as np
import pytest

from oklab.bodies import simplex_body
from oklab.errors import DimensionError
from oklab.polytope import convex_hull
from oklab.render import bodies_svg, cyclic_vertices, points_csv, points_svg, polytope_csv, write_atomic


def test_cyclic_order():
    P = convex_hull([(0, 0), (1, 1), (1, 0), (0, 1)])
    assert cyclic_vertices(P) == [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


def test_svg_outputs():
    svg = bodies_svg([("a", simplex_body((1, 4))), ("b", simplex_body((1, 1)))])
    assert svg.count("<polygon") == 2 and svg.rstrip().endswith("</svg>")
    line = bodies_svg([("seg", convex_hull([(0,), (3,)]))])
    assert "<line" in line
    assert points_svg(np.zeros((3, 2)), simplex_body((1, 1))).count("<circle") == 3
    with pytest.raises(DimensionError):
        bodies_svg([("x", simplex_body((1, 1, 1)))])


def test_csv_outputs():
    text = polytope_csv(simplex_body((1, 1, 4)))
    assert text.splitlines()[0] == "kind,c1,c2,c3,rhs"
    assert "facet,4,4,1,4" in text
    assert points_csv(np.array([[0.5, 1.0]])).splitlines() == ["y1,y2", "0.5,1"]


def test_write_atomic(tmp_path):
    target = tmp_path / "sub" / "f.txt"
    write_atomic(target, "one\n")
    write_atomic(target, "two\n")
    assert target.read_text() == "two\n"
    assert [p.name for p in target.parent.iterdir()] == ["f.txt"]
