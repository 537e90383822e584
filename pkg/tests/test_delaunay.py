import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import Delaunay

from emotiontda.delaunay import DegenerateInputError, delaunay2d, incircle, orient
from oracles import all_delaunay_triangles, empty_circle_violations, hull_size


def test_single_triangle():
    tri = delaunay2d([(0, 0), (4, 0), (1, 3)])
    assert tri.triangles == ((0, 1, 2),)
    assert tri.edges == ((0, 1), (0, 2), (1, 2))


def test_square_tie_break():
    # both diagonals are Delaunay; the pair (0, 2) beats (1, 3)
    tri = delaunay2d([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert tri.triangles == ((0, 1, 2), (0, 2, 3))
    assert (0, 2) in tri.edge_set() and (1, 3) not in tri.edge_set()


def test_square_tie_break_follows_indices():
    tri = delaunay2d([(0, 0), (1, 1), (1, 0), (0, 1)])
    assert (0, 1) in tri.edge_set()
    assert len(tri.triangles) == 2


def test_square_with_centre():
    tri = delaunay2d([(0, 0), (2, 0), (2, 2), (0, 2), (1, 1)])
    assert tri.triangle_set() == {(0, 1, 4), (1, 2, 4), (2, 3, 4), (0, 3, 4)}
    assert tri.triangle_set() == all_delaunay_triangles(tri.vertices)


def test_grid_is_fully_triangulated():
    g = np.array([(x, y) for y in range(5) for x in range(5)], dtype=float)
    tri = delaunay2d(g)
    assert len(tri.triangles) == 32
    assert empty_circle_violations(g, tri.triangles) == []


@pytest.mark.parametrize(
    "pts",
    [
        [(0, 0), (1, 1)],
        [(0, 0), (1, 1), (2, 2), (3, 3)],
        [(0, 0), (1, 0), (0, 0)],
        [(0, 0), (1, 0), (np.nan, 1)],
    ],
)
def test_degenerate_input(pts):
    with pytest.raises(DegenerateInputError):
        delaunay2d(pts)


def test_predicates():
    assert orient((0, 0), (1, 0), (0, 1)) == 1
    assert orient((0, 0), (0, 1), (1, 0)) == -1
    assert orient((0, 0), (1, 1), (2, 2)) == 0
    assert incircle((0, 0), (1, 0), (0, 1), (0.5, 0.5)) == 1
    assert incircle((0, 0), (1, 0), (0, 1), (3, 3)) == -1
    assert incircle((0, 0), (1, 0), (1, 1), (0, 1)) == 0


def test_random_sets_against_oracles():
    rng = np.random.default_rng(7)
    for trial in range(40):
        n = int(rng.integers(3, 51))
        pts = rng.uniform(0, 100, (n, 2))
        tri = delaunay2d(pts)
        assert empty_circle_violations(pts, tri.triangles) == []
        assert len(tri.triangles) == 2 * n - hull_size(pts) - 2
        ref = {tuple(sorted(s)) for s in Delaunay(pts).simplices.tolist()}
        assert tri.triangle_set() == ref


def test_edges_cover_triangles():
    rng = np.random.default_rng(3)
    tri = delaunay2d(rng.normal(size=(40, 2)))
    edges = tri.edge_set()
    for a, b, c in tri.triangles:
        assert {(a, b), (a, c), (b, c)} <= edges
    assert all(0 <= u < v < 40 for u, v in edges)


def test_deterministic_and_translation_invariant():
    rng = np.random.default_rng(11)
    pts = rng.uniform(0, 300, (62, 2))
    a = delaunay2d(pts)
    assert a == delaunay2d(pts.copy())
    assert delaunay2d(pts + [1000.0, -250.0]).triangles == a.triangles


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 12), st.integers(0, 12)), min_size=3, max_size=25, unique=True))
def test_lattice_points_stay_delaunay(pts):
    # many cocircular and collinear configurations
    pts = np.array(pts, dtype=float)
    try:
        tri = delaunay2d(pts)
    except DegenerateInputError:
        assert np.linalg.matrix_rank(pts[1:] - pts[0]) < 2
        return
    assert empty_circle_violations(pts, tri.triangles) == []
    assert len(tri.triangles) == 2 * len(pts) - hull_size(pts) - 2
