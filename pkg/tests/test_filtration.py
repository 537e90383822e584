import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emotiontda.cellcomplex import CellComplex, simplicial_closure
from emotiontda.complexbuild import build_path_complex, build_stacked_complex
from emotiontda.filtration import (
    PLANE_LABELS,
    FilterFunction,
    Filtration,
    FiltrationError,
    lower_star,
    lower_star_filtration,
    plane_filters,
)


def positioned(*xy):
    cx = CellComplex(vertex_positions={})
    for x, y in xy:
        cx.add_vertex((x, y, 0.0))
    return cx


def test_plane_filters_single_vertex():
    fs = plane_filters(positioned((3, 4)))
    assert [f.label for f in fs] == list(PLANE_LABELS)
    assert all(f.values == {0: 0.0} for f in fs)


def test_plane_filters_two_vertices():
    fs = {f.label: f.values for f in plane_filters(positioned((0, 0), (10, 10)))}
    assert fs["vertical-min"] == {0: 0.0, 1: 10.0}
    assert fs["vertical-max"] == {0: 10.0, 1: 0.0}
    assert fs["oblique-pp-min"][0] == 0.0
    assert fs["oblique-pp-min"][1] == pytest.approx(20 / math.sqrt(2), abs=1e-12)
    # x - y is constant on these points
    assert fs["oblique-pm-min"] == {0: 0.0, 1: 0.0}


def test_plane_filters_are_nonnegative_and_touch_zero():
    rng = np.random.default_rng(0)
    cx = positioned(*rng.uniform(-50, 50, (30, 2)))
    for f in plane_filters(cx):
        vals = np.array(list(f.values.values()))
        assert vals.min() == 0.0 and np.all(vals >= 0)


def test_plane_filters_translation_invariant():
    pts = np.random.default_rng(1).uniform(0, 100, (12, 2))
    a = plane_filters(positioned(*pts))
    b = plane_filters(positioned(*(pts + [37.0, -12.0])))
    for fa, fb in zip(a, b):
        assert np.allclose(list(fa.values.values()), list(fb.values.values()), atol=1e-9)


def test_plane_filters_need_positions():
    cx = CellComplex()
    cx.add_cell(0)
    with pytest.raises(FiltrationError):
        plane_filters(cx)


def test_path_example():
    cx, _ = build_path_complex([1.0, 3.0, 2.0])
    f = lower_star_filtration(cx, {0: 1.0, 1: 3.0, 2: 2.0})
    # ids: vertices 0, 1, 2; edges e01 = 3, e12 = 4
    assert f.order == [0, 2, 1, 3, 4]
    assert f.values_in_order().tolist() == [1, 2, 3, 3, 3]
    assert [f.step_of(c) for c in f.order] == [1, 2, 3, 3, 3]
    assert f.problems() == []


def test_single_vertex():
    cx = CellComplex()
    cx.add_cell(0)
    f = lower_star_filtration(cx, FilterFunction({0: 5.0}, "audio"))
    assert f.order == [0] and f.cell_value == {0: 5.0} and f.label == "audio"


def test_tie_break_by_id():
    cx, _ = build_path_complex([1.0, 1.0])
    f = lower_star_filtration(cx, {0: 1.0, 1: 1.0})
    assert f.order == [0, 1, 2]
    assert f.cell_value[2] == 1.0
    assert f.owner[2] == 1  # largest id among the tied vertices


def test_missing_or_bad_values():
    cx, _ = build_path_complex([1.0, 2.0])
    with pytest.raises(FiltrationError):
        lower_star_filtration(cx, {0: 1.0})
    with pytest.raises(FiltrationError):
        lower_star_filtration(cx, {0: 1.0, 1: math.nan})


def test_problems_detects_bad_orders():
    cx, _ = build_path_complex([1.0, 2.0])
    f = lower_star_filtration(cx, {0: 1.0, 1: 2.0})
    broken = Filtration(cx, [2, 0, 1], f.cell_value, owner=f.owner, vertex_rank=f.vertex_rank)
    assert any("precede" in p for p in broken.problems())
    dec = Filtration(cx, [1, 0, 2], f.cell_value, owner=f.owner, vertex_rank=f.vertex_rank)
    assert any("decreases" in p for p in dec.problems())
    assert any("permutation" in p for p in Filtration(cx, [0, 1], f.cell_value).problems())


def test_dump_format():
    cx, _ = build_path_complex([1.0, 3.0, 2.0])
    f = lower_star_filtration(cx, {0: 1.0, 1: 3.0, 2: 2.0})
    assert f.dump() == "0 1.0\n2 2.0\n1 3.0\n3 3.0\n4 3.0\n"


def check_lower_star_structure(cx, h):
    f = lower_star_filtration(cx, h)
    assert f.problems() == []
    assert sorted(f.order) == sorted(cx.cells)
    ranked = sorted(cx.vertices(), key=lambda v: (h[v], v))
    seen: set[int] = set()
    pos = 0
    for v in ranked:
        ls = lower_star(cx, h, v)
        # the block owned by v is exactly its lower star, and prefixes are unions
        block = f.order[pos:pos + len(ls)]
        assert set(block) == ls
        pos += len(ls)
        seen |= ls
        assert set(f.order[:pos]) == seen
        for c in ls:
            assert f.cell_value[c] == max(h[u] for u in cx.cell_vertices(c))
    assert pos == len(f.order)


complexes = st.lists(
    st.lists(st.integers(0, 6), min_size=1, max_size=4, unique=True), min_size=1, max_size=6
)


@settings(max_examples=60, deadline=None)
@given(complexes, st.lists(st.integers(0, 3), min_size=7, max_size=7))
def test_lower_star_invariants_with_ties(simps, raw):
    cx, ids = simplicial_closure(simps)
    h = {ids[(v,)]: float(raw[v]) for (v,) in (k for k in ids if len(k) == 1)}
    check_lower_star_structure(cx, h)


def test_lower_star_invariants_on_stacked_complex():
    rng = np.random.default_rng(4)
    frames = rng.uniform(0, 100, (3, 15, 2))
    cx = build_stacked_complex(frames).complex
    for flt in plane_filters(cx):
        check_lower_star_structure(cx, flt.values)
