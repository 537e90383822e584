"""Lower-star filtrations driven by scalar values on vertices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .cellcomplex import CellComplex

#: canonical order of the eight plane filters in a signature
PLANE_LABELS = (
    "horizontal-min",
    "horizontal-max",
    "vertical-min",
    "vertical-max",
    "oblique-pp-min",
    "oblique-pp-max",
    "oblique-pm-min",
    "oblique-pm-max",
)


class FiltrationError(ValueError):
    pass


@dataclass(frozen=True)
class FilterFunction:
    values: Mapping[int, float]
    label: str = ""


@dataclass
class Filtration:
    """A total order on the cells of a complex with a value per cell.

    ``vertex_rank`` maps each vertex to its 1-based position in the sorted
    vertex sequence, i.e. the index of the sublevel complex it opens; it is
    what the ordinal diagram coordinates use.  ``owner`` maps each cell to
    the vertex whose lower star contains it.
    """

    complex: CellComplex
    order: list[int]
    cell_value: dict[int, float]
    label: str = ""
    owner: dict[int, int] = field(default_factory=dict)
    vertex_rank: dict[int, int] = field(default_factory=dict)
    cell_index: dict[int, int] = field(init=False)

    def __post_init__(self):
        self.cell_index = {c: i for i, c in enumerate(self.order)}

    def __len__(self) -> int:
        return len(self.order)

    def values_in_order(self) -> np.ndarray:
        return np.array([self.cell_value[c] for c in self.order], dtype=float)

    def step_of(self, cid: int) -> int:
        """Index of the first sublevel complex K_j containing ``cid`` (1-based)."""
        return self.vertex_rank[self.owner[cid]]

    def problems(self) -> list[str]:
        """Violations of the filtration invariants, empty when consistent."""
        out = []
        cells = self.complex.cells
        if len(self.cell_index) != len(self.order) or set(self.order) != set(cells):
            out.append("order is not a permutation of the cells")
            return out
        prev = -math.inf
        for pos, c in enumerate(self.order):
            v = self.cell_value[c]
            if v < prev:
                out.append(f"value decreases at position {pos} (cell {c})")
            prev = v
            for b in cells[c].boundary:
                if self.cell_index.get(b, math.inf) >= pos:
                    out.append(f"face {b} does not precede cell {c}")
        return out

    def dump(self) -> str:
        """``id value`` per cell, in filtration order."""
        return "".join(f"{c} {self.cell_value[c]!r}\n" for c in self.order)


def plane_filters(complex: CellComplex) -> list[FilterFunction]:
    """Distances from each vertex to eight planes parallel to the time axis.

    The planes are the sides of the vertices' (x, y) bounding box and the
    two pairs of supporting diagonal planes ``x + y = c`` and ``x - y = c``.
    Every filter is non-negative and vanishes somewhere.
    """
    pos = complex.vertex_positions
    verts = complex.vertices()
    if not pos or any(v not in pos for v in verts):
        raise FiltrationError("complex lacks vertex positions")
    ids = np.array(verts)
    xy = np.array([pos[v][:2] for v in verts], dtype=float)
    x, y = xy[:, 0], xy[:, 1]
    s, d = x + y, x - y
    r2 = math.sqrt(2.0)
    columns = (
        y - y.min(),
        y.max() - y,
        x - x.min(),
        x.max() - x,
        (s - s.min()) / r2,
        (s.max() - s) / r2,
        (d - d.min()) / r2,
        (d.max() - d) / r2,
    )
    return [
        FilterFunction(dict(zip(ids.tolist(), col.tolist())), label)
        for label, col in zip(PLANE_LABELS, columns)
    ]


def lower_star_filtration(complex: CellComplex, h: FilterFunction | Mapping[int, float]) -> Filtration:
    """Order cells by lower stars of vertices sorted by ``h``.

    Vertices are processed by ascending value, ties by ascending id.  A cell
    joins the lower star of its highest vertex (largest id among equals) and
    takes that vertex's value.  Inside one lower star cells are sorted by
    dimension, then id.
    """
    label = h.label if isinstance(h, FilterFunction) else ""
    values = h.values if isinstance(h, FilterFunction) else h
    verts = complex.vertices()
    for v in verts:
        if v not in values:
            raise FiltrationError(f"vertex {v} has no filter value")
        if not math.isfinite(values[v]):
            raise FiltrationError(f"vertex {v} has non-finite value {values[v]}")
    ranked = sorted(verts, key=lambda v: (values[v], v))
    rank = {v: i + 1 for i, v in enumerate(ranked)}

    cells = complex.cells
    owner: dict[int, int] = {}
    for c in sorted(cells.values(), key=lambda c: (c.dim, c.id)):
        if c.dim == 0:
            owner[c.id] = c.id
        else:
            owner[c.id] = max((owner[b] for b in c.boundary), key=rank.__getitem__)
    order = sorted(cells, key=lambda c: (rank[owner[c]], cells[c].dim, c))
    cell_value = {c: float(values[owner[c]]) for c in cells}
    return Filtration(complex, order, cell_value, label, owner, rank)


def lower_star(complex: CellComplex, h: Mapping[int, float], v: int) -> set[int]:
    """Cells of the closed star of ``v`` having ``v`` as their highest vertex.

    Straight from the definition; used to cross-check the filtration.
    """
    key = lambda u: (h[u], u)  # noqa: E731
    out = set()
    for c in complex.closed_star(v):
        verts = complex.cell_vertices(c)
        if v in verts and all(key(u) <= key(v) for u in verts):
            out.add(c)
    return out
