"""Finite cell complexes with boundary sets over Z/2.

A cell is identified by an integer id; its boundary is the *set* of ids of
the codimension-one cells it is attached to.  No orientation is stored, so
all chain arithmetic is mod 2.  Ids are handed out densely in insertion
order, which downstream code relies on as a deterministic tie-break.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np


class ComplexError(ValueError):
    """Raised when a cell cannot be added or a query is ill-posed."""


@dataclass(frozen=True)
class Cell:
    id: int
    dim: int
    boundary: frozenset[int]


@dataclass(frozen=True)
class Violation:
    """One structural defect found by :meth:`CellComplex.validate`.

    ``kind`` is ``"face-closure"``, ``"dimension"`` or ``"boundary-squared"``.
    """

    kind: str
    cell: int
    detail: tuple[int, ...] = ()


@dataclass
class CellComplex:
    cells: dict[int, Cell] = field(default_factory=dict)
    vertex_positions: dict[int, np.ndarray] | None = None
    _next_id: int = 0
    _cofaces: dict[int, list[int]] | None = field(default=None, repr=False)

    # -- construction ------------------------------------------------------

    def add_cell(self, dim: int, boundary_ids: Iterable[int] = ()) -> int:
        """Append a cell and return its id.

        The boundary must consist of existing, pairwise distinct cells of
        dimension ``dim - 1``; it is empty exactly for vertices.  An edge
        needs two distinct endpoints.
        """
        if dim < 0:
            raise ComplexError(f"negative dimension {dim}")
        ids = list(boundary_ids)
        bset = frozenset(ids)
        if len(bset) != len(ids):
            raise ComplexError(f"repeated boundary ids {sorted(ids)}")
        if dim == 0 and bset:
            raise ComplexError("a vertex has empty boundary")
        if dim > 0 and not bset:
            raise ComplexError(f"a {dim}-cell needs a non-empty boundary")
        if dim == 1 and len(bset) != 2:
            raise ComplexError(f"an edge needs exactly two endpoints, got {sorted(bset)}")
        for b in bset:
            face = self.cells.get(b)
            if face is None:
                raise ComplexError(f"unknown boundary cell {b}")
            if face.dim != dim - 1:
                raise ComplexError(
                    f"boundary cell {b} has dimension {face.dim}, expected {dim - 1}"
                )
        cid = self._next_id
        self.cells[cid] = Cell(cid, dim, bset)
        self._next_id += 1
        self._cofaces = None
        return cid

    def add_vertex(self, position: Sequence[float] | None = None) -> int:
        vid = self.add_cell(0)
        if position is not None:
            if self.vertex_positions is None:
                self.vertex_positions = {}
            self.vertex_positions[vid] = np.asarray(position, dtype=float)
        return vid

    @classmethod
    def from_cells(
        cls,
        cells: Mapping[int, tuple[int, Iterable[int]]] | Iterable[tuple[int, int, Iterable[int]]],
        vertex_positions: Mapping[int, Sequence[float]] | None = None,
    ) -> "CellComplex":
        """Build a complex without any checks (for loading and for tests).

        Accepts ``{id: (dim, boundary)}`` or an iterable of
        ``(id, dim, boundary)``.  Use :meth:`validate` afterwards.
        """
        items = (
            [(cid, d, b) for cid, (d, b) in cells.items()]
            if isinstance(cells, Mapping)
            else list(cells)
        )
        cx = cls()
        for cid, d, b in sorted(items, key=lambda t: t[0]):
            cx.cells[int(cid)] = Cell(int(cid), int(d), frozenset(int(x) for x in b))
        cx._next_id = max(cx.cells, default=-1) + 1
        if vertex_positions is not None:
            cx.vertex_positions = {
                int(k): np.asarray(v, dtype=float) for k, v in vertex_positions.items()
            }
        return cx

    def without(self, ids: Iterable[int]) -> "CellComplex":
        """Copy of the complex with the given cells dropped (no re-closure)."""
        drop = set(ids)
        out = CellComplex.from_cells(
            [(c.id, c.dim, c.boundary) for c in self.cells.values() if c.id not in drop]
        )
        out._next_id = self._next_id
        if self.vertex_positions is not None:
            out.vertex_positions = {
                k: v for k, v in self.vertex_positions.items() if k not in drop
            }
        return out

    # -- basic queries -----------------------------------------------------

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self) -> Iterator[Cell]:
        return iter(self.cells.values())

    def __contains__(self, cid: object) -> bool:
        return cid in self.cells

    def __getitem__(self, cid: int) -> Cell:
        return self.cells[cid]

    def dim(self, cid: int) -> int:
        return self.cells[cid].dim

    def boundary(self, cid: int) -> frozenset[int]:
        return self.cells[cid].boundary

    @property
    def dimension(self) -> int:
        return max((c.dim for c in self.cells.values()), default=-1)

    def vertices(self) -> list[int]:
        return [c.id for c in self.cells.values() if c.dim == 0]

    def cells_of_dim(self, dim: int) -> list[int]:
        return [c.id for c in self.cells.values() if c.dim == dim]

    def counts(self) -> list[int]:
        """Number of cells in each dimension 0..dimension."""
        out = [0] * (self.dimension + 1)
        for c in self.cells.values():
            out[c.dim] += 1
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** c.dim for c in self.cells.values())

    def cofaces(self, cid: int) -> list[int]:
        """Cells having ``cid`` in their boundary."""
        if self._cofaces is None:
            co: dict[int, list[int]] = {k: [] for k in self.cells}
            for c in self.cells.values():
                for b in c.boundary:
                    co.setdefault(b, []).append(c.id)
            self._cofaces = co
        return self._cofaces.get(cid, [])

    def faces(self, cid: int) -> set[int]:
        """All faces of a cell, the cell itself included."""
        seen = {cid}
        stack = [cid]
        while stack:
            for b in self.cells[stack.pop()].boundary:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        return seen

    def cell_vertices(self, cid: int) -> set[int]:
        return {f for f in self.faces(cid) if self.cells[f].dim == 0}

    def closed_star(self, v: int) -> set[int]:
        """Cells sharing a common coface with the vertex ``v``."""
        cell = self.cells.get(v)
        if cell is None or cell.dim != 0:
            raise ComplexError(f"{v} is not a vertex of the complex")
        up = {v}
        stack = [v]
        while stack:
            for c in self.cofaces(stack.pop()):
                if c not in up:
                    up.add(c)
                    stack.append(c)
        star: set[int] = set()
        for mu in up:
            star |= self.faces(mu)
        return star

    def is_subcomplex(self, ids: Iterable[int]) -> bool:
        sub = set(ids)
        return all(self.cells[c].boundary <= sub for c in sub)

    # -- validation --------------------------------------------------------

    def validate(self) -> list[Violation]:
        """Every face-closure, dimension and boundary-squared defect.

        An empty list means the complex is well formed.
        """
        bad: list[Violation] = []
        for c in self.cells.values():
            missing = tuple(sorted(b for b in c.boundary if b not in self.cells))
            if missing:
                bad.append(Violation("face-closure", c.id, missing))
            wrong = tuple(
                sorted(
                    b for b in c.boundary
                    if b in self.cells and self.cells[b].dim != c.dim - 1
                )
            )
            if wrong or (c.dim == 0) != (not c.boundary):
                bad.append(Violation("dimension", c.id, wrong))
            if c.dim >= 2:
                tally: Counter[int] = Counter()
                for b in c.boundary:
                    if b in self.cells:
                        tally.update(self.cells[b].boundary)
                odd = tuple(sorted(k for k, n in tally.items() if n % 2))
                if odd:
                    bad.append(Violation("boundary-squared", c.id, odd))
        return bad

    def is_valid(self) -> bool:
        return not self.validate()

    # -- text format -------------------------------------------------------

    def to_text(self) -> str:
        """One line ``id dim b1 ... bk`` per cell, ids ascending."""
        lines = []
        for cid in sorted(self.cells):
            c = self.cells[cid]
            lines.append(" ".join(map(str, [cid, c.dim, *sorted(c.boundary)])))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "CellComplex":
        items = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                nums = [int(tok) for tok in line.split()]
            except ValueError as exc:
                raise ComplexError(f"line {lineno}: non-integer token") from exc
            if len(nums) < 2:
                raise ComplexError(f"line {lineno}: expected 'id dim boundary...'")
            items.append((nums[0], nums[1], nums[2:]))
        return cls.from_cells(items)


def euler_characteristic(complex: CellComplex) -> int:
    return complex.euler_characteristic()


def closed_star(complex: CellComplex, v: int) -> set[int]:
    return complex.closed_star(v)


def validate(complex: CellComplex) -> list[Violation]:
    return complex.validate()


def add_cell(complex: CellComplex, dim: int, boundary_ids: Iterable[int] = ()) -> int:
    return complex.add_cell(dim, boundary_ids)


def simplicial_closure(simplices: Iterable[Sequence[int]]) -> tuple[CellComplex, dict[tuple[int, ...], int]]:
    """Cell complex of all faces of the given simplices (vertex tuples).

    Returns the complex and the map from sorted vertex tuple to cell id.
    Cells are inserted by dimension, then lexicographically.
    """
    faces: set[tuple[int, ...]] = set()
    for s in simplices:
        s = tuple(sorted(set(s)))
        k = len(s)
        for mask in range(1, 1 << k):
            faces.add(tuple(s[i] for i in range(k) if mask >> i & 1))
    cx = CellComplex()
    ids: dict[tuple[int, ...], int] = {}
    for f in sorted(faces, key=lambda t: (len(t), t)):
        if len(f) == 1:
            ids[f] = cx.add_cell(0)
        else:
            bd = [ids[f[:i] + f[i + 1:]] for i in range(len(f))]
            ids[f] = cx.add_cell(len(f) - 1, bd)
    return cx, ids
