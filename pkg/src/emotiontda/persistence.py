"""Persistence diagrams of filtrations over Z/2 and their persistent entropy.

Pairs are found by the standard column reduction of the boundary matrix,
with columns and rows indexed by filtration position and stored as Python
integers used as bit sets.  In dimension 0 the same pairing is obtained
with a union-find sweep (elder rule), which avoids long reduction chains on
long audio paths; ``method="reduction"`` reduces every column instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .filtration import Filtration

__all__ = [
    "PersistenceDiagram",
    "PersistenceError",
    "betti_oracle",
    "cap_infinite",
    "compute_persistence",
    "default_cap",
    "persistent_entropy",
]


class PersistenceError(ValueError):
    pass


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of ``(dim, birth, death)`` points; ``death`` may be ``inf``.

    ``creators`` / ``killers`` hold the cell ids responsible for each point
    (``-1`` for a class that never dies or when unknown).
    """

    dims: np.ndarray
    births: np.ndarray
    deaths: np.ndarray
    creators: np.ndarray
    killers: np.ndarray
    label: str = ""

    @classmethod
    def from_points(cls, points: Iterable[Sequence[float]], label: str = "") -> "PersistenceDiagram":
        pts = [tuple(p) for p in points]
        n = len(pts)
        return cls(
            np.array([int(p[0]) for p in pts], dtype=np.int64),
            np.array([p[1] for p in pts], dtype=float),
            np.array([p[2] for p in pts], dtype=float),
            np.full(n, -1, dtype=np.int64),
            np.full(n, -1, dtype=np.int64),
            label,
        )

    def __len__(self) -> int:
        return len(self.dims)

    def points(self, dim: int | None = None) -> list[tuple[int, float, float]]:
        """Sorted ``(dim, birth, death)`` tuples, optionally of one dimension."""
        pts = zip(self.dims.tolist(), self.births.tolist(), self.deaths.tolist())
        return sorted(p for p in pts if dim is None or p[0] == dim)

    def lifetimes(self) -> np.ndarray:
        return self.deaths - self.births

    def infinite_counts(self) -> list[int]:
        """Number of never-dying classes per dimension (the Betti numbers)."""
        top = int(self.dims.max()) if len(self) else -1
        inf = np.isinf(self.deaths)
        return [int(np.sum(inf & (self.dims == d))) for d in range(top + 1)]

    def restrict(self, dims: Iterable[int]) -> "PersistenceDiagram":
        keep = np.isin(self.dims, list(dims))
        return replace(
            self,
            dims=self.dims[keep],
            births=self.births[keep],
            deaths=self.deaths[keep],
            creators=self.creators[keep],
            killers=self.killers[keep],
        )

    def dump(self) -> str:
        """``dim birth death`` per point; ``inf`` for classes that never die."""
        lines = []
        for d, b, e in self.points():
            lines.append(f"{d} {b!r} {'inf' if math.isinf(e) else repr(e)}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def parse(cls, text: str, label: str = "") -> "PersistenceDiagram":
        pts = []
        for line in text.splitlines():
            if line.strip():
                d, b, e = line.split()
                pts.append((int(d), float(b), float(e)))
        return cls.from_points(pts, label)


def _elder_rule(f: Filtration, dims: list[int], bounds: list[list[int]]):
    """Dimension-0 pairs by union-find; returns (pairs, cycle_edges)."""
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    pairs = []
    cycles = []
    for pos, d in enumerate(dims):
        if d == 0:
            parent[pos] = pos
        elif d == 1:
            a, b = bounds[pos]
            ra, rb = find(a), find(b)
            if ra == rb:
                cycles.append(pos)
                continue
            # roots are the oldest vertex of their component
            young, old = (ra, rb) if ra > rb else (rb, ra)
            parent[young] = old
            pairs.append((young, pos))
    return pairs, cycles


def _reduce(columns: Iterable[tuple[int, int]]):
    """Column reduction mod 2; yields (low, pos) for every non-zero column."""
    pivot: dict[int, int] = {}
    for pos, col in columns:
        while col:
            low = col.bit_length() - 1
            other = pivot.get(low)
            if other is None:
                pivot[low] = col
                yield low, pos
                break
            col ^= other


def compute_persistence(
    f: Filtration,
    coords: str = "value",
    method: str = "fast",
    check: bool = True,
) -> PersistenceDiagram:
    """Persistence diagram of a filtration.

    ``coords="value"`` places points at cell values; ``coords="index"`` at
    the 1-based index of the sublevel complex where a cell first appears.
    Zero-length points are kept.
    """
    if coords not in ("value", "index"):
        raise ValueError(f"unknown coords {coords!r}")
    if method not in ("fast", "reduction"):
        raise ValueError(f"unknown method {method!r}")
    if check:
        bad = f.problems()
        if bad:
            raise PersistenceError("invalid filtration: " + "; ".join(bad[:3]))
    cells = f.complex.cells
    index = f.cell_index
    order = f.order
    dims = [cells[c].dim for c in order]
    bounds = [[index[b] for b in cells[c].boundary] for c in order]

    pairs: list[tuple[int, int]] = []
    if method == "fast":
        low_pairs, _ = _elder_rule(f, dims, bounds)
        pairs.extend(low_pairs)
        higher = (
            (pos, sum(1 << b for b in bounds[pos])) for pos, d in enumerate(dims) if d >= 2
        )
    else:
        higher = (
            (pos, sum(1 << b for b in bounds[pos])) for pos, d in enumerate(dims) if d >= 1
        )
    pairs.extend(_reduce(higher))

    paired_birth = {b for b, _ in pairs}
    killers = {k for _, k in pairs}
    # a cell whose reduced column vanished creates a class
    essential = [p for p in range(len(order)) if p not in killers and p not in paired_birth]

    def coord(pos: int) -> float:
        c = order[pos]
        return float(f.cell_value[c]) if coords == "value" else float(f.step_of(c))

    rows = [(dims[b], coord(b), coord(k), order[b], order[k]) for b, k in pairs]
    rows += [(dims[b], coord(b), math.inf, order[b], -1) for b in essential]
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    return PersistenceDiagram(
        np.array([r[0] for r in rows], dtype=np.int64),
        np.array([r[1] for r in rows], dtype=float),
        np.array([r[2] for r in rows], dtype=float),
        np.array([r[3] for r in rows], dtype=np.int64),
        np.array([r[4] for r in rows], dtype=np.int64),
        f.label,
    )


def default_cap(f: Filtration, coords: str = "value") -> float:
    """The N used to cap infinite deaths: the largest coordinate that occurs."""
    if coords == "index":
        return float(len(f.vertex_rank))
    return float(max(f.cell_value.values()))


def cap_infinite(d: PersistenceDiagram, N: float) -> PersistenceDiagram:
    """Replace every infinite death by ``N + 1``."""
    finite = np.concatenate([d.births, d.deaths[np.isfinite(d.deaths)]])
    if finite.size and float(finite.max()) > N:
        raise PersistenceError(f"cap N={N} is below the finite coordinate {finite.max()}")
    deaths = np.where(np.isinf(d.deaths), N + 1.0, d.deaths)
    return replace(d, deaths=deaths)


def persistent_entropy(d: PersistenceDiagram, dims: Iterable[int] | None = None) -> float:
    """Shannon entropy (natural log) of the normalised interval lengths.

    Zero-length intervals do not contribute.  ``dims`` restricts the
    diagram to some homology dimensions first.
    """
    if dims is not None:
        d = d.restrict(dims)
    lengths = d.lifetimes()
    if not np.all(np.isfinite(lengths)):
        raise PersistenceError("diagram has infinite intervals; cap it first")
    lengths = lengths[lengths > 0]
    if lengths.size == 0:
        raise PersistenceError("all intervals have zero length; entropy undefined")
    p = lengths / math.fsum(lengths)
    return float(-math.fsum(p * np.log(p)))


def betti_oracle(f: Filtration, coords: str = "value") -> PersistenceDiagram:
    from .oracle import persistence_by_ranks

    return persistence_by_ranks(f, coords=coords)
