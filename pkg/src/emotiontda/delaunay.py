"""Planar Delaunay triangulation by incremental Bowyer-Watson insertion.

Points are inserted in index order into a large enclosing triangle.  After
the enclosing vertices are stripped, any pocket left between the mesh and
the convex hull is filled and Lawson flips restore the empty-circumcircle
property.  Cocircular quadrilaterals are then resolved deterministically:
the diagonal with the lexicographically smaller (sorted) vertex pair wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

#: relative tolerance on orientation and in-circle determinants
REL_TOL = 1e-9


class DegenerateInputError(ValueError):
    """The point set has no 2-D triangulation (too few, collinear, repeated)."""


def orient(a, b, c, tol: float = REL_TOL) -> int:
    """+1 if a, b, c turn counter-clockwise, -1 clockwise, 0 if (nearly) collinear."""
    l = (b[0] - a[0]) * (c[1] - a[1])
    r = (b[1] - a[1]) * (c[0] - a[0])
    det = l - r
    if abs(det) <= tol * (abs(l) + abs(r)):
        return 0
    return 1 if det > 0 else -1


def incircle(a, b, c, d, tol: float = REL_TOL) -> int:
    """Sign of the in-circle determinant for counter-clockwise a, b, c.

    +1: d strictly inside the circumcircle, -1 strictly outside, 0 on it
    up to the relative tolerance.
    """
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    t1 = alift * (bdx * cdy - cdx * bdy)
    t2 = blift * (cdx * ady - adx * cdy)
    t3 = clift * (adx * bdy - bdx * ady)
    det = t1 + t2 + t3
    bound = (
        alift * (abs(bdx * cdy) + abs(cdx * bdy))
        + blift * (abs(cdx * ady) + abs(adx * cdy))
        + clift * (abs(adx * bdy) + abs(bdx * ady))
    )
    if abs(det) <= tol * bound:
        return 0
    return 1 if det > 0 else -1


@dataclass(frozen=True, eq=False)
class Triangulation2D:
    vertices: np.ndarray  # (n, 2)
    triangles: tuple[tuple[int, int, int], ...]  # sorted index triples
    edges: tuple[tuple[int, int], ...]  # sorted index pairs

    def __eq__(self, other) -> bool:
        if not isinstance(other, Triangulation2D):
            return NotImplemented
        return (
            self.triangles == other.triangles
            and self.edges == other.edges
            and np.array_equal(self.vertices, other.vertices)
        )

    __hash__ = None

    @property
    def n_points(self) -> int:
        return len(self.vertices)

    def triangle_set(self) -> set[tuple[int, int, int]]:
        return set(self.triangles)

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.edges)


class _Mesh:
    """Triangles as counter-clockwise triples plus a directed-edge index."""

    def __init__(self, pts: list[tuple[float, float]]):
        self.pts = pts
        self.tris: set[tuple[int, int, int]] = set()
        self.edge: dict[tuple[int, int], tuple[int, int, int]] = {}

    @staticmethod
    def _canon(t):
        a, b, c = t
        # rotate so the smallest index leads; keeps orientation
        if b < a and b < c:
            return (b, c, a)
        if c < a and c < b:
            return (c, a, b)
        return t

    def add(self, a: int, b: int, c: int) -> None:
        t = self._canon((a, b, c))
        self.tris.add(t)
        self.edge[(a, b)] = t
        self.edge[(b, c)] = t
        self.edge[(c, a)] = t

    def remove(self, t) -> None:
        a, b, c = t
        self.tris.discard(t)
        for e in ((a, b), (b, c), (c, a)):
            if self.edge.get(e) == t:
                del self.edge[e]

    def neighbour(self, a: int, b: int):
        """Triangle across the directed edge a->b, if any."""
        return self.edge.get((b, a))

    def locate(self, p) -> tuple[int, int, int]:
        pts = self.pts
        for t in self.tris:
            a, b, c = t
            if (
                orient(pts[a], pts[b], p, 0.0) >= 0
                and orient(pts[b], pts[c], p, 0.0) >= 0
                and orient(pts[c], pts[a], p, 0.0) >= 0
            ):
                return t
        raise DegenerateInputError("point outside the enclosing triangle")

    def insert(self, i: int) -> None:
        pts = self.pts
        p = pts[i]
        start = self.locate(p)
        cavity = {start}
        stack = [start]
        while stack:
            a, b, c = stack.pop()
            for u, v in ((a, b), (b, c), (c, a)):
                nb = self.neighbour(u, v)
                if nb is None or nb in cavity:
                    continue
                x, y, z = nb
                if incircle(pts[x], pts[y], pts[z], p) > 0:
                    cavity.add(nb)
                    stack.append(nb)
        # grow until every boundary edge sees p strictly on its left
        while True:
            grown = False
            for t in list(cavity):
                a, b, c = t
                for u, v in ((a, b), (b, c), (c, a)):
                    nb = self.neighbour(u, v)
                    if nb is None or nb in cavity:
                        continue
                    if orient(pts[u], pts[v], p) <= 0:
                        cavity.add(nb)
                        grown = True
            if not grown:
                break
        rim = []
        for t in cavity:
            a, b, c = t
            for u, v in ((a, b), (b, c), (c, a)):
                nb = self.neighbour(u, v)
                if nb is None or nb not in cavity:
                    rim.append((u, v))
        for t in cavity:
            self.remove(t)
        for u, v in rim:
            self.add(u, v, i)

    def boundary_edges(self) -> list[tuple[int, int]]:
        return [e for e in self.edge if (e[1], e[0]) not in self.edge]


def _check_input(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DegenerateInputError(f"expected an (n, 2) array, got shape {pts.shape}")
    if len(pts) < 3:
        raise DegenerateInputError(f"need at least 3 points, got {len(pts)}")
    if not np.all(np.isfinite(pts)):
        raise DegenerateInputError("non-finite coordinates")
    uniq = np.unique(pts, axis=0)
    if len(uniq) != len(pts):
        raise DegenerateInputError("repeated points")
    p0 = pts[0]
    far = pts[int(np.argmax(np.sum((pts - p0) ** 2, axis=1)))]
    if not any(orient(p0, far, q) != 0 for q in pts):
        raise DegenerateInputError("all points are collinear")
    return pts


def _fill_pockets(mesh: _Mesh, n: int) -> None:
    """Add triangles at reflex boundary corners until the mesh is convex."""
    pts = mesh.pts
    for _ in range(4 * n + 8):
        out = {}
        for a, b in mesh.boundary_edges():
            out.setdefault(a, []).append(b)
        added = False
        for a, b in mesh.boundary_edges():
            for c in out.get(b, ()):
                if c == a or orient(pts[a], pts[b], pts[c]) >= 0:
                    continue
                # candidate ear (a, c, b); must not swallow another point
                tri = (pts[a], pts[c], pts[b])
                clear = True
                for k in range(n):
                    if k in (a, b, c):
                        continue
                    q = pts[k]
                    if (
                        orient(tri[0], tri[1], q) >= 0
                        and orient(tri[1], tri[2], q) >= 0
                        and orient(tri[2], tri[0], q) >= 0
                    ):
                        clear = False
                        break
                if clear:
                    mesh.add(a, c, b)
                    added = True
                    break
            if added:
                break
        if not added:
            return
    raise DegenerateInputError("could not close the convex hull")


def _flip_pass(mesh: _Mesh, max_flips: int) -> None:
    """Lawson flips, then the cocircular tie-break, until stable."""
    pts = mesh.pts
    flips = 0
    changed = True
    while changed:
        changed = False
        for (a, b), t1 in list(mesh.edge.items()):
            if a > b or t1 not in mesh.tris:
                continue
            t2 = mesh.neighbour(a, b)
            if t2 is None:
                continue
            c = next(x for x in t1 if x not in (a, b))
            d = next(x for x in t2 if x not in (a, b))
            # t1 holds a->b, so its vertices in ccw order are (a, b, c)
            s = incircle(pts[a], pts[b], pts[c], pts[d])
            if s < 0:
                continue
            if s == 0 and tuple(sorted((c, d))) >= (a, b):
                continue
            if orient(pts[a], pts[d], pts[c]) <= 0 or orient(pts[d], pts[b], pts[c]) <= 0:
                continue
            mesh.remove(t1)
            mesh.remove(t2)
            mesh.add(a, d, c)
            mesh.add(d, b, c)
            changed = True
            flips += 1
            if flips > max_flips:
                raise DegenerateInputError("edge flipping did not settle")


def delaunay2d(points: Sequence[Sequence[float]] | np.ndarray) -> Triangulation2D:
    """Delaunay triangulation of a planar point set.

    Raises :class:`DegenerateInputError` for fewer than three points,
    repeated points or a collinear set.
    """
    pts_arr = _check_input(points)
    n = len(pts_arr)
    lo = pts_arr.min(axis=0)
    hi = pts_arr.max(axis=0)
    centre = (lo + hi) / 2.0
    span = max(float(np.max(hi - lo)), 1e-12)
    big = 64.0 * span
    pts = [(float(x), float(y)) for x, y in pts_arr]
    pts += [
        (centre[0] - 2 * big, centre[1] - big),
        (centre[0] + 2 * big, centre[1] - big),
        (centre[0], centre[1] + 2 * big),
    ]
    mesh = _Mesh(pts)
    mesh.add(n, n + 1, n + 2)
    for i in range(n):
        mesh.insert(i)
    for t in list(mesh.tris):
        if max(t) >= n:
            mesh.remove(t)
    _fill_pockets(mesh, n)
    _flip_pass(mesh, max_flips=50 * n * n)

    triangles = sorted(tuple(sorted(t)) for t in mesh.tris)
    edges = sorted({(min(u, v), max(u, v)) for u, v in mesh.edge})
    return Triangulation2D(pts_arr.copy(), tuple(triangles), tuple(edges))
