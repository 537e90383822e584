"""Builders for the complexes used by the signature pipeline.

* per-frame Delaunay triangulations of the facial landmarks,
* the stacked spatio-temporal complex joining consecutive frames with
  temporal edges, quads and prisms,
* the path complex of a sampled audio signal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cellcomplex import CellComplex, ComplexError
from .delaunay import DegenerateInputError, Triangulation2D, delaunay2d

__all__ = [
    "AudioSignal",
    "LandmarkFrame",
    "StackedComplex",
    "as_frame_array",
    "build_path_complex",
    "build_stacked_complex",
    "delaunay2d",
]


@dataclass(frozen=True)
class LandmarkFrame:
    points: np.ndarray  # (n_landmarks, 2) pixel coordinates
    frame_index: int = 0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"landmarks must be (n, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("non-finite landmark coordinates")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class AudioSignal:
    samples: np.ndarray
    sample_rate: int = 48000

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float).reshape(-1)
        if s.size == 0:
            raise ValueError("empty audio signal")
        if not np.all(np.isfinite(s)):
            raise ValueError("non-finite audio samples")
        object.__setattr__(self, "samples", s)

    def __len__(self) -> int:
        return len(self.samples)


def as_frame_array(frames) -> np.ndarray:
    """Landmark frames as a float array of shape (n_frames, n_landmarks, 2)."""
    if isinstance(frames, np.ndarray):
        arr = np.asarray(frames, dtype=float)
    else:
        frames = list(frames)
        if not frames:
            raise ValueError("no frames")
        counts = {len(f.points if isinstance(f, LandmarkFrame) else f) for f in frames}
        if len(counts) != 1:
            raise ValueError(f"frames have different landmark counts: {sorted(counts)}")
        arr = np.stack(
            [np.asarray(f.points if isinstance(f, LandmarkFrame) else f, dtype=float) for f in frames]
        )
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] == 0:
        raise ValueError(f"expected frames of shape (F, L, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite landmark coordinates")
    return arr


@dataclass
class StackedComplex:
    """The stacked complex together with the bookkeeping used to build it."""

    complex: CellComplex
    vertex_ids: np.ndarray  # (n_frames, n_landmarks) -> cell id
    triangulations: list[Triangulation2D]
    z_spacing: float


def build_stacked_complex(frames) -> StackedComplex:
    """Stack per-frame Delaunay triangulations into a 3-dimensional complex.

    Between frames k and k+1 every landmark gets a temporal edge; an edge
    present in both triangulations gets a quad, a triangle present in both
    gets a prism bounded by its two copies and three quads.  Cells are
    inserted by dimension, then frame, then sorted index tuple.
    """
    arr = as_frame_array(frames)
    n_frames, n_lm, _ = arr.shape
    tris = []
    for k in range(n_frames):
        try:
            tris.append(delaunay2d(arr[k]))
        except DegenerateInputError as exc:
            raise DegenerateInputError(f"frame {k}: {exc}") from exc

    lo, hi = arr[0].min(axis=0), arr[0].max(axis=0)
    spacing = float(np.hypot(*(hi - lo))) / n_frames

    cx = CellComplex(vertex_positions={})
    vid = [
        [cx.add_vertex((arr[k, i, 0], arr[k, i, 1], k * spacing)) for i in range(n_lm)]
        for k in range(n_frames)
    ]

    edge_id: list[dict[tuple[int, int], int]] = []
    for k in range(n_frames):
        ids = {}
        for i, j in tris[k].edges:
            ids[(i, j)] = cx.add_cell(1, (vid[k][i], vid[k][j]))
        edge_id.append(ids)
    temporal: list[list[int]] = []
    for k in range(n_frames - 1):
        temporal.append([cx.add_cell(1, (vid[k][i], vid[k + 1][i])) for i in range(n_lm)])

    tri_id: list[dict[tuple[int, int, int], int]] = []
    for k in range(n_frames):
        ids = {}
        for t in tris[k].triangles:
            i, j, l = t
            ids[t] = cx.add_cell(
                2, (edge_id[k][(i, j)], edge_id[k][(j, l)], edge_id[k][(i, l)])
            )
        tri_id.append(ids)
    quad_id: list[dict[tuple[int, int], int]] = []
    for k in range(n_frames - 1):
        ids = {}
        shared = sorted(set(edge_id[k]) & set(edge_id[k + 1]))
        for i, j in shared:
            ids[(i, j)] = cx.add_cell(
                2,
                (edge_id[k][(i, j)], edge_id[k + 1][(i, j)], temporal[k][i], temporal[k][j]),
            )
        quad_id.append(ids)

    for k in range(n_frames - 1):
        for t in sorted(set(tri_id[k]) & set(tri_id[k + 1])):
            i, j, l = t
            cx.add_cell(
                3,
                (
                    tri_id[k][t],
                    tri_id[k + 1][t],
                    quad_id[k][(i, j)],
                    quad_id[k][(j, l)],
                    quad_id[k][(i, l)],
                ),
            )
    return StackedComplex(cx, np.array(vid, dtype=np.int64), tris, spacing)


def build_path_complex(signal: AudioSignal | Sequence[float] | np.ndarray) -> tuple[CellComplex, dict[int, float]]:
    """Path complex of a sampled signal and its amplitude filter values.

    Vertex ``i`` carries sample ``i``; an edge joins consecutive samples.
    Returns ``(complex, {vertex_id: amplitude})``.
    """
    samples = signal.samples if isinstance(signal, AudioSignal) else np.asarray(signal, dtype=float).reshape(-1)
    if samples.size == 0:
        raise ComplexError("empty signal")
    n = len(samples)
    cx = CellComplex()
    for _ in range(n):
        cx.add_cell(0)
    for i in range(n - 1):
        cx.add_cell(1, (i, i + 1))
    values = {i: float(samples[i]) for i in range(n)}
    return cx, values
