"""The 9-dimensional topological signature of a talking-face video.

Eight persistent entropies come from plane filtrations of the stacked
landmark complex, one from the amplitude filtration of the audio path.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .complexbuild import AudioSignal, as_frame_array, build_path_complex, build_stacked_complex
from .filtration import PLANE_LABELS, Filtration, lower_star_filtration, plane_filters
from .persistence import (
    PersistenceDiagram,
    cap_infinite,
    compute_persistence,
    default_cap,
    persistent_entropy,
)

FEATURE_NAMES = PLANE_LABELS + ("audio",)


@dataclass(frozen=True)
class SignatureOptions:
    n_frames: int = 9
    audio_points: int = 10000
    homology_dims: tuple[int, ...] | None = None  # None pools every dimension
    coords: str = "value"  # or "index" for ordinal diagram coordinates


@dataclass
class TopologicalSignature:
    video_features: np.ndarray
    audio_feature: float
    label: int | None = None
    video_id: str = ""

    def __post_init__(self):
        self.video_features = np.asarray(self.video_features, dtype=float).reshape(8)
        self.audio_feature = float(self.audio_feature)

    @property
    def vector(self) -> np.ndarray:
        return np.append(self.video_features, self.audio_feature)


def select_frames(total: int, k: int = 9) -> list[int]:
    """``k`` equally spaced frame indices from ``range(total)``, floor-rounded."""
    if total < 1:
        raise ValueError("no frames to select from")
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return [0]
    return [j * (total - 1) // (k - 1) for j in range(k)]


def subsample_signal(signal: AudioSignal, m: int = 10000) -> AudioSignal:
    """Keep ``m`` uniformly spaced samples; shorter signals pass through."""
    n = len(signal)
    if n <= m:
        return signal
    idx = np.array([j * (n - 1) // (m - 1) for j in range(m)], dtype=np.int64)
    return AudioSignal(signal.samples[idx], signal.sample_rate)


@dataclass
class FiltrationResult:
    label: str
    filtration: Filtration
    diagram: PersistenceDiagram
    capped: PersistenceDiagram
    cap: float
    entropy: float


def filtration_entropy(complex, h, options: SignatureOptions = SignatureOptions()) -> FiltrationResult:
    f = lower_star_filtration(complex, h)
    dgm = compute_persistence(f, coords=options.coords, check=False)
    n = default_cap(f, options.coords)
    capped = cap_infinite(dgm, n)
    ent = persistent_entropy(capped, options.homology_dims)
    return FiltrationResult(f.label, f, dgm, capped, n, ent)


def video_filtrations(frames, options: SignatureOptions = SignatureOptions()):
    """Stacked complex of the selected frames and its eight filtration results."""
    arr = as_frame_array(frames)
    picked = arr[select_frames(len(arr), options.n_frames)]
    stacked = build_stacked_complex(picked)
    results = [filtration_entropy(stacked.complex, h, options) for h in plane_filters(stacked.complex)]
    return stacked, results


def extract_video_features(frames, options: SignatureOptions = SignatureOptions()) -> np.ndarray:
    """Eight plane-filtration entropies, in :data:`PLANE_LABELS` order."""
    _, results = video_filtrations(frames, options)
    return np.array([r.entropy for r in results])


def audio_filtration(signal, options: SignatureOptions = SignatureOptions()) -> FiltrationResult:
    if not isinstance(signal, AudioSignal):
        signal = AudioSignal(np.asarray(signal, dtype=float))
    sub = subsample_signal(signal, options.audio_points)
    cx, values = build_path_complex(sub)
    res = filtration_entropy(cx, values, options)
    res.label = "audio"
    return res


def extract_audio_feature(signal, options: SignatureOptions = SignatureOptions()) -> float:
    """Entropy of the amplitude lower-star filtration of the subsampled signal.

    A constant signal gives 0 (a single capped interval) with a warning.
    """
    if not isinstance(signal, AudioSignal):
        signal = AudioSignal(np.asarray(signal, dtype=float))
    if np.ptp(signal.samples) == 0:
        warnings.warn("constant audio signal; audio entropy set to 0", RuntimeWarning, stacklevel=2)
        return 0.0
    return audio_filtration(signal, options).entropy


def extract_signature(video, options: SignatureOptions = SignatureOptions()) -> TopologicalSignature:
    """Signature of anything exposing ``frames``, ``audio`` and optionally
    ``label`` / ``video_id``."""
    vf = extract_video_features(video.frames, options)
    af = extract_audio_feature(video.audio, options)
    return TopologicalSignature(
        vf, af, getattr(video, "label", None), str(getattr(video, "video_id", ""))
    )


def inspect_video(frames, audio, options: SignatureOptions = SignatureOptions()) -> dict:
    """Everything computed on the way to a signature, as plain data."""
    stacked, results = video_filtrations(frames, options)
    cx = stacked.complex
    ares = audio_filtration(audio, options)
    betti = results[0].diagram.infinite_counts()
    chi = cx.euler_characteristic()
    return {
        "cells_per_dim": cx.counts(),
        "n_vertices": len(cx.vertices()),
        "euler_characteristic": chi,
        "betti_numbers": betti,
        "alternating_betti_sum": int(sum((-1) ** d * b for d, b in enumerate(betti))),
        "filtrations": [
            {
                "label": r.label,
                "cap": r.cap,
                "entropy": r.entropy,
                "diagram": [list(p) for p in r.capped.points()],
            }
            for r in results
        ],
        "audio": {
            "n_points": len(ares.filtration.complex.vertices()),
            "cap": ares.cap,
            "entropy": ares.entropy,
            "diagram": [list(p) for p in ares.capped.points()],
        },
        "signature": [r.entropy for r in results] + [ares.entropy],
    }


# -- signature CSV: video_id,label,f1,...,f9 ---------------------------------

CSV_HEADER = ["video_id", "label"] + [f"f{i}" for i in range(1, 10)]


def format_signature_rows(rows: Iterable[tuple[str, str, Sequence[float]]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for vid, label, vec in rows:
        vec = list(vec)
        if len(vec) != 9:
            raise ValueError(f"{vid}: expected 9 features, got {len(vec)}")
        w.writerow([vid, label] + [format(float(x), ".17g") for x in vec])
    return buf.getvalue()


def write_signature_csv(path, rows) -> None:
    Path(path).write_text(format_signature_rows(rows))


def read_signature_csv(path) -> tuple[list[str], list[str], np.ndarray]:
    """Returns ``(video_ids, labels, X)`` with ``X`` of shape (n, 9)."""
    ids, labels, feats = [], [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or (lineno == 1 and row[0] == "video_id"):
                continue
            if len(row) != 11:
                raise ValueError(f"{path}:{lineno}: expected 11 fields, got {len(row)}")
            try:
                vec = [float(x) for x in row[2:]]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-numeric feature") from exc
            if not all(math.isfinite(x) for x in vec):
                raise ValueError(f"{path}:{lineno}: non-finite feature")
            ids.append(row[0])
            labels.append(row[1])
            feats.append(vec)
    return ids, labels, np.array(feats, dtype=float).reshape(-1, 9)
