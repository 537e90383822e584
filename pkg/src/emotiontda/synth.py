"""A small synthetic corpus of talking faces.

Each class animates a 62-point face template with its own mouth, lip-width
and eyebrow motion, and speaks a tone at its own pitch.  The pitch alone
separates the audio entropies of different classes by a wide margin, so
the corpus is separable by construction.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .complexbuild import AudioSignal
from .dataset import (
    EMOTIONS,
    ManifestEntry,
    RavdessMeta,
    VideoRecord,
    format_ravdess_filename,
    write_landmark_track,
    write_manifest,
    write_wav,
)

SAMPLE_RATE = 16000
N_SAMPLES = 12800
N_FRAMES = 30
BASE_PITCH = 110.0
PITCH_RATIO = 1.5
TRACKER_NOISE = 0.02  # px, per landmark and frame
AMPLITUDE_SPREAD = 0.02  # relative, per clip
PHASE_SPREAD = 0.3  # rad, per clip

# mouth opening, lip width, brow raise, oscillations per clip
_MOTION = np.array(
    [
        [0.2, 0.02, 0.1, 1],  # calm
        [0.5, 0.15, 0.2, 2],  # happy
        [0.2, -0.08, -0.3, 1],  # sad
        [0.8, 0.05, -0.6, 3],  # angry
        [0.6, -0.05, 0.8, 4],  # fearful
        [0.3, -0.12, -0.4, 2],  # disgust
        [1.2, -0.10, 1.0, 2],  # surprised
    ]
)


def _ellipse(cx, cy, rx, ry, t):
    return np.stack([cx + rx * np.cos(t), cy + ry * np.sin(t)], axis=1)


def face_template() -> tuple[np.ndarray, dict[str, slice]]:
    """62 landmarks (image coordinates, y down) and the index range of each part."""
    parts = {}
    pts = []

    def add(name, arr):
        start = sum(len(p) for p in pts)
        pts.append(np.asarray(arr, dtype=float))
        parts[name] = slice(start, start + len(arr))

    add("jaw", _ellipse(0, 0, 90, 110, np.linspace(0.1 * np.pi, 0.9 * np.pi, 15)))
    bx = np.linspace(0, 1, 5)
    add("brow_l", np.stack([-72 + 50 * bx, -62 - 8 * np.sin(np.pi * bx)], axis=1))
    add("brow_r", np.stack([22 + 50 * bx, -62 - 8 * np.sin(np.pi * bx)], axis=1))
    add("nose", np.stack([np.zeros(4), [-36, -23, -10, 3]], axis=1))
    nx = np.linspace(-16, 16, 5)
    add("nostrils", np.stack([nx, 12 + 0.02 * nx**2], axis=1))
    eye_t = np.linspace(0, 2 * np.pi, 6, endpoint=False)
    add("eye_l", _ellipse(-45, -32, 15, 6, eye_t))
    add("eye_r", _ellipse(45, -32, 15, 6, eye_t))
    add("mouth", _ellipse(0, 50, 30, 12, np.linspace(0, 2 * np.pi, 12, endpoint=False) + 0.1))
    add("lips", [[-14, 50], [0, 46], [14, 50], [0, 54]])
    base = np.concatenate(pts)
    # fixed irregularity keeps the template in general position
    base = base + np.random.default_rng(20231).uniform(-1.5, 1.5, base.shape)
    return base, parts


def animate(label: int, rng: np.random.Generator, n_frames: int = N_FRAMES) -> np.ndarray:
    """Landmark track of shape (n_frames, 62, 2) for one synthetic clip."""
    base, parts = face_template()
    mouth_amp, width_amp, brow_amp, cycles = _MOTION[label] * np.r_[rng.uniform(1 - AMPLITUDE_SPREAD, 1 + AMPLITUDE_SPREAD, 3), 1]
    phase = rng.uniform(0, PHASE_SPREAD)
    scale = rng.uniform(0.97, 1.03)
    shift = rng.uniform(-40, 40, 2) + np.array([320.0, 240.0])
    mouth = np.r_[np.arange(62)[parts["mouth"]], np.arange(62)[parts["lips"]]]
    jaw_low = np.arange(62)[parts["jaw"]][4:11]
    brows = np.r_[np.arange(62)[parts["brow_l"]], np.arange(62)[parts["brow_r"]]]
    frames = np.empty((n_frames, 62, 2))
    for t in range(n_frames):
        s = np.sin(2 * np.pi * cycles * t / n_frames + phase)
        up = 0.5 * (1 + s)
        p = base.copy()
        p[mouth, 1] = 50 + (p[mouth, 1] - 50) * (1 + mouth_amp * up)
        p[mouth, 0] *= 1 + width_amp * s
        p[jaw_low, 1] += 6 * mouth_amp * up
        p[brows, 1] -= 8 * brow_amp * up
        p += rng.normal(0, TRACKER_NOISE, p.shape)
        frames[t] = p * scale + shift
    return frames


def tone(label: int, rng: np.random.Generator, n: int = N_SAMPLES, rate: int = SAMPLE_RATE) -> AudioSignal:
    """Tone bursts at the class pitch under a smooth three-syllable envelope."""
    pitch = BASE_PITCH * PITCH_RATIO**label * rng.uniform(0.99, 1.01)
    t = np.arange(n) / rate
    env = 0.35 + 0.3 * np.sin(np.pi * 3 * t / t[-1]) ** 2
    x = env * np.sin(2 * np.pi * pitch * t + rng.uniform(0, 2 * np.pi))
    return AudioSignal(x, rate)


def synth_dataset(seed: int = 0, per_class: int = 30) -> list[VideoRecord]:
    """``7 * per_class`` labelled records, deterministic in ``seed``."""
    if per_class < 1:
        raise ValueError("per_class must be at least 1")
    rng = np.random.default_rng(seed)
    records = []
    for label, emotion in enumerate(EMOTIONS):
        for i in range(per_class):
            frames = animate(label, rng)
            audio = tone(label, rng)
            meta = _meta(emotion, i)
            records.append(
                VideoRecord(
                    f"syn-{label}-{i:03d}",
                    frames,
                    audio,
                    emotion=emotion,
                    actor=meta.actor,
                    intensity=meta.intensity,
                    statement=meta.statement,
                    repetition=meta.repetition,
                )
            )
    return records


def _meta(emotion: str, i: int) -> RavdessMeta:
    # cycles through the 192 (actor, intensity, statement, repetition) slots
    k = i % 192
    return RavdessMeta(
        1, 1, emotion, ("normal", "strong")[k % 2], 1 + (k // 2) % 2, 1 + (k // 4) % 2, 1 + (k // 8) % 24, True
    )


def write_corpus(records: list[VideoRecord], out_dir) -> Path:
    """Write landmark CSVs, WAVs and a manifest; returns the manifest path."""
    out = Path(out_dir)
    (out / "landmarks").mkdir(parents=True, exist_ok=True)
    (out / "audio").mkdir(parents=True, exist_ok=True)
    entries = []
    for r in records:
        lm = out / "landmarks" / f"{r.video_id}.csv"
        wav = out / "audio" / f"{r.video_id}.wav"
        write_landmark_track(lm, r.frames)
        write_wav(wav, r.audio, fmt="float32")
        meta = RavdessMeta(1, 1, r.emotion, r.intensity, r.statement, r.repetition, r.actor, True)
        entries.append(ManifestEntry(r.video_id, lm, wav, format_ravdess_filename(meta), r.emotion or ""))
    manifest = out / "manifest.csv"
    write_manifest(manifest, entries)
    return manifest
