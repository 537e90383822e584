"""Corpus handling: RAVDESS-style names, landmark tracks, WAV audio, splits.

Landmark tracks are CSV files with one row per frame.  The canonical
layout is ``x0,y0,x1,y1,...`` with an optional header; headers naming
``x_<i>`` / ``y_<i>`` columns (as produced by common face trackers) are
also understood, whatever other columns they carry.

A manifest is a CSV with columns ``video_id,landmarks,audio,filename``;
relative paths are resolved against the manifest's directory.
"""

from __future__ import annotations

import csv
import re
import struct
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.io import wavfile

from .complexbuild import AudioSignal, LandmarkFrame, as_frame_array

#: classifier label order (class index = position)
EMOTIONS = ("calm", "happy", "sad", "angry", "fearful", "disgust", "surprised")
#: RAVDESS emotion codes 01..08
RAVDESS_EMOTIONS = ("neutral",) + EMOTIONS
MODALITIES = {1: "audio-video", 2: "video-only", 3: "audio-only"}
VOCAL_CHANNELS = {1: "speech", 2: "song"}
INTENSITIES = {1: "normal", 2: "strong"}
DEFAULT_LANDMARKS = 62


class DataError(ValueError):
    """Malformed or inconsistent input files."""


@dataclass(frozen=True)
class RavdessMeta:
    modality: int
    vocal_channel: int
    emotion: str
    intensity: str
    statement: int
    repetition: int
    actor: int
    included: bool
    reason: str = ""

    @property
    def label(self) -> int | None:
        return EMOTIONS.index(self.emotion) if self.emotion in EMOTIONS else None


_NAME = re.compile(r"^(\d{2})-(\d{2})-(\d{2})-(\d{2})-(\d{2})-(\d{2})-(\d{2})$")


def parse_ravdess_filename(name: str) -> RavdessMeta:
    """Decode a RAVDESS identifier such as ``01-01-06-01-02-01-12``.

    Any directory part and extension are ignored.  Neutral clips, songs and
    audio-only recordings are decoded but marked ``included=False``.
    """
    stem = Path(name).name.split(".")[0]
    m = _NAME.match(stem)
    if m is None:
        raise DataError(f"not a RAVDESS name (7 two-digit fields): {name!r}")
    mod, voc, emo, inten, stmt, rep, actor = (int(g) for g in m.groups())
    if mod not in MODALITIES:
        raise DataError(f"unknown modality code {mod:02d} in {name!r}")
    if voc not in VOCAL_CHANNELS:
        raise DataError(f"unknown vocal channel {voc:02d} in {name!r}")
    if not 1 <= emo <= len(RAVDESS_EMOTIONS):
        raise DataError(f"unknown emotion code {emo:02d} in {name!r}")
    if inten not in INTENSITIES:
        raise DataError(f"unknown intensity code {inten:02d} in {name!r}")
    if stmt not in (1, 2) or rep not in (1, 2):
        raise DataError(f"statement/repetition must be 01 or 02 in {name!r}")
    if not 1 <= actor <= 24:
        raise DataError(f"actor {actor:02d} out of range in {name!r}")
    emotion = RAVDESS_EMOTIONS[emo - 1]
    if emotion == "neutral" and inten == 2:
        raise DataError(f"neutral has no strong intensity: {name!r}")
    reason = ""
    if voc != 1:
        reason = "song"
    elif mod == 3:
        reason = "no video"
    elif emotion == "neutral":
        reason = "neutral"
    return RavdessMeta(mod, voc, emotion, INTENSITIES[inten], stmt, rep, actor, not reason, reason)


def format_ravdess_filename(meta: RavdessMeta) -> str:
    emo = RAVDESS_EMOTIONS.index(meta.emotion) + 1
    inten = 1 if meta.intensity == "normal" else 2
    return "-".join(
        f"{v:02d}"
        for v in (meta.modality, meta.vocal_channel, emo, inten, meta.statement, meta.repetition, meta.actor)
    )


def ravdess_speech_names(modality: int = 1, actors: Sequence[int] = range(1, 25)) -> list[str]:
    """Every speech identifier of the corpus for one modality."""
    names = []
    for actor in actors:
        for emo in range(1, 9):
            for inten in (1, 2) if emo > 1 else (1,):
                for stmt in (1, 2):
                    for rep in (1, 2):
                        names.append(f"{modality:02d}-01-{emo:02d}-{inten:02d}-{stmt:02d}-{rep:02d}-{actor:02d}")
    return names


@dataclass
class VideoRecord:
    video_id: str
    frames: np.ndarray  # (n_frames, n_landmarks, 2)
    audio: AudioSignal
    emotion: str | None = None
    actor: int = 1
    intensity: str = "normal"
    statement: int = 1
    repetition: int = 1

    def __post_init__(self):
        self.frames = as_frame_array(self.frames)
        if self.emotion == "neutral":
            raise DataError("neutral videos are not part of the classifier corpus")
        if self.emotion is not None and self.emotion not in EMOTIONS:
            raise DataError(f"unknown emotion {self.emotion!r}")
        if not 1 <= self.actor <= 24:
            raise DataError(f"actor {self.actor} out of range 1..24")

    @property
    def label(self) -> int | None:
        return None if self.emotion is None else EMOTIONS.index(self.emotion)


# -- landmark tracks ---------------------------------------------------------

_XCOL = re.compile(r"^x_?(\d+)$", re.I)
_YCOL = re.compile(r"^y_?(\d+)$", re.I)


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def load_landmark_track(path, n_landmarks: int | None = DEFAULT_LANDMARKS) -> list[LandmarkFrame]:
    """Read a landmark CSV into frames.

    ``n_landmarks=None`` accepts whatever count the file holds.
    """
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise DataError(f"{path}: cannot read ({exc})") from exc
    if not rows:
        raise DataError(f"{path}: no frames")
    header = None
    if not all(_is_number(c) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise DataError(f"{path}: header only, no frames")

    cols = None
    if header is not None:
        xs = {int(m.group(1)): i for i, h in enumerate(header) if (m := _XCOL.match(h))}
        ys = {int(m.group(1)): i for i, h in enumerate(header) if (m := _YCOL.match(h))}
        if xs and ys:
            if set(xs) != set(ys):
                raise DataError(f"{path}: x and y columns name different landmarks")
            cols = [c for k in sorted(xs) for c in (xs[k], ys[k])]

    width = len(header) if header is not None else len(rows[0])
    frames = []
    for lineno, row in enumerate(rows, 2 if header else 1):
        if len(row) != width:
            raise DataError(f"{path}:{lineno}: ragged row ({len(row)} fields, expected {width})")
        picked = [row[c] for c in cols] if cols is not None else row
        try:
            vals = np.array([float(c) for c in picked], dtype=float)
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: non-numeric cell") from exc
        if len(vals) % 2:
            raise DataError(f"{path}:{lineno}: odd number of coordinates")
        if not np.all(np.isfinite(vals)):
            raise DataError(f"{path}:{lineno}: non-finite coordinate")
        frames.append(LandmarkFrame(vals.reshape(-1, 2), len(frames)))
    found = len(frames[0].points)
    if n_landmarks is not None and found != n_landmarks:
        raise DataError(f"{path}: found {found} landmarks per frame, expected {n_landmarks}")
    return frames


def write_landmark_track(path, frames) -> None:
    arr = as_frame_array(frames)
    n = arr.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"{a}{i}" for i in range(n) for a in "xy"])
        for frame in arr:
            w.writerow([repr(float(v)) for v in frame.reshape(-1)])


# -- audio -------------------------------------------------------------------

_INT_SCALE = {np.dtype(np.int16): 32768.0, np.dtype(np.int32): 2147483648.0}


def load_wav(path) -> AudioSignal:
    """Mono signal in [-1, 1] from a PCM (8/16/32-bit) or float WAV file."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", wavfile.WavFileWarning)
            rate, data = wavfile.read(path)
    except wavfile.WavFileWarning as exc:
        raise DataError(f"{path}: truncated or damaged WAV ({exc})") from exc
    except OSError as exc:
        raise DataError(f"{path}: cannot read ({exc})") from exc
    except (ValueError, EOFError, struct.error) as exc:
        raise DataError(f"{path}: unreadable WAV ({exc})") from exc
    if data.dtype in _INT_SCALE:
        x = data.astype(float) / _INT_SCALE[data.dtype]
    elif data.dtype == np.uint8:
        x = (data.astype(float) - 128.0) / 128.0
    elif data.dtype in (np.float32, np.float64):
        x = data.astype(float)
    else:
        raise DataError(f"{path}: unsupported sample format {data.dtype}")
    if x.ndim == 2:
        x = x.mean(axis=1)
    if x.size == 0:
        raise DataError(f"{path}: no samples")
    return AudioSignal(x, int(rate))


def write_wav(path, signal: AudioSignal, fmt: str = "int16") -> None:
    x = np.clip(signal.samples, -1.0, 1.0)
    if fmt == "int16":
        data = np.round(x * 32767.0).astype(np.int16)
    elif fmt == "float32":
        data = x.astype(np.float32)
    else:
        raise ValueError(f"unknown WAV format {fmt!r}")
    wavfile.write(path, signal.sample_rate, data)


# -- manifests ---------------------------------------------------------------


@dataclass(frozen=True)
class ManifestEntry:
    video_id: str
    landmarks: Path
    audio: Path
    filename: str
    emotion: str = ""  # overrides the filename's emotion when set


def read_manifest(path) -> list[ManifestEntry]:
    path = Path(path)
    base = path.parent
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot read manifest {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        need = {"video_id", "landmarks", "audio", "filename"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise DataError(f"{path}: manifest needs columns {sorted(need)}")
        out = []
        for row in reader:
            out.append(
                ManifestEntry(
                    row["video_id"],
                    base / row["landmarks"],
                    base / row["audio"],
                    row["filename"],
                    (row.get("emotion") or "").strip(),
                )
            )
    ids = [e.video_id for e in out]
    if len(set(ids)) != len(ids):
        raise DataError(f"{path}: duplicate video ids")
    return out


def write_manifest(path, entries: Sequence[ManifestEntry]) -> None:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["video_id", "landmarks", "audio", "filename", "emotion"])
        for e in entries:
            row = [e.video_id, _rel(e.landmarks, path.parent), _rel(e.audio, path.parent), e.filename]
            w.writerow(row + [e.emotion])


def _rel(p: Path, base: Path) -> str:
    try:
        return str(Path(p).relative_to(base))
    except ValueError:
        return str(p)


def load_video(entry: ManifestEntry, n_landmarks: int | None = DEFAULT_LANDMARKS) -> VideoRecord:
    meta = parse_ravdess_filename(entry.filename) if entry.filename else None
    if meta is not None and not meta.included:
        raise DataError(f"{entry.video_id}: excluded from the corpus ({meta.reason})")
    frames = load_landmark_track(entry.landmarks, n_landmarks)
    audio = load_wav(entry.audio)
    kw = {}
    if meta is not None:
        kw = dict(
            emotion=meta.emotion,
            actor=meta.actor,
            intensity=meta.intensity,
            statement=meta.statement,
            repetition=meta.repetition,
        )
    if entry.emotion:
        kw["emotion"] = entry.emotion
    return VideoRecord(entry.video_id, as_frame_array(frames), audio, **kw)


# -- splits ------------------------------------------------------------------


def stratified_split_indices(labels: Sequence[int], train_n: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Seeded stratified split; class shares in the training part are within
    one example of proportional (largest-remainder apportionment)."""
    labels = np.asarray(labels)
    n = len(labels)
    if not 0 <= train_n <= n:
        raise DataError(f"train_n={train_n} exceeds the corpus size {n}")
    rng = np.random.default_rng(seed)
    classes = np.unique(labels)
    members = {c: rng.permutation(np.nonzero(labels == c)[0]) for c in classes}
    quota = {c: train_n * len(members[c]) / n for c in classes} if n else {}
    take = {c: int(np.floor(q)) for c, q in quota.items()}
    left = train_n - sum(take.values())
    ranked = sorted(classes, key=lambda c: (-(quota[c] - take[c]), rng.random()))
    for c in ranked[:left]:
        take[c] += 1
    train = np.concatenate([members[c][: take[c]] for c in classes]) if n else np.array([], int)
    test = np.concatenate([members[c][take[c]:] for c in classes]) if n else np.array([], int)
    return np.sort(train).astype(np.int64), np.sort(test).astype(np.int64)


def split_dataset(signatures: Sequence, train_n: int = 944, seed: int = 0):
    """Split labelled items (anything with ``.label``) into train and test lists."""
    labels = [s.label for s in signatures]
    tr, te = stratified_split_indices(labels, train_n, seed)
    return [signatures[i] for i in tr], [signatures[i] for i in te]


def synth_dataset(seed: int = 0, per_class: int = 30) -> list[VideoRecord]:
    """Synthetic labelled corpus; see :mod:`emotiontda.synth`."""
    from .synth import synth_dataset as _synth

    return _synth(seed, per_class)
