from collections import Counter
from pathlib import Path

import numpy as np
import pytest
from scipy.io import wavfile

from emotiontda.complexbuild import AudioSignal
from emotiontda.dataset import (
    EMOTIONS,
    DataError,
    ManifestEntry,
    VideoRecord,
    format_ravdess_filename,
    load_landmark_track,
    load_video,
    load_wav,
    parse_ravdess_filename,
    ravdess_speech_names,
    read_manifest,
    split_dataset,
    stratified_split_indices,
    synth_dataset,
    write_landmark_track,
    write_manifest,
    write_wav,
)
from emotiontda.signature import extract_signature

DATA = Path(__file__).parent / "data"


def test_parse_example():
    m = parse_ravdess_filename("01-01-06-01-02-01-12")
    assert (m.emotion, m.intensity, m.statement, m.repetition, m.actor) == ("fearful", "normal", 2, 1, 12)
    assert m.included and m.label == EMOTIONS.index("fearful")
    assert parse_ravdess_filename("/data/Actor_12/01-01-06-01-02-01-12.mp4") == m


@pytest.mark.parametrize(
    "name,reason",
    [("01-01-01-01-01-01-01", "neutral"), ("01-02-03-01-01-01-01", "song"), ("03-01-03-01-01-01-01", "no video")],
)
def test_excluded_names(name, reason):
    m = parse_ravdess_filename(name)
    assert not m.included and m.reason == reason


@pytest.mark.parametrize(
    "name",
    [
        "01-01-06-01-02-01",
        "01-01-09-01-01-01-01",
        "01-01-00-01-01-01-01",
        "1-01-06-01-02-01-12",
        "04-01-06-01-02-01-12",
        "01-01-06-01-03-01-12",
        "01-01-06-01-02-01-25",
        "01-01-01-02-01-01-01",
        "hello",
    ],
)
def test_malformed_names(name):
    with pytest.raises(DataError):
        parse_ravdess_filename(name)


def test_corpus_arithmetic_and_round_trip():
    names = ravdess_speech_names()
    assert len(names) == 24 * 60 == 1440
    metas = [parse_ravdess_filename(n) for n in names]
    kept = [m for m in metas if m.included]
    assert len(kept) == 1344
    assert sum(m.emotion == "neutral" for m in metas) == 24 * 4
    assert all(format_ravdess_filename(m) == n for m, n in zip(metas, names))


def test_landmark_track_shapes(tmp_path):
    rng = np.random.default_rng(0)
    arr = rng.uniform(0, 640, (9, 62, 2))
    path = tmp_path / "t.csv"
    write_landmark_track(path, arr)
    frames = load_landmark_track(path)
    assert len(frames) == 9 and all(f.points.shape == (62, 2) for f in frames)
    assert [f.frame_index for f in frames] == list(range(9))
    assert np.array_equal(np.stack([f.points for f in frames]), arr)


def test_golden_track_round_trip(tmp_path):
    frames = load_landmark_track(DATA / "golden_track.csv")
    again = tmp_path / "again.csv"
    write_landmark_track(again, frames)
    assert again.read_text() == (DATA / "golden_track.csv").read_text()
    golden = synth_dataset(0, 1)[3].frames[:9]
    assert np.array_equal(np.stack([f.points for f in frames]), golden)


def test_headerless_and_tracker_headers(tmp_path):
    p = tmp_path / "plain.csv"
    p.write_text("1,2,3,4,5,6\n7,8,9,10,11,12\n")
    frames = load_landmark_track(p, 3)
    assert frames[1].points.tolist() == [[7, 8], [9, 10], [11, 12]]

    p = tmp_path / "tracker.csv"
    p.write_text("frame, timestamp, x_0, x_1, x_2, y_0, y_1, y_2\n0, 0.0, 1, 3, 5, 2, 4, 6\n")
    frames = load_landmark_track(p, 3)
    assert frames[0].points.tolist() == [[1, 2], [3, 4], [5, 6]]
    assert load_landmark_track(p, None)[0].points.shape == (3, 2)


def test_landmark_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1,2,3,4\n1,2,3\n")
    with pytest.raises(DataError, match="ragged"):
        load_landmark_track(p, 2)
    p.write_text("1,2,3,4\n1,2,x,4\n")
    with pytest.raises(DataError, match="non-numeric"):
        load_landmark_track(p, 2)
    arr = np.zeros((2, 60, 2)) + np.arange(120).reshape(60, 2)
    write_landmark_track(p, arr)
    with pytest.raises(DataError, match="60.*62"):
        load_landmark_track(p)
    with pytest.raises(DataError):
        load_landmark_track(tmp_path / "missing.csv")
    p.write_text("x0,y0\n")
    with pytest.raises(DataError):
        load_landmark_track(p, 1)


def test_wav_zeros(tmp_path):
    p = tmp_path / "z.wav"
    wavfile.write(p, 48000, np.zeros(48000, dtype=np.int16))
    s = load_wav(p)
    assert len(s) == 48000 and s.sample_rate == 48000 and not s.samples.any()


def test_wav_stereo_average(tmp_path):
    p = tmp_path / "s.wav"
    data = np.tile(np.array([[0.5, -0.5]], dtype=np.float32), (100, 1))
    wavfile.write(p, 16000, data)
    assert not load_wav(p).samples.any()


def test_wav_int_scaling(tmp_path):
    p = tmp_path / "i.wav"
    wavfile.write(p, 8000, np.array([-32768, 0, 16384], dtype=np.int16))
    assert load_wav(p).samples.tolist() == [-1.0, 0.0, 0.5]
    wavfile.write(p, 8000, np.array([-(2**31), 2**30], dtype=np.int32))
    assert load_wav(p).samples.tolist() == [-1.0, 0.5]
    wavfile.write(p, 8000, np.array([0, 128, 192], dtype=np.uint8))
    assert load_wav(p).samples.tolist() == [-1.0, 0.0, 0.5]


def test_wav_round_trip(tmp_path):
    p = tmp_path / "r.wav"
    x = AudioSignal(np.sin(np.linspace(0, 20, 1000)) * 0.7, 22050)
    write_wav(p, x, "float32")
    back = load_wav(p)
    assert back.sample_rate == 22050
    assert np.array_equal(back.samples, x.samples.astype(np.float32).astype(float))
    write_wav(p, x)
    assert np.max(np.abs(load_wav(p).samples - x.samples)) < 1e-4


def test_wav_errors(tmp_path):
    p = tmp_path / "t.wav"
    wavfile.write(p, 8000, np.zeros(1000, dtype=np.int16))
    raw = p.read_bytes()
    p.write_bytes(raw[: len(raw) // 2])
    with pytest.raises(DataError, match="truncated"):
        load_wav(p)
    p.write_bytes(raw[:30])
    with pytest.raises(DataError):
        load_wav(p)
    p.write_bytes(b"not a wav file at all")
    with pytest.raises(DataError):
        load_wav(p)
    with pytest.raises(DataError):
        load_wav(tmp_path / "missing.wav")


class Item:
    def __init__(self, label):
        self.label = label


def test_split_sizes_and_strata():
    labels = np.repeat(np.arange(7), 192)
    tr, te = stratified_split_indices(labels, 944, seed=0)
    assert (len(tr), len(te)) == (944, 400)
    assert not set(tr) & set(te) and len(set(tr) | set(te)) == 1344
    counts = np.bincount(labels[tr], minlength=7)
    assert np.all(np.abs(counts - 944 / 7) <= 1)
    tr2, te2 = stratified_split_indices(labels, 944, seed=0)
    assert np.array_equal(tr, tr2) and np.array_equal(te, te2)
    assert not np.array_equal(tr, stratified_split_indices(labels, 944, seed=1)[0])


def test_split_unbalanced_classes():
    labels = np.array([0] * 50 + [1] * 30 + [2] * 7 + [3, 4, 5, 6] * 3)
    tr, te = stratified_split_indices(labels, 60, seed=4)
    share = np.bincount(labels, minlength=7) * 60 / len(labels)
    assert np.all(np.abs(np.bincount(labels[tr], minlength=7) - share) <= 1)


def test_split_dataset_objects():
    items = [Item(c) for c in range(7)]
    train, test = split_dataset(items, train_n=7, seed=0)
    assert len(train) == 7 and test == []
    with pytest.raises(DataError):
        split_dataset(items, train_n=8)


def test_video_record_invariants():
    f = np.zeros((2, 3, 2)) + [[0, 0], [1, 0], [0, 1]]
    a = AudioSignal([0.0, 1.0])
    assert VideoRecord("v", f, a, "sad").label == 2
    with pytest.raises(DataError):
        VideoRecord("v", f, a, "neutral")
    with pytest.raises(DataError):
        VideoRecord("v", f, a, "bored")
    with pytest.raises(DataError):
        VideoRecord("v", f, a, "sad", actor=25)


def test_manifest_round_trip(tmp_path):
    (tmp_path / "lm").mkdir()
    arr = np.random.default_rng(0).uniform(0, 100, (3, 62, 2))
    write_landmark_track(tmp_path / "lm" / "a.csv", arr)
    write_wav(tmp_path / "a.wav", AudioSignal(np.sin(np.arange(300.0)), 16000))
    entries = [ManifestEntry("a", tmp_path / "lm" / "a.csv", tmp_path / "a.wav", "01-01-05-02-01-02-07")]
    write_manifest(tmp_path / "m.csv", entries)
    assert "lm/a.csv" in (tmp_path / "m.csv").read_text()
    back = read_manifest(tmp_path / "m.csv")
    assert back == entries
    video = load_video(back[0])
    assert (video.emotion, video.intensity, video.repetition, video.actor) == ("angry", "strong", 2, 7)
    assert video.frames.shape == (3, 62, 2)


def test_manifest_errors(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("video_id,landmarks\nx,y\n")
    with pytest.raises(DataError):
        read_manifest(p)
    p.write_text("video_id,landmarks,audio,filename\na,l,w,\na,l,w,\n")
    with pytest.raises(DataError, match="duplicate"):
        read_manifest(p)
    with pytest.raises(DataError):
        read_manifest(tmp_path / "nope.csv")
    entry = ManifestEntry("n", p, p, "01-01-01-01-01-01-01")
    with pytest.raises(DataError, match="neutral"):
        load_video(entry)


def test_synth_counts_and_determinism():
    a = synth_dataset(seed=1, per_class=2)
    assert len(a) == 14
    assert Counter(r.emotion for r in a) == Counter({e: 2 for e in EMOTIONS})
    assert all(isinstance(r, VideoRecord) and r.frames.shape[1:] == (62, 2) and len(r.frames) >= 9 for r in a)
    b = synth_dataset(seed=1, per_class=2)
    assert all(np.array_equal(x.frames, y.frames) and np.array_equal(x.audio.samples, y.audio.samples) for x, y in zip(a, b))
    c = synth_dataset(seed=2, per_class=2)
    assert not np.array_equal(a[0].frames, c[0].frames)
    with pytest.raises(ValueError):
        synth_dataset(0, 0)


def test_synth_classes_are_separated():
    recs = synth_dataset(seed=3, per_class=3)
    S = np.array([extract_signature(r).vector for r in recs])
    y = np.array([r.label for r in recs])
    for a in range(7):
        for b in range(a + 1, 7):
            gaps = np.abs(S[y == a].mean(0) - S[y == b].mean(0))
            spread = np.maximum(np.ptp(S[y == a], 0), np.ptp(S[y == b], 0))
            assert np.any(gaps > 10 * spread), (a, b)
