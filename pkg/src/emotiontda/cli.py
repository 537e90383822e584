"""Command-line front end.

    python -m emotiontda synth   --out corpus/ --per-class 30
    python -m emotiontda extract --manifest corpus/manifest.csv --out sigs.csv
    python -m emotiontda train   --signatures sigs.csv --out run/
    python -m emotiontda eval    --model run/model_rep0.npz --signatures run/test.csv
    python -m emotiontda predict --model run/model_rep0.npz --vector 2.9,3.0,...
    python -m emotiontda inspect --manifest corpus/manifest.csv --video-id syn-0-000

Settings come from the built-in defaults, then ``--config file.json``,
then individual flags.  Exit status is 0 on success, 2 on bad input and 3
when extraction failed for some videos.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import mlp
from .dataset import (
    EMOTIONS,
    DataError,
    load_video,
    parse_ravdess_filename,
    read_manifest,
    stratified_split_indices,
)
from .signature import (
    FEATURE_NAMES,
    SignatureOptions,
    extract_signature,
    inspect_video,
    read_signature_csv,
    video_filtrations,
    audio_filtration,
    write_signature_csv,
)

log = logging.getLogger("emotiontda")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PARTIAL = 3

# Targets reported for the full audio-video corpus; recorded, never asserted.
REFERENCE_TARGETS = {"mean_test_accuracy": 0.9597, "best_test_accuracy": 0.9802}


@dataclass
class RunConfig:
    n_frames: int = 9  # equally spaced frames per video
    audio_points: int = 10000  # audio subsample size
    landmarks: int = 62  # landmarks per frame
    seed: int = 0
    h0_only: bool = False  # entropy of dimension-0 intervals only
    ordinal: bool = False  # diagram coordinates are filtration steps
    debug_dumps: str = ""  # directory for per-video complex/filtration/diagram dumps
    workers: int = 1
    train_n: int = 0  # 0: scale 944 of 1344 to the corpus size
    epochs: int = 500
    batch_size: int = 32
    lr: float = 1e-3
    dropout: float = 0.2
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    repetitions: int = 10

    def signature_options(self) -> SignatureOptions:
        return SignatureOptions(
            n_frames=self.n_frames,
            audio_points=self.audio_points,
            homology_dims=(0,) if self.h0_only else None,
            coords="index" if self.ordinal else "value",
        )

    def train_config(self, repetition: int = 0) -> mlp.TrainConfig:
        return mlp.TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            seed=self.seed + repetition,
            dropout=self.dropout,
            lr=self.lr,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
            repetitions=self.repetitions,
        )

    def resolved_train_n(self, n: int) -> int:
        return self.train_n if self.train_n > 0 else int(round(n * 944 / 1344))


class InputError(Exception):
    pass


def load_config(path: str | None, overrides: dict) -> RunConfig:
    cfg = {}
    if path:
        try:
            cfg = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise InputError(f"{path}: config must be a JSON object")
    names = {f.name for f in fields(RunConfig)}
    unknown = set(cfg) - names
    if unknown:
        raise InputError(f"unknown config fields: {sorted(unknown)}")
    cfg.update({k: v for k, v in overrides.items() if k in names and v is not None})
    try:
        return RunConfig(**cfg)
    except TypeError as exc:
        raise InputError(str(exc)) from exc


# -- helpers -----------------------------------------------------------------


def _label_index(tok: str) -> int:
    tok = tok.strip()
    if tok in EMOTIONS:
        return EMOTIONS.index(tok)
    if tok.isdigit() and int(tok) < len(EMOTIONS):
        return int(tok)
    raise InputError(f"unknown label {tok!r}")


def _read_labelled(path) -> tuple[list[str], np.ndarray, np.ndarray]:
    try:
        ids, labels, X = read_signature_csv(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if not ids:
        raise InputError(f"{path}: no signatures")
    return ids, np.array([_label_index(t) for t in labels], dtype=np.int64), X


def _standardize(X, mean, std):
    return (X - mean) / std


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _metrics(params, X, y) -> dict:
    pred = mlp.predict(params, X)
    cm = mlp.confusion_matrix(y, pred, len(EMOTIONS))
    return {"n": int(len(y)), "accuracy": float(np.mean(pred == y)), "confusion_matrix": cm.tolist()}


# -- subcommands -------------------------------------------------------------


def cmd_synth(args, cfg: RunConfig) -> int:
    from .synth import synth_dataset, write_corpus

    records = synth_dataset(cfg.seed, args.per_class)
    manifest = write_corpus(records, args.out)
    print(manifest)
    return EXIT_OK


def _extract_one(job):
    entry, cfg = job
    try:
        video = load_video(entry, cfg.landmarks or None)
        sig = extract_signature(video, cfg.signature_options())
        if cfg.debug_dumps:
            _dump_debug(video, cfg)
        return entry.video_id, EMOTIONS[sig.label] if sig.label is not None else "", sig.vector, None
    except (DataError, ValueError) as exc:
        return entry.video_id, "", None, str(exc)


def _dump_debug(video, cfg: RunConfig) -> None:
    out = Path(cfg.debug_dumps) / video.video_id
    out.mkdir(parents=True, exist_ok=True)
    opts = cfg.signature_options()
    stacked, results = video_filtrations(video.frames, opts)
    (out / "complex.txt").write_text(stacked.complex.to_text())
    for r in results:
        (out / f"filtration_{r.label}.txt").write_text(r.filtration.dump())
        (out / f"diagram_{r.label}.txt").write_text(r.capped.dump())
    a = audio_filtration(video.audio, opts)
    (out / "diagram_audio.txt").write_text(a.capped.dump())


def _excluded(filename: str) -> str:
    try:
        meta = parse_ravdess_filename(filename) if filename else None
    except DataError:
        return ""  # reported as a per-video failure later
    return meta.reason if meta is not None else ""


def cmd_extract(args, cfg: RunConfig) -> int:
    try:
        entries = read_manifest(args.manifest)
    except DataError as exc:
        raise InputError(str(exc)) from exc
    jobs = []
    for e in entries:
        if _excluded(e.filename):
            log.info("%s: skipped (%s)", e.video_id, _excluded(e.filename))
        else:
            jobs.append((e, cfg))
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_extract_one, jobs))
    else:
        results = [_extract_one(j) for j in jobs]
    rows, failures = [], []
    for vid, label, vec, err in results:
        if err is None:
            rows.append((vid, label, vec))
        else:
            failures.append((vid, err))
            log.error("%s: %s", vid, err)
    write_signature_csv(args.out, rows)
    log.info("wrote %d signatures to %s (%d failed)", len(rows), args.out, len(failures))
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_train(args, cfg: RunConfig) -> int:
    ids, y, X = _read_labelled(args.signatures)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    train_n = cfg.resolved_train_n(len(y))
    try:
        tr, te = stratified_split_indices(y, train_n, cfg.seed)
    except DataError as exc:
        raise InputError(str(exc)) from exc
    missing = sorted(set(range(len(EMOTIONS))) - set(y[tr].tolist()))
    if missing:
        raise InputError(f"no training examples for {[EMOTIONS[c] for c in missing]}")

    for name, idx in (("train", tr), ("test", te)):
        write_signature_csv(out / f"{name}.csv", [(ids[i], EMOTIONS[y[i]], X[i]) for i in idx])
    mean = X[tr].mean(axis=0)
    std = X[tr].std(axis=0)
    std[std == 0] = 1.0
    Xtr, Xte = _standardize(X[tr], mean, std), _standardize(X[te], mean, std)

    reps = []
    t0 = time.perf_counter()
    for r in range(cfg.repetitions):
        tcfg = cfg.train_config(r)
        res = mlp.train(Xtr, y[tr], tcfg, Xte, y[te])
        meta = {"train_config": mlp.config_dict(tcfg), "run_config": asdict(cfg), "features": list(FEATURE_NAMES)}
        mlp.save_model(out / f"model_rep{r}.npz", res.params, meta, mean=mean, std=std)
        _write_json(out / f"history_rep{r}.json", res.history)
        test = _metrics(res.params, Xte, y[te]) if len(te) else None
        reps.append(
            {
                "repetition": r,
                "seed": tcfg.seed,
                "train_accuracy": res.history["train_accuracy"][-1],
                "test": test,
            }
        )
        log.info("repetition %d: test accuracy %s", r, test and f"{test['accuracy']:.4f}")
    accs = [rep["test"]["accuracy"] for rep in reps if rep["test"]]
    total_cm = np.sum([rep["test"]["confusion_matrix"] for rep in reps if rep["test"]], axis=0)
    report = {
        "n_signatures": int(len(y)),
        "n_train": int(len(tr)),
        "n_test": int(len(te)),
        "classes": list(EMOTIONS),
        "repetitions": reps,
        "mean_test_accuracy": float(np.mean(accs)) if accs else None,
        "max_test_accuracy": float(np.max(accs)) if accs else None,
        "confusion_matrix": total_cm.tolist() if accs else None,
        "reference_targets": REFERENCE_TARGETS,
    }
    log.info("trained %d repetitions in %.1f s", cfg.repetitions, time.perf_counter() - t0)
    _write_json(out / "report.json", report)
    (out / "summary.txt").write_text(_summary(report))
    print(_summary(report), end="")
    return EXIT_OK


def _summary(report: dict) -> str:
    lines = [f"signatures: {report['n_signatures']} (train {report['n_train']}, test {report['n_test']})"]
    if report["mean_test_accuracy"] is not None:
        lines.append(f"mean test accuracy: {report['mean_test_accuracy']:.4f}")
        lines.append(f"best test accuracy: {report['max_test_accuracy']:.4f}")
        lines.append("confusion matrix (rows true, columns predicted, summed over repetitions):")
        lines.append("".join(f"{c[:9]:>10}" for c in [""] + list(EMOTIONS)))
        for name, row in zip(EMOTIONS, report["confusion_matrix"]):
            lines.append(f"{name[:9]:>10}" + "".join(f"{v:>10d}" for v in row))
    return "\n".join(lines) + "\n"


def _load(model_path):
    try:
        params, meta, extra = mlp.load_model(model_path)
    except (OSError, ValueError, KeyError) as exc:
        raise InputError(f"cannot load model {model_path}: {exc}") from exc
    return params, meta, extra.get("mean", np.zeros(params.sizes[0])), extra.get("std", np.ones(params.sizes[0]))


def cmd_eval(args, cfg: RunConfig) -> int:
    params, _, mean, std = _load(args.model)
    _, y, X = _read_labelled(args.signatures)
    if X.shape[1] != params.sizes[0]:
        raise InputError(f"model expects {params.sizes[0]} features, CSV has {X.shape[1]}")
    report = _metrics(params, _standardize(X, mean, std), y)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")
    return EXIT_OK


def cmd_predict(args, cfg: RunConfig) -> int:
    params, _, mean, std = _load(args.model)
    if args.vector:
        try:
            vec = np.array([float(t) for t in args.vector.split(",")])
        except ValueError as exc:
            raise InputError(f"bad --vector: {exc}") from exc
        vid = ""
    else:
        try:
            ids, _, X = read_signature_csv(args.signatures)
        except (OSError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        if args.video_id not in ids:
            raise InputError(f"unknown video id {args.video_id!r}")
        vid = args.video_id
        vec = X[ids.index(vid)]
    if vec.shape != (params.sizes[0],):
        raise InputError(f"model expects {params.sizes[0]} features, got {vec.size}")
    probs = mlp.predict_proba(params, _standardize(vec[None, :], mean, std))[0]
    out = {
        "video_id": vid,
        "label": EMOTIONS[int(np.argmax(probs))],
        "probabilities": {e: float(p) for e, p in zip(EMOTIONS, probs)},
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_inspect(args, cfg: RunConfig) -> int:
    try:
        entries = {e.video_id: e for e in read_manifest(args.manifest)}
    except DataError as exc:
        raise InputError(str(exc)) from exc
    if args.video_id not in entries:
        raise InputError(f"unknown video id {args.video_id!r}")
    try:
        video = load_video(entries[args.video_id], cfg.landmarks or None)
    except DataError as exc:
        raise InputError(str(exc)) from exc
    info = inspect_video(video.frames, video.audio, cfg.signature_options())
    info["video_id"] = video.video_id
    text = json.dumps(info, indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    return EXIT_OK


# -- argument parsing --------------------------------------------------------


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with RunConfig fields")
    g = p.add_argument_group("run configuration (overrides --config)")
    for f in fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.type == "bool":
            g.add_argument(flag, dest=f.name, action=argparse.BooleanOptionalAction, default=None)
        else:
            kind = {"int": int, "float": float, "str": str}[f.type]
            g.add_argument(flag, dest=f.name, type=kind, default=None, help=f"default {f.default!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emotiontda", description="Topological emotion classification")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic corpus and manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--per-class", type=int, default=30)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="signatures for every video of a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train repeated models on a signature CSV")
    p.add_argument("--signatures", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="accuracy and confusion matrix of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--signatures", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="label and class probabilities for one signature")
    p.add_argument("--model", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--vector", help="comma-separated 9 features")
    src.add_argument("--signatures", help="signature CSV (with --video-id)")
    p.add_argument("--video-id")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("inspect", help="diagnostic dump for one video")
    p.add_argument("--manifest", required=True)
    p.add_argument("--video-id", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_inspect)

    for name, sp in sub.choices.items():
        _add_config_flags(sp)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        cfg = load_config(args.config, vars(args))
        if args.command == "predict" and args.signatures and not args.video_id:
            raise InputError("--signatures needs --video-id")
        return args.func(args, cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
