"""Command line entry point: ``charfeat {synth,extract,split,train,eval,predict,sweep}``.

Exit codes: 0 success, 1 usage/IO/validation problems, 2 numeric divergence.
"""
from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import dataset
from .descriptor import (
    DescriptorConfig,
    FeatureFileError,
    LabeledSample,
    as_arrays,
    extract_descriptor,
    load_features,
    save_features,
)
from .imagecore import PGMError, preprocess, read_pgm
from .mlp import (
    Mlp,
    MlpLayout,
    ModelFormatError,
    TrainConfig,
    TrainingDiverged,
    evaluate,
    load_model,
    save_model,
    train,
)
from .plot import sweep_svg


class CliError(Exception):
    def __init__(self, message: str, code: int = 1):
        super().__init__(message)
        self.code = code


def parse_threshold(text: str):
    if text == "otsu":
        return "otsu"
    try:
        t = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("threshold must be 'otsu' or an integer 0..255") from None
    if not 0 <= t <= 255:
        raise argparse.ArgumentTypeError("threshold must be 'otsu' or an integer 0..255")
    return t


def parse_range(text: str) -> list[int]:
    """``start:stop:step`` inclusive of stop, e.g. ``40:85:5``."""
    try:
        parts = [int(p) for p in text.split(":")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    if len(parts) == 1:
        parts = [parts[0], parts[0], 1]
    if len(parts) != 3 or parts[2] < 1 or parts[0] < 1 or parts[1] < parts[0]:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use start:stop:step")
    start, stop, step = parts
    return list(range(start, stop + 1, step))


def _image_features(path, threshold, config: DescriptorConfig) -> np.ndarray:
    return extract_descriptor(preprocess(read_pgm(path), threshold), config)


def _extract_one(args):
    return _image_features(*args)


def _load_samples(path) -> tuple[np.ndarray, np.ndarray]:
    try:
        samples = load_features(path)
    except FileNotFoundError:
        raise CliError(f"no such feature file: {path}") from None
    except FeatureFileError as exc:
        raise CliError(f"{path}: {exc}") from None
    if not samples:
        raise CliError(f"{path}: no samples")
    return as_arrays(samples)


def _load_model(path) -> Mlp:
    try:
        return load_model(path)
    except FileNotFoundError:
        raise CliError(f"no such model file: {path}") from None
    except ModelFormatError as exc:
        raise CliError(f"{path}: {exc}") from None


def _check_compatible(net: Mlp, X: np.ndarray, y: np.ndarray, where: str) -> None:
    lay = net.layout
    if X.shape[1] != lay.inputs:
        raise CliError(f"{where}: feature dimension {X.shape[1]} does not match model "
                       f"input size {lay.inputs}")
    if y.max() >= lay.outputs:
        raise CliError(f"{where}: label {y.max()} outside the model's {lay.outputs} classes")


def _train_config(args) -> TrainConfig:
    try:
        return TrainConfig(eta=args.eta, alpha=args.alpha, epochs=args.epochs, seed=args.seed,
                           shuffle=not args.no_shuffle, patience=args.patience)
    except ValueError as exc:
        raise CliError(str(exc)) from None


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_synth(args) -> int:
    try:
        man = dataset.synth_generate(args.classes, args.per_class, args.seed, args.output,
                                     jitter=not args.no_jitter, noise=args.noise,
                                     noise_scope=args.noise_scope)
    except (ValueError, RuntimeError) as exc:
        raise CliError(str(exc)) from None
    if args.manifest:
        man.to_csv(args.manifest)
    print(f"wrote {len(man)} images in {len(man.classes)} classes to {args.output}")
    return 0


def cmd_extract(args) -> int:
    config = DescriptorConfig(args.depth, args.mode)
    try:
        man = dataset.ingest(args.input)
    except dataset.IngestError as exc:
        raise CliError(str(exc)) from None
    root = Path(args.input)
    jobs = [(p, args.threshold, config) for p, _ in man.entries]
    try:
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                feats = list(pool.map(_extract_one, jobs, chunksize=16))
        else:
            feats = [_extract_one(j) for j in jobs]
    except (PGMError, OSError) as exc:
        raise CliError(f"extraction failed: {exc}") from None
    samples = [LabeledSample(p.relative_to(root).as_posix(), label, f)
               for (p, label), f in zip(man.entries, feats)]
    try:
        save_features(args.output, samples)
    except OSError as exc:
        raise CliError(f"cannot write {args.output}: {exc}") from None
    print(f"extracted {len(samples)} x {config.dim} features to {args.output}")
    return 0


def cmd_split(args) -> int:
    try:
        samples = load_features(args.features)
    except FileNotFoundError:
        raise CliError(f"no such feature file: {args.features}") from None
    except FeatureFileError as exc:
        raise CliError(f"{args.features}: {exc}") from None
    if not samples:
        raise CliError(f"{args.features}: no samples")
    n_classes = max(s.label for s in samples) + 1
    man = dataset.Manifest([str(k) for k in range(n_classes)],
                           [(i, s.label) for i, s in enumerate(samples)])
    try:
        parts = dataset.split(man, args.fraction, args.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    for path, entries in ((args.train, parts.train), (args.test, parts.test)):
        save_features(path, [samples[i] for i, _ in sorted(entries, key=lambda e: e[0])])
    print(f"split {len(samples)} samples into {len(parts.train)} train / {len(parts.test)} test")
    return 0


def fit(X, y, hidden: int, cfg: TrainConfig, n_classes: int | None = None, on_epoch=None):
    n_classes = int(y.max()) + 1 if n_classes is None else n_classes
    net = Mlp.init(MlpLayout(X.shape[1], hidden, n_classes), cfg.seed)
    history = train(net, X, y, cfg, on_epoch)
    return net, history


def cmd_train(args) -> int:
    X, y = _load_samples(args.features)
    cfg = _train_config(args)
    log = []
    try:
        net, history = fit(X, y, args.hidden, cfg, args.classes,
                           on_epoch=lambda e, m: log.append((e, m)))
    except TrainingDiverged as exc:
        raise CliError(f"training diverged: {exc}", code=2) from None
    finally:
        if args.log:
            with open(args.log, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("epoch,mse\n")
                fh.writelines(f"{e},{m!r}\n" for e, m in log)
    save_model(net, args.model)
    acc = evaluate(net, X, y).accuracy
    final = history[-1] if history else float("nan")
    print(f"layout {net.layout}  epochs {len(history)}  mse {final:.6f}  train accuracy {acc:.4f}")
    return 0


def cmd_eval(args) -> int:
    net = _load_model(args.model)
    X, y = _load_samples(args.features)
    _check_compatible(net, X, y, args.features)
    rep = evaluate(net, X, y)
    print(f"accuracy {rep.accuracy:.4f}")
    if args.confusion:
        n = rep.confusion.shape[0]
        with open(args.confusion, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("true," + ",".join(str(k) for k in range(n)) + "\n")
            for k, row in enumerate(rep.confusion):
                fh.write(f"{k}," + ",".join(str(int(c)) for c in row) + "\n")
    return 0


def cmd_predict(args) -> int:
    net = _load_model(args.model)
    config = DescriptorConfig(args.depth, args.mode)
    try:
        x = _image_features(args.image, args.threshold, config)
    except (PGMError, OSError) as exc:
        raise CliError(f"{args.image}: {exc}") from None
    if len(x) != net.layout.inputs:
        raise CliError(f"descriptor has {len(x)} features, model expects {net.layout.inputs}")
    _, out = net.forward(x)
    print(f"class {net.predict(x)}")
    print("outputs " + " ".join(f"{v:.6f}" for v in out))
    return 0


def sweep_point(hidden: int, Xtr, ytr, Xte, yte, cfg: TrainConfig, n_classes: int):
    """Train and score one hidden size from a fresh init; NaN on divergence."""
    try:
        net, _ = fit(Xtr, ytr, hidden, cfg, n_classes)
    except TrainingDiverged:
        return hidden, math.nan, math.nan
    return hidden, evaluate(net, Xtr, ytr).accuracy, evaluate(net, Xte, yte).accuracy


def _sweep_star(args):
    return sweep_point(*args)


def run_sweep(Xtr, ytr, Xte, yte, hidden_sizes, cfg: TrainConfig, jobs: int = 1):
    n_classes = int(max(ytr.max(), yte.max())) + 1
    tasks = [(h, Xtr, ytr, Xte, yte, cfg, n_classes) for h in hidden_sizes]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_star, tasks))
    else:
        rows = [_sweep_star(t) for t in tasks]
    return rows


def cmd_sweep(args) -> int:
    Xtr, ytr = _load_samples(args.train)
    Xte, yte = _load_samples(args.test)
    if Xtr.shape[1] != Xte.shape[1]:
        raise CliError("train and test feature files differ in dimension")
    cfg = _train_config(args)
    rows = run_sweep(Xtr, ytr, Xte, yte, args.hidden, cfg, args.jobs)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("hidden,train_acc,test_acc\n")
        for h, tr, te in rows:
            fh.write(f"{h},{tr:.6f},{te:.6f}\n")
    if args.svg:
        with open(args.svg, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(sweep_svg([r[0] for r in rows], [r[2] for r in rows]))
    for h, tr, te in rows:
        print(f"hidden {h:4d}  train {tr:.4f}  test {te:.4f}")
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_extraction_flags(p):
    p.add_argument("--mode", choices=["cg", "equal"], default="cg")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--threshold", type=parse_threshold, default="otsu")


def _add_training_flags(p):
    p.add_argument("--eta", type=float, default=0.8)
    p.add_argument("--alpha", type=float, default=0.7)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-shuffle", action="store_true")
    p.add_argument("--patience", type=int, default=None,
                   help="stop after this many epochs without error improvement")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="charfeat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic glyph dataset")
    p.add_argument("--output", required=True)
    p.add_argument("--classes", type=int, default=10)
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--noise-scope", choices=["bbox", "frame"], default="bbox")
    p.add_argument("--no-jitter", action="store_true")
    p.add_argument("--manifest", help="also write a path,label CSV")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="compute descriptors for a class-per-folder tree")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_extraction_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("split", help="per-class seeded train/test split of a feature CSV")
    p.add_argument("--features", required=True)
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train an MLP on a feature CSV")
    p.add_argument("--features", required=True)
    p.add_argument("--hidden", type=int, default=65)
    p.add_argument("--classes", type=int, default=None,
                   help="output units (default: largest label + 1)")
    _add_training_flags(p)
    p.add_argument("--model", required=True)
    p.add_argument("--log", help="per-epoch error CSV")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a model on a feature CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--confusion")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="classify a single PGM image")
    p.add_argument("--model", required=True)
    p.add_argument("--image", required=True)
    _add_extraction_flags(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("sweep", help="accuracy versus hidden layer size")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--hidden", type=parse_range, default=parse_range("40:85:5"))
    _add_training_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--svg")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except CliError as exc:
        print(f"charfeat {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"charfeat {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
