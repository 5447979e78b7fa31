"""Synthetic corpus -> features -> 80/20 split -> hidden-size sweep (CSV + SVG).

    python3 scripts/run_sweep.py --out runs/sweep --epochs 100
"""
import argparse
from pathlib import Path

from charfeat.cli import main


def run(out: Path, classes: int, per_class: int, seed: int, epochs: int, hidden: str,
        mode: str, jobs: int) -> None:
    out.mkdir(parents=True, exist_ok=True)
    steps = [
        ["synth", "--output", str(out / "img"), "--classes", str(classes),
         "--per-class", str(per_class), "--seed", str(seed)],
        ["extract", "--input", str(out / "img"), "--output", str(out / "all.csv"),
         "--mode", mode, "--jobs", str(jobs)],
        ["split", "--features", str(out / "all.csv"), "--fraction", "0.8", "--seed", str(seed),
         "--train", str(out / "train.csv"), "--test", str(out / "test.csv")],
        ["sweep", "--train", str(out / "train.csv"), "--test", str(out / "test.csv"),
         "--hidden", hidden, "--epochs", str(epochs), "--seed", str(seed),
         "--out", str(out / "sweep.csv"), "--svg", str(out / "sweep.svg"), "--jobs", str(jobs)],
    ]
    for argv in steps:
        code = main(argv)
        if code:
            raise SystemExit(code)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("runs/sweep"))
    ap.add_argument("--classes", type=int, default=10)
    ap.add_argument("--per-class", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--epochs", type=int, default=100)
    ap.add_argument("--hidden", default="40:85:5")
    ap.add_argument("--mode", choices=["cg", "equal"], default="cg")
    ap.add_argument("--jobs", type=int, default=1)
    a = ap.parse_args()
    run(a.out, a.classes, a.per_class, a.seed, a.epochs, a.hidden, a.mode, a.jobs)
