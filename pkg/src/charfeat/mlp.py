"""One-hidden-layer perceptron trained by online backpropagation with momentum.

Both layers use the logistic sigmoid. Biases are an appended constant-1
input, stored as the last column of each weight matrix. The per-sample loss
is ``0.5 * sum((output - target) ** 2)`` and every sample triggers the update

    delta_w(t) = -eta * grad + alpha * delta_w(t - 1)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MAGIC = "MLPv1"


class TrainingDiverged(ArithmeticError):
    """Raised when the training error stops being finite."""


class ModelFormatError(ValueError):
    """Raised for malformed MLPv1 model files."""


@dataclass(frozen=True)
class MlpLayout:
    inputs: int
    hidden: int
    outputs: int

    def __post_init__(self):
        if min(self.inputs, self.hidden, self.outputs) < 1:
            raise ValueError(f"invalid layout {self}")

    def __str__(self):
        return f"{self.inputs}-{self.hidden}-{self.outputs}"


@dataclass(frozen=True)
class TrainConfig:
    eta: float = 0.8
    alpha: float = 0.7
    epochs: int = 100
    seed: int = 0
    shuffle: bool = True
    # stop once the epoch error has not improved by min_delta for this many epochs
    patience: int | None = None
    min_delta: float = 1e-6

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("eta must be >= 0")
        if not 0 <= self.alpha < 1:
            raise ValueError("alpha must be in [0, 1)")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


def sigmoid(z):
    with np.errstate(over="ignore"):  # exp(-z) -> inf saturates cleanly to 0
        return 1.0 / (1.0 + np.exp(-z))


def one_hot(labels, n: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= n):
        raise ValueError(f"labels must lie in [0, {n})")
    t = np.zeros((labels.size, n))
    t[np.arange(labels.size), labels] = 1.0
    return t


@dataclass
class Mlp:
    w1: np.ndarray  # hidden x (inputs + 1)
    w2: np.ndarray  # outputs x (hidden + 1)
    dw1: np.ndarray = field(default=None, repr=False)
    dw2: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.w1 = np.array(self.w1, dtype=np.float64)
        self.w2 = np.array(self.w2, dtype=np.float64)
        if self.w1.ndim != 2 or self.w2.ndim != 2 or self.w2.shape[1] != self.w1.shape[0] + 1:
            raise ValueError(f"incompatible weight shapes {self.w1.shape}, {self.w2.shape}")
        if self.dw1 is None:
            self.dw1 = np.zeros_like(self.w1)
        if self.dw2 is None:
            self.dw2 = np.zeros_like(self.w2)

    @classmethod
    def init(cls, layout: MlpLayout, seed: int = 0) -> "Mlp":
        """Weights uniform in [-0.5, 0.5] from a seeded generator, w1 drawn first."""
        rng = np.random.default_rng(seed)
        w1 = rng.uniform(-0.5, 0.5, size=(layout.hidden, layout.inputs + 1))
        w2 = rng.uniform(-0.5, 0.5, size=(layout.outputs, layout.hidden + 1))
        return cls(w1, w2)

    @property
    def layout(self) -> MlpLayout:
        return MlpLayout(self.w1.shape[1] - 1, self.w1.shape[0], self.w2.shape[0])

    def copy(self) -> "Mlp":
        return Mlp(self.w1.copy(), self.w2.copy(), self.dw1.copy(), self.dw2.copy())

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.w1.shape[1] - 1:
            raise ValueError(f"input has {x.shape[-1]} features, network expects "
                             f"{self.w1.shape[1] - 1}")
        return x

    def forward(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Hidden and output activations for one input or a batch of rows."""
        x = self._check(x)
        h = sigmoid(x @ self.w1[:, :-1].T + self.w1[:, -1])
        o = sigmoid(h @ self.w2[:, :-1].T + self.w2[:, -1])
        return h, o

    def predict(self, x) -> int | np.ndarray:
        """Index of the largest output; ties go to the lowest index."""
        _, o = self.forward(x)
        return np.argmax(o, axis=-1) if o.ndim > 1 else int(np.argmax(o))

    def gradients(self, x, target) -> tuple[np.ndarray, np.ndarray, float]:
        """Loss gradients w.r.t. w1 and w2 for one sample, and the loss itself."""
        x = self._check(x)
        target = np.asarray(target, dtype=np.float64)
        h, o = self.forward(x)
        err = o - target
        delta_o = err * o * (1.0 - o)
        delta_h = (self.w2[:, :-1].T @ delta_o) * h * (1.0 - h)
        g2 = np.outer(delta_o, np.append(h, 1.0))
        g1 = np.outer(delta_h, np.append(x, 1.0))
        return g1, g2, 0.5 * float(err @ err)

    def step(self, x, target, eta: float, alpha: float) -> float:
        """Apply one momentum update for a single sample; returns its pre-update loss."""
        g1, g2, loss = self.gradients(x, target)
        self.dw1 = -eta * g1 + alpha * self.dw1
        self.dw2 = -eta * g2 + alpha * self.dw2
        self.w1 += self.dw1
        self.w2 += self.dw2
        return loss


def _targets(net: Mlp, y) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim == 1:
        return one_hot(y, net.layout.outputs)
    return y.astype(np.float64)


def epoch_order(n: int, cfg: TrainConfig, epoch_index: int) -> np.ndarray:
    if not cfg.shuffle:
        return np.arange(n)
    return np.random.default_rng([cfg.seed, epoch_index]).permutation(n)


def train_epoch(net: Mlp, X, y, cfg: TrainConfig, epoch_index: int) -> float:
    """One pass of online updates; returns the mean per-sample loss.

    ``y`` holds class labels (turned into one-hot targets) or a 2-D target
    matrix. Samples are visited in an order seeded by (cfg.seed, epoch_index).
    """
    X = np.asarray(X, dtype=np.float64)
    T = _targets(net, y)
    if len(X) == 0:
        raise ValueError("no training samples")
    if len(T) != len(X):
        raise ValueError("features and targets differ in length")
    total = 0.0
    for i in epoch_order(len(X), cfg, epoch_index):
        total += net.step(X[i], T[i], cfg.eta, cfg.alpha)
    mse = total / len(X)
    if not math.isfinite(mse) or not (np.isfinite(net.w1).all() and np.isfinite(net.w2).all()):
        raise TrainingDiverged(f"non-finite training error at epoch {epoch_index}")
    return mse


def train(net: Mlp, X, y, cfg: TrainConfig, on_epoch=None) -> list[float]:
    """Run ``cfg.epochs`` epochs (or fewer with patience); returns the error history."""
    history: list[float] = []
    best, stale = math.inf, 0
    for epoch in range(cfg.epochs):
        mse = train_epoch(net, X, y, cfg, epoch)
        history.append(mse)
        if on_epoch is not None:
            on_epoch(epoch, mse)
        if cfg.patience is not None:
            if mse < best - cfg.min_delta:
                best, stale = mse, 0
            else:
                stale += 1
                if stale >= cfg.patience:
                    break
    return history


@dataclass
class EvalReport:
    accuracy: float
    confusion: np.ndarray  # rows = true class, columns = predicted class
    recall: np.ndarray

    @property
    def total(self) -> int:
        return int(self.confusion.sum())


def confusion_report(y_true, y_pred, n_classes: int) -> EvalReport:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.size == 0:
        raise ValueError("cannot evaluate on an empty set")
    conf = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(conf, (y_true, y_pred), 1)
    support = conf.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        recall = np.where(support > 0, np.diag(conf) / np.maximum(support, 1), 0.0)
    return EvalReport(float(np.trace(conf)) / y_true.size, conf, recall)


def evaluate(net: Mlp, X, y) -> EvalReport:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(X) == 0:
        raise ValueError("cannot evaluate on an empty set")
    n = net.layout.outputs
    if y.min() < 0 or y.max() >= n:
        raise ValueError(f"labels must lie in [0, {n})")
    return confusion_report(y, net.predict(X), n)


# --------------------------------------------------------------------------
# MLPv1 text format
# --------------------------------------------------------------------------

def dumps_model(net: Mlp) -> str:
    lay = net.layout
    lines = [f"{MAGIC} {lay.inputs} {lay.hidden} {lay.outputs}"]
    for w in (net.w1, net.w2):
        lines.extend(" ".join(repr(float(v)) for v in row) for row in w)
    return "\n".join(lines) + "\n"


def loads_model(text: str) -> Mlp:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ModelFormatError("line 1: empty model file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != MAGIC:
        raise ModelFormatError(f"line 1: expected '{MAGIC} <inputs> <hidden> <outputs>'")
    try:
        n_in, n_hid, n_out = (int(t) for t in head[1:])
        layout = MlpLayout(n_in, n_hid, n_out)
    except ValueError:
        raise ModelFormatError("line 1: invalid layout") from None
    expected = 1 + layout.hidden + layout.outputs
    if len(lines) != expected:
        raise ModelFormatError(f"line {min(len(lines), expected) + 1}: expected {expected} "
                               f"lines, found {len(lines)}")

    def parse(lineno: int, width: int) -> list[float]:
        toks = lines[lineno - 1].split()
        if len(toks) != width:
            raise ModelFormatError(f"line {lineno}: expected {width} weights, got {len(toks)}")
        try:
            return [float(t) for t in toks]
        except ValueError:
            raise ModelFormatError(f"line {lineno}: non-numeric weight") from None

    w1 = [parse(2 + i, layout.inputs + 1) for i in range(layout.hidden)]
    w2 = [parse(2 + layout.hidden + i, layout.hidden + 1) for i in range(layout.outputs)]
    net = Mlp(np.array(w1), np.array(w2))
    if not (np.isfinite(net.w1).all() and np.isfinite(net.w2).all()):
        raise ModelFormatError("non-finite weight in model file")
    return net


def save_model(net: Mlp, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_model(net))


def load_model(path) -> Mlp:
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())
