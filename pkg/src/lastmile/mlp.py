"""Feed-forward satisfaction network: plain numpy, trained from scratch.

The default architecture is 12-100-100-1 (two rectified hidden layers,
linear output) regressing a Likert label; deployed predictions are clamped
to [1, 7] and a solo ride bypasses the network entirely, scoring exactly
4. Training is minibatch gradient descent on unclamped mean squared error
with early stopping on validation RMSE; the clamp stays out of the loss so
gradients never die at the scale edges.
"""

import copy
import math
from dataclasses import dataclass, field

import numpy as np

from .datasets import Dataset
from .satisfaction import (
    LIKERT_MAX,
    LIKERT_MIN,
    N_FEATURES,
    SOLO_SCORE,
    RideBatch,
    SatisfactionModel,
)

DEFAULT_HIDDEN_WIDTH = 100
DEFAULT_HIDDEN_LAYERS = 2
# validation must beat the incumbent by this much to reset patience
MIN_VAL_IMPROVEMENT = 1e-3


@dataclass
class MLPWeights:
    """Per-layer weight matrices (fan_in x fan_out) and bias vectors."""

    dims: tuple
    weights: list
    biases: list

    def __post_init__(self):
        if len(self.dims) < 2 or self.dims[-1] != 1:
            raise ValueError("dims must end in an output width of 1")
        if len(self.weights) != len(self.dims) - 1 or len(self.biases) != len(self.dims) - 1:
            raise ValueError("one weight matrix and bias vector per layer expected")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.dims[i], self.dims[i + 1]) or b.shape != (self.dims[i + 1],):
                raise ValueError(f"layer {i} shapes inconsistent with dims {self.dims}")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError(f"layer {i} has non-finite entries")

    def copy(self) -> "MLPWeights":
        return MLPWeights(
            dims=self.dims,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )


def init_weights(
    dims=(N_FEATURES, DEFAULT_HIDDEN_WIDTH, DEFAULT_HIDDEN_WIDTH, 1), seed=0
) -> MLPWeights:
    """He-scaled random weights; the output bias starts at the scale center 4."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for i in range(len(dims) - 1):
        fan_in = dims[i]
        scale = math.sqrt(2.0 / fan_in) if i < len(dims) - 2 else math.sqrt(1.0 / fan_in)
        weights.append(rng.normal(0.0, scale, size=(dims[i], dims[i + 1])))
        biases.append(np.zeros(dims[i + 1]))
    biases[-1][:] = SOLO_SCORE
    return MLPWeights(dims=tuple(dims), weights=weights, biases=biases)


def forward(weights: MLPWeights, X: np.ndarray) -> np.ndarray:
    """Unclamped network output, one value per row of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != weights.dims[0]:
        raise ValueError(
            f"feature length {X.shape[1]} does not match input width {weights.dims[0]}"
        )
    h = X
    last = len(weights.weights) - 1
    for i, (w, b) in enumerate(zip(weights.weights, weights.biases)):
        h = h @ w + b
        if i < last:
            np.maximum(h, 0.0, out=h)
    return h[:, 0]


def mlp_predict(weights: MLPWeights, features) -> float:
    """Score one encoded ride: clamp to [1, 7], solo rides exactly 4."""
    x = np.asarray(features, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a single feature vector")
    if x.shape[0] != weights.dims[0]:
        raise ValueError(
            f"feature length {x.shape[0]} does not match input width {weights.dims[0]}"
        )
    if x[4] == 0.0:  # n_additional / 3
        return SOLO_SCORE
    raw = forward(weights, x[None, :])[0]
    return float(min(max(raw, LIKERT_MIN), LIKERT_MAX))


def loss_and_grads(weights: MLPWeights, X: np.ndarray, y: np.ndarray):
    """Mean squared error on raw outputs and its gradients, backprop style."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    acts = [X]
    pre = []
    h = X
    last = len(weights.weights) - 1
    for i, (w, b) in enumerate(zip(weights.weights, weights.biases)):
        z = h @ w + b
        pre.append(z)
        h = np.maximum(z, 0.0) if i < last else z
        acts.append(h)
    out = acts[-1][:, 0]
    resid = out - y
    loss = float(np.mean(resid**2))

    d = (2.0 / n) * resid[:, None]
    grads_w = [None] * len(weights.weights)
    grads_b = [None] * len(weights.biases)
    for i in range(last, -1, -1):
        grads_w[i] = acts[i].T @ d
        grads_b[i] = d.sum(axis=0)
        if i > 0:
            d = (d @ weights.weights[i].T) * (pre[i - 1] > 0.0)
    return loss, grads_w, grads_b


def _rmse(pred: np.ndarray, y: np.ndarray) -> float:
    return float(np.sqrt(np.mean((pred - y) ** 2)))


def _clamped(raw: np.ndarray) -> np.ndarray:
    return np.clip(raw, LIKERT_MIN, LIKERT_MAX)


@dataclass
class TrainResult:
    weights: MLPWeights
    train_rmse: float
    val_rmse: float
    test_rmse: float
    epochs_run: int
    best_epoch: int
    stopped_early: bool
    val_history: list = field(default_factory=list)


def train_mlp(
    dataset: Dataset,
    *,
    learning_rate: float = 0.01,
    max_epochs: int = 400,
    patience: int = 20,
    batch_size: int = 64,
    hidden_layers: int = DEFAULT_HIDDEN_LAYERS,
    hidden_width: int = DEFAULT_HIDDEN_WIDTH,
    seed=0,
) -> TrainResult:
    """Fit the network; returns the weights of the best validation epoch.

    Deterministic per seed: one RNG drives initialization and epoch
    shuffles. Raises on an empty split or a non-finite loss.
    """
    if not 1 <= hidden_layers <= 3:
        raise ValueError("hidden_layers must be 1, 2 or 3")
    (X_tr, y_tr), (X_val, y_val), (X_te, y_te) = dataset.split_arrays()
    for name, X in (("train", X_tr), ("validation", X_val), ("test", X_te)):
        if X.shape[0] == 0:
            raise ValueError(f"{name} split is empty")

    rng = np.random.default_rng(seed)
    dims = (N_FEATURES,) + (hidden_width,) * hidden_layers + (1,)
    weights = init_weights(dims, seed=rng.integers(2**63))
    best = weights.copy()
    best_val = math.inf
    best_epoch = 0
    bad_epochs = 0
    epochs_run = 0
    stopped_early = False
    val_history = []
    n_tr = X_tr.shape[0]

    for epoch in range(1, max_epochs + 1):
        epochs_run = epoch
        perm = rng.permutation(n_tr)
        for lo in range(0, n_tr, batch_size):
            idx = perm[lo : lo + batch_size]
            loss, gw, gb = loss_and_grads(weights, X_tr[idx], y_tr[idx])
            if not math.isfinite(loss):
                raise RuntimeError(f"training diverged at epoch {epoch}")
            for i in range(len(weights.weights)):
                weights.weights[i] -= learning_rate * gw[i]
                weights.biases[i] -= learning_rate * gb[i]
        val_rmse = _rmse(_clamped(forward(weights, X_val)), y_val)
        if not math.isfinite(val_rmse):
            raise RuntimeError(f"training diverged at epoch {epoch}")
        val_history.append(val_rmse)
        if val_rmse < best_val - MIN_VAL_IMPROVEMENT:
            best_val = val_rmse
            best = weights.copy()
            best_epoch = epoch
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= patience:
                stopped_early = True
                break

    return TrainResult(
        weights=best,
        train_rmse=_rmse(_clamped(forward(best, X_tr)), y_tr),
        val_rmse=_rmse(_clamped(forward(best, X_val)), y_val),
        test_rmse=_rmse(_clamped(forward(best, X_te)), y_te),
        epochs_run=epochs_run,
        best_epoch=best_epoch,
        stopped_early=stopped_early,
        val_history=val_history,
    )


def save_model(weights: MLPWeights, path) -> None:
    """Text format: `mlp <dims...>` header, then per layer one line of
    row-major weights and one line of biases."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("mlp " + " ".join(str(d) for d in weights.dims) + "\n")
        for w, b in zip(weights.weights, weights.biases):
            fh.write(" ".join(repr(float(v)) for v in w.ravel()) + "\n")
            fh.write(" ".join(repr(float(v)) for v in b) + "\n")


def load_model(path) -> MLPWeights:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if not header or header[0] != "mlp" or len(header) < 3:
            raise ValueError(f"{path}: expected header 'mlp <dims...>'")
        try:
            dims = tuple(int(d) for d in header[1:])
        except ValueError:
            raise ValueError(f"{path}: bad dimension in header") from None
        values = fh.read().split()
    need = sum(dims[i] * dims[i + 1] + dims[i + 1] for i in range(len(dims) - 1))
    if len(values) != need:
        raise ValueError(f"{path}: expected {need} values for dims {dims}, got {len(values)}")
    it = iter(values)
    weights, biases = [], []
    try:
        for i in range(len(dims) - 1):
            w = np.array(
                [float(next(it)) for _ in range(dims[i] * dims[i + 1])]
            ).reshape(dims[i], dims[i + 1])
            b = np.array([float(next(it)) for _ in range(dims[i + 1])])
            weights.append(w)
            biases.append(b)
    except ValueError:
        raise ValueError(f"{path}: bad numeric value") from None
    return MLPWeights(dims=dims, weights=weights, biases=biases)


class MLPModel(SatisfactionModel):
    """The trained network as an assignment objective ("full" model)."""

    name = "full"

    def __init__(self, weights: MLPWeights):
        self.weights = weights
        self._w32 = [w.astype(np.float32) for w in weights.weights]
        self._b32 = [b.astype(np.float32) for b in weights.biases]

    def score_rides(self, batch: RideBatch) -> np.ndarray:
        scores = _clamped(forward(self.weights, batch.features()))
        return np.where(batch.n_additional == 0, SOLO_SCORE, scores)

    def score_features_f32(self, X32: np.ndarray) -> np.ndarray:
        """Single-precision forward pass for bulk table building.

        Clamps but does not apply the solo bypass; callers handle solo
        rides (the bulk paths never score them).
        """
        h = X32
        last = len(self._w32) - 1
        for i, (w, b) in enumerate(zip(self._w32, self._b32)):
            h = h @ w + b
            if i < last:
                np.maximum(h, 0.0, out=h)
        return np.clip(h[:, 0], np.float32(LIKERT_MIN), np.float32(LIKERT_MAX))
