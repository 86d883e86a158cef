"""Small numpy classifiers and data for running the certification pipeline end to end."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DomainError, TrainingError
from .smoothing import GenGaussian, gn_noise, rng_stream


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    num_classes: int

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[0] < 1 or self.X.shape[0] != self.y.shape[0]:
            raise DomainError("Dataset needs X of shape (n, d) with n >= 1 and matching labels")
        if np.any(self.y < 0) or np.any(self.y >= self.num_classes):
            raise DomainError("labels out of range")

    def __len__(self):
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.X[idx], self.y[idx], self.num_classes)

    def save_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"x_{j}" for j in range(self.dim)] + ["label"])
            for row, label in zip(self.X, self.y):
                w.writerow([repr(float(v)) for v in row] + [int(label)])

    @classmethod
    def load_csv(cls, path, num_classes: Optional[int] = None) -> "Dataset":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], rows[1:]
        if header[-1] != "label":
            raise DomainError(f"{path}: last column must be 'label'")
        X = np.array([[float(v) for v in r[:-1]] for r in body])
        y = np.array([int(r[-1]) for r in body], dtype=int)
        return cls(X, y, num_classes or int(y.max()) + 1)


def make_blobs(d: int, k: int, n_per_class: int, separation: float = 8.0, seed: int = 0, cluster_std: float = 1.0) -> Dataset:
    """k isotropic Gaussian clusters whose centers are ``separation`` apart.

    Centers depend only on (d, k, separation): scaled coordinate axes when
    k <= d, otherwise evenly spaced points on the first axis.  The seed only
    drives the within-cluster scatter, so train and test sets drawn with
    different seeds share their centers.
    """
    if d < 1 or k < 2 or n_per_class < 1:
        raise DomainError("need d >= 1, k >= 2, n_per_class >= 1")
    centers = np.zeros((k, d))
    if k <= d:
        centers[np.arange(k), np.arange(k)] = separation / np.sqrt(2.0)
    else:
        centers[:, 0] = separation * np.arange(k)
    centers -= centers.mean(axis=0)
    rng = np.random.default_rng(seed)
    y = np.repeat(np.arange(k), n_per_class)
    X = centers[y] + cluster_std * rng.standard_normal((y.size, d))
    return Dataset(X, y, k)


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class ToyModel:
    """Linear softmax classifier, optionally with one ReLU hidden layer (d -> h -> k)."""

    W: np.ndarray
    b: np.ndarray
    W1: Optional[np.ndarray] = None
    b1: Optional[np.ndarray] = None

    @classmethod
    def init(cls, d: int, k: int, hidden: Optional[int] = None, seed: int = 0, scale: float = 0.01) -> "ToyModel":
        rng = np.random.default_rng(seed)
        if hidden:
            return cls(
                W=rng.normal(0, np.sqrt(2.0 / hidden), (k, hidden)),
                b=np.zeros(k),
                W1=rng.normal(0, np.sqrt(2.0 / d), (hidden, d)),
                b1=np.zeros(hidden),
            )
        return cls(W=scale * rng.standard_normal((k, d)), b=np.zeros(k))

    @property
    def hidden(self) -> bool:
        return self.W1 is not None

    @property
    def num_classes(self) -> int:
        return self.W.shape[0]

    def params(self) -> dict:
        out = {"W": self.W, "b": self.b}
        if self.hidden:
            out.update(W1=self.W1, b1=self.b1)
        return out

    def _forward(self, X):
        X = np.atleast_2d(X)
        if self.hidden:
            pre = X @ self.W1.T + self.b1
            act = np.maximum(pre, 0.0)
            return act @ self.W.T + self.b, (X, pre, act)
        return X @ self.W.T + self.b, (X, None, X)

    def logits(self, X) -> np.ndarray:
        return self._forward(X)[0]

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.logits(X), axis=1)

    __call__ = predict

    def loss(self, X, y) -> float:
        z = self.logits(X)
        z = z - z.max(axis=1, keepdims=True)
        logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
        return float(-logp[np.arange(len(y)), y].mean())

    def _dlogits(self, z, y):
        g = _softmax(z)
        g[np.arange(len(y)), y] -= 1.0
        return g / len(y)

    def loss_and_grads(self, X, y) -> tuple[float, dict]:
        """Mean cross-entropy and its gradient with respect to every parameter."""
        z, (X, pre, act) = self._forward(X)
        loss = self.loss(X, y)
        dz = self._dlogits(z, y)
        grads = {"W": dz.T @ act, "b": dz.sum(axis=0)}
        if self.hidden:
            dpre = (dz @ self.W) * (pre > 0)
            grads["W1"] = dpre.T @ X
            grads["b1"] = dpre.sum(axis=0)
        return loss, grads

    def input_grad(self, X, y) -> np.ndarray:
        """Gradient of the summed cross-entropy with respect to each input row."""
        z, (X, pre, _) = self._forward(X)
        dz = self._dlogits(z, y) * len(y)
        if self.hidden:
            return ((dz @ self.W) * (pre > 0)) @ self.W1
        return dz @ self.W


def train_noise_augmented(
    model: ToyModel,
    data: Dataset,
    noise: GenGaussian,
    epochs: int = 200,
    step_size: float = 0.5,
    seed: int = 0,
) -> ToyModel:
    """Full-batch gradient descent on cross-entropy with fresh GN noise every epoch."""
    rng = rng_stream(seed, 0x7A11)
    params = {k: v.copy() for k, v in model.params().items()}
    current = model
    for epoch in range(epochs):
        Xn = data.X + gn_noise(noise, data.X.shape, rng)
        loss, grads = current.loss_and_grads(Xn, data.y)
        if not np.isfinite(loss):
            raise TrainingError(f"loss diverged at epoch {epoch}")
        for k in params:
            params[k] = params[k] - step_size * grads[k]
        current = replace(model, **params)
    return current


def _smoothed_vote(model: ToyModel, x, eps_noise) -> np.ndarray:
    preds = model.predict(x[None, :] + eps_noise)
    return np.bincount(preds, minlength=model.num_classes)


@dataclass
class AttackResult:
    delta: np.ndarray
    success: bool

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.delta))


def eot_pgd_l2(
    model: ToyModel,
    x,
    y: int,
    noise: GenGaussian,
    n_mc: int = 1000,
    steps: int = 50,
    step_size: float = 0.1,
    seed: int = 0,
    bisect_iters: int = 30,
) -> AttackResult:
    """Minimal-norm l2 attack on the smoothed classifier.

    Each step ascends the cross-entropy gradient averaged over ``n_mc`` fresh
    noise draws (Expectation Over Transformation).  Whenever the smoothed
    majority vote flips, the perturbation is shrunk along its ray by
    bisection to the smallest scale that still flips it.  The vote is always
    taken on one fixed set of ``n_mc`` draws so it is a deterministic function
    of the perturbation.
    """
    if n_mc < 1:
        raise DomainError("n_mc must be >= 1")
    x = np.asarray(x, dtype=float)
    rng = rng_stream(seed, 0xA77C)
    vote_noise = gn_noise(noise, (n_mc, x.size), rng)

    def flipped(delta):
        return int(np.argmax(_smoothed_vote(model, x + delta, vote_noise))) != y

    zero = np.zeros_like(x)
    if flipped(zero):
        return AttackResult(zero, True)

    delta = zero.copy()
    best = None
    for _ in range(steps):
        batch = x[None, :] + delta[None, :] + gn_noise(noise, (n_mc, x.size), rng)
        g = model.input_grad(batch, np.full(n_mc, y)).mean(axis=0)
        gnorm = np.linalg.norm(g)
        if gnorm == 0:
            break
        delta = delta + step_size * g / gnorm
        if flipped(delta):
            lo, hi = 0.0, 1.0
            for _ in range(bisect_iters):
                mid = 0.5 * (lo + hi)
                if flipped(mid * delta):
                    hi = mid
                else:
                    lo = mid
            delta = hi * delta
            if best is None or np.linalg.norm(delta) < np.linalg.norm(best):
                best = delta.copy()
    if best is None:
        return AttackResult(delta, False)
    return AttackResult(best, True)
