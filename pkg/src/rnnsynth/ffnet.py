"""Three-layer feedforward approximator F(q) ~= A sigma(B q + theta).

The output layer is linear with no bias; that exact shape is what the
recurrent-network recast in :mod:`rnnsynth.synthesis` consumes. Training is
plain mini-batch backpropagation under Adam. A decoder-only baseline is also
provided: random fixed first layer, ridge least squares for A.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dataset import Dataset, sample_uniform
from .systems import VectorField

Array = np.ndarray


def sigma(x: Array, kind: str) -> Array:
    if kind == "tanh":
        return np.tanh(x)
    if kind == "logistic":
        # stable logistic: 0.5 * (1 + tanh(x / 2))
        return 0.5 * (1.0 + np.tanh(0.5 * x))
    raise ValueError(f"unknown activation '{kind}'")


def sigma_prime_from_value(s: Array, kind: str) -> Array:
    """Derivative expressed through the activation value itself."""
    if kind == "tanh":
        return 1.0 - s * s
    if kind == "logistic":
        return s * (1.0 - s)
    raise ValueError(f"unknown activation '{kind}'")


@dataclass
class FFNet:
    n: int
    m: int
    A: Array            # (n, m) hidden -> output
    B: Array            # (m, n) input -> hidden
    theta: Array        # (m,) hidden bias
    activation: str = "tanh"

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float).reshape(self.n, self.m)
        self.B = np.asarray(self.B, dtype=float).reshape(self.m, self.n)
        self.theta = np.asarray(self.theta, dtype=float).reshape(self.m)
        for name, arr in (("A", self.A), ("B", self.B), ("theta", self.theta)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite entries in {name}")
        sigma(np.zeros(1), self.activation)  # validate kind

    def hidden(self, q) -> Array:
        q = np.asarray(q, dtype=float)
        return sigma(q @ self.B.T + self.theta, self.activation)

    def forward(self, q) -> Array:
        """A sigma(B q + theta) for a single state (n,) or batch (N, n)."""
        q = np.asarray(q, dtype=float)
        if q.shape[-1] != self.n:
            raise ValueError(f"input dim {q.shape[-1]} != n={self.n}")
        return self.hidden(q) @ self.A.T


@dataclass
class TrainConfig:
    epochs: int = 200
    batch_size: int = 256
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    seed: int = 0
    init_scale: Optional[float] = None   # None -> fan-in scaling 1/sqrt(fan_in)
    lr_decay: float = 1.0                # final lr = learning_rate * lr_decay

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not (0.0 <= self.adam_beta1 < 1.0 and 0.0 <= self.adam_beta2 < 1.0):
            raise ValueError("adam betas must lie in [0, 1)")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0.0 < self.lr_decay <= 1.0:
            raise ValueError("lr_decay must lie in (0, 1]")


class TrainingDiverged(RuntimeError):
    pass


def mse_loss_and_grads(A: Array, B: Array, theta: Array, X: Array, Y: Array,
                       activation: str):
    """Loss = mean over rows and output components of squared error.

    Returns (loss, dA, dB, dtheta) with exact analytic gradients through the
    single hidden layer.
    """
    N, n = X.shape[0], Y.shape[1]
    H = sigma(X @ B.T + theta, activation)          # (N, m)
    E = H @ A.T - Y                                 # (N, n)
    loss = float(np.mean(E * E))
    scale = 2.0 / (N * n)
    dA = scale * E.T @ H
    G = scale * (E @ A) * sigma_prime_from_value(H, activation)  # (N, m)
    dB = G.T @ X
    dtheta = G.sum(axis=0)
    return loss, dA, dB, dtheta


class _Adam:
    def __init__(self, shapes, cfg: TrainConfig):
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0
        self.cfg = cfg

    def step(self, params, grads, lr):
        c = self.cfg
        self.t += 1
        out = []
        for i, (p, g) in enumerate(zip(params, grads)):
            self.m[i] = c.adam_beta1 * self.m[i] + (1 - c.adam_beta1) * g
            self.v[i] = c.adam_beta2 * self.v[i] + (1 - c.adam_beta2) * g * g
            mhat = self.m[i] / (1 - c.adam_beta1 ** self.t)
            vhat = self.v[i] / (1 - c.adam_beta2 ** self.t)
            out.append(p - lr * mhat / (np.sqrt(vhat) + c.adam_epsilon))
        return out


def _standardizers(ds: Dataset):
    """Affine input map from the domain box and per-axis target scales.

    Targets are scaled, not centered: the architecture has no output bias, so
    a centering shift could not be folded back into the weights.
    """
    if ds.domain is not None:
        lo, hi = ds.domain[:, 0], ds.domain[:, 1]
    else:
        lo, hi = ds.inputs.min(axis=0), ds.inputs.max(axis=0)
    cx = 0.5 * (lo + hi)
    sx = 0.5 * (hi - lo)
    sx = np.where(sx > 0, sx, 1.0)
    sy = ds.targets.std(axis=0)
    sy = np.where(sy > 0, sy, 1.0)
    return cx, sx, sy


def train(source, n: int, m: int, cfg: TrainConfig, activation: str = "tanh",
          sample_count: int = 10_000) -> tuple[FFNet, list[float]]:
    """Fit A, B, theta by mini-batch backpropagation under Adam.

    ``source`` is a Dataset or a VectorField (then ``sample_count`` uniform
    samples are drawn with the training seed). Internally the inputs are
    mapped to the unit box and the targets scaled per axis for conditioning;
    the returned net folds those affine maps back into (A, B, theta), so its
    forward pass operates on raw states. The loss history holds one raw-space
    training MSE per epoch. Raises :class:`TrainingDiverged` if the loss goes
    non-finite.
    """
    if isinstance(source, VectorField):
        ds = sample_uniform(source, sample_count, cfg.seed)
    else:
        ds = source
    if len(ds) == 0:
        raise ValueError("empty dataset")
    if ds.dim != n:
        raise ValueError(f"dataset dim {ds.dim} != n={n}")
    if m < 1:
        raise ValueError("m must be >= 1")

    cx, sx, sy = _standardizers(ds)
    Xn = (ds.inputs - cx) / sx
    Yn = ds.targets / sy

    rng = np.random.default_rng(cfg.seed)
    ib = cfg.init_scale if cfg.init_scale is not None else 1.0 / np.sqrt(n)
    ia = cfg.init_scale if cfg.init_scale is not None else 1.0 / np.sqrt(m)
    B = rng.uniform(-ib, ib, size=(m, n))
    A = rng.uniform(-ia, ia, size=(n, m))
    theta = np.zeros(m)

    opt = _Adam([A.shape, B.shape, theta.shape], cfg)
    N = len(ds)
    bs = min(cfg.batch_size, N)
    history: list[float] = []

    for epoch in range(cfg.epochs):
        if cfg.epochs > 1:
            lr = cfg.learning_rate * cfg.lr_decay ** (epoch / (cfg.epochs - 1))
        else:
            lr = cfg.learning_rate
        perm = rng.permutation(N)
        for start in range(0, N, bs):
            idx = perm[start:start + bs]
            loss, dA, dB, dth = mse_loss_and_grads(A, B, theta, Xn[idx], Yn[idx],
                                                   activation)
            if not np.isfinite(loss):
                raise TrainingDiverged(
                    f"loss became non-finite at epoch {epoch}, "
                    f"batch offset {start} (lr={lr:g})")
            A, B, theta = opt.step([A, B, theta], [dA, dB, dth], lr)
        En = sigma(Xn @ B.T + theta, activation) @ A.T - Yn
        history.append(float(np.mean((En * sy) ** 2)))

    net = _fold_back(A, B, theta, cx, sx, sy, n, m, activation)
    return net, history


def _fold_back(A, B, theta, cx, sx, sy, n, m, activation) -> FFNet:
    """Absorb the standardization maps so forward() acts on raw states."""
    A_raw = sy[:, None] * A
    B_raw = B / sx[None, :]
    theta_raw = theta - B @ (cx / sx)
    return FFNet(n, m, A_raw, B_raw, theta_raw, activation)


def train_nef_baseline(ds: Dataset, n: int, m: int, seed: int,
                       encoder_scale: float = 1.0, activation: str = "tanh",
                       ridge: float = 1e-8) -> FFNet:
    """Random fixed encoders (B, theta); decoders A by ridge least squares.

    The ridge is scaled by trace(H^T H)/m; on a singular or non-finite solve
    it is grown tenfold with a warning until the system factorizes.
    """
    if len(ds) == 0:
        raise ValueError("empty dataset")
    if ds.dim != n:
        raise ValueError(f"dataset dim {ds.dim} != n={n}")
    cx, sx, sy = _standardizers(ds)
    Xn = (ds.inputs - cx) / sx
    Yn = ds.targets / sy

    rng = np.random.default_rng(seed)
    B = rng.uniform(-encoder_scale, encoder_scale, size=(m, n))
    theta = rng.uniform(-encoder_scale, encoder_scale, size=m)
    H = sigma(Xn @ B.T + theta, activation)
    G = H.T @ H
    tr = float(np.trace(G))
    lam = ridge * (tr / m if tr > 0 else 1.0)
    rhs = H.T @ Yn
    for _ in range(40):
        try:
            At = np.linalg.solve(G + lam * np.eye(m), rhs)
        except np.linalg.LinAlgError:
            At = None
        if At is not None and np.all(np.isfinite(At)):
            break
        lam *= 10.0
        warnings.warn(f"normal equations ill-conditioned, ridge grown to {lam:g}")
    else:
        raise np.linalg.LinAlgError("ridge growth failed to stabilize the solve")
    return _fold_back(At.T, B, theta, cx, sx, sy, n, m, activation)


def eval_metrics(net: FFNet, eval_grid: Dataset) -> tuple[float, float]:
    """(MSE, E_max) over an evaluation set.

    MSE here is the mean over points of the squared Euclidean error vector;
    E_max is the largest Euclidean error norm on the set.
    """
    err = net.forward(eval_grid.inputs) - eval_grid.targets
    se = np.sum(err * err, axis=1)
    return float(se.mean()), float(np.sqrt(se.max()))


# ---------------------------------------------------------------------------
# model file


def save_model(net: FFNet, path, provenance: Optional[dict] = None) -> None:
    """JSON model file: the contract consumed by the synthesis stage."""
    doc = {
        "n": net.n,
        "m": net.m,
        "activation": net.activation,
        "A": net.A.reshape(-1).tolist(),        # row-major
        "B": net.B.reshape(-1).tolist(),        # row-major
        "theta": net.theta.tolist(),
        "provenance": provenance or {},
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def load_model(path) -> tuple[FFNet, dict]:
    with open(path) as fh:
        doc = json.load(fh)
    net = FFNet(doc["n"], doc["m"], np.array(doc["A"]), np.array(doc["B"]),
                np.array(doc["theta"]), doc["activation"])
    return net, doc.get("provenance", {})
