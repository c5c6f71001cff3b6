"""Sampling of (state, derivative) training pairs from a vector field."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .systems import VectorField, _box

Array = np.ndarray

GRID_BUDGET = 10 ** 8


@dataclass
class Dataset:
    """Paired samples: ``targets[i] == field.eval(inputs[i])`` at generation time."""

    inputs: Array                 # (N, n)
    targets: Array                # (N, n)
    domain: Optional[Array] = None
    seed: Optional[int] = None

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]


def sample_uniform(field: VectorField, count: int, seed: int,
                   domain=None) -> Dataset:
    """i.i.d. uniform samples over the box; bit-reproducible for a given seed."""
    if count < 1:
        raise ValueError("count must be >= 1")
    box = np.asarray(domain, dtype=float) if domain is not None else field.domain
    lo, hi = box[:, 0], box[:, 1]
    rng = np.random.default_rng(seed)
    u = rng.random((count, field.dim))
    inputs = lo + u * (hi - lo)   # exact at degenerate lo == hi axes
    return Dataset(inputs, field.eval(inputs), np.array(box), seed)


def sample_grid(field: VectorField, per_axis: int) -> Dataset:
    """Row-major lattice over the domain box, corners included."""
    if per_axis < 1:
        raise ValueError("per_axis must be >= 1")
    if per_axis ** field.dim > GRID_BUDGET:
        raise ValueError(
            f"grid of {per_axis}^{field.dim} points exceeds budget {GRID_BUDGET:g}")
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in field.domain]
    mesh = np.meshgrid(*axes, indexing="ij")
    inputs = np.stack(mesh, axis=-1).reshape(-1, field.dim)
    return Dataset(inputs, field.eval(inputs), np.array(field.domain), None)


def split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic shuffled split; the parts partition the original rows."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    n = len(ds)
    perm = np.random.default_rng(seed).permutation(n)
    k = int(round(train_fraction * n))
    a, b = perm[:k], perm[k:]
    return (
        Dataset(ds.inputs[a], ds.targets[a], ds.domain, seed),
        Dataset(ds.inputs[b], ds.targets[b], ds.domain, seed),
    )


def write_csv(ds: Dataset, path, header_comments: Optional[dict] = None) -> None:
    """Persist as CSV: header ``q1..qn,F1..Fn``, 17 significant digits."""
    n = ds.dim
    cols = [f"q{i + 1}" for i in range(n)] + [f"F{i + 1}" for i in range(n)]
    rows = np.hstack([ds.inputs, ds.targets])
    with open(path, "w") as fh:
        for key, val in (header_comments or {}).items():
            fh.write(f"# {key}: {val}\n")
        fh.write(",".join(cols) + "\n")
        np.savetxt(fh, rows, fmt="%.17g", delimiter=",")


def read_csv(path) -> Dataset:
    with open(path) as fh:
        header = fh.readline()
        while header.startswith("#"):
            header = fh.readline()
        names = header.strip().split(",")
        rows = np.loadtxt(fh, delimiter=",", ndmin=2)
    n = sum(1 for c in names if c.startswith("q"))
    if len(names) != 2 * n:
        raise ValueError(f"malformed dataset header: {names}")
    return Dataset(rows[:, :n], rows[:, n:], None, None)
