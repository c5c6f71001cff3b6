"""Quantitative checks on synthesized networks.

Covers the error metrics reported with each run, the exponential trajectory
bound, the Lipschitz estimate it needs, the linear drift law of the hidden
states, time-constant sweeps, and the energy-like surface computed from the
symmetric part of the weight matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dataset import Dataset, sample_uniform
from .ffnet import FFNet, eval_metrics, sigma
from .integrate import Trajectory, simulate_rnn
from .synthesis import SynthRNN, synthesize
from .systems import VectorField, _box

Array = np.ndarray


@dataclass
class RunMetrics:
    """Per-run quantities: training MSE, max field error E_max, normalized
    max trajectory error E_orb, spectral radius of W, horizon, dataset size,
    Lipschitz estimate, and the exponential bound E_L."""

    mse: float
    e_max: float
    e_orb: float
    spectral_radius: float
    T: float
    d_count: int
    l_f: float
    e_l: float

    def as_dict(self) -> dict:
        return {
            "mse": self.mse, "e_max": self.e_max, "e_orb": self.e_orb,
            "spectral_radius": self.spectral_radius, "T": self.T,
            "d_count": self.d_count, "l_f": self.l_f, "e_l": self.e_l,
        }


def spectral_radius(M: Array) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(M)))) if M.size else 0.0


def trajectory_bound(e_max: float, l_f: float, T: float) -> float:
    """E_L = (2 E_max / L_F)(e^{L_F T} - 1); inf when the exponent overflows."""
    with np.errstate(over="ignore"):
        return float(2.0 * e_max / l_f * np.expm1(l_f * T))


def compute_metrics(traj_true: Trajectory, traj_rnn: Trajectory, net: FFNet,
                    rnn: SynthRNN, eval_grid: Dataset, l_f: float,
                    train_mse: float = float("nan"),
                    d_count: int = 0) -> RunMetrics:
    """Assemble RunMetrics for one orbit pair on matching time grids."""
    if traj_true.states.shape[0] != traj_rnn.states.shape[0] or \
            not np.array_equal(traj_true.times, traj_rnn.times):
        raise ValueError("trajectory time grids do not match")
    errs = np.linalg.norm(traj_true.states - traj_rnn.states[:, :traj_true.dim],
                          axis=1)
    T = traj_true.T
    e_orb = float(errs.max() / T)
    _, e_max = eval_metrics(net, eval_grid)
    return RunMetrics(
        mse=float(train_mse),
        e_max=e_max,
        e_orb=e_orb,
        spectral_radius=spectral_radius(rnn.hidden_block),
        T=T,
        d_count=int(d_count),
        l_f=float(l_f),
        e_l=trajectory_bound(e_max, l_f, T),
    )


def estimate_lipschitz(field: VectorField, samples: int = 200, seed: int = 0) -> float:
    """Max spectral norm of the Jacobian over sampled domain points.

    Analytic Jacobians are used where available, central differences
    otherwise. A sampled maximum is a lower estimate of the true constant.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    pts = sample_uniform(field, samples, seed).inputs
    best = 0.0
    for q in pts:
        J = field.jacobian(q) if field.has_jacobian else field.fd_jacobian(q)
        best = max(best, float(np.linalg.norm(J, 2)))
    return best


@dataclass
class DeltaSeries:
    """Distance of the hidden states from the affine approximator
    B omega(t) + theta, with the fitted and predicted drift slopes."""

    times: Array
    delta: Array
    fitted_slope: float
    predicted_slope: float


def delta_series(rnn: SynthRNN, traj: Trajectory) -> DeltaSeries:
    """delta(t) = ||eta(t) - (B omega(t) + theta)|| along a full-state orbit.

    Started from the canonical initial state, the deviation obeys
    d(delta)/dt = ||theta||/tau exactly (up to the e^{-t/tau} tail), so the
    fitted line should match the predicted slope for t << tau.
    """
    if traj.dim != rnn.size:
        raise ValueError("trajectory must carry the full (n+m)-dim state")
    omega = traj.states[:, :rnn.n]
    eta = traj.states[:, rnn.n:]
    r = omega @ rnn.B.T + rnn.theta
    delta = np.linalg.norm(eta - r, axis=1)
    fitted = float(np.polyfit(traj.times, delta, 1)[0])
    predicted = float(np.linalg.norm(rnn.theta) / rnn.tau)
    return DeltaSeries(traj.times, delta, fitted, predicted)


def tau_sweep(net: FFNet, taus: Sequence[float], q0s, h: float, T: float
              ) -> dict[float, list[Trajectory]]:
    """Synthesize one network per time constant and integrate every q0.

    Returns output-projected trajectories keyed by tau, for overlay plots and
    the small-tau behavior checks.
    """
    if len(taus) == 0:
        raise ValueError("taus must be nonempty")
    out: dict[float, list[Trajectory]] = {}
    for tau in taus:
        rnn = synthesize(net, tau)
        runs = []
        for q0 in q0s:
            full = simulate_rnn(rnn, np.asarray(q0, dtype=float), h, T,
                                {"source": "rnn", "tau": tau,
                                 "q0": list(np.asarray(q0, dtype=float))})
            runs.append(Trajectory(full.times, full.states[:, :rnn.n], full.h,
                                   full.meta, full.diverged, full.last_valid))
        out[float(tau)] = runs
    return out


@dataclass
class PotentialSurface:
    """Energy-like surface over 2-D output space from the symmetric weights."""

    xs: Array            # (Gx,)
    ys: Array            # (Gy,)
    values: Array        # (Gx, Gy), V at (xs[i], ys[j])
    w_sym: Array         # symmetric part used


def gradient_potential(rnn: SynthRNN, domain=None, per_axis: int = 201
                       ) -> PotentialSurface:
    """V(y) = -1/2 sigma(y)^T W^S sigma(y) with y = col[omega, B omega + theta].

    W^S = (W + W^T)/2 over the full (n+m)-dim space. Valid for 2-D output
    spaces only; the leak term is neglected, which is the large-tau regime.
    """
    if rnn.n != 2:
        raise ValueError("potential surfaces are defined for n = 2 only")
    box = _box(domain if domain is not None else [[-2, 2], [-2, 2]])
    if box.shape[0] != 2:
        raise ValueError("domain must be a 2-D box")
    w_sym = 0.5 * (rnn.W + rnn.W.T)
    xs = np.linspace(box[0, 0], box[0, 1], per_axis)
    ys = np.linspace(box[1, 0], box[1, 1], per_axis)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    omega = np.stack([gx.ravel(), gy.ravel()], axis=-1)        # (G, 2)
    hidden = omega @ rnn.B.T + rnn.theta                       # (G, m)
    s = sigma(np.hstack([omega, hidden]), rnn.activation)       # (G, n+m)
    vals = -0.5 * np.einsum("gi,ij,gj->g", s, w_sym, s)
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite potential values")
    return PotentialSurface(xs, ys, vals.reshape(per_axis, per_axis), w_sym)


def classify_grid_points(values: Array) -> tuple[int, int, int]:
    """Count (minima, maxima, saddles) among interior nodes of a surface grid.

    A node is classified by the signs of the differences to its 8 neighbors
    taken in cyclic order: no sign change and all positive -> minimum, all
    negative -> maximum, 4 or more sign changes -> saddle.
    """
    ring = [(-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1)]
    n_min = n_max = n_saddle = 0
    rows, cols = values.shape
    for i in range(1, rows - 1):
        for j in range(1, cols - 1):
            c = values[i, j]
            diffs = np.array([values[i + di, j + dj] - c for di, dj in ring])
            signs = np.where(diffs >= 0, 1, -1)
            changes = int(np.sum(signs != np.roll(signs, 1)))
            if changes == 0:
                if np.all(diffs > 0):
                    n_min += 1
                elif np.all(diffs < 0):
                    n_max += 1
            elif changes >= 4:
                n_saddle += 1
    return n_min, n_max, n_saddle


def write_potential_csv(surface: PotentialSurface, path,
                        header_comments: Optional[dict] = None) -> None:
    with open(path, "w") as fh:
        for key, val in (header_comments or {}).items():
            fh.write(f"# {key}: {val}\n")
        fh.write("x,y,V\n")
        for i, x in enumerate(surface.xs):
            for j, y in enumerate(surface.ys):
                fh.write(f"{x:.17g},{y:.17g},{surface.values[i, j]:.17g}\n")


# ---------------------------------------------------------------------------
# orbit-shape helpers used by the time-constant behavior checks


def orbit_radii(traj: Trajectory, center=(0.0, 0.0)) -> Array:
    return np.linalg.norm(traj.states[:, :2] - np.asarray(center), axis=1)


def terminal_radius_stats(traj: Trajectory, tail_fraction: float = 0.25,
                          center=(0.0, 0.0)) -> tuple[float, float]:
    """(mean radius, relative variation (max-min)/mean) over the orbit tail."""
    r = orbit_radii(traj, center)
    tail = r[int(len(r) * (1.0 - tail_fraction)):]
    mean = float(tail.mean())
    return mean, float((tail.max() - tail.min()) / mean)


def revolution_radius_means(traj: Trajectory, center=(0.0, 0.0)) -> Array:
    """Mean orbit radius per full revolution around the center.

    Revolutions are delimited by accumulated 2 pi increments of the unwrapped
    polar angle; a partial trailing revolution is dropped.
    """
    xy = traj.states[:, :2] - np.asarray(center)
    angle = np.unwrap(np.arctan2(xy[:, 1], xy[:, 0]))
    swept = np.abs(angle - angle[0])
    r = np.linalg.norm(xy, axis=1)
    means = []
    k = 1
    start = 0
    for i in range(len(swept)):
        if swept[i] >= 2.0 * np.pi * k:
            means.append(r[start:i + 1].mean())
            start = i + 1
            k += 1
    return np.array(means)
