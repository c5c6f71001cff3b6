"""Fixed-step RK4 integration of fields and synthesized networks.

A fixed step keeps the true system and the network sampled on identical time
grids, which the error metrics require. Non-finite states abort the run and
return the truncated trajectory with a divergence flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .synthesis import (ForcedRNN, SynthRNN, frnn_derivative,
                        frnn_initial_state, initial_state, rnn_derivative)
from .systems import ForcedSystem, VectorField

Array = np.ndarray


@dataclass
class Trajectory:
    times: Array                      # (K+1,) uniform grid k*h
    states: Array                     # (K+1, d)
    h: float
    meta: dict = field(default_factory=dict)
    diverged: bool = False
    last_valid: int = -1              # index of the last finite state

    def __post_init__(self):
        if self.last_valid < 0:
            self.last_valid = self.states.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def T(self) -> float:
        return float(self.times[-1])


def integrate_rk4(derivative: Callable[[Array], Array], x0, h: float, T: float,
                  meta: Optional[dict] = None) -> Trajectory:
    """Classical 4th-order Runge-Kutta with K = round(T/h) steps."""
    if h <= 0:
        raise ValueError("h must be positive")
    if T < h:
        raise ValueError("T must be >= h")
    x0 = np.asarray(x0, dtype=float)
    K = int(round(T / h))
    times = np.arange(K + 1) * h
    states = np.empty((K + 1, x0.shape[0]))
    states[0] = x0
    x = x0
    half = 0.5 * h
    sixth = h / 6.0
    for k in range(K):
        k1 = derivative(x)
        k2 = derivative(x + half * k1)
        k3 = derivative(x + half * k2)
        k4 = derivative(x + h * k3)
        x = x + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        if not np.all(np.isfinite(x)):
            return Trajectory(times[:k + 1], states[:k + 1], h,
                              dict(meta or {}), diverged=True, last_valid=k)
        states[k + 1] = x
    return Trajectory(times, states, h, dict(meta or {}))


def simulate_rnn(rnn: SynthRNN, q0, h: float, T: float,
                 meta: Optional[dict] = None) -> Trajectory:
    """Full (n+m)-state trajectory of a synthesized network from its initial rule."""
    s0 = initial_state(rnn, q0)
    return integrate_rk4(lambda s: rnn_derivative(rnn, s), s0, h, T, meta)


def simulate_frnn(frnn: ForcedRNN, q0, q_f0, h: float, T: float,
                  meta: Optional[dict] = None) -> Trajectory:
    s0 = frnn_initial_state(frnn, q0, q_f0)
    return integrate_rk4(lambda s: frnn_derivative(frnn, s), s0, h, T, meta)


def _project(traj: Trajectory, k: int, meta: dict) -> Trajectory:
    return Trajectory(traj.times, traj.states[:, :k], traj.h, meta,
                      traj.diverged, traj.last_valid)


def simulate_pair(system, rnn, q0, h: float, T: float):
    """Integrate the true system and its network from the same q0.

    For a VectorField/SynthRNN pair, returns (true trajectory, network output
    trajectory), the latter projected to the first n components. For a
    ForcedSystem/ForcedRNN pair, the truth is the driven base state and the
    network side follows from the merged initial state.
    """
    q0 = np.asarray(q0, dtype=float)
    if isinstance(system, VectorField):
        if not isinstance(rnn, SynthRNN):
            raise TypeError("a VectorField pairs with a SynthRNN")
        true = integrate_rk4(system.eval, q0, h, T,
                             {"source": "truth", "system": system.name,
                              "q0": q0.tolist()})
        full = simulate_rnn(rnn, q0, h, T,
                            {"source": "rnn", "system": system.name,
                             "q0": q0.tolist()})
        return true, _project(full, rnn.n, full.meta)
    if isinstance(system, ForcedSystem):
        if not isinstance(rnn, ForcedRNN):
            raise TypeError("a ForcedSystem pairs with a ForcedRNN")
        x0 = np.concatenate([q0, system.force_initial])
        aug = integrate_rk4(system.augmented_eval, x0, h, T,
                            {"source": "truth", "system": system.base.name,
                             "q0": q0.tolist()})
        true = _project(aug, system.n, aug.meta)
        full = simulate_frnn(rnn, q0, system.force_initial, h, T,
                             {"source": "rnn", "system": system.base.name,
                              "q0": q0.tolist()})
        return true, _project(full, rnn.n, full.meta)
    raise TypeError(f"cannot simulate {type(system).__name__}")


def simulate_composed(unforced: SynthRNN, forcing: SynthRNN, q0, q_f0,
                      h: float, T: float) -> Trajectory:
    """Two-network reference for the merged system.

    The forcing network evolves by its own dynamics; its first n outputs are
    fed as an external additive signal into the unforced network's output
    units. Both advance inside the same RK4 stages, so this discretization is
    identical to integrating the merged block system and the two must agree to
    floating-point accuracy. State layout here: (s, s_f) =
    (omega, eta, omega_f, eta_f).
    """
    n = unforced.n
    k = unforced.size

    def deriv(z):
        s, s_f = z[:k], z[k:]
        ds = rnn_derivative(unforced, s)
        ds[:n] += s_f[:n]
        return np.concatenate([ds, rnn_derivative(forcing, s_f)])

    z0 = np.concatenate([initial_state(unforced, q0),
                         initial_state(forcing, q_f0)])
    return integrate_rk4(deriv, z0, h, T, {"source": "composed"})


def composed_to_frnn_order(traj: Trajectory, n: int, m: int, p: int, q: int) -> Array:
    """Reorder composed states (omega, eta, omega_f, eta_f) to the merged
    layout (omega, omega_f, eta, eta_f)."""
    s = traj.states
    return np.hstack([s[:, :n], s[:, n + m:n + m + p],
                      s[:, n:n + m], s[:, n + m + p:]])


# ---------------------------------------------------------------------------
# trajectory files


def write_trajectory(traj: Trajectory, path,
                     header_comments: Optional[dict] = None) -> None:
    """CSV with header ``t,x1..xn``; comment lines carry provenance."""
    d = traj.dim
    cols = ["t"] + [f"x{i + 1}" for i in range(d)]
    rows = np.hstack([traj.times[:, None], traj.states])
    with open(path, "w") as fh:
        for key, val in (header_comments or {}).items():
            fh.write(f"# {key}: {val}\n")
        fh.write(",".join(cols) + "\n")
        np.savetxt(fh, rows, fmt="%.17g", delimiter=",")


def read_trajectory(path) -> Trajectory:
    with open(path) as fh:
        header = fh.readline()
        while header.startswith("#"):
            header = fh.readline()
        rows = np.loadtxt(fh, delimiter=",", ndmin=2)
    times, states = rows[:, 0], rows[:, 1:]
    h = float(times[1] - times[0]) if len(times) > 1 else 0.0
    return Trajectory(times, states, h, {"source_file": str(path)})
