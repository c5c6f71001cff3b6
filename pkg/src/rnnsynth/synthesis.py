"""Recasting a trained feedforward net as a continuous-time recurrent network.

The network is the leaky-integrator system

    ds/dt = -(1/tau) s + W sigma(s),      s = col[omega, eta],

with weight matrix W = [[0, A], [0, B A]] assembled from the feedforward
layers. Output units omega replicate the modelled system's state; hidden
units eta carry the recurrence. Started from s(0) = col[q0, B q0 + theta],
the hidden states satisfy eta(t) = B omega(t) + theta exp(-t/tau) exactly, so
for large tau the outputs follow d(omega)/dt ~= A sigma(B omega + theta),
i.e. the trained approximation of the vector field.

Driven systems merge an unforced network with a force-generating network into
a single block system whose coupling matrix adds the force outputs, bypassing
the activation, to the driven output units.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ffnet import FFNet, sigma
from .systems import domain_corners

Array = np.ndarray


@dataclass(frozen=True)
class SynthRNN:
    """Continuous-time recurrent net with block weight structure.

    W is (n+m) x (n+m): first n columns identically zero, top-right block A,
    bottom-right block B A. B and theta are retained for the initial-state
    rule and hidden-state analysis. Immutable after assembly.
    """

    n: int
    m: int
    W: Array
    tau: float
    B: Array
    theta: Array
    activation: str

    @property
    def size(self) -> int:
        return self.n + self.m

    @property
    def A(self) -> Array:
        return self.W[: self.n, self.n:]

    @property
    def hidden_block(self) -> Array:
        """The recurrent block C = B A."""
        return self.W[self.n:, self.n:]


def synthesize(net: FFNet, tau: float) -> SynthRNN:
    """Assemble W = [[0, A], [0, B A]] and carry A, B, theta over unchanged."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    for name, arr in (("A", net.A), ("B", net.B), ("theta", net.theta)):
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"non-finite entries in {name}")
    n, m = net.n, net.m
    W = np.zeros((n + m, n + m))
    W[:n, n:] = net.A
    W[n:, n:] = net.B @ net.A
    W.flags.writeable = False
    B = net.B.copy()
    B.flags.writeable = False
    theta = net.theta.copy()
    theta.flags.writeable = False
    return SynthRNN(n, m, W, float(tau), B, theta, net.activation)


def initial_state(rnn: SynthRNN, q0) -> Array:
    """col[q0, B q0 + theta]; hidden part sits on the affine approximator."""
    q0 = np.asarray(q0, dtype=float)
    if q0.shape != (rnn.n,):
        raise ValueError(f"q0 must have shape ({rnn.n},), got {q0.shape}")
    return np.concatenate([q0, q0 @ rnn.B.T + rnn.theta])


def rnn_derivative(rnn: SynthRNN, s) -> Array:
    """-(1/tau) s + W sigma(s)."""
    s = np.asarray(s, dtype=float)
    return rnn.W @ sigma(s, rnn.activation) - s / rnn.tau


@dataclass(frozen=True)
class TauReport:
    """Evaluation of the three sufficient conditions on the time constant.

    Left-hand sides: max ||q||/tau over the domain corners, 1/tau, and
    ||theta||/tau. Bounds: eps*L_F/(4(e^{L_F T}-1)), L_G/2, and
    eps*L_G/(4(e^{L_G T}-1)). Flags are plain comparisons of the stored
    numbers.
    """

    norm_q_over_tau: float
    inv_tau: float
    norm_theta_over_tau: float
    bound_q: float
    bound_inv: float
    bound_theta: float
    pass_q: bool
    pass_inv: bool
    pass_theta: bool
    epsilon: float
    T: float
    l_f: float
    l_g: float

    @property
    def all_pass(self) -> bool:
        return self.pass_q and self.pass_inv and self.pass_theta

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "norm_q_over_tau", "inv_tau", "norm_theta_over_tau",
            "bound_q", "bound_inv", "bound_theta",
            "pass_q", "pass_inv", "pass_theta", "epsilon", "T", "l_f", "l_g")}


def check_tau(rnn: SynthRNN, epsilon: float, T: float, l_f: float, l_g: float,
              domain) -> TauReport:
    """Evaluate the time-constant conditions; ||q|| is maximized at box corners."""
    if min(epsilon, T, l_f, l_g) <= 0:
        raise ValueError("epsilon, T, l_f, l_g must all be positive")
    corners = domain_corners(domain)
    q_max = float(np.max(np.linalg.norm(corners, axis=1)))
    with np.errstate(over="ignore"):
        # e^{LT}-1 may overflow to inf; the bound then underflows to 0, which
        # correctly marks the condition unsatisfiable at that horizon.
        bound_q = epsilon * l_f / (4.0 * np.expm1(l_f * T))
        bound_theta = epsilon * l_g / (4.0 * np.expm1(l_g * T))
    bound_inv = l_g / 2.0
    lhs_q = q_max / rnn.tau
    lhs_inv = 1.0 / rnn.tau
    lhs_theta = float(np.linalg.norm(rnn.theta)) / rnn.tau
    return TauReport(
        lhs_q, lhs_inv, lhs_theta,
        float(bound_q), float(bound_inv), float(bound_theta),
        bool(lhs_q < bound_q), bool(lhs_inv < bound_inv),
        bool(lhs_theta < bound_theta),
        float(epsilon), float(T), float(l_f), float(l_g),
    )


@dataclass(frozen=True)
class ForcedRNN:
    """Merged driven network over the stacked state (omega, omega_f, eta, eta_f).

    W_sigma holds A, A_f, C = B A and C_f = B_f A_f in the eta / eta_f column
    blocks; K_sigma is zero except for the n x p block [I_n | 0] that adds the
    first n force outputs to the driven output units.
    """

    n: int
    p: int
    m: int
    q: int
    W_sigma: Array
    K_sigma: Array
    tau: float
    B: Array
    theta: Array
    B_f: Array
    theta_f: Array
    activation: str

    @property
    def size(self) -> int:
        return self.n + self.p + self.m + self.q


def merge_frnn(unforced: SynthRNN, forcing: SynthRNN) -> ForcedRNN:
    """Compose an unforced network (n, m) with a forcing network (p, q)."""
    if forcing.n < unforced.n:
        raise ValueError(
            f"forcing output dim p={forcing.n} must be >= n={unforced.n}")
    if unforced.tau != forcing.tau:
        raise ValueError("tau mismatch between unforced and forcing networks")
    if unforced.activation != forcing.activation:
        raise ValueError("activation mismatch")
    n, m = unforced.n, unforced.m
    p, q = forcing.n, forcing.m
    size = n + p + m + q
    o_eta = n + p
    o_eta_f = n + p + m

    W = np.zeros((size, size))
    W[:n, o_eta:o_eta + m] = unforced.A
    W[n:n + p, o_eta_f:] = forcing.A
    W[o_eta:o_eta + m, o_eta:o_eta + m] = unforced.hidden_block
    W[o_eta_f:, o_eta_f:] = forcing.hidden_block

    K = np.zeros((size, size))
    K[:n, n:n + n] = np.eye(n)   # [I_n | 0]: only the force components feed in

    W.flags.writeable = False
    K.flags.writeable = False
    return ForcedRNN(n, p, m, q, W, K, unforced.tau,
                     unforced.B, unforced.theta, forcing.B, forcing.theta,
                     unforced.activation)


def frnn_initial_state(frnn: ForcedRNN, q0, q_f0) -> Array:
    q0 = np.asarray(q0, dtype=float)
    q_f0 = np.asarray(q_f0, dtype=float)
    if q0.shape != (frnn.n,) or q_f0.shape != (frnn.p,):
        raise ValueError("initial conditions must have shapes (n,) and (p,)")
    return np.concatenate([
        q0,
        q_f0,
        q0 @ frnn.B.T + frnn.theta,
        q_f0 @ frnn.B_f.T + frnn.theta_f,
    ])


def frnn_derivative(frnn: ForcedRNN, s) -> Array:
    """-(1/tau) s + W_sigma sigma(s) + K_sigma s."""
    s = np.asarray(s, dtype=float)
    return frnn.W_sigma @ sigma(s, frnn.activation) + frnn.K_sigma @ s - s / frnn.tau


# ---------------------------------------------------------------------------
# persistence: same schema as the model file plus tau / kind / block extras


def save_rnn(rnn, path, provenance: Optional[dict] = None) -> None:
    if isinstance(rnn, SynthRNN):
        doc = {
            "kind": "rnn",
            "n": rnn.n,
            "m": rnn.m,
            "activation": rnn.activation,
            "tau": rnn.tau,
            "A": rnn.A.reshape(-1).tolist(),
            "B": rnn.B.reshape(-1).tolist(),
            "theta": rnn.theta.tolist(),
            "provenance": provenance or {},
        }
    elif isinstance(rnn, ForcedRNN):
        A = rnn.W_sigma[: rnn.n, rnn.n + rnn.p: rnn.n + rnn.p + rnn.m]
        A_f = rnn.W_sigma[rnn.n: rnn.n + rnn.p, rnn.n + rnn.p + rnn.m:]
        doc = {
            "kind": "frnn",
            "n": rnn.n,
            "p": rnn.p,
            "m": rnn.m,
            "q": rnn.q,
            "activation": rnn.activation,
            "tau": rnn.tau,
            "A": A.reshape(-1).tolist(),
            "B": rnn.B.reshape(-1).tolist(),
            "theta": rnn.theta.tolist(),
            "A_f": A_f.reshape(-1).tolist(),
            "B_f": rnn.B_f.reshape(-1).tolist(),
            "theta_f": rnn.theta_f.tolist(),
            "provenance": provenance or {},
        }
    else:
        raise TypeError(f"cannot persist {type(rnn).__name__}")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def load_rnn(path):
    """Rebuild a SynthRNN or ForcedRNN from its JSON file."""
    with open(path) as fh:
        doc = json.load(fh)
    kind = doc.get("kind", "rnn")
    if kind == "rnn":
        net = FFNet(doc["n"], doc["m"], np.array(doc["A"]), np.array(doc["B"]),
                    np.array(doc["theta"]), doc["activation"])
        return synthesize(net, doc["tau"]), doc.get("provenance", {})
    if kind == "frnn":
        n, p, m, q = doc["n"], doc["p"], doc["m"], doc["q"]
        base = FFNet(n, m, np.array(doc["A"]), np.array(doc["B"]),
                     np.array(doc["theta"]), doc["activation"])
        force = FFNet(p, q, np.array(doc["A_f"]), np.array(doc["B_f"]),
                      np.array(doc["theta_f"]), doc["activation"])
        tau = doc["tau"]
        return merge_frnn(synthesize(base, tau), synthesize(force, tau)), \
            doc.get("provenance", {})
    raise ValueError(f"unknown network kind '{kind}'")
