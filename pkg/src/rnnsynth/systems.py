"""Catalog of analytic planar and 3-D vector fields with attractor dynamics.

Every system is exposed as a :class:`VectorField`: an autonomous C1 map
q -> dq/dt together with a compact axis-aligned sampling box and, where the
algebra is tractable, an analytic Jacobian. Driven systems pair an unforced
field with an autonomous force-generating field in a :class:`ForcedSystem`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

Array = np.ndarray


def _box(bounds) -> Array:
    box = np.asarray(bounds, dtype=float)
    if box.ndim != 2 or box.shape[1] != 2:
        raise ValueError(f"domain must have shape (dim, 2), got {box.shape}")
    return box


@dataclass(frozen=True)
class VectorField:
    """An autonomous vector field dq/dt = F(q) over a compact box domain.

    ``fn`` accepts a single state of shape (dim,) or a batch (N, dim) and
    returns the same shape. ``jac_fn``, when present, maps one state to the
    dim x dim Jacobian. Instances are immutable and safe to evaluate
    concurrently.
    """

    name: str
    dim: int
    params: dict
    domain: Array  # (dim, 2) rows of [lo, hi]
    fn: Callable[[Array], Array]
    jac_fn: Optional[Callable[[Array], Array]] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        box = _box(self.domain)
        if box.shape[0] != self.dim:
            raise ValueError("domain rows must match dim")
        if not np.all(box[:, 0] < box[:, 1]):
            raise ValueError("every domain axis needs lo < hi")
        object.__setattr__(self, "domain", box)
        box.flags.writeable = False

    def eval(self, q) -> Array:
        q = np.asarray(q, dtype=float)
        if q.shape[-1] != self.dim:
            raise ValueError(f"state has dim {q.shape[-1]}, field expects {self.dim}")
        return self.fn(q)

    @property
    def has_jacobian(self) -> bool:
        return self.jac_fn is not None

    def jacobian(self, q) -> Array:
        if self.jac_fn is None:
            raise ValueError(f"field '{self.name}' has no analytic jacobian")
        q = np.asarray(q, dtype=float)
        return np.asarray(self.jac_fn(q), dtype=float)

    def fd_jacobian(self, q, rel_step: float = 1e-6) -> Array:
        """Central-difference Jacobian, step scaled per axis by the box span."""
        q = np.asarray(q, dtype=float)
        spans = self.domain[:, 1] - self.domain[:, 0]
        cols = []
        for j in range(self.dim):
            h = rel_step * spans[j]
            e = np.zeros(self.dim)
            e[j] = h
            cols.append((self.eval(q + e) - self.eval(q - e)) / (2.0 * h))
        return np.stack(cols, axis=1)


@dataclass(frozen=True)
class ForcedSystem:
    """An unforced field plus an autonomous force generator.

    The force state q_f has dimension p >= n; its first n components are the
    force vector, added to the first n derivatives of the base system.
    """

    base: VectorField
    force_dynamics: VectorField
    force_initial: Array

    def __post_init__(self):
        q_f0 = np.asarray(self.force_initial, dtype=float)
        object.__setattr__(self, "force_initial", q_f0)
        if self.force_dynamics.dim < self.base.dim:
            raise ValueError(
                f"force dimension p={self.force_dynamics.dim} must be >= "
                f"base dimension n={self.base.dim}"
            )
        if q_f0.shape != (self.force_dynamics.dim,):
            raise ValueError("force_initial must have shape (p,)")

    @property
    def n(self) -> int:
        return self.base.dim

    @property
    def p(self) -> int:
        return self.force_dynamics.dim

    def augmented_eval(self, x) -> Array:
        """Derivative of the stacked state col[q, q_f]."""
        x = np.asarray(x, dtype=float)
        n = self.n
        q, q_f = x[:n], x[n:]
        dq = self.base.eval(q) + q_f[:n]
        return np.concatenate([dq, self.force_dynamics.eval(q_f)])


# ---------------------------------------------------------------------------
# catalog


def make_fixed_point(a: float = -1.0, b: float = -1.0, p1: float = 1.0,
                     p2: float = 0.0, domain=None) -> VectorField:
    """Linear planar field with a single attracting fixed point at (p1, p2)."""
    if a >= 0 or b >= 0:
        raise ValueError(f"need a < 0 and b < 0 for an attractor, got a={a}, b={b}")
    dom = _box(domain if domain is not None else [[-2, 2], [-2, 2]])

    def fn(q):
        return np.stack([a * (q[..., 0] - p1), b * (q[..., 1] - p2)], axis=-1)

    def jac(q):
        return np.array([[a, 0.0], [0.0, b]])

    return VectorField("fixed_point", 2, dict(a=a, b=b, p1=p1, p2=p2), dom, fn, jac)


def make_multi_fixed_point(points, a: float = -1.0, b: float = -1.0,
                           blend_sharpness: float = 2.0, domain=None) -> VectorField:
    """Smooth C-infinity combination of single-fixed-point fields.

    Each point p_i contributes the linear field F_i(q) = (a(x-x_i), b(y-y_i)).
    They are mixed with weights

        w_i(q) propto exp(-k (d_i^2 - min_j d_j^2)) * prod_{j != i} d_j^2,

    d_j = |q - p_j|, k = blend_sharpness. The cross-distance product forces
    w_j(p_i) = 0 for j != i, so every listed point is an exact equilibrium and
    the local Jacobian there is exactly diag(a, b); the Gaussian factor keeps a
    softmax-like sharpness knob. Mirror-symmetric layouts give a field that is
    odd in x across the mirror line.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be a list of 2-D coordinates")
    if pts.shape[0] < 2:
        raise ValueError("need at least 2 fixed points")
    if a >= 0 or b >= 0:
        raise ValueError("need a < 0 and b < 0 for attractors")
    if blend_sharpness <= 0:
        raise ValueError("blend_sharpness must be positive")
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if np.array_equal(pts[i], pts[j]):
                raise ValueError(f"duplicate fixed point {pts[i]}")
    dom = _box(domain if domain is not None else [[-3, 3], [-3, 3]])
    inside = (pts >= dom[:, 0]) & (pts <= dom[:, 1])
    if not inside.all():
        raise ValueError("all fixed points must lie inside the domain")
    k = float(blend_sharpness)
    ab = np.array([a, b])

    def weights(q):
        # q: (..., 2) -> w: (..., npts)
        diff = q[..., None, :] - pts          # (..., npts, 2)
        d2 = np.sum(diff * diff, axis=-1)     # (..., npts)
        expo = np.exp(-k * (d2 - d2.min(axis=-1, keepdims=True)))
        # prod over j != i of d2_j, computed without division (d2 may be 0)
        npts = pts.shape[0]
        cross = np.empty_like(d2)
        for i in range(npts):
            idx = [j for j in range(npts) if j != i]
            cross[..., i] = np.prod(d2[..., idx], axis=-1)
        raw = expo * cross
        return raw / raw.sum(axis=-1, keepdims=True), diff

    def fn(q):
        w, diff = weights(q)
        f_each = ab * diff                    # (..., npts, 2)
        return np.sum(w[..., None] * f_each, axis=-2)

    def jac(q):
        q = np.asarray(q, dtype=float)
        diff = q[None, :] - pts               # (npts, 2)
        d2 = np.sum(diff * diff, axis=-1)
        w, _ = weights(q)
        f_each = ab * diff
        # grad of log(raw_i) = -2k diff_i + sum_{j != i} 2 diff_j / d2_j;
        # undefined at q == p_j, where w_j = 0 anyway: fall back to finite
        # differences near the singular points.
        if np.any(d2 < 1e-14):
            return _fd_jac_generic(fn, q, 1e-7)
        glog = -2.0 * k * diff + 2.0 * (np.sum(diff / d2[:, None], axis=0) - diff / d2[:, None])
        gbar = np.sum(w[:, None] * glog, axis=0)
        grad_w = w[:, None] * (glog - gbar)   # (npts, 2)
        out = np.einsum("ia,ib->ab", f_each, grad_w)
        out += w.sum() * np.diag(ab)
        return out

    return VectorField(
        "multi_fixed_point", 2,
        dict(points=pts.tolist(), a=a, b=b, blend_sharpness=k), dom, fn, jac,
    )


def _fd_jac_generic(fn, q, h):
    n = q.shape[0]
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        cols.append((fn(q + e) - fn(q - e)) / (2 * h))
    return np.stack(cols, axis=1)


def make_limit_cycle(radius: float = 1.0, domain=None) -> VectorField:
    """Planar field with a globally attracting circular limit cycle at the origin."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    r2 = radius * radius
    dom = _box(domain if domain is not None else
               [[-2 * radius, 2 * radius], [-2 * radius, 2 * radius]])

    def fn(q):
        x, y = q[..., 0], q[..., 1]
        s = r2 - x * x - y * y
        return np.stack([-y + x * s, x + y * s], axis=-1)

    def jac(q):
        x, y = q[0], q[1]
        return np.array([
            [r2 - 3 * x * x - y * y, -1.0 - 2 * x * y],
            [1.0 - 2 * x * y, r2 - x * x - 3 * y * y],
        ])

    return VectorField("limit_cycle", 2, dict(radius=radius), dom, fn, jac)


def make_van_der_pol(mu: float = 1.0, omega: float = 1.0, domain=None) -> VectorField:
    """Van der Pol oscillator in first-order form (x, v)."""
    dom = _box(domain if domain is not None else [[-4, 4], [-4, 4]])
    w2 = omega * omega

    def fn(q):
        x, v = q[..., 0], q[..., 1]
        return np.stack([v, -mu * (x * x - 1.0) * v - w2 * x], axis=-1)

    def jac(q):
        x, v = q[0], q[1]
        return np.array([[0.0, 1.0], [-2 * mu * x * v - w2, -mu * (x * x - 1.0)]])

    return VectorField("van_der_pol", 2, dict(mu=mu, omega=omega), dom, fn, jac)


def make_duffing_unforced(zeta: float = 0.1, omega: float = 0.5,
                          alpha: float = 0.05, domain=None) -> VectorField:
    """Damped hardening oscillator (x, v) without the drive term."""
    dom = _box(domain if domain is not None else [[-6, 6], [-6, 6]])
    w2 = omega * omega

    def fn(q):
        x, v = q[..., 0], q[..., 1]
        return np.stack([v, -2 * zeta * omega * v - w2 * (x + alpha * x ** 3)], axis=-1)

    def jac(q):
        x = q[0]
        return np.array([
            [0.0, 1.0],
            [-w2 * (1.0 + 3.0 * alpha * x * x), -2 * zeta * omega],
        ])

    return VectorField("duffing_unforced", 2,
                       dict(zeta=zeta, omega=omega, alpha=alpha), dom, fn, jac)


def make_harmonic_force(f0: float = 0.625, domain=None) -> tuple[VectorField, Array]:
    """Autonomous generator of the force vector (0, f0 cos t).

    The drive acts on the velocity equation only, so the force vector needs a
    zero first component; the generator state is (z, f, g) with z' = 0,
    f'' = -f, giving p = 3 outputs whose first two components are the force.
    Returns the field and the initial state (0, f0, 0).
    """
    w = max(2.0 * abs(f0), 0.5)
    dom = _box(domain if domain is not None else [[-0.5, 0.5], [-w, w], [-w, w]])

    def fn(q):
        z = np.zeros_like(q[..., 0])
        return np.stack([z, q[..., 2], -q[..., 1]], axis=-1)

    def jac(q):
        return np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]])

    fld = VectorField("harmonic_force", 3, dict(f0=f0), dom, fn, jac)
    return fld, np.array([0.0, f0, 0.0])


def make_duffing(zeta: float = 0.1, omega: float = 0.5, alpha: float = 0.05,
                 f0: float = 0.625) -> ForcedSystem:
    """Sinusoidally driven Duffing oscillator assembled as a ForcedSystem."""
    force, q_f0 = make_harmonic_force(f0)
    return ForcedSystem(make_duffing_unforced(zeta, omega, alpha), force, q_f0)


def make_rossler(a: float = 0.1, b: float = 0.1, c: float = 9.0,
                 domain=None) -> VectorField:
    """Rossler system, chaotic at the default parameters."""
    dom = _box(domain if domain is not None else [[-20, 20], [-20, 20], [0, 40]])

    def fn(q):
        x, y, z = q[..., 0], q[..., 1], q[..., 2]
        return np.stack([-y - z, x + a * y, b + z * (x - c)], axis=-1)

    def jac(q):
        x, z = q[0], q[2]
        return np.array([
            [0.0, -1.0, -1.0],
            [1.0, a, 0.0],
            [z, 0.0, x - c],
        ])

    return VectorField("rossler", 3, dict(a=a, b=b, c=c), dom, fn, jac)


def make_lorenz(sigma: float = 10.0, rho: float = 28.0, beta: float = 8.0 / 3.0,
                domain=None) -> VectorField:
    """Lorenz convection model, chaotic at the default parameters."""
    dom = _box(domain if domain is not None else [[-25, 25], [-25, 25], [0, 50]])

    def fn(q):
        x, y, z = q[..., 0], q[..., 1], q[..., 2]
        return np.stack([sigma * (y - x), x * (rho - z) - y, x * y - beta * z], axis=-1)

    def jac(q):
        x, y, z = q[0], q[1], q[2]
        return np.array([
            [-sigma, sigma, 0.0],
            [rho - z, -1.0, -x],
            [y, x, -beta],
        ])

    return VectorField("lorenz", 3, dict(sigma=sigma, rho=rho, beta=beta), dom, fn, jac)


# ---------------------------------------------------------------------------
# registry: string names + key=value params, used by the CLI and configs

FIELD_FACTORIES: dict[str, Callable[..., VectorField]] = {
    "fixed_point": make_fixed_point,
    "multi_fixed_point": make_multi_fixed_point,
    "limit_cycle": make_limit_cycle,
    "van_der_pol": make_van_der_pol,
    "duffing": make_duffing_unforced,  # unforced part; the drive is a separate net
    "rossler": make_rossler,
    "lorenz": make_lorenz,
    "harmonic_force": lambda **kw: make_harmonic_force(**kw)[0],
}


def make_field(name: str, **params) -> VectorField:
    """Instantiate a catalog field by registry name."""
    try:
        factory = FIELD_FACTORIES[name]
    except KeyError:
        known = ", ".join(sorted(FIELD_FACTORIES))
        raise ValueError(f"unknown system '{name}' (known: {known})") from None
    return factory(**params)


def domain_corners(domain) -> Array:
    """All 2^dim corner points of a box, rows of shape (dim,)."""
    box = _box(domain)
    return np.array(list(itertools.product(*[(lo, hi) for lo, hi in box])))
