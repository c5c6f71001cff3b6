"""Catalog fields: printed values, Jacobian agreement, blend geometry."""

import numpy as np
import pytest

from rnnsynth.integrate import integrate_rk4
from rnnsynth.systems import (ForcedSystem, domain_corners, make_duffing,
                              make_duffing_unforced, make_field,
                              make_fixed_point, make_harmonic_force,
                              make_limit_cycle, make_lorenz,
                              make_multi_fixed_point, make_rossler,
                              make_van_der_pol)

ALL_FIELDS = [
    make_fixed_point(),
    make_fixed_point(-2.0, -0.5, 0.0, 0.0),
    make_multi_fixed_point([(1, 0), (-1, 0)]),
    make_multi_fixed_point([(1, 1), (1, -1), (-1, 1), (-1, -1)]),
    make_limit_cycle(1.0),
    make_van_der_pol(),
    make_duffing_unforced(),
    make_harmonic_force(0.625)[0],
    make_rossler(),
    make_lorenz(),
]


def test_fixed_point_values():
    f = make_fixed_point(-1, -1, 1, 0)
    assert np.allclose(f.eval([1, 0]), [0, 0])
    assert np.allclose(f.eval([2, 0]), [-1, 0])
    g = make_fixed_point(-2.0, -0.5, 0.0, 0.0)
    assert np.allclose(g.eval([1, 1]), [-2, -0.5])


def test_fixed_point_rejects_non_attractor():
    with pytest.raises(ValueError):
        make_fixed_point(0.0, -1.0)
    with pytest.raises(ValueError):
        make_fixed_point(-1.0, 0.5)


def test_limit_cycle_values():
    f = make_limit_cycle(1.0)
    assert np.allclose(f.eval([1, 0]), [0, 1])
    assert np.allclose(f.eval([0, 0]), [0, 0])
    assert np.allclose(make_limit_cycle(2.0).eval([1, 0]), [3, 1])
    with pytest.raises(ValueError):
        make_limit_cycle(0.0)


def test_van_der_pol_values():
    f = make_van_der_pol(1.0, 1.0)
    assert np.allclose(f.eval([0, 1]), [1, 1])
    assert np.allclose(f.eval([2, 1]), [1, -5])
    harmonic = make_van_der_pol(0.0, 1.0)
    assert np.allclose(harmonic.eval([1, 0]), [0, -1])


def test_chaotic_field_values():
    assert np.allclose(make_rossler(0.1, 0.1, 9.0).eval([0, 0, 0]), [0, 0, 0.1])
    lor = make_lorenz(10.0, 28.0, 8.0 / 3.0)
    assert np.allclose(lor.eval([0, 0, 0]), [0, 0, 0])
    # direct substitution: (sigma(y-x), x(rho-z)-y, xy-beta z) at (1,1,1)
    assert np.allclose(lor.eval([1, 1, 1]), [0.0, 26.0, 1.0 - 8.0 / 3.0])


def test_multi_fixed_point_embeds_points_exactly():
    f = make_multi_fixed_point([(1, 0), (-1, 0)])
    assert np.all(f.eval([1.0, 0.0]) == 0.0)
    assert np.all(f.eval([-1.0, 0.0]) == 0.0)
    four = make_multi_fixed_point([(1, 1), (1, -1), (-1, 1), (-1, -1)])
    for p in [(1, 1), (1, -1), (-1, 1), (-1, -1)]:
        assert np.all(four.eval(np.array(p, dtype=float)) == 0.0)


def test_multi_fixed_point_separatrix_on_mirror_axis():
    f = make_multi_fixed_point([(1, 0), (-1, 0)])
    ys = np.linspace(-3, 3, 61)
    pts = np.stack([np.zeros_like(ys), ys], axis=-1)
    assert np.max(np.abs(f.eval(pts)[:, 0])) == 0.0


def test_multi_fixed_point_validation():
    with pytest.raises(ValueError):
        make_multi_fixed_point([(1, 0)])
    with pytest.raises(ValueError):
        make_multi_fixed_point([(1, 0), (1, 0)])
    with pytest.raises(ValueError):
        make_multi_fixed_point([(1, 0), (99, 0)])
    with pytest.raises(ValueError):
        make_multi_fixed_point([(1, 0), (-1, 0)], blend_sharpness=0.0)


@pytest.mark.parametrize("fld", ALL_FIELDS, ids=lambda f: f.name)
def test_jacobians_match_finite_differences(fld):
    if not fld.has_jacobian:
        pytest.skip("no analytic jacobian")
    rng = np.random.default_rng(42)
    lo, hi = fld.domain[:, 0], fld.domain[:, 1]
    span = hi - lo
    # interior points, away from the box edge by 10% of the span
    pts = lo + 0.1 * span + 0.8 * span * rng.random((100, fld.dim))
    for q in pts:
        J = fld.jacobian(q)
        J_fd = fld.fd_jacobian(q)
        denom = max(np.linalg.norm(J), 1e-12)
        assert np.linalg.norm(J - J_fd) / denom <= 1e-5


def test_eval_finite_on_domain_grid():
    for fld in ALL_FIELDS:
        corners = domain_corners(fld.domain)
        assert np.all(np.isfinite(fld.eval(corners)))


def test_van_der_pol_mu_zero_conserves_energy():
    omega = 1.0
    f = make_van_der_pol(0.0, omega)
    traj = integrate_rk4(f.eval, np.array([1.0, 0.0]), 1e-3, 40.0)
    energy = omega ** 2 * traj.states[:, 0] ** 2 + traj.states[:, 1] ** 2
    drift = np.abs(energy - energy[0]).max() / energy[0]
    assert drift < 1e-6


@pytest.mark.parametrize("fld,q0", [
    (make_lorenz(), np.array([1.0, 1.0, 1.0])),
    (make_rossler(), np.array([0.0, -5.0, 0.1])),
], ids=["lorenz", "rossler"])
def test_chaotic_trajectories_stay_bounded(fld, q0):
    traj = integrate_rk4(fld.eval, q0, 5e-4, 80.0)
    assert not traj.diverged
    mid = 0.5 * (fld.domain[:, 0] + fld.domain[:, 1])
    half = 0.5 * (fld.domain[:, 1] - fld.domain[:, 0])
    # 3x the nominal box, centered like the domain
    inside = np.abs(traj.states - mid) <= 3.0 * half
    assert np.all(inside)


def test_duffing_forced_system_assembly():
    sys = make_duffing(0.1, 0.5, 0.05, 0.625)
    assert isinstance(sys, ForcedSystem)
    assert sys.p >= sys.n
    # harmonic generator: state (z, f, g) at (0, f0, 0) has derivative (0, 0, -f0)
    assert np.allclose(sys.force_dynamics.eval(np.array([0.0, 0.625, 0.0])),
                       [0.0, 0.0, -0.625])


def test_force_generator_reproduces_cosine():
    sys = make_duffing(f0=0.625)
    traj = integrate_rk4(sys.force_dynamics.eval, sys.force_initial, 1e-3, 20.0)
    force = traj.states[:, :sys.n]
    expected = np.stack([np.zeros_like(traj.times),
                         0.625 * np.cos(traj.times)], axis=-1)
    assert np.abs(force - expected).max() < 1e-8


def test_zero_amplitude_force_matches_unforced():
    sys = make_duffing(f0=0.0)
    q0 = np.array([1.0, 0.5])
    aug = integrate_rk4(sys.augmented_eval,
                        np.concatenate([q0, sys.force_initial]), 1e-3, 10.0)
    solo = integrate_rk4(sys.base.eval, q0, 1e-3, 10.0)
    assert np.abs(aug.states[:, :2] - solo.states).max() < 1e-12


def test_registry_names_and_unknown():
    for name in ["fixed_point", "limit_cycle", "van_der_pol", "duffing",
                 "rossler", "lorenz"]:
        assert make_field(name).dim in (2, 3)
    fld = make_field("multi_fixed_point", points=[(1, 0), (-1, 0)])
    assert fld.name == "multi_fixed_point"
    with pytest.raises(ValueError):
        make_field("not_a_system")


def test_domain_validation():
    with pytest.raises(ValueError):
        make_fixed_point(domain=[[2, -2], [-2, 2]])
