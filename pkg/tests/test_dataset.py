"""Sampling determinism, coverage, splits, and the CSV round trip."""

import numpy as np
import pytest

from rnnsynth.dataset import (Dataset, read_csv, sample_grid, sample_uniform,
                              split, write_csv)
from rnnsynth.systems import make_fixed_point, make_limit_cycle


def test_degenerate_box_single_sample():
    f = make_fixed_point(-1, -1, 1, 0)
    ds = sample_uniform(f, 1, seed=0, domain=[[0, 0], [0, 0]])
    assert np.all(ds.inputs[0] == 0.0)
    assert np.allclose(ds.targets[0], f.eval([0.0, 0.0]))


def test_uniform_range_statistics():
    f = make_limit_cycle(1.0)  # domain [-2, 2]^2
    ds = sample_uniform(f, 10_000, seed=3)
    assert np.all(ds.inputs >= -2.0) and np.all(ds.inputs <= 2.0)
    assert np.all(ds.inputs.min(axis=0) < -1.99)
    assert np.all(ds.inputs.max(axis=0) > 1.99)


def test_uniform_determinism():
    f = make_limit_cycle(1.0)
    a = sample_uniform(f, 500, seed=11)
    b = sample_uniform(f, 500, seed=11)
    assert np.array_equal(a.inputs, b.inputs)
    assert np.array_equal(a.targets, b.targets)
    c = sample_uniform(f, 500, seed=12)
    assert not np.array_equal(a.inputs, c.inputs)


def test_target_consistency():
    f = make_limit_cycle(1.0)
    ds = sample_uniform(f, 1000, seed=5)
    idx = np.random.default_rng(0).integers(0, len(ds), 100)
    assert np.array_equal(f.eval(ds.inputs[idx]), ds.targets[idx])


def test_grid_corners_and_counts():
    f = make_fixed_point()  # domain [-2, 2]^2
    g2 = sample_grid(f, 2)
    assert len(g2) == 4
    corners = {(-2.0, -2.0), (-2.0, 2.0), (2.0, -2.0), (2.0, 2.0)}
    assert {tuple(r) for r in g2.inputs} == corners

    g3 = sample_grid(make_fixed_point(domain=[[-1, 1], [-1, 1]]), 3)
    assert len(g3) == 9
    assert any(np.all(r == 0.0) for r in g3.inputs)

    g101 = sample_grid(make_limit_cycle(1.0), 101)
    assert len(g101) == 101 ** 2


def test_grid_budget():
    f = make_limit_cycle(1.0)
    with pytest.raises(ValueError):
        sample_grid(f, 10_001)  # 10001^2 > 1e8


def test_split_sizes_and_determinism():
    f = make_fixed_point()
    ds = sample_uniform(f, 10, seed=0)
    a, b = split(ds, 0.5, seed=1)
    assert len(a) == 5 and len(b) == 5
    a2, b2 = split(ds, 0.5, seed=1)
    assert np.array_equal(a.inputs, a2.inputs)
    with pytest.raises(ValueError):
        split(ds, 1.0, seed=0)
    with pytest.raises(ValueError):
        split(ds, 0.0, seed=0)


def test_split_is_a_partition():
    f = make_fixed_point()
    ds = sample_uniform(f, 1000, seed=2)
    a, b = split(ds, 0.3, seed=7)
    merged = np.vstack([a.inputs, b.inputs])
    key = np.lexsort(merged.T)
    orig_key = np.lexsort(ds.inputs.T)
    assert np.array_equal(merged[key], ds.inputs[orig_key])


def test_csv_round_trip(tmp_path):
    f = make_limit_cycle(1.0)
    ds = sample_uniform(f, 64, seed=9)
    path = tmp_path / "ds.csv"
    write_csv(ds, path, header_comments={"config_sha256": "deadbeef"})
    text = path.read_text()
    assert text.startswith("# config_sha256: deadbeef\n")
    assert text.splitlines()[1] == "q1,q2,F1,F2"
    back = read_csv(path)
    assert np.array_equal(back.inputs, ds.inputs)
    assert np.array_equal(back.targets, ds.targets)


def test_count_validation():
    with pytest.raises(ValueError):
        sample_uniform(make_fixed_point(), 0, seed=0)
