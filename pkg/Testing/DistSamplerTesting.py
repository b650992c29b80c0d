import numpy as np
import pytest

from QInterference import DistSampler


def test_simplex_grid():
    assert len(DistSampler.simplex_grid(2, 0.5)) == 3
    assert len(DistSampler.simplex_grid(3, 0.5)) == 6
    assert len(DistSampler.simplex_grid(3, 0.1)) == 66
    for p in DistSampler.simplex_grid(3, 0.25):
        assert np.isclose(p.sum(), 1.0)
        assert np.all(p >= 0)
    with pytest.raises(ValueError):
        DistSampler.simplex_grid(2, 0.3)


def test_grid_sampler():
    sampler = DistSampler.GridSampler(0.5)
    samples = sampler.samples((2, 2))
    assert len(samples) == 9
    assert all(len(s) == 2 for s in samples)
    assert sampler.describe() == {"mode": "grid", "step": 0.5}
    with pytest.raises(ValueError):
        DistSampler.GridSampler(0.0)


def test_random_sampler_is_deterministic():
    a = DistSampler.RandomSampler(5, seed=3).samples((2, 3))
    b = DistSampler.RandomSampler(5, seed=3).samples((2, 3))
    assert len(a) == 5
    for (p1, p2), (q1, q2) in zip(a, b):
        assert np.array_equal(p1, q1) and np.array_equal(p2, q2)
        assert p2.size == 3 and np.isclose(p2.sum(), 1.0)
    with pytest.raises(ValueError):
        DistSampler.RandomSampler(0)


def test_explicit_sampler_checks_alphabets():
    sampler = DistSampler.ExplicitSampler([([0.5, 0.5], [1.0, 0.0])])
    assert len(sampler.samples((2, 2))) == 1
    with pytest.raises(ValueError):
        sampler.samples((3, 2))


def test_base_sampler_is_abstract():
    with pytest.raises(NotImplementedError):
        DistSampler.DistSampler().samples((2, 2))


def test_uniform():
    assert np.allclose(DistSampler.uniform(4), 0.25)
