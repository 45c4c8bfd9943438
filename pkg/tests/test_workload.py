import numpy as np
import pytest
from scipy import stats

from ccnsim.workload import Database, WorkloadConfig, ZipfSampler, next_interarrival, zipf_pmf


def test_interarrival_positive_and_reproducible():
    a = [next_interarrival(np.random.default_rng(5)) for _ in range(3)]
    g1, g2 = np.random.default_rng(11), np.random.default_rng(11)
    s1 = [next_interarrival(g1) for _ in range(100)]
    s2 = [next_interarrival(g2) for _ in range(100)]
    assert s1 == s2
    assert all(x > 0 for x in s1 + a)


def test_interarrival_mean():
    g = np.random.default_rng(2)
    xs = np.array([next_interarrival(g, 10.0) for _ in range(100_000)])
    assert abs(xs.mean() - 10.0) <= 0.2


def test_zipf_uniform_limit():
    assert np.allclose(zipf_pmf(1000, 0.0), 1 / 1000)


def test_zipf_ratio_theta_one():
    p = zipf_pmf(1000, 1.0)
    assert p[0] / p[1] == pytest.approx(2.0)


def test_zipf_chi_square():
    z = ZipfSampler(1000, 0.8)
    draws = z.sample_many(np.random.default_rng(3), 1_000_000)
    counts = np.bincount(draws, minlength=1001)[1:]
    _, p = stats.chisquare(counts, z.pmf * len(draws))
    assert p > 0.01


def test_zipf_scalar_and_vector_sampling_agree():
    z = ZipfSampler(50, 0.8)
    a = [z.sample(np.random.default_rng(8)) for _ in range(1)]
    b = z.sample_many(np.random.default_rng(8), 1).tolist()
    assert a == b
    g = np.random.default_rng(4)
    xs = [z.sample(g) for _ in range(5000)]
    assert min(xs) >= 1 and max(xs) <= 50
    counts = np.bincount(xs)
    assert counts[1] == counts.max()


def test_item_sizes_fixed_and_bounded():
    db = Database(WorkloadConfig(), np.random.default_rng(0))
    sizes = [db.item_size(i) for i in range(1, 1001)]
    assert min(sizes) >= 1 and max(sizes) <= 10
    assert db.item_size(17) == db.item_size(17)
    assert db.total_size == sum(sizes)
    db4 = Database(WorkloadConfig(s_min=4, s_max=4), np.random.default_rng(0))
    assert {db4.item_size(i) for i in range(1, 1001)} == {4}
    assert 1 in db and 1000 in db and 0 not in db and 1001 not in db


def test_workload_config_validation():
    with pytest.raises(ValueError):
        WorkloadConfig(n_items=0)
    with pytest.raises(ValueError):
        WorkloadConfig(mean_interarrival=0)
    with pytest.raises(ValueError):
        WorkloadConfig(s_min=5, s_max=4)
