import numpy as np
import pytest
from scipy import stats

from commands.thp.channel import draw_channels
from commands.thp.errors import DomainError
from commands.thp.stats import ks_critical_value, ks_statistic


def test_shapes_and_invariants(rng):
    channels = draw_channels(rng, 4, 3)
    assert channels.H.shape == (3, 4)
    assert np.all(channels.rho > 0)
    assert np.allclose(np.linalg.norm(channels.hbar, axis=1), 1.0, atol=1e-12)
    assert np.allclose(channels.reconstruct(), channels.H, atol=1e-12)


def test_deterministic():
    first = draw_channels(np.random.default_rng(5), 4, 4)
    second = draw_channels(np.random.default_rng(5), 4, 4)
    assert np.array_equal(first.H, second.H)


def test_norm_mean(rng):
    rho2 = np.concatenate([draw_channels(rng, 4, 4).rho ** 2 for _ in range(25000)])
    assert rho2.mean() == pytest.approx(4.0, abs=0.05)


def test_norm_is_chi_square(rng):
    rho2 = np.concatenate([draw_channels(rng, 4, 4).rho ** 2 for _ in range(5000)])
    statistic = ks_statistic(2.0 * rho2, stats.chi2(8).cdf)
    assert statistic < ks_critical_value(rho2.size)


def test_direction_independent_of_norm(rng):
    draws = [draw_channels(rng, 4, 1) for _ in range(100000)]
    rho2 = np.array([d.rho[0] ** 2 for d in draws])
    first = np.array([abs(d.hbar[0, 0]) ** 2 for d in draws])
    assert abs(np.corrcoef(rho2, first)[0, 1]) < 0.02


def test_permuted_keeps_users(rng):
    channels = draw_channels(rng, 4, 3)
    permuted = channels.permuted([2, 0, 1])
    assert np.array_equal(permuted.H[0], channels.H[2])
    assert np.array_equal(permuted.rho, channels.rho[[2, 0, 1]])


@pytest.mark.parametrize("n_T, K", [(2, 3), (4, 0)])
def test_bad_sizes(rng, n_T, K):
    with pytest.raises(DomainError):
        draw_channels(rng, n_T, K)
