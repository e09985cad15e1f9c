"""Laplace mechanism on identity queries over demand vectors.

Randomness comes from numpy's counter-based Philox generator keyed by the
64-bit seed.  Each raw 64-bit word is mapped to a uniform on the open
interval (-1/2, 1/2) and pushed through the Laplace inverse CDF, so a given
``(seed, stream_position)`` pair yields the same sample on every platform.
"""

from __future__ import annotations

import math

import numpy as np

from .core import DemandVector, DimensionError, PrivacyParams, Role

_TWO_53 = float(2**53)


def laplace_inverse_cdf(u, scale: float):
    """Map ``u`` in (-1/2, 1/2) to a Laplace(0, scale) variate."""
    u = np.asarray(u, dtype=float)
    return -scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))


class LaplaceNoise:
    """Seeded stream of Laplace(0, scale) samples.

    ``stream_position`` counts raw words consumed so far; two streams with the
    same seed and position produce bit-identical samples.
    """

    def __init__(self, scale: float, seed: int, stream_position: int = 0):
        if not (scale > 0 and math.isfinite(scale)):
            raise ValueError(f"Laplace scale must be positive, got {scale!r}")
        self.scale = float(scale)
        self.seed = int(seed)
        self._bitgen = np.random.Philox(key=self.seed)
        blocks, rest = divmod(int(stream_position), 4)
        self._bitgen.advance(blocks)
        if rest:
            self._bitgen.random_raw(rest)
        self.stream_position = int(stream_position)

    @classmethod
    def for_params(cls, params: PrivacyParams, seed: int | None = None) -> "LaplaceNoise":
        """Calibrated stream: identity-query sensitivity is alpha, so scale = alpha / epsilon."""
        return cls(params.alpha / params.epsilon, params.seed if seed is None else seed)

    def uniforms(self, size: int) -> np.ndarray:
        raw = np.asarray(self._bitgen.random_raw(size), dtype=np.uint64).reshape(-1)
        self.stream_position += int(size)
        top = (raw >> np.uint64(11)).astype(np.float64)
        return (top + 0.5) / _TWO_53 - 0.5

    def sample(self, size: int | None = None):
        if size is None:
            return float(laplace_inverse_cdf(self.uniforms(1), self.scale)[0])
        return laplace_inverse_cdf(self.uniforms(size), self.scale)


def laplace_sample(noise: LaplaceNoise) -> float:
    return noise.sample()


def obfuscate_demands(d: DemandVector, params: PrivacyParams, noise: LaplaceNoise) -> DemandVector:
    """Add i.i.d. Laplace(alpha/epsilon) noise to every demand; no clipping."""
    expected = params.alpha / params.epsilon
    if not math.isclose(noise.scale, expected, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError(f"noise scale {noise.scale} is not alpha/epsilon = {expected}")
    values = d.values + noise.sample(len(d))
    return DemandVector(values, Role.NOISY)


def adjacency_check(d, d_prime, alpha: float) -> bool:
    """True iff the vectors differ in at most one coordinate, by at most alpha."""
    a = np.asarray(getattr(d, "values", d), dtype=float).reshape(-1)
    b = np.asarray(getattr(d_prime, "values", d_prime), dtype=float).reshape(-1)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.size} != {b.size}")
    diff = np.abs(a - b)
    changed = np.flatnonzero(diff > 0)
    return changed.size == 0 or (changed.size == 1 and diff[changed[0]] <= alpha)
