import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dp_bilevel.core import (CostTarget, DemandVector, DimensionError, DistanceBudget,
                             NoiselessInput, PrivacyParams, Role, l2sq_distance, theorem2_ratio)


def test_l2sq_examples():
    assert l2sq_distance([1, 2], [1, 2]) == 0.0
    assert l2sq_distance([0.3], [0.49]) == pytest.approx(0.0361, abs=1e-15)
    assert l2sq_distance([1, 0], [0, 1]) == 2.0


def test_l2sq_length_mismatch():
    with pytest.raises(DimensionError):
        l2sq_distance([1, 2], [1])


finite = st.floats(-1e3, 1e3, allow_nan=False)
vec3 = st.lists(finite, min_size=3, max_size=3)


@given(vec3, vec3, vec3)
def test_l2sq_metric_properties(a, b, c):
    assert l2sq_distance(a, b) == l2sq_distance(b, a)
    assert l2sq_distance(a, a) == 0
    if max(abs(x - y) for x, y in zip(a, b)) > 1e-100:
        assert l2sq_distance(a, b) > 0
    ab, bc, ac = (math.sqrt(l2sq_distance(*p)) for p in ((a, b), (b, c), (a, c)))
    assert ac <= ab + bc + 1e-9 * (1 + ab + bc)


def test_theorem2_ratio_examples():
    assert theorem2_ratio([0.3], [0.3], [0.5]) == 1.0
    assert theorem2_ratio([0.5], [0.3], [0.5]) == 0.0
    assert theorem2_ratio([0.49], [0.3], [0.5]) == pytest.approx(0.05, rel=1e-12)


def test_theorem2_ratio_noiseless():
    with pytest.raises(NoiselessInput):
        theorem2_ratio([0.4], [0.5], [0.5])


def test_demand_vector_rejects_non_finite():
    with pytest.raises(ValueError):
        DemandVector([0.1, np.nan], Role.NOISY)
    d = DemandVector([0.1, 0.2], Role.NOISY)
    assert len(d) == 2
    assert d.with_role(Role.RELEASED).role is Role.RELEASED


@pytest.mark.parametrize("field", ["epsilon", "alpha", "beta", "eta"])
def test_privacy_params_positive(field):
    kwargs = dict(epsilon=1.0, alpha=0.1, beta=0.01)
    kwargs[field] = 0.0
    with pytest.raises(ValueError):
        PrivacyParams(**kwargs)


def test_privacy_params_beta_floor():
    PrivacyParams(1.0, 0.1, 0.02, beta_floor=0.01)
    with pytest.raises(ValueError):
        PrivacyParams(1.0, 0.1, 0.005, beta_floor=0.01)


def test_cost_target_and_budget():
    with pytest.raises(ValueError):
        CostTarget(math.inf)
    assert DistanceBudget(0.0, 0.064).width == pytest.approx(0.064)
    with pytest.raises(ValueError):
        DistanceBudget(0.1, 0.05)
