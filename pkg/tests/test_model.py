import math

import hypothesis.strategies as st
import pytest
from hypothesis import given

from threshold_aoi.errors import OutOfRange
from threshold_aoi.model import WalkParams, step_distribution, validate_params


def test_symmetric_no_hold():
    params = validate_params(0.5, 0.5, 2)
    assert params == WalkParams(0.5, 0.5, 2)
    assert params.hold == 0.0
    assert params.periodic


def test_lazy_walk_hold():
    params = validate_params(0.3, 0.3, 4)
    assert params.hold == pytest.approx(0.4, abs=1e-15)
    assert not params.periodic


@pytest.mark.parametrize("p, q, T", [
    (0.0, 0.5, 2), (0.5, 0.0, 2), (1.0, 0.5, 2), (0.6, 0.5, 2),
    (0.3, 0.3, 0), (0.3, 0.3, 129), (math.nan, 0.3, 2), (0.3, 0.3, 2.5),
])
def test_out_of_range(p, q, T):
    with pytest.raises(OutOfRange):
        validate_params(p, q, T)


def test_hold_snapped_to_zero():
    # 0.1 + 0.9 rounds to exactly 1, 0.7 + 0.3 leaves a 1-ulp residue
    assert validate_params(0.7, 0.3, 3).hold == 0.0
    assert validate_params(0.1, 0.9, 3).hold == 0.0


@pytest.mark.parametrize("p, q, expected", [
    (0.5, 0.5, (0.5, 0.5, 0.0)),
    (0.3, 0.3, (0.3, 0.3, 0.4)),
    (0.6, 0.2, (0.6, 0.2, 0.2)),
])
def test_step_distribution(p, q, expected):
    d = step_distribution(validate_params(p, q, 3))
    assert (d.up, d.down, d.hold) == pytest.approx(expected, abs=1e-15)


valid = st.tuples(
    st.floats(min_value=1e-6, max_value=1 - 1e-6),
    st.floats(min_value=1e-6, max_value=1 - 1e-6),
    st.integers(min_value=1, max_value=128),
).filter(lambda t: t[0] + t[1] <= 1.0)


@given(valid)
def test_step_law_sums_to_one(t):
    d = step_distribution(validate_params(*t))
    assert abs(d.up + d.down + d.hold - 1.0) <= math.ulp(1.0)
    assert all(0.0 <= x <= 1.0 for x in (d.up, d.down, d.hold))


@given(valid)
def test_validate_idempotent(t):
    once = validate_params(*t)
    assert validate_params(once.p, once.q, once.T) == once
