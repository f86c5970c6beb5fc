import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from backlund_junction.errors import RangeError
from backlund_junction.specfun import airy, airy_array, wronskian


@pytest.mark.parametrize('s', [-20.0, -9.5, -8.0, -5.3, -2.0, -0.7, 0.0, 0.4, 2.0, 3.1, 6.9, 8.0, 11.0, 25.0])
def test_matches_reference(s):
    ai, ai_prime, bi, bi_prime = special.airy(s)
    v = airy(s)
    assert v.ai == pytest.approx(ai, rel=1e-10, abs=1e-12)
    assert v.ai_prime == pytest.approx(ai_prime, rel=1e-10, abs=1e-12)
    assert v.bi == pytest.approx(bi, rel=1e-10, abs=1e-12)
    assert v.bi_prime == pytest.approx(bi_prime, rel=1e-10, abs=1e-12)


def test_array_form():
    s = np.linspace(-12, 12, 49)
    v = airy_array(s)
    ai, ai_prime, bi, bi_prime = special.airy(s)
    np.testing.assert_allclose(v.ai, ai, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(v.bi, bi, rtol=1e-9, atol=1e-12)
    assert v.ai.shape == s.shape


@given(st.floats(-12, 12))
def test_wronskian(s):
    assert wronskian(s) == pytest.approx(1 / math.pi, abs=1e-12)


def test_ai_decays_and_bi_grows():
    assert 0 < airy(10.0).ai < airy(5.0).ai
    assert airy(10.0).bi > airy(5.0).bi > 0


@pytest.mark.parametrize('s', [30.5, -31.0, math.inf, math.nan])
def test_outside_validity_range(s):
    with pytest.raises(RangeError):
        airy(s)
