import math
import numpy as np
import pytest
from numpy.testing import assert_allclose

from ProxSeq.errors import InputError
from ProxSeq.utils import (EULER_GAMMA, LOG2, exp_clamped, harmonic, harmonic_asymptotic,
                           harmonic_diff, harmonic_pow2, harmonic_diff_pow2, index_from_log, log_grid,
                           log_index, log_ratio, log_shift, prefix_sums)


def test_harmonic_small():
    assert harmonic(1) == 1.
    assert_allclose(harmonic(10), 2.9289682539682538, rtol=1e-15)


def test_harmonic_rejects_zero():
    with pytest.raises(InputError):
        harmonic(0)


def test_harmonic_paths_agree():
    p = 10**7
    assert_allclose(harmonic(p), harmonic_asymptotic(p), rtol=0, atol=1e-12)


def test_harmonic_huge_index():
    assert_allclose(harmonic(2**81), 81*LOG2 + EULER_GAMMA, rtol=1e-14)
    assert_allclose(harmonic_pow2(81), 56.7221, atol=1e-4)


@pytest.mark.parametrize('a, b', [(0, 10), (3, 10), (10**5, 10**6), (10**8, 10**9)])
def test_harmonic_diff(a, b):
    expected = harmonic(b) - (harmonic(a) if a else 0.)
    assert_allclose(harmonic_diff(a, b), expected, rtol=1e-12)


def test_harmonic_diff_pow2_matches_direct():
    assert_allclose(harmonic_diff_pow2(3, 10), harmonic(2**10) - harmonic(2**3), rtol=1e-13)
    assert_allclose(harmonic_diff_pow2(None, 4), harmonic(16), rtol=1e-13)


def test_log_helpers():
    assert log_index(0) == -math.inf
    assert_allclose(log_index(2**200), 200*LOG2, rtol=1e-15)
    assert_allclose(log_ratio(3, 2), math.log(1.5), rtol=1e-15)
    assert_allclose(log_shift(2**60, 1.), 60*LOG2, rtol=1e-15)
    with pytest.raises(InputError):
        log_index(-1)


def test_index_from_log():
    assert index_from_log(math.log(1000.5)) == 1000
    assert index_from_log(-1.) == 0
    big = index_from_log(1000*LOG2)
    assert_allclose(math.log2(big), 1000, rtol=1e-12)


def test_log_grid_spacing():
    g = log_grid(0., math.log(10.), 4)
    assert g.size == 5
    assert_allclose(np.diff(g), math.log(10.)/4)


def test_prefix_sums():
    assert_allclose(prefix_sums([1., 2., 3.]), [0., 1., 3., 6.])
    x = np.full(5000, 0.1)
    assert_allclose(prefix_sums(x, chunk=64)[-1], 500., rtol=1e-14)
    assert prefix_sums([]).tolist() == [0.]


def test_exp_clamped():
    assert exp_clamped(0.) == 1.
    assert_allclose(exp_clamped(700.), math.exp(700.))
    assert exp_clamped(710.) == math.inf
    assert exp_clamped(1e20) == math.inf
    assert exp_clamped(-1e20) == 0.
