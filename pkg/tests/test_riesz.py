import math
import numpy as np
import pytest
from numpy.testing import assert_allclose

from ProxSeq.errors import InputError
from ProxSeq.utils import harmonic
from ProxSeq.riesz import (DeltaSeq, riesz_mean, riesz_mean_pow2, riesz_subsequences,
                           within_block_envelope, moricz_expression, moricz_comparison, RieszSeq)


def direct_sum(delta, p):
    return math.fsum(delta.delta(k)/k for k in range(1, p + 1))


def test_small_riesz_means():
    delta = DeltaSeq.counterexample(4)
    assert_allclose(riesz_mean(delta, 2), 3/math.log(2.), rtol=1e-14)
    assert_allclose(riesz_mean(delta, 2), 4.3281, atol=1e-4)
    for p in (3, 4, 8, 100, 1000):
        assert_allclose(riesz_mean(delta, p), direct_sum(delta, p)/math.log(p), rtol=1e-12)
    assert_allclose(riesz_mean_pow2(delta, 3), riesz_mean(delta, 8), rtol=1e-13)
    with pytest.raises(InputError):
        riesz_mean(delta, 1)


def test_constant_delta():
    delta = DeltaSeq.constant(2.)
    assert_allclose(riesz_mean(delta, 10), 2*harmonic(10)/math.log(10.), rtol=1e-14)


def test_delta_blocks_must_be_consecutive():
    from ProxSeq.riesz import DeltaBlock
    with pytest.raises(InputError):
        DeltaSeq([DeltaBlock(None, 2, 1.), DeltaBlock(3, None, 1.)])
    with pytest.raises(InputError):
        DeltaSeq([DeltaBlock(1, None, 1.)])


@pytest.mark.parametrize('nmax, tol', [(10, 5e-5), (13, 1e-6)])
def test_subsequence_limits(nmax, tol):
    report = riesz_subsequences(nmax=nmax)
    assert_allclose(report.limit_k, 2.5, atol=tol)
    assert_allclose(report.limit_q, 2.75, atol=tol)
    assert report.recurrence_gap <= 1e-9
    assert report.no_limit().passed
    assert list(report.table().columns) == ['n', 'log2_k', 't_k', 't_q', 't_k_rec', 't_q_rec']
    with pytest.raises(InputError):
        riesz_subsequences(nmax=0)


def test_within_blocks():
    env = within_block_envelope(nmax=6)
    assert_allclose(env.liminf, 2.5, atol=1e-2)
    assert max(env.tail_sup) > 2.7


def test_moricz_expression():
    one = lambda k: np.ones_like(k)
    assert moricz_expression(one, 1.5, 1000) == 0.
    with pytest.raises(InputError):
        moricz_expression(one, 1., 1000)
    with pytest.raises(InputError):
        moricz_expression(one, 1.5, 2)


def test_moricz_comparison():
    verdict, table = moricz_comparison()
    assert verdict.passed
    assert len(table) == 3


def test_riesz_sequence():
    seq = RieszSeq()
    delta = seq.delta_seq
    assert_allclose(seq.log_quotient(8), direct_sum(delta, 8), rtol=1e-13)
    q = seq.log_quotients(200)
    assert_allclose(q[8], seq.log_quotient(8), rtol=1e-13)
    assert_allclose(seq.mean_log_quotient(150), np.sum(q[:150])/150, rtol=1e-10)


def test_moricz_log_normalizer_does_not_settle():
    verdict, table = moricz_comparison(s=lambda k: np.log(k))
    assert verdict.status == 'fail'
