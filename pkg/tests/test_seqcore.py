import math
import numpy as np
import pytest
from numpy.testing import assert_allclose

from ProxSeq.errors import InputError, OutOfReach
from ProxSeq.seqcore import (FamilySpec, parse_family, make_family, GevreySeq, MAlphaBetaSeq,
                             MQSeq, TableSeq, ExampleA, ExampleB)


@pytest.mark.parametrize('text, family, params', [
    ('gevrey:1', 'gevrey', {'alpha': 1.}),
    ('m_alpha_beta:1:2', 'm_alpha_beta', {'alpha': 1., 'beta': 2.}),
    ('m_q:2', 'm_q', {'q': 2.}),
    ('example_a', 'example_a', {}),
    ('table:0,0.69', 'table', {'log_quotients': [0., 0.69]}),
])
def test_parse_short_forms(text, family, params):
    spec = parse_family(text)
    assert spec.family == family
    assert spec.params == params


def test_spec_json_round_trip():
    spec = parse_family('{"family": "m_zero_beta", "beta": 1}')
    assert FamilySpec.from_json(spec.to_json()) == spec
    assert str(parse_family('gevrey:0.5')) == 'gevrey:0.5'


@pytest.mark.parametrize('text', ['gevrey:0', 'm_q:1', 'nope:1', 'gevrey', 'table:a,b',
                                  'constructed', '{"alpha": 1}'])
def test_parse_rejects(text):
    with pytest.raises(InputError):
        parse_family(text)


def test_gevrey_values():
    seq = GevreySeq(2.)
    assert_allclose(seq.log_quotient(4), 2*math.log(5.))
    assert_allclose(seq.log_value(5), 2*math.log(120.), rtol=1e-14)
    assert_allclose(seq.log_quotients(6), [seq.log_quotient(p) for p in range(6)], rtol=1e-15)
    assert_allclose(seq.log_values(5)[-1], seq.log_value(5), rtol=1e-14)
    pt = GevreySeq(1.).alpha_beta(1)
    assert_allclose(pt.beta, math.log(2.))


def test_gevrey_count_below():
    seq = GevreySeq(1.)
    assert seq.count_below(math.log(3.5)) == 3
    assert seq.count_below(-1.) == 0
    # m_j = j + 1 <= 10^6 for j < 10^6
    assert seq.count_below(math.log(1e6) + 1e-12) == 10**6


def test_huge_index_mean():
    seq = GevreySeq(1.)
    p = 2**200
    lp = 200*math.log(2.)
    assert_allclose(seq.mean_log_quotient(p), lp - 1, rtol=1e-12)
    with pytest.raises(InputError):
        seq.log_quotient(1.5)


def test_mq():
    seq = MQSeq(2.)
    assert_allclose(seq.log_value(3), 9*math.log(2.))
    assert seq.count_below(5*math.log(2.)) == 3
    assert_allclose(seq.log_values(3), np.arange(4)**2*math.log(2.))


def test_m_alpha_beta_negative_beta_is_lc():
    seq = MAlphaBetaSeq(1., -5.)
    q = seq.log_quotients(1000)
    assert np.all(np.diff(q) >= 0)
    assert seq.fix > 0
    # beyond the repair the closed form holds
    p = 10**6
    assert p > seq.fix
    assert_allclose(seq.log_quotient(p), math.log(p + 1) - 5*math.log(math.log(math.e + p + 1)))


def test_table():
    seq = TableSeq([0., math.log(2.), math.log(3.)])
    assert seq.horizon == 2
    assert_allclose(seq.log_value(3), math.log(6.))
    assert seq.count_below(math.log(2.5)) == 2
    with pytest.raises(OutOfReach):
        seq.log_quotient(3)
    with pytest.raises(OutOfReach):
        seq.count_below(5.)
    bad = TableSeq([math.log(2.), 0.])
    assert not bad.nondecreasing
    with pytest.raises(InputError):
        bad.count_below(0.1)


def test_schedule():
    seq = GevreySeq(1.)
    s = seq.sample_schedule(20)
    assert s[:16] == list(range(16))
    assert s == sorted(set(s))
    assert max(s).bit_length() <= 20
    with pytest.raises(InputError):
        seq.sample_schedule(8)
    t = TableSeq(np.zeros(40))
    assert max(t.sample_schedule()) <= 39


def test_example_a_small_indices():
    seq = ExampleA()
    q = np.exp(seq.log_quotients(16))
    assert_allclose(q[:8], [1, 1, 2, 2, 6, 6, 6, 6])
    assert_allclose(q[8:], 12.)
    assert_allclose(math.exp(seq.log_quotient(8) - seq.log_quotient(4)), 2.)
    assert_allclose(math.exp(seq.log_quotient(4) - seq.log_quotient(2)), 3.)


def test_example_a_block_formula():
    seq = ExampleA()
    k, j = 3, 5
    p = 2**(2**k + j)
    n = 2**k
    expected = n*math.log(2.) + math.log(3.) + (j - 1)/(n - 1)*(n*math.log(2.) - math.log(3.))
    assert_allclose(seq.log_quotient(p), expected)
    assert_allclose(seq.log_quotient(2*p - 1), expected)


def test_example_b_small_indices():
    seq = ExampleB()
    assert_allclose(np.exp(seq.log_quotients(5)), [1, 1, 2, 4, 4])
    assert ExampleB.tau(0) == 1.


def test_block_mean_matches_enumeration():
    seq = ExampleA()
    n = 5000
    q = seq.log_quotients(n)
    assert_allclose(seq.log_value(n), np.sum(q), rtol=1e-12)
    assert seq.count_below(math.log(6.)) == 8


def test_make_family():
    assert isinstance(make_family('gevrey:1'), GevreySeq)
    assert isinstance(make_family({'family': 'example_b'}), ExampleB)
    assert isinstance(make_family('m_zero_beta:1'), MAlphaBetaSeq)
    assert make_family('m_zero_beta:1').spec.family == 'm_zero_beta'


def test_module_level_operations():
    from ProxSeq.seqcore import log_m, log_M, alpha_beta, sample_schedule
    seq = make_family('gevrey:1')
    assert_allclose(log_m(seq, 9), math.log(10.))
    assert_allclose(log_M(seq, 4), math.log(24.), rtol=1e-14)
    pt = alpha_beta(seq, 4)
    assert_allclose(pt.beta, math.log(5.) - math.log(24.)/4, rtol=1e-13)
    assert sample_schedule(seq, 20) == seq.sample_schedule(20)
