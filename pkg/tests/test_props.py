import math
import numpy as np
import pytest
from numpy.testing import assert_allclose
from petsc4py import PETSc

from ProxSeq.errors import InputError
from ProxSeq.verdict import PASS, FAIL, INCONCLUSIVE
from ProxSeq.seqcore import GevreySeq, MAlphaBetaSeq, MQSeq, TableSeq, ExampleA
from ProxSeq.props import (check_lc, check_mg, check_snq, strong_regularity, check_equiv_quotients,
                           almost_increasing_defect, estimate_omega, estimate_gamma_index)


def test_lc_violation_witness():
    v = check_lc(TableSeq([math.log(2.), 0.]))
    assert v.status == FAIL
    assert v.indices['violation'] == 1


def test_lc_gevrey():
    v = check_lc(GevreySeq(1.))
    assert v.passed
    assert_allclose(v.constants['max_jump'], 2.)


def test_mg_gevrey_ratio_tends_to_two():
    v = check_mg(GevreySeq(1.))
    assert v.passed
    assert v.constants['sup_ratio'] <= 2.
    assert_allclose(v.constants['limsup'], 2., rtol=1e-3)


def test_mg_fails_for_mq():
    assert check_mg(MQSeq(2.)).status == FAIL
    assert check_mg(MQSeq(2.), criterion='beta').status == FAIL


def test_mg_unknown_criterion():
    with pytest.raises(InputError):
        check_mg(GevreySeq(1.), criterion='nope')


def test_gevrey_doubling_ratio_stays_below_two():
    seq = GevreySeq(1.)
    for p in (10**6, 2**40, 2**52, 2**63):
        assert math.exp(seq.log_quotient_ratio(p, 2)) <= 2.


@pytest.fixture
def strict_contraction():
    OptDB = PETSc.Options()
    OptDB.setValue('props_mg_contract', 0.5)
    yield
    OptDB.delValue('props_mg_contract')


def short_linear_table():
    # m_p = p + 1 for p < 64, m_{2p}/m_p still rising at p = 16
    return TableSeq(np.log(np.arange(1., 65.)))


def test_mg_rising_tail_is_extrapolated():
    v = check_mg(short_linear_table())
    assert v.passed
    assert v.constants['extrapolated']
    assert 2. <= v.constants['sup_ratio'] <= 2.1


def test_mg_slow_rising_tail_is_inconclusive(strict_contraction):
    v = check_mg(short_linear_table())
    assert v.status == INCONCLUSIVE
    d1, d2 = v.constants['increments']
    assert 0.5*d1 < d2 < 0.75*d1


def test_snq():
    v = check_snq(GevreySeq(1.))
    assert v.passed
    assert v.constants['k'] == 2
    assert check_snq(MAlphaBetaSeq(0., 1., family='m_zero_beta')).status == FAIL


def test_strong_regularity():
    assert strong_regularity(GevreySeq(0.5)).passed
    assert strong_regularity(MQSeq(2.)).status == FAIL


@pytest.mark.parametrize('seq, expected', [
    (MQSeq(2.), (PASS, FAIL, PASS)),
    (MAlphaBetaSeq(0., 1., family='m_zero_beta'), (PASS, PASS, FAIL)),
])
def test_property_fail_matrix(seq, expected):
    got = (check_lc(seq), check_mg(seq), check_snq(seq))
    assert tuple(v.status for v in got) == expected


def test_snq_liminf_beyond_double_range():
    v = check_snq(MQSeq(2.))
    assert v.passed
    assert math.isinf(v.constants['liminf'])


def test_equivalence():
    v = check_equiv_quotients(ExampleA(), GevreySeq(1.))
    assert v.passed
    assert 0.25 <= v.constants['c_over_p'] and v.constants['d_over_p'] <= 3.
    assert check_equiv_quotients(GevreySeq(1.), GevreySeq(2.)).status == FAIL


def test_omega_gevrey():
    env = estimate_omega(GevreySeq(2.))
    assert env.sufficient
    assert_allclose(env.liminf, 2., atol=0.05)


def test_defect():
    assert_allclose(almost_increasing_defect(GevreySeq(1.), 0.5), 1.)
    assert almost_increasing_defect(GevreySeq(1.), 2.) == math.inf
    with pytest.raises(InputError):
        almost_increasing_defect(GevreySeq(1.), 0.)


def test_gamma_index_gevrey():
    (lo, hi), status = estimate_gamma_index(GevreySeq(1.))
    assert status == PASS
    assert lo <= 1. <= hi


def test_gamma_index_needs_lc():
    with pytest.raises(InputError, match='lc failed'):
        estimate_gamma_index(TableSeq([math.log(2.), 0.]))


@pytest.mark.parametrize('seq, failing', [
    (MQSeq(2.), 'mg'),
    (MAlphaBetaSeq(0., 1., family='m_zero_beta'), 'snq'),
])
def test_gamma_index_needs_strong_regularity(seq, failing):
    with pytest.raises(InputError, match=f'{failing} failed'):
        estimate_gamma_index(seq)
