import math
import pytest
from numpy.testing import assert_allclose

from ProxSeq.errors import InputError
from ProxSeq.verdict import PASS, FAIL
from ProxSeq.seqcore import GevreySeq, ExampleA
from ProxSeq.regvar import (REGULARLY_VARYING, ratio_limit, regvar_index_test, bs_decompose,
                            characterization_crosscheck)


def test_ratio_limit_gevrey():
    env = ratio_limit(GevreySeq(2.), 3)
    assert env.has_limit()
    assert_allclose(math.exp(env.limsup), 9., rtol=1e-3)
    with pytest.raises(InputError):
        ratio_limit(GevreySeq(1.), 0.)


def test_gevrey_is_regularly_varying():
    report = regvar_index_test(GevreySeq(1.))
    assert report.passed
    assert report.agree
    assert_allclose(report.omega, 1., atol=1e-2)
    assert report.de_haan.passed


def test_example_a_fails_b_and_d():
    report = regvar_index_test(ExampleA())
    assert report.b.status == FAIL
    assert report.d.status == FAIL
    assert report.agree


def test_bs_decomposition_gevrey():
    bs = bs_decompose(GevreySeq(1.), 1.)
    assert bs.verdict.status == PASS
    assert bs.reconstruction_error < 1e-9
    assert bs.C > 0


def test_bs_needs_finite_index():
    with pytest.raises(InputError):
        bs_decompose(GevreySeq(1.), math.inf)


def test_crosscheck():
    report, verdict = characterization_crosscheck(GevreySeq(1.))
    assert verdict.passed
    assert report.classification == REGULARLY_VARYING
    report, verdict = characterization_crosscheck(ExampleA())
    assert report.classification != REGULARLY_VARYING
