import math
import numpy as np
import pytest
from numpy.testing import assert_allclose

from ProxSeq.errors import InputError
from ProxSeq.seqcore import GevreySeq, TableSeq
from ProxSeq.assoc import (nu, assoc_eval, M_assoc, d_M, d_residual, assoc_grid, d_envelope,
                           check_d_residual, check_identities)


def test_nu_counts_ties():
    seq = GevreySeq(1.)
    assert nu(seq, math.log(3.)) == 3
    assert nu(seq, math.log(3.5)) == 3
    assert nu(seq, -1.) == 0


def test_assoc_gevrey():
    seq = GevreySeq(1.)
    logt = math.log(3.5)
    assert_allclose(M_assoc(seq, logt), 3*logt - math.log(6.), rtol=1e-13)
    e = assoc_eval(seq, -1.)
    assert e.nu == 0 and e.M == 0.


def test_d_M_large_t():
    seq = GevreySeq(1.)
    assert_allclose(d_M(seq, 50.), 1., atol=0.02)
    assert abs(d_residual(seq, 50.)) < 0.1


def test_d_M_rejects_small_t():
    with pytest.raises(InputError):
        d_M(GevreySeq(1.), 0.5)


def test_assoc_needs_monotone():
    with pytest.raises(InputError):
        nu(TableSeq([math.log(2.), 0.]), 1.)


def test_assoc_grid():
    table = assoc_grid(GevreySeq(2.), np.linspace(1., 20., 30))
    assert list(table.columns) == ['logt', 'nu', 'M', 'log_M', 'd', 'residual']
    assert len(table) == 30
    assert np.all(np.diff(table['nu'].to_numpy()) >= 0)


def test_d_envelope_gevrey():
    env = d_envelope(GevreySeq(2.))
    assert env.windows_bounded()
    assert_allclose(env.limsup, 0.5, atol=0.05)


def test_residual_decays():
    assert check_d_residual(GevreySeq(1.)).passed


def test_identities():
    v = check_identities(GevreySeq(1.), range(1, 64))
    assert v.passed
    assert v.constants['identity_error'] <= 1e-9
