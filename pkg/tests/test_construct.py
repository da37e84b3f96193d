import math
import numpy as np
import pytest
from numpy.testing import assert_allclose

from ProxSeq.errors import InputError
from ProxSeq.verdict import PASS, FAIL
from ProxSeq.seqcore import GevreySeq, ExampleB, make_family
from ProxSeq.proxord import make_order
from ProxSeq.construct import (AxisV, mv_value, young_conjugate, build_mv_sequence,
                               build_l_sequence, mv_checks, u_sandwich, vm_sandwich,
                               biconjugate_check, admissibility_closure_check, ConstructedSeq)


def test_axis_splice_for_constant_order():
    V = AxisV(make_order('const:2'))
    assert V.a0 == 2.
    assert_allclose(V.log_V(3.), 6.)
    assert_allclose(V.log_U(6.), 3., rtol=1e-12)
    assert V.to_json()['min_convexity'] >= 0


def test_zero_order_rejected():
    with pytest.raises(InputError):
        AxisV(make_order('const:0'))


def test_mv_value_constant_order():
    V = AxisV(make_order('const:2'))
    # V(s) = s^2: V A = 2 s^2 = p
    r = mv_value(V, 2)
    assert_allclose(r.logs, 0., atol=1e-12)
    assert_allclose(r.log_M, -1., rtol=1e-12)
    assert_allclose(mv_value(V, 4).log_M, math.log(4.) - 2., rtol=1e-12)
    r = mv_value(V, 0)
    assert r.log_M == 0. and r.method == 'limit'
    with pytest.raises(InputError):
        mv_value(V, -1)


def test_young_conjugate():
    V = AxisV(make_order('const:2'))
    assert_allclose(young_conjugate(V, 2.), -1., rtol=1e-12)
    assert young_conjugate(V, -1.) == math.inf
    assert young_conjugate(V, 0.) == 0.


@pytest.mark.parametrize('rho', [0.5, 1., 2.])
def test_closed_form(rho):
    V = AxisV(make_order({'order': 'const', 'rho': rho}))
    seq = build_mv_sequence(V, 128)
    p = np.arange(1, 129)
    assert_allclose(seq.prefix[1:], (p/rho)*(np.log(p/rho) - 1), rtol=1e-8, atol=1e-8)
    assert all(v.passed for v in mv_checks(V, seq))
    assert u_sandwich(V, seq).passed


def test_build_needs_enough_terms():
    V = AxisV(make_order('const:1'))
    with pytest.raises(InputError):
        build_mv_sequence(V, 8)
    with pytest.raises(InputError):
        build_l_sequence(V.order, 8)


def test_l_sequence():
    L = build_l_sequence(make_order('const:1'), 32)
    # U(p) = p for V(t) = t
    assert_allclose(np.exp(L.values[1:]), np.arange(1, 32), rtol=1e-10)
    assert L.kind == 'l'


def test_constructed_family():
    seq = make_family({'family': 'constructed', 'order': 'const:1', 'pmax': 32})
    assert isinstance(seq, ConstructedSeq)
    assert seq.horizon == 31
    assert list(seq.table().columns) == ['p', 'log_M', 'logs']


def test_vm_sandwich():
    V = AxisV(make_order('const:1'))
    assert vm_sandwich(V, build_mv_sequence(V, 512)).passed


def test_biconjugate():
    v = biconjugate_check(AxisV(make_order('const:2')))
    assert v.passed
    assert v.constants['max_error'] <= 1e-6


def test_closure_gevrey():
    report = admissibility_closure_check(GevreySeq(1.), 'const:1')
    assert [v.name for v in report.stages] == ['admits', 'equivalent_mv', 'l_regvar']
    assert report.stages[1].passed
    assert not report.short_circuit


def test_closure_short_circuits():
    report = admissibility_closure_check(ExampleB(), 'const:1')
    assert report.short_circuit
    assert report.verdict.status == FAIL
    assert report.stages[0].status == FAIL


def test_closure_zero_order():
    report = admissibility_closure_check(GevreySeq(1.), 'const:0')
    assert report.stages[0].name == 'admits'
    assert report.verdict.status != PASS
