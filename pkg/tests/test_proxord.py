import math
import numpy as np
import pytest
from numpy.testing import assert_allclose

from ProxSeq.errors import InputError
from ProxSeq.verdict import PASS, FAIL
from ProxSeq.seqcore import GevreySeq, ExampleB
from ProxSeq.proxord import (make_order, parse_order, validate_order, V_of, U_of, conjugate_order,
                             orders_equivalent, dM_order, admits)


def test_parse_order():
    o = parse_order('const:0.5')
    assert o.rho_inf == 0.5
    assert o.to_json() == {'order': 'const', 'rho': 0.5}
    o = parse_order('{"order": "rho_alpha_beta", "alpha": 2, "beta": 1}')
    assert_allclose(o.rho_inf, 0.5)
    assert o.threshold == 1.


@pytest.mark.parametrize('text', ['const', 'nope:1', 'rho_alpha_beta:0:1', 'const:-1',
                                  'power_decay:1:0', 'const:a', '{"rho": 1}'])
def test_parse_order_rejects(text):
    with pytest.raises(InputError):
        parse_order(text)


def test_expr_order():
    o = make_order({'order': 'expr', 'expr': '1 + 1/x', 'rho_inf': 1., 'threshold': 1.})
    assert_allclose(V_of(o, 2.), 3.)
    assert_allclose(o.A(2.), 1.)
    with pytest.raises(InputError):
        make_order({'order': 'expr', 'expr': 'x + y', 'rho_inf': 1.})


@pytest.mark.parametrize('text', ['const:1', 'rho_alpha_beta:1:1', 'power_decay:1:1',
                                  'log_decay:1:1'])
def test_builtin_orders_validate(text):
    v = validate_order(parse_order(text))
    assert v.passed
    assert v.kind == 'nonzero'


def test_sin_counterexample_fails_D():
    v = validate_order(parse_order('sin_counterexample:1'))
    assert v.verdicts['B'].passed
    assert v.verdicts['C'].passed
    assert v.verdicts['D'].status == FAIL


def test_validation_grid_too_short():
    with pytest.raises(InputError):
        validate_order(parse_order('const:1'), np.linspace(0., 1., 10))


def test_U_inverts_V():
    o = parse_order('const:2')
    assert_allclose(U_of(o, math.log(4.)), math.log(2.), rtol=1e-12)
    with pytest.raises(InputError):
        U_of(parse_order('const:0'), 1.)


@pytest.mark.parametrize('text', ['const:1', 'const:2', 'const:0.5', 'power_decay:1:1',
                                  'rho_alpha_beta:1:1', 'log_decay:1:1'])
@pytest.mark.parametrize('x', [2., 10., 50.])
def test_U_of_V_is_identity(text, x):
    o = parse_order(text)
    assert o.tail_start() > o.threshold
    assert_allclose(U_of(o, V_of(o, x)), x, rtol=1e-9)


def test_U_needs_increasing_tail():
    o = parse_order('sin_counterexample:1')
    with pytest.raises(InputError):
        U_of(o, V_of(o, 10.))


def test_conjugate_order():
    c = conjugate_order('const:2')
    assert_allclose(c.rho_inf, 0.5)
    y, rho, res = c.samples(np.linspace(1., 50., 20))
    assert_allclose(rho, 0.5, rtol=1e-12)
    assert_allclose(res, 0., atol=1e-9)
    with pytest.raises(InputError):
        conjugate_order('const:0')


def test_orders_equivalent():
    assert orders_equivalent('const:1', 'power_decay:1:1').status == PASS
    # (rho_1 - rho_2) log r = 1 for all r
    assert orders_equivalent('const:1', 'log_decay:1:1').status == FAIL


def test_dM_order_gevrey():
    o = dM_order(GevreySeq(1.))
    assert_allclose(o.rho_inf, 1., atol=1e-2)


def test_admits():
    r = admits(GevreySeq(1.), 'const:1')
    assert r.passed
    assert r.A <= r.B
    assert admits(ExampleB(), 'const:1').verdict.status == FAIL
