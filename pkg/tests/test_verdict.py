import math
import numpy as np
from numpy.testing import assert_allclose

from ProxSeq.verdict import (Verdict, PASS, FAIL, INCONCLUSIVE, jsonable, tail_envelope,
                             window_envelope, tail_decay)


def test_combine_precedence():
    a, b, c = Verdict('a', PASS), Verdict('b', INCONCLUSIVE), Verdict('c', FAIL)
    assert Verdict.combine('x', [a, b]).status == INCONCLUSIVE
    assert Verdict.combine('x', [a, b, c]).status == FAIL
    v = Verdict.combine('x', [a])
    assert v.passed
    assert v.constants == {'a': PASS}


def test_verdict_json_carries_witnesses():
    v = Verdict('mg', PASS, constants={'sup': np.float64(3.)}, indices={'argmax': 2**60}, horizon=7)
    j = v.to_json()
    assert j['constants']['sup'] == 3.
    assert j['indices']['argmax'] == {'log2': 60.}
    assert j['horizon'] == 7


def test_jsonable_non_finite():
    assert jsonable([math.nan, math.inf, -math.inf]) == ['nan', 'inf', '-inf']
    assert jsonable(np.arange(3)) == [0, 1, 2]
    assert jsonable({1: np.bool_(True)}) == {'1': True}


def test_constant_stream_has_limit():
    keys = np.arange(1., 101.)
    env = tail_envelope('c', keys, np.full(100, 2.), np.arange(10., 100., 10.))
    assert env.sufficient
    assert env.stable
    assert env.has_limit()
    assert env.liminf == 2. and env.limsup == 2.
    assert env.cutoffs.size == 6


def test_linear_stream_diverges():
    keys = np.arange(100.)
    env = tail_envelope('lin', keys, keys, np.arange(10., 100., 10.), indices=list(range(100)))
    assert env.rising
    assert env.diverging == 'up'
    assert env.has_limit() is False
    assert env.witnesses['argmax'] == 99


def test_oscillating_stream_bounded_without_limit():
    keys = np.arange(200.)
    values = (np.arange(200) % 2).astype(float)
    env = tail_envelope('osc', keys, values, np.arange(20., 200., 20.))
    assert env.stable
    assert env.liminf == 0. and env.limsup == 1.
    assert not env.has_limit()


def test_too_few_cutoffs():
    env = tail_envelope('short', [0., 1., 2.], [1., 1., 1.], [0.5, 1.5])
    assert not env.sufficient
    assert env.has_limit() is None


def test_tail_decay():
    x = np.linspace(1., 100., 1000)
    ok, last, prev = tail_decay(x, 1/x)
    assert ok
    assert_allclose(last, 0.02, rtol=1e-2)
    ok, _, _ = tail_decay(x, np.sin(x))
    assert not ok


def test_window_envelope():
    x = np.linspace(1., 64., 4000)
    assert window_envelope('sin', x, np.sin(x)).windows_bounded()
    assert not window_envelope('lin', x, x).windows_bounded()
