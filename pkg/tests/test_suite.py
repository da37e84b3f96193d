import pytest
from types import SimpleNamespace

import ProxSeq.suite
from ProxSeq.errors import InputError
from ProxSeq.verdict import PASS, FAIL, Verdict
from ProxSeq.suite import CRITERIA, Criterion, select, suite_passed, matrix


def test_registry():
    assert [c.id for c in select('')] == list(range(1, 12))
    assert len(CRITERIA) == 11


def test_select():
    assert [c.id for c in select('riesz')] == [4, 10]
    assert [c.id for c in select('3')] == [3]
    assert [c.name for c in select('closed')] == ['construction_closed_form']
    assert select('no such criterion') == []


def test_criterion_catches_package_errors():
    def broken():
        raise InputError('bad input')
    v = Criterion(99, 'broken', (), broken).run()
    assert v.status == FAIL
    assert v.indices['criterion'] == 99


@pytest.mark.parametrize('error', [OverflowError('math range error'),
                                   ZeroDivisionError('float division by zero'),
                                   ValueError('f(a) and f(b) must have different signs')])
def test_criterion_catches_numerical_errors(error):
    def broken():
        raise error
    v = Criterion(98, 'numeric', (), broken).run()
    assert v.status == FAIL
    assert v.message.startswith(error.__class__.__name__)


def test_property_fail_matrix_criterion():
    (c,) = [c for c in CRITERIA if c.name == 'property_fail_matrix']
    v = c.run()
    assert v.passed, v.message


def test_suite_passed():
    assert suite_passed([Verdict('a', PASS)])
    assert not suite_passed([Verdict('a', PASS), Verdict('b', FAIL)])
    assert not suite_passed([])


def test_riesz_criterion():
    (c,) = [c for c in CRITERIA if c.name == 'moricz_normalizer']
    assert c.run().passed


def test_matrix_prints_through_petsc(monkeypatch):
    lines = []
    printer = SimpleNamespace(Sys=SimpleNamespace(Print=lambda text, comm=None: lines.append(text)))
    monkeypatch.setattr(ProxSeq.suite, 'PETSc', printer)
    v = Verdict('example_b', FAIL, constants={'omega_limit': FAIL, 'omega': PASS},
                indices={'criterion': 3})
    matrix([v])
    assert lines[0].split() == ['id', 'criterion', 'status']
    assert lines[1].split() == ['3', 'example_b', FAIL]
    assert lines[2].split() == ['omega_limit', FAIL]
    assert len(lines) == 3
