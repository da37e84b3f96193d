import json
from types import SimpleNamespace
import pandas as pd

import ProxSeq.report
import ProxSeq.verdict
from ProxSeq.verdict import Verdict, PASS, FAIL
from ProxSeq.report import ReportDocument, ReportSettings, write_csv, __version__


def make_doc():
    settings = ReportSettings()
    settings.no_timestamp = True
    doc = ReportDocument('analyze', {'family': {'family': 'gevrey', 'alpha': 1.}}, settings)
    doc.add(Verdict('lc', PASS, constants={'max_jump': 2.}))
    doc.add(Verdict('mg', FAIL, indices={'argmax': 2**70}))
    doc.add_result('omega', {'liminf': float('nan')})
    return doc


def test_report_is_deterministic_without_timestamp():
    a, b = make_doc(), make_doc()
    assert a.dumps() == b.dumps()
    data = json.loads(a.dumps())
    assert 'timestamp' not in data
    assert data['version'] == __version__
    assert data['status'] == FAIL
    assert data['checks'][1]['indices']['argmax'] == {'log2': 70.}
    assert data['results']['omega']['liminf'] == 'nan'
    assert a.counts[PASS] == 1


def test_timestamp_by_default():
    settings = ReportSettings()
    settings.no_timestamp = False
    doc = ReportDocument('riesz', settings=settings)
    assert 'timestamp' in doc.to_json()


def test_write(tmp_path):
    doc = make_doc()
    path = tmp_path / 'report.json'
    doc.write(str(path))
    assert path.read_text() == doc.dumps()


def test_csv_full_precision(tmp_path):
    path = tmp_path / 'table.csv'
    write_csv(pd.DataFrame({'p': [1, 2], 'x': [1/3, 2.]}), str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == 'p,x'
    assert lines[1] == '1,0.33333333333333331'
    back = pd.read_csv(path)
    assert back['x'][0] == 1/3


def recorder(monkeypatch, *modules):
    lines = []
    printer = SimpleNamespace(Sys=SimpleNamespace(Print=lambda text, comm=None: lines.append(text)))
    for module in modules:
        monkeypatch.setattr(module, 'PETSc', printer)
    return lines


def test_view_prints_through_petsc(monkeypatch):
    doc = make_doc()
    lines = recorder(monkeypatch, ProxSeq.report, ProxSeq.verdict)
    doc.view()
    assert lines[0].startswith(f'proxseq {__version__} analyze')
    assert lines[1].split()[:2] == ['lc', PASS]
    assert lines[-1] == '1 pass, 1 fail, 0 inconclusive'
