# License: BSD 3 clause
"""
Reproducibility suite: one registered function per acceptance criterion,
each returning a Verdict. Criteria are spread round-robin over the MPI
ranks and gathered on rank 0.
"""
import math
import numpy as np
from petsc4py import PETSc
import mpi4py.MPI as mpi

from .errors import ProxSeqError
from .verdict import Verdict, PASS, FAIL
from .seqcore import GevreySeq, MAlphaBetaSeq, MQSeq, ExampleA, ExampleB
from . import props
from .assoc import d_M
from .regvar import regvar_index_test
from .proxord import make_order, validate_order, conjugate_order, admits
from .construct import (AxisV, build_mv_sequence, u_sandwich, vm_sandwich,
                        biconjugate_check)
from .riesz import riesz_subsequences, RieszSeq, moricz_comparison
from .report import ReportDocument


class SuiteSettings(object):
    def __init__(self):
        """
        PETSc.Options
        =============

        filter : String
            Default is ''.
            Run only the criteria whose id, name or tags contain this text.

        json : String
            Default is ''.
            Path of the machine readable pass/fail matrix.

        suite_verbose : Bool
            Default is False.
            Print each criterion when it finishes.

        """
        OptDB = PETSc.Options()
        self.filter = OptDB.getString('filter', '')
        self.json = OptDB.getString('json', '')
        self.verbose = OptDB.getBool('suite_verbose', False)


class Criterion(object):
    def __init__(self, id, name, tags, func):
        self.id = id
        self.name = name
        self.tags = tuple(tags)
        self.func = func

    def matches(self, text):
        if not text:
            return True
        return text == str(self.id) or text in self.name or any(text in t for t in self.tags)

    def run(self):
        try:
            v = self.func()
        except (ProxSeqError, ArithmeticError, ValueError) as e:
            v = Verdict(self.name, FAIL, message=f'{e.__class__.__name__}: {e}')
        v.name = self.name
        v.indices['criterion'] = self.id
        return v


CRITERIA = []


def criterion(id, name, tags=()):
    def decorator(func):
        CRITERIA.append(Criterion(id, name, tags, func))
        return func
    return decorator


def _close(name, value, target, tol):
    err = abs(value - target)
    return Verdict(name, PASS if err <= tol else FAIL,
                   constants={'value': value, 'target': target, 'error': err, 'tol': tol})


def _expect(name, verdict, status):
    out = Verdict(name, PASS if verdict.status == status else FAIL,
                  constants={'status': verdict.status, 'expected': status})
    out.message = verdict.message
    return out


def _ratio_bounds(seq, k):
    env = props.ratio_stream(seq, k)
    return math.exp(env.liminf), math.exp(env.limsup)


@criterion(1, 'gevrey_indices', ('props', 'assoc'))
def gevrey_indices():
    out = []
    for alpha in (0.5, 1., 2.):
        seq = GevreySeq(alpha)
        env = props.estimate_omega(seq, 10**6)
        out.append(_close(f'omega_liminf_{alpha:g}', env.liminf, alpha, 1e-2))
        out.append(_close(f'omega_limsup_{alpha:g}', env.limsup, alpha, 1e-2))
        out.append(_close(f'd_M_{alpha:g}', d_M(seq, 8*math.log(10.)), 1/alpha, 5e-2))
    return Verdict.combine('gevrey_indices', out)


@criterion(2, 'example_a', ('props', 'regvar', 'blocks'))
def example_a():
    seq = ExampleA()
    lo, hi = _ratio_bounds(seq, 2)
    out = [_close('liminf_m2p_mp', lo, 2., 1e-3), _close('limsup_m2p_mp', hi, 3., 1e-3)]
    eq = props.check_equiv_quotients(seq, GevreySeq(1.))
    c, d = eq.constants.get('c_over_p', 0.), eq.constants.get('d_over_p', math.inf)
    out.append(Verdict('m_p_over_p', PASS if c >= 0.25*(1 - 1e-12) and d <= 3*(1 + 1e-12) else FAIL,
                       constants={'min': c, 'max': d}))
    out.append(_expect('equiv_gevrey_1', eq, PASS))
    report = regvar_index_test(seq)
    out.append(_expect('b', report.b, FAIL))
    out.append(_expect('d', report.d, FAIL))
    out.append(Verdict('b_d_agree', PASS if report.agree else FAIL))
    return Verdict.combine('example_a', out)


@criterion(3, 'example_b', ('props', 'proxord', 'blocks'))
def example_b():
    seq = ExampleB()
    lo, hi = _ratio_bounds(seq, 2)
    out = [_close('liminf_m2p_mp', lo, 2., 1e-3), _close('limsup_m2p_mp', hi, 4., 1e-3)]
    env = props.estimate_omega(seq)
    out.append(Verdict('omega_limit', PASS if env.has_limit() else FAIL,
                       constants={'liminf': env.liminf, 'limsup': env.limsup}))
    out.append(_close('omega', 0.5*(env.liminf + env.limsup), 1., 1e-2))
    (g_lo, g_hi), status = props.estimate_gamma_index(seq)
    out.append(Verdict('gamma_contains_1', PASS if g_lo <= 1. <= g_hi else FAIL,
                       constants={'lo': g_lo, 'hi': g_hi, 'status': status}))
    out.append(_expect('admits_const_1', admits(seq, 'const:1').verdict, FAIL))
    return Verdict.combine('example_b', out)


@criterion(4, 'riesz_example', ('riesz', 'props'))
def riesz_example():
    report = riesz_subsequences(nmax=20)
    out = []
    for n, tk, tq in zip(report.ns, report.t_k, report.t_q):
        if n < 10:
            continue
        tol = 1e-6 if n >= 13 else 5e-5
        out.append(_close(f't_k_{n}', float(tk), 2.5, tol))
        out.append(_close(f't_q_{n}', float(tq), 2.75, tol))
    gap = report.recurrence_gap
    out.append(Verdict('recurrence', PASS if gap <= 1e-9 else FAIL, constants={'gap': gap}))
    seq = RieszSeq()
    mg = props.check_mg(seq)
    lo, hi = mg.constants.get('liminf', math.nan), mg.constants.get('limsup', math.nan)
    out.append(Verdict('mg_envelope', PASS if mg.passed and 3.96 <= lo and hi <= 8.08 else FAIL,
                       constants={'liminf': lo, 'limsup': hi}))
    (g_lo, g_hi), status = props.estimate_gamma_index(seq)
    out.append(Verdict('gamma_contains_2', PASS if g_lo <= 2. <= g_hi else FAIL,
                       constants={'lo': g_lo, 'hi': g_hi, 'status': status}))
    return Verdict.combine('riesz_example', out)


@criterion(5, 'construction_closed_form', ('construct',))
def construction_closed_form():
    out = []
    for rho in (0.5, 1., 2.):
        V = AxisV(make_order({'order': 'const', 'rho': rho}))
        seq = build_mv_sequence(V, 512)
        p = np.arange(1, 513)
        exact = (p/rho)*(np.log(p/rho) - 1)
        err = float(np.max(np.abs(seq.prefix[1:] - exact)/np.maximum(1., np.abs(exact))))
        out.append(Verdict(f'closed_form_{rho:g}', PASS if err <= 1e-8 else FAIL,
                           constants={'max_relative_error': err}))
        out.append(_expect(f'u_sandwich_{rho:g}', u_sandwich(V, seq), PASS))
        out.append(_expect(f'strongly_regular_{rho:g}', props.strong_regularity(seq), PASS))
    return Verdict.combine('construction_closed_form', out)


@criterion(6, 'vm_equivalence', ('construct', 'assoc'))
def vm_equivalence():
    out = []
    for spec in ('const:1', 'const:0.5', 'log_decay:1:1'):
        V = AxisV(make_order(spec))
        out.append(_expect(f'vm_{spec}', vm_sandwich(V, build_mv_sequence(V, 512)), PASS))
    return Verdict.combine('vm_equivalence', out)


@criterion(7, 'young_biconjugate', ('construct',))
def young_biconjugate():
    out = [_expect(f'biconjugate_{spec}', biconjugate_check(AxisV(make_order(spec))), PASS)
           for spec in ('const:2', 'rho_alpha_beta:1:1')]
    return Verdict.combine('young_biconjugate', out)


@criterion(8, 'order_validation', ('proxord',))
def order_validation():
    out = []
    for spec in ('rho_alpha_beta:1:1', 'power_decay:1:1', 'log_decay:1:1'):
        order = make_order(spec)
        val = validate_order(order)
        for k in ('B', 'C', 'D'):
            out.append(_expect(f'{spec}_{k}', val.verdicts[k], PASS))
        y, rho_star, _ = conjugate_order(order).samples(order.default_grid())
        out.append(_close(f'conjugate_{spec}', float(rho_star[-1]), 1/order.rho_inf, 2e-2))
    val = validate_order(make_order('sin_counterexample:1'))
    big = int(np.count_nonzero(np.abs(val.d_residual) > 0.5))
    out.append(_expect('sin_D', val.verdicts['D'], FAIL))
    out.append(Verdict('sin_D_points', PASS if big >= 10 else FAIL, constants={'points': big}))
    return Verdict.combine('order_validation', out)


@criterion(9, 'property_fail_matrix', ('props',))
def property_fail_matrix():
    out = []
    cases = [(MQSeq(2.), (PASS, FAIL, PASS)),
             (MAlphaBetaSeq(0., 1., family='m_zero_beta'), (PASS, PASS, FAIL))]
    for seq, expected in cases:
        got = (props.check_lc(seq), props.check_mg(seq), props.check_snq(seq))
        for v, e in zip(got, expected):
            out.append(_expect(f'{seq.name}_{v.name}', v, e))
    return Verdict.combine('property_fail_matrix', out)


@criterion(10, 'moricz_normalizer', ('riesz',))
def moricz_normalizer():
    v, _ = moricz_comparison()
    return v


@criterion(11, 'determinism', ('cli', 'report'))
def determinism():
    from .cli import cmd_analyze, cmd_construct
    runs = []
    for _ in range(2):
        docs = [cmd_analyze('gevrey:1', horizon=2**16),
                cmd_construct('const:1', pmax=64)]
        for d in docs:
            d.timestamp = None
        runs.append(''.join(d.dumps() for d in docs))
    same = runs[0] == runs[1]
    return Verdict('determinism', PASS if same else FAIL, constants={'bytes': len(runs[0])})


def select(text=''):
    return sorted((c for c in CRITERIA if c.matches(text)), key=lambda c: c.id)


def run_suite(text=None, comm=mpi.COMM_WORLD):
    """
    Run the selected criteria round-robin over the ranks of comm.

    Returns
    =======

    out : list of Verdict
        On rank 0, sorted by criterion id; None on the other ranks.

    """
    settings = SuiteSettings()
    text = settings.filter if text is None else text
    chosen = select(text)
    local = []
    for i, c in enumerate(chosen):
        if i % comm.size != comm.rank:
            continue
        v = c.run()
        if settings.verbose:
            PETSc.Sys.Print(f'[{comm.rank}] criterion {c.id} {c.name}: {v.status}',
                            comm=mpi.COMM_SELF)
        local.append((c.id, v.to_json()))
    gathered = comm.gather(local, root=0)
    if comm.rank != 0:
        return None
    rows = sorted((r for part in gathered for r in part), key=lambda r: r[0])
    out = []
    for _, j in rows:
        v = Verdict(j['name'], j['status'], j['constants'], j['indices'], j['horizon'], j['message'])
        out.append(v)
    return out


def matrix(verdicts):
    """Print the pass/fail matrix on rank 0."""
    if mpi.COMM_WORLD.rank != 0:
        return
    PETSc.Sys.Print(f'{"id":>3s}  {"criterion":<28s} status', comm=mpi.COMM_SELF)
    for v in verdicts:
        PETSc.Sys.Print(f'{v.indices.get("criterion", ""):>3}  {v.name:<28s} {v.status}',
                        comm=mpi.COMM_SELF)
        for k, s in sorted(v.constants.items()):
            if s != PASS and isinstance(s, str):
                PETSc.Sys.Print(f'{"":>5s}  {k:<26s} {s}', comm=mpi.COMM_SELF)


def suite_document(verdicts, text=''):
    doc = ReportDocument('suite', {'filter': text})
    for v in verdicts:
        doc.add(v)
    return doc


def suite_passed(verdicts):
    return bool(verdicts) and all(v.status == PASS for v in verdicts)
