# License: BSD 3 clause
"""
Command line front end.

    proxseq analyze gevrey:1 -out report.json -csv table.csv
    proxseq construct const:0.5 -pmax 512
    proxseq admit gevrey:1 const:1
    proxseq riesz -nmax 12
    proxseq suite -filter riesz -json matrix.json

Options use the PETSc syntax (-name value); --name is accepted as well and
-options_file path reads further options from a file.
"""
import sys
import json
import math
import numpy as np
import pandas as pd
from petsc4py import PETSc
import mpi4py.MPI as mpi

from .errors import ProxSeqError, InputError, SolverError
from .verdict import Verdict, PASS, FAIL, INCONCLUSIVE
from .seqcore import make_family, parse_family
from . import props
from .assoc import check_d_residual, check_identities, d_envelope
from .regvar import characterization_crosscheck, bs_decompose, regvar_index_test
from .proxord import make_order, validate_order, admits
from .construct import (AxisV, build_mv_sequence, build_l_sequence, mv_checks, u_sandwich,
                        vm_sandwich, biconjugate_check, admissibility_closure_check)
from .riesz import riesz_subsequences, within_block_envelope, moricz_comparison
from .report import ReportDocument
from . import suite

COMMANDS = ('analyze', 'construct', 'admit', 'riesz', 'suite')
BOOL_FLAGS = ('no_timestamp',)

USAGE = """usage: proxseq {analyze,construct,admit,riesz,suite} [spec ...] [-option value ...]

    analyze FAMILY           strong regularity, growth indices, characterization
    construct ORDER          M^V and L built from a nonzero proximate order
    admit FAMILY ORDER       admissibility and its closure chain
    riesz                    Riesz means of the counterexample
    suite                    acceptance criteria and pass/fail matrix

options: -config path -pmax n -nmax n -horizon n -out path -csv path
         -no_timestamp -filter text -json path -options_file path
"""


class CliSettings(object):
    def __init__(self):
        """
        PETSc.Options
        =============

        config : String
            Default is ''.
            JSON file with the family (analyze), the order (construct) or
            both under the keys "family" and "order" (admit).

        pmax : Int
            Default is the option construct_pmax.

        nmax : Int
            Default is the option riesz_nmax.

        horizon : Int
            Default is 0 (family default).
            Largest index used by the property checks.

        equiv : String
            Default is ''.
            Family compared with the analyzed one by check_equiv_quotients;
            when empty, the Gevrey family of the estimated omega.

        """
        OptDB = PETSc.Options()
        self.config = OptDB.getString('config', '')
        self.pmax = OptDB.getInt('pmax', 0) or None
        self.nmax = OptDB.getInt('nmax', 0) or None
        self.horizon = OptDB.getInt('horizon', 0) or None
        self.equiv = OptDB.getString('equiv', '')


def _is_value(token):
    if not token.startswith('-'):
        return True
    try:
        float(token)
        return True
    except ValueError:
        return False


def _parse_options(tokens, options):
    i = 0
    positional = []
    while i < len(tokens):
        tok = tokens[i]
        if tok.startswith('--'):
            tok = tok[1:]
        if not tok.startswith('-') or _is_value(tok):
            positional.append(tok)
            i += 1
            continue
        name = tok[1:].replace('-', '_')
        value = 'true'
        if i + 1 < len(tokens) and _is_value(tokens[i + 1]):
            nxt = tokens[i + 1]
            if name not in BOOL_FLAGS or nxt.lower() in ('true', 'false', '0', '1'):
                value = nxt
                i += 1
        i += 1
        if name == 'options_file':
            positional.extend(_parse_options(_read_options_file(value), options))
        else:
            options[name] = value
    return positional


def _read_options_file(path):
    try:
        with open(path) as f:
            lines = f.readlines()
    except OSError as e:
        raise InputError(f'cannot read options file {path}: {e}')
    tokens = []
    for line in lines:
        line = line.split('#', 1)[0]
        tokens.extend(line.split())
    return tokens


def parse_args(argv):
    """
    Split argv into the command, the positional specifications and the
    options.

    Returns
    =======

    command : str

    positional : list of str

    options : dict
        Option name (without dash) -> value string.

    """
    options = {}
    positional = _parse_options(list(argv), options)
    if not positional:
        raise InputError('missing command')
    command = positional.pop(0)
    if command not in COMMANDS:
        raise InputError(f'unknown command {command!r}, expected one of {COMMANDS}')
    return command, positional, options


def _load_config(path):
    try:
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f'cannot read config {path}: {e}')


def _guarded(doc, name, func):
    """Add the verdict of func, INCONCLUSIVE when its preconditions fail."""
    try:
        return doc.add(func())
    except InputError as e:
        return doc.add(Verdict(name, INCONCLUSIVE, message=str(e)))


def cmd_analyze(family, horizon=None):
    """
    Strong regularity, omega and gamma estimates, d_M and the
    characterization crosscheck of a family.

    Returns
    =======

    out : ReportDocument

    """
    settings = CliSettings()
    seq = make_family(family)
    horizon = settings.horizon if horizon is None else horizon
    doc = ReportDocument('analyze', {'family': seq.spec.to_json()})
    doc.provenance = {'horizon': horizon, 'budget': props._horizon(seq, horizon)[0],
                      'enumerable': seq.enumerable_limit, 'family_horizon': seq.horizon}
    lc = doc.add(props.check_lc(seq, horizon))
    doc.add(props.check_mg(seq, horizon))
    doc.add(props.check_mg(seq, horizon, criterion='beta'))
    doc.add(props.check_snq(seq, horizon))
    omega = props.estimate_omega(seq, horizon)
    doc.add_result('omega', omega)
    if omega.sufficient:
        status = PASS if omega.has_limit() else FAIL
        doc.add(Verdict('omega_limit', status,
                        constants={'liminf': omega.liminf, 'limsup': omega.limsup},
                        message='log m_p/log p converges' if status == PASS
                        else 'log m_p/log p has no limit'))
    else:
        doc.add(Verdict('omega_limit', INCONCLUSIVE, message='not enough cutoffs'))
    enough = omega.sufficient and not lc.failed
    if enough:
        def gamma():
            (lo, hi), status = props.estimate_gamma_index(seq, horizon)
            return Verdict('gamma_index', status, constants={'lo': lo, 'hi': hi})
        _guarded(doc, 'gamma_index', gamma)
        report, v = characterization_crosscheck(seq)
        doc.add(report.b)
        doc.add(report.d)
        doc.add(v)
        doc.add_result('regvar', report)
        if report.passed:
            bs = bs_decompose(seq, report.omega)
            doc.add(bs.verdict)
            doc.add_result('bs', bs)
        ref = settings.equiv
        if not ref and math.isfinite(omega.liminf) and omega.liminf > 0 and omega.has_limit():
            ref = f'gevrey:{round(0.5*(omega.liminf + omega.limsup), 2):g}'
        if ref:
            v = props.check_equiv_quotients(seq, make_family(ref), horizon)
            v.constants['reference'] = ref
            doc.add(v)
    else:
        for name in ('gamma_index', 'crosscheck'):
            doc.add(Verdict(name, INCONCLUSIVE, message='not enough cutoffs'))
    if seq.nondecreasing:
        doc.add(check_d_residual(seq))
        doc.add(check_identities(seq, [p for p in props.schedule(seq, horizon) if p >= 1][:64]))
        try:
            doc.add_result('d_M', d_envelope(seq))
        except InputError:
            pass
    rows = []
    for p in props.schedule(seq, horizon):
        try:
            pt = seq.alpha_beta(p)
        except InputError:
            continue
        rows.append({'p': p, 'log_m': pt.log_m, 'mean_log_m': pt.mean,
                     'beta': pt.beta})
    doc.add_table('samples', pd.DataFrame(rows, columns=['p', 'log_m', 'mean_log_m', 'beta']))
    return doc


def cmd_construct(order, pmax=None):
    """
    Build M^V and L from a nonzero order and run the construction checks.

    Returns
    =======

    out : ReportDocument

    """
    settings = CliSettings()
    order = make_order(order)
    if not order.nonzero:
        raise InputError(f'{order.name}: construct needs a nonzero proximate order (rho > 0), '
                         f'got rho = {order.rho_inf}')
    pmax = settings.pmax if pmax is None else pmax
    doc = ReportDocument('construct', {'order': order.to_json()})
    doc.add(validate_order(order).verdict)
    V = AxisV(order)
    mv = build_mv_sequence(V, pmax)
    L = build_l_sequence(order, pmax, V)
    doc.provenance = mv.provenance
    for v in mv_checks(V, mv):
        doc.add(v)
    doc.add(u_sandwich(V, mv))
    doc.add(vm_sandwich(V, mv))
    doc.add(biconjugate_check(V))
    doc.add(props.strong_regularity(mv))
    eq = props.check_equiv_quotients(L, mv)
    eq.name = 'l_equiv_mv'
    doc.add(eq)
    report = regvar_index_test(L)
    status = PASS if report.passed else (FAIL if FAIL in (report.b.status, report.d.status)
                                         else INCONCLUSIVE)
    doc.add(Verdict('l_regvar', status,
                    constants={'omega': report.omega, 'expected': 1./order.rho_inf},
                    message='l_p = U(p) regularly varying'))
    doc.add_result('l_regvar', report)
    table = mv.table()
    table['log_l'] = np.append(L.values, math.nan)
    doc.add_table('construct', table)
    return doc


def cmd_admit(family, order):
    """admits(seq, order) and the closure chain M ~ M^V, l regularly varying."""
    seq = make_family(family)
    order = make_order(order)
    doc = ReportDocument('admit', {'family': seq.spec.to_json(), 'order': order.to_json()})
    adm = admits(seq, order)
    doc.add_result('admits', adm)
    closure = admissibility_closure_check(seq, order)
    for v in closure.stages:
        doc.add(v)
    doc.add_result('closure', closure)
    env = adm.envelope
    if env.window_inf is not None:
        doc.add_table('admits', pd.DataFrame({'window_inf': env.window_inf,
                                              'window_sup': env.window_sup}))
    return doc


def cmd_riesz(nmax=None):
    """Riesz means along k_n and q_n, the no-limit verdict and the Moricz comparison."""
    settings = CliSettings()
    nmax = settings.nmax if nmax is None else nmax
    report = riesz_subsequences(nmax=nmax)
    doc = ReportDocument('riesz', {'nmax': report.ns[-1]})
    doc.add(report.no_limit())
    gap = report.recurrence_gap
    doc.add(Verdict('recurrence', PASS if gap <= 1e-9 else FAIL,
                    constants={'gap': gap, 'chain_gap': report.chain_gap}))
    doc.add_result('subsequences', report)
    doc.add_result('within_blocks', within_block_envelope(nmax=nmax))
    v, table = moricz_comparison()
    doc.add(v)
    doc.add_result('moricz', table.to_dict(orient='list'))
    doc.add_table('riesz', report.table())
    return doc


def cmd_suite(text=None):
    """Run the acceptance criteria; return the exit status (0 iff all pass)."""
    settings = suite.SuiteSettings()
    text = settings.filter if text is None else text
    verdicts = suite.run_suite(text)
    if mpi.COMM_WORLD.rank != 0:
        return 0
    suite.matrix(verdicts)
    doc = suite.suite_document(verdicts, text)
    if settings.json:
        doc.write(settings.json)
    doc.write()
    return 0 if suite.suite_passed(verdicts) else 3


def _run(command, positional):
    settings = CliSettings()
    config = _load_config(settings.config) if settings.config else None
    if command == 'suite':
        return cmd_suite()
    if command == 'riesz':
        doc = cmd_riesz()
    elif command == 'analyze':
        family = positional[0] if positional else config
        if family is None:
            raise InputError('analyze needs a family')
        doc = cmd_analyze(parse_family(family))
    elif command == 'construct':
        order = positional[0] if positional else config
        if order is None:
            raise InputError('construct needs an order')
        doc = cmd_construct(order)
    else:
        if len(positional) >= 2:
            family, order = positional[:2]
        elif config is not None and 'family' in config and 'order' in config:
            family, order = config['family'], config['order']
        else:
            raise InputError('admit needs a family and an order')
        doc = cmd_admit(family, order)
    doc.view()
    doc.write()
    doc.write_csv()
    return 0


def main(argv=None):
    """
    Entry point of the proxseq command.

    Exit status: 0 on completion (inconclusive verdicts included), 1 for an
    input error, 2 for a solver failure or any other numerical error, 3 when
    the suite fails.
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        command, positional, options = parse_args(argv)
    except InputError as e:
        PETSc.Sys.Print(f'error: {e}\n{USAGE}')
        return 1
    OptDB = PETSc.Options()
    for k, v in options.items():
        OptDB.setValue(k, v)
    try:
        return _run(command, positional)
    except SolverError as e:
        PETSc.Sys.Print(f'solver error: {e}')
        return 2
    except InputError as e:
        PETSc.Sys.Print(f'error: {e}')
        return 1
    except (ProxSeqError, ArithmeticError, ValueError) as e:
        PETSc.Sys.Print(f'numerical error: {e.__class__.__name__}: {e}')
        return 2
    finally:
        for k in options:
            OptDB.delValue(k)


if __name__ == '__main__':
    sys.exit(main())
