# License: BSD 3 clause
"""
Regular variation of quotient sequences: limits of m_{floor(lambda p)}/m_p,
the limit of beta_p, the canonical Bojanic-Seneta representation
m_p = p^omega C_p exp(sum_{j<=p} delta_j / j) and the cross-check of the
equivalent conditions against strong regularity.
"""
import math
from fractions import Fraction
import numpy as np
from petsc4py import PETSc
import mpi4py.MPI as mpi

from .errors import InputError, OutOfReach
from .utils import EULER_GAMMA, log_index, harmonic_eps, prefix_sums
from .verdict import Verdict, PASS, FAIL, INCONCLUSIVE, jsonable, tail_envelope
from . import props

REGULARLY_VARYING = 'regularly varying'
G_ONLY = 'satisfies (g), fails (a)-(d)'
NO_OMEGA_LIMIT = 'strongly regular, no limit of log m_p/log p'
NOT_STRONGLY_REGULAR = 'not strongly regular'


class RegVarSettings(object):
    def __init__(self):
        """
        PETSc.Options
        =============

        regvar_ells : String
            Default is '2,3,4,5'.
            Integer ratios of the test of m_{lp}/m_p; the first two are the
            de Haan pair.

        regvar_omega_tol : Real
            Default is 2e-2.
            Largest disagreement of fitted indices.

        regvar_bs_enumerable : Int
            Default is 65536.
            Indices on which the representation is rebuilt term by term.

        regvar_verbose : Bool
            Default is False.

        """
        OptDB = PETSc.Options()
        ells = OptDB.getString('regvar_ells', '2,3,4,5')
        self.ells = tuple(int(x) for x in ells.split(','))
        if len(self.ells) < 2 or min(self.ells) < 2:
            raise InputError(f'regvar_ells needs at least two integers >= 2, got {ells!r}')
        self.omega_tol = OptDB.getReal('regvar_omega_tol', 2e-2)
        self.bs_enumerable = OptDB.getInt('regvar_bs_enumerable', 2**16)
        self.verbose = OptDB.getBool('regvar_verbose', False)


def ratio_limit(seq, lam, schedule=None):
    """
    Envelope of log(m_{floor(lambda p)} / m_p) over the schedule.

    Parameters
    ==========

    seq : QuotientSeq
        The sequence.

    lam : float
        lambda > 0; floor(lambda p) is computed exactly from the nearest
        fraction.

    schedule : list
        Sample indices, the family schedule when None.

    Returns
    =======

    out : EnvelopeEstimate
        Log domain; to_json(exponentiate=True) reports the ratios.

    """
    if not lam > 0:
        raise InputError(f'ratio_limit needs lambda > 0, got {lam}')
    frac = Fraction(lam).limit_denominator(10**6)
    num, den = frac.numerator, frac.denominator
    points = props.schedule(seq) if schedule is None else list(schedule)
    keys, values, indices = [], [], []
    for p in points:
        if p < 1:
            continue
        q = (num*p)//den
        try:
            v = seq.log_quotient(q) - seq.log_quotient(p) if q != p else 0.
        except OutOfReach:
            continue
        keys.append(log_index(p))
        values.append(v)
        indices.append(p)
    return tail_envelope(f'log_ratio_{lam:g}', keys, values,
                         props._cutoff_keys(seq), indices=indices)


def _limit_status(env):
    limit = env.has_limit()
    if limit is None:
        return INCONCLUSIVE
    return PASS if limit else FAIL


def _midpoint(env):
    return 0.5*(env.liminf + env.limsup)


class RegVarReport(object):
    """
    Envelopes of m_{lp}/m_p and of beta_p with the verdicts of the limit of
    beta_p (b), of the integer ratio test (d) and of the de Haan pair.
    """
    def __init__(self, name, envelopes, beta, b, d, de_haan, omega, fits):
        self.name = name
        self.envelopes = envelopes
        self.beta = beta
        self.b = b
        self.d = d
        self.de_haan = de_haan
        self.omega = omega
        self.fits = fits
        settings = RegVarSettings()
        self.agree = b.status == d.status
        if b.passed and d.passed:
            self.agree = abs(beta.limsup - omega) <= settings.omega_tol
        self.classification = None

    @property
    def passed(self):
        return self.b.passed and self.d.passed

    def to_json(self):
        return jsonable({'name': self.name,
                         'b': self.b.to_json(),
                         'd': self.d.to_json(),
                         'deHaan': self.de_haan.to_json(),
                         'omega': self.omega,
                         'fits': self.fits,
                         'agree': self.agree,
                         'classification': self.classification,
                         'envelopes': {str(k): v.to_json(exponentiate=True)
                                       for k, v in self.envelopes.items()},
                         'beta': self.beta.to_json()})

    def view(self):
        if mpi.COMM_WORLD.rank == 0:
            PETSc.Sys.Print(f'{self.name}: omega={self.omega:.6g} agree={self.agree}',
                            comm=mpi.COMM_SELF)
            for v in (self.b, self.d, self.de_haan):
                PETSc.Sys.Print(f'    {v.name:<10s} {v.status:<12s} {v.message}',
                                comm=mpi.COMM_SELF)
            if self.classification is not None:
                PETSc.Sys.Print(f'    {self.classification}', comm=mpi.COMM_SELF)


def _ratio_verdict(name, envs, ells, tol):
    statuses = [_limit_status(envs[ell]) for ell in ells]
    fits = {ell: _midpoint(envs[ell])/math.log(ell) for ell in ells
            if envs[ell].sufficient}
    constants = {f'omega_{ell}': fits.get(ell, math.nan) for ell in ells}
    if FAIL in statuses:
        bad = [ell for ell, s in zip(ells, statuses) if s == FAIL]
        env = envs[bad[0]]
        return Verdict(name, FAIL, constants=constants,
                       indices={'ell': bad[0], 'argmax': env.witnesses.get('argmax'),
                                'argmin': env.witnesses.get('argmin')},
                       message=f'm_{bad[0]}p/m_p has no limit'), fits
    if INCONCLUSIVE in statuses:
        return Verdict(name, INCONCLUSIVE, constants=constants, message='not enough cutoffs'), fits
    spread = max(fits.values()) - min(fits.values())
    constants['spread'] = spread
    if spread > tol:
        return Verdict(name, FAIL, constants=constants,
                       message='limits are not powers of the same index'), fits
    return Verdict(name, PASS, constants=constants,
                   message='m_lp/m_p -> l^omega'), fits


def regvar_index_test(seq):
    """
    Test regular variation through the integer ratios m_{lp}/m_p, the de
    Haan pair l = 2, 3 and the limit of beta_p.

    Returns
    =======

    out : RegVarReport

    """
    settings = RegVarSettings()
    ells = settings.ells
    envs = {ell: ratio_limit(seq, ell) for ell in ells}
    d, fits = _ratio_verdict('d', envs, ells, settings.omega_tol)
    de_haan, _ = _ratio_verdict('deHaan', envs, ells[:2], settings.omega_tol)
    beta = props.stream(seq, 'beta', lambda p: seq.alpha_beta(p).beta)
    status = _limit_status(beta)
    b = Verdict('b', status, constants={'liminf': beta.liminf, 'limsup': beta.limsup},
                indices={'argmax': beta.witnesses.get('argmax'),
                         'argmin': beta.witnesses.get('argmin')},
                message={PASS: 'beta_p converges', FAIL: 'beta_p has no limit',
                         INCONCLUSIVE: 'not enough cutoffs'}[status])
    omega = float(np.mean(list(fits.values()))) if fits else math.nan
    report = RegVarReport(seq.name, envs, beta, b, d, de_haan, omega, fits)
    if settings.verbose:
        report.view()
    return report


class BSDecomposition(object):
    """
    m_p = p^omega C_p exp(sum_{j=1}^{p} delta_j / j) with
    delta_j = beta_{j-1} - omega, at the schedule indices.
    """
    def __init__(self, name, omega, ps, delta, log_C, delta_env, C_env, reconstruction_error):
        self.name = name
        self.omega = omega
        self.ps = ps
        self.delta = delta
        self.log_C = log_C
        self.delta_env = delta_env
        self.C_env = C_env
        self.reconstruction_error = reconstruction_error
        self.C = math.exp(C_env.limsup) if C_env.sufficient else math.nan
        self.verdict = self._verdict()

    def _verdict(self):
        env = self.delta_env
        constants = {'omega': self.omega, 'C': self.C,
                     'reconstruction_error': self.reconstruction_error}
        if not (env.sufficient and self.C_env.sufficient):
            return Verdict('bs', INCONCLUSIVE, constants=constants, message='not enough cutoffs')
        a = np.maximum(np.abs(env.tail_inf), np.abs(env.tail_sup))
        constants['delta_tail'] = float(a[-1])
        tol = env.settings.limit_tol
        shrinking = a[-1] < a[-2] < a[-3] and a[-3] - a[-1] > env.settings.tol(a[-1])
        if (a[-1] <= tol or shrinking) and self.C_env.has_limit():
            return Verdict('bs', PASS, constants=constants,
                           message='delta_p -> 0 and C_p converges')
        return Verdict('bs', FAIL, constants=constants,
                       indices={'argmax': env.witnesses.get('argmax')},
                       message='delta_p does not tend to 0' if not (a[-1] <= tol or shrinking)
                       else 'C_p has no limit')

    def to_json(self):
        return jsonable({'name': self.name, 'omega': self.omega, 'C': self.C,
                         'reconstruction_error': self.reconstruction_error,
                         'verdict': self.verdict.to_json(),
                         'delta': self.delta_env.to_json(),
                         'log_C': self.C_env.to_json()})


def _reconstruction_error(seq, omega, n):
    """Largest |log m_p - (omega log p + log C_p + sum_{j<=p} delta_j/j)|, 1 <= p < n."""
    if n < 2:
        return 0.
    lq = seq.log_quotients(n)
    mean = prefix_sums(lq)[1:n]/np.arange(1, n)
    beta = np.empty(n)
    beta[0] = lq[0]
    beta[1:] = lq[1:] - mean
    j = np.arange(1, n, dtype=float)
    h = prefix_sums(1./j)[1:]
    log_C = beta[1:] + omega*(h - np.log(j))
    delta = beta[:-1] - omega
    s = prefix_sums(delta/j)[1:]
    rebuilt = omega*np.log(j) + log_C + s
    err = np.abs(rebuilt - lq[1:])/np.maximum(1., np.abs(lq[1:]))
    return float(err.max())


def bs_decompose(seq, omega):
    """
    Canonical Bojanic-Seneta representation with index omega.

    Parameters
    ==========

    seq : QuotientSeq
        The sequence.

    omega : float
        The index, finite.

    Returns
    =======

    out : BSDecomposition

    """
    if not math.isfinite(omega):
        raise InputError(f'bs_decompose needs a finite index, got {omega}')
    settings = RegVarSettings()
    ps, delta, log_C = [], [], []
    for p in props.schedule(seq):
        if p < 2:
            continue
        try:
            b_prev = seq.alpha_beta(p - 1).beta
            b = seq.alpha_beta(p).beta
        except OutOfReach:
            continue
        ps.append(p)
        delta.append(b_prev - omega)
        log_C.append(b + omega*(harmonic_eps(p) + EULER_GAMMA))
    keys = [log_index(p) for p in ps]
    cuts = props._cutoff_keys(seq)
    delta_env = tail_envelope('delta', keys, delta, cuts, indices=ps)
    C_env = tail_envelope('log_C', keys, log_C, cuts, indices=ps)
    n = min(seq.enumerable_limit, settings.bs_enumerable)
    err = _reconstruction_error(seq, omega, n)
    return BSDecomposition(seq.name, omega, ps, np.asarray(delta), np.asarray(log_C),
                           delta_env, C_env, err)


def characterization_crosscheck(seq):
    """
    Compare the limit of beta_p with the ratio test and, when they hold,
    the consequences for strong regularity: (mg), (snq), a genuine limit of
    log m_p/log p and gamma(M) = omega(M).

    Returns
    =======

    report : RegVarReport
        With classification set.

    verdict : Verdict
        'crosscheck', FAIL when the equivalent conditions disagree or a
        consequence does not hold.

    """
    report = regvar_index_test(seq)
    sr = props.strong_regularity(seq)
    omega_env = props.estimate_omega(seq)
    omega_limit = omega_env.has_limit()
    constants = {'b': report.b.status, 'd': report.d.status, 'omega': report.omega,
                 'strongly_regular': sr.status, 'omega_limit': omega_limit,
                 'omega_liminf': omega_env.liminf, 'omega_limsup': omega_env.limsup}
    gamma = None
    if sr.passed and omega_limit:
        (lo, hi), _ = props.estimate_gamma_index(seq)
        gamma = (lo, hi)
        constants['gamma_interval'] = [lo, hi]
    tol = RegVarSettings().omega_tol
    if sr.passed:
        om = omega_env.liminf
        gamma_equal = gamma is not None and gamma[0] - tol <= om <= gamma[1] + tol
        if report.passed:
            report.classification = REGULARLY_VARYING
        elif omega_limit and gamma_equal:
            report.classification = G_ONLY
        else:
            report.classification = NO_OMEGA_LIMIT
    else:
        report.classification = NOT_STRONGLY_REGULAR
    constants['classification'] = report.classification
    if not report.agree:
        verdict = Verdict('crosscheck', FAIL, constants=constants,
                          message='(b) and (d) disagree')
    elif report.passed and not (sr.passed and omega_limit
                                and report.classification == REGULARLY_VARYING
                                and gamma[0] - tol <= report.omega <= gamma[1] + tol):
        verdict = Verdict('crosscheck', FAIL, constants=constants,
                          message='regular variation without its consequences')
    elif INCONCLUSIVE in (report.b.status, report.d.status):
        verdict = Verdict('crosscheck', INCONCLUSIVE, constants=constants)
    else:
        verdict = Verdict('crosscheck', PASS, constants=constants, message=report.classification)
    if RegVarSettings().verbose:
        PETSc.Sys.Print(f'{seq.name}: {report.classification}', comm=mpi.COMM_SELF)
    return report, verdict
