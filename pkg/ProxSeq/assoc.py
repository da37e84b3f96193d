# License: BSD 3 clause
"""
The associated function M(t) = sup_p log(t^p / M_p), the counting function
nu(t) = #{j : m_j <= t} and d_M(t) = log M(t) / log t, all evaluated at
log t.
"""
import math
import numpy as np
import pandas as pd
from petsc4py import PETSc
import mpi4py.MPI as mpi

from .errors import InputError, OutOfReach
from .utils import log_index, log_grid
from .verdict import Verdict, PASS, FAIL, INCONCLUSIVE, window_envelope, tail_decay


class AssocSettings(object):
    def __init__(self):
        """
        PETSc.Options
        =============

        assoc_min_M : Real
            Default is 1e-6.
            d_M(t) is evaluated only where M(t) >= assoc_min_M.

        assoc_min_logt : Real
            Default is 1.
            d_M(t) is evaluated only where log t >= assoc_min_logt.

        assoc_logt_max : Real
            Default is 400.
            Upper end of the default log t grid.

        assoc_per_decade : Int
            Default is 64.
            Grid points per decade of t.

        assoc_identity_tol : Real
            Default is 1e-9.
            Relative tolerance of M(m_p) = log(m_p^p / M_p).

        assoc_verbose : Bool
            Default is False.

        """
        OptDB = PETSc.Options()
        self.min_M = OptDB.getReal('assoc_min_M', 1e-6)
        self.min_logt = OptDB.getReal('assoc_min_logt', 1.)
        self.logt_max = OptDB.getReal('assoc_logt_max', 400.)
        self.per_decade = OptDB.getInt('assoc_per_decade', 64)
        self.identity_tol = OptDB.getReal('assoc_identity_tol', 1e-9)
        self.verbose = OptDB.getBool('assoc_verbose', False)

    def grid(self, xmin=None, xmax=None):
        xmin = self.min_logt if xmin is None else xmin
        xmax = self.logt_max if xmax is None else xmax
        return log_grid(xmin, xmax, self.per_decade)


class AssocEval(object):
    """
    M(t), nu(t), d_M(t) and the residual nu(t)/M(t) - d_M(t) at one log t.

    d and residual are nan where d_M is not defined (M(t) below assoc_min_M
    or log t below assoc_min_logt).
    """
    def __init__(self, logt, nu, log_M, gap, settings=None):
        settings = settings if settings is not None else AssocSettings()
        self.logt = logt
        self.nu = nu
        self.log_M = log_M
        self.M = math.exp(log_M) if log_M < 709. else math.inf
        self.defined = log_M >= math.log(settings.min_M) and logt >= settings.min_logt
        if self.defined:
            self.d = log_M/logt
            # nu/M = 1/(log t - log M_nu / nu)
            self.residual = 1./gap - self.d
        else:
            self.d = math.nan
            self.residual = math.nan

    def to_json(self):
        return {'logt': self.logt, 'nu': self.nu, 'M': self.M, 'log_M': self.log_M,
                'd': self.d, 'residual': self.residual}


def _check_monotone(seq):
    if not seq.nondecreasing:
        raise InputError(f'{seq.name}: the associated function needs nondecreasing quotients')


def nu(seq, logt):
    """Return nu(t) = #{j : m_j <= t} (ties counted)."""
    _check_monotone(seq)
    return seq.count_below(float(logt))


def assoc_eval(seq, logt, settings=None):
    """
    Evaluate M(t) = nu (log t - log M_nu / nu) with nu = nu(t).

    Parameters
    ==========

    seq : QuotientSeq
        A sequence with nondecreasing quotients.

    logt : float
        log t.

    Returns
    =======

    out : AssocEval

    """
    settings = settings if settings is not None else AssocSettings()
    logt = float(logt)
    n = nu(seq, logt)
    if n == 0:
        return AssocEval(logt, 0, -math.inf, math.inf, settings)
    gap = logt - seq.mean_log_quotient(n)
    if gap <= 0:
        # rounding for ties m_{nu-1} = t
        return AssocEval(logt, n, -math.inf, math.inf, settings)
    return AssocEval(logt, n, log_index(n) + math.log(gap), gap, settings)


def M_assoc(seq, logt):
    return assoc_eval(seq, logt).M


def log_M_assoc(seq, logt):
    return assoc_eval(seq, logt).log_M


def d_M(seq, logt):
    """
    Return d_M(t) = log M(t) / log t.

    Raises InputError where M(t) < assoc_min_M or log t < assoc_min_logt.
    """
    settings = AssocSettings()
    e = assoc_eval(seq, logt, settings)
    if not e.defined:
        raise InputError(f'd_M is evaluated for M(t) >= {settings.min_M} and '
                         f'log t >= {settings.min_logt}, got log t = {logt}, M(t) = {e.M}')
    return e.d


def d_residual(seq, logt):
    """Return nu(t)/M(t) - d_M(t)."""
    d_M(seq, logt)
    return assoc_eval(seq, logt).residual


def assoc_grid(seq, grid=None):
    """
    Tabulate (logt, nu, M, log_M, d, residual) on a log t grid; points
    beyond the reach of the family are dropped.

    Returns
    =======

    out : pandas.DataFrame

    """
    settings = AssocSettings()
    grid = settings.grid() if grid is None else np.asarray(grid, dtype=float)
    rows = []
    for x in grid:
        try:
            e = assoc_eval(seq, x, settings)
        except OutOfReach:
            break
        rows.append(e.to_json())
    if settings.verbose:
        PETSc.Sys.Print(f'{seq.name}: associated function on {len(rows)} of {len(grid)} grid points',
                        comm=mpi.COMM_SELF)
    return pd.DataFrame(rows, columns=['logt', 'nu', 'M', 'log_M', 'd', 'residual'])


def d_envelope(seq, grid=None):
    """
    Envelope of d_M on a log t grid with extrema over the doubling windows of
    log t; its limsup is compared with 1/omega(M).
    """
    table = assoc_grid(seq, grid)
    table = table[np.isfinite(table['d'])]
    if table.empty:
        raise InputError(f'{seq.name}: d_M is not defined on the grid')
    return window_envelope('d_M', table['logt'].to_numpy(), table['d'].to_numpy())


def check_d_residual(seq, grid=None):
    """
    Verdict on nu(t)/M(t) - d_M(t) -> 0 along the grid (condition (D) for
    d_M).
    """
    table = assoc_grid(seq, grid)
    table = table[np.isfinite(table['residual'])]
    if len(table) < 8:
        return Verdict('d_residual', INCONCLUSIVE, message='too few grid points')
    x = table['logt'].to_numpy()
    ok, last, prev = tail_decay(x, table['residual'].to_numpy())
    constants = {'last_window_max': last, 'previous_window_max': prev}
    if ok is None:
        return Verdict('d_residual', INCONCLUSIVE, constants=constants, horizon=float(x[-1]))
    if ok:
        return Verdict('d_residual', PASS, constants=constants, horizon=float(x[-1]),
                       message='residual tends to 0')
    worst = int(np.argmax(np.abs(table['residual'].to_numpy())*(x >= x[-1]/2)))
    return Verdict('d_residual', FAIL, constants=constants,
                   indices={'worst_logt': float(x[worst])}, horizon=float(x[-1]),
                   message='residual does not decay')


def check_identities(seq, ps):
    """
    Check M(m_p) = log(m_p^p / M_p) = p beta_p at the indices ps and that
    M is linear in log t with slope nu between consecutive distinct
    quotients.
    """
    settings = AssocSettings()
    worst, worst_p = 0., None
    slope_err, slope_p = 0., None
    for p in ps:
        if p < 1:
            continue
        try:
            lm = seq.log_quotient(p)
            pt = seq.alpha_beta(p)
            e = assoc_eval(seq, lm, settings)
        except OutOfReach:
            continue
        target = pt.p*pt.beta
        if not math.isfinite(e.log_M):
            continue
        err = abs(e.M - target)/max(1., abs(target))
        if err > worst:
            worst, worst_p = err, p
        try:
            ln = seq.log_quotient(p + 1)
        except OutOfReach:
            continue
        if ln > lm and p <= 1 << 16:
            f = assoc_eval(seq, ln, settings)
            slope = (f.M - e.M)/(ln - lm)
            n = seq.count_below(lm)
            err = abs(slope - n)/max(1., n)
            if err > slope_err:
                slope_err, slope_p = err, p
    constants = {'identity_error': worst, 'slope_error': slope_err}
    indices = {'identity_worst': worst_p, 'slope_worst': slope_p}
    if worst <= settings.identity_tol and slope_err <= 1e-6:
        return Verdict('assoc_identities', PASS, constants=constants, indices=indices)
    return Verdict('assoc_identities', FAIL, constants=constants, indices=indices,
                   message='M(m_p) differs from p beta_p' if worst > settings.identity_tol
                   else 'slope of M differs from nu')
