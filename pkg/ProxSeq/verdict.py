# License: BSD 3 clause
"""
Verdicts of property checks and liminf/limsup envelopes of scalar streams
sampled at increasing cutoffs.
"""
import math
import numpy as np
from petsc4py import PETSc
import mpi4py.MPI as mpi

from .utils import exp_clamped

PASS = 'pass'
FAIL = 'fail'
INCONCLUSIVE = 'inconclusive'


def jsonable(value):
    """
    Convert numpy scalars, arrays, big integers and non finite floats into
    values json can write deterministically.
    """
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        value = int(value)
        if abs(value) < 2**53:
            return value
        return {'log2': math.log2(value)}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    if hasattr(value, 'to_json'):
        return value.to_json()
    return value


class Verdict(object):
    """
    Outcome of a property check.

    Parameters
    ==========

    name : str
        Name of the check.

    status : str
        PASS, FAIL or INCONCLUSIVE.

    constants : dict
        Witness constants (estimated sup, inf, bounds, ...).

    indices : dict
        Witness indices (violating index, where a sup is attained, ...).

    horizon : int
        Largest index (or log t) used by the check.

    message : str
        Short explanation.

    """
    def __init__(self, name, status, constants=None, indices=None, horizon=None, message=''):
        self.name = name
        self.status = status
        self.constants = constants if constants is not None else {}
        self.indices = indices if indices is not None else {}
        self.horizon = horizon
        self.message = message

    @property
    def passed(self):
        return self.status == PASS

    @property
    def failed(self):
        return self.status == FAIL

    @classmethod
    def combine(cls, name, verdicts, message=''):
        statuses = [v.status for v in verdicts]
        if FAIL in statuses:
            status = FAIL
        elif INCONCLUSIVE in statuses:
            status = INCONCLUSIVE
        else:
            status = PASS
        return cls(name, status,
                   constants={v.name: v.status for v in verdicts},
                   message=message)

    def to_json(self):
        return jsonable({'name': self.name,
                         'status': self.status,
                         'constants': self.constants,
                         'indices': self.indices,
                         'horizon': self.horizon,
                         'message': self.message})

    def view(self):
        consts = ', '.join(f'{k}={v:.6g}' if isinstance(v, float) else f'{k}={v}'
                           for k, v in sorted(self.constants.items()))
        PETSc.Sys.Print(f'{self.name:<32s} {self.status:<12s} {consts}', comm=mpi.COMM_SELF)

    def __repr__(self):
        return f'Verdict({self.name!r}, {self.status!r})'


class EnvelopeSettings(object):
    def __init__(self):
        """
        Tolerances of the finite horizon decisions.

        PETSc.Options
        =============

        envelope_rtol : Real
            Default is 1e-3.
            Relative change of the tail extrema across the last three
            cutoffs below which an envelope is stable.

        envelope_floor : Real
            Default is 1e-6.
            Scale floor of the relative tolerance (for values close to 0).

        envelope_decel : Real
            Default is 0.75.
            A moving tail is diverging when its last increment is larger
            than envelope_decel times the previous one.

        envelope_spread_decay : Real
            Default is 0.8.
            A spread limsup - liminf that shrinks by this factor across the
            last three cutoffs is taken as a genuine limit.

        envelope_limit_tol : Real
            Default is 1e-2.
            Spread below which liminf and limsup are taken as equal.

        envelope_window_tol : Real
            Default is 0.1.
            Largest change of window extrema between the last windows of a
            bounded function on a log t grid.

        envelope_decay : Real
            Default is 0.75.
            Residuals shrinking by this factor over one doubling of log t are
            taken as tending to 0.

        envelope_ncut : Int
            Default is 6.
            Number of cutoffs kept (the largest ones).

        """
        OptDB = PETSc.Options()
        self.rtol = OptDB.getReal('envelope_rtol', 1e-3)
        self.floor = OptDB.getReal('envelope_floor', 1e-6)
        self.decel = OptDB.getReal('envelope_decel', 0.75)
        self.spread_decay = OptDB.getReal('envelope_spread_decay', 0.8)
        self.limit_tol = OptDB.getReal('envelope_limit_tol', 1e-2)
        self.window_tol = OptDB.getReal('envelope_window_tol', 0.1)
        self.decay = OptDB.getReal('envelope_decay', 0.75)
        self.ncut = OptDB.getInt('envelope_ncut', 6)

    def tol(self, value):
        return self.rtol*max(abs(value), self.floor)


class EnvelopeEstimate(object):
    """
    liminf/limsup envelope of a scalar stream.

    tail_inf[i] (tail_sup[i]) is the infimum (supremum) of the stream over
    the samples with key >= cutoffs[i]; cutoffs increase.
    """
    def __init__(self, name, cutoffs, tail_inf, tail_sup, nsamples,
                 settings=None, witnesses=None, window_inf=None, window_sup=None):
        self.name = name
        self.settings = settings if settings is not None else EnvelopeSettings()
        self.cutoffs = np.asarray(cutoffs, dtype=float)
        self.tail_inf = np.asarray(tail_inf, dtype=float)
        self.tail_sup = np.asarray(tail_sup, dtype=float)
        self.nsamples = nsamples
        self.witnesses = witnesses if witnesses is not None else {}
        self.window_inf = window_inf
        self.window_sup = window_sup
        self._classify()

    def _classify(self):
        s = self.settings
        self.sufficient = self.cutoffs.size >= 3
        self.liminf = self.tail_inf[-1] if self.cutoffs.size else math.nan
        self.limsup = self.tail_sup[-1] if self.cutoffs.size else math.nan
        self.rising = self.falling = False
        self.diverging = None
        if not self.sufficient:
            self.stable = False
            return
        ti, ts = self.tail_inf, self.tail_sup
        if not np.all(np.isfinite(ti[-3:])) or math.isinf(ts[-1]):
            self.diverging = 'up' if ts[-1] > 0 else 'down'
            self.stable = False
            return
        self.rising = ti[-1] - ti[-3] > s.tol(ti[-1])
        self.falling = ts[-3] - ts[-1] > s.tol(ts[-1])
        self.stable = not (self.rising or self.falling)
        if self.rising:
            d1, d2 = ti[-2] - ti[-3], ti[-1] - ti[-2]
            if d2 > s.decel*d1 and d2 > 0.5*s.tol(ti[-1]):
                self.diverging = 'up'
        if self.falling and self.diverging is None:
            d1, d2 = ts[-3] - ts[-2], ts[-2] - ts[-1]
            if d2 > s.decel*d1 and d2 > 0.5*s.tol(ts[-1]):
                self.diverging = 'down'

    @property
    def spread(self):
        return self.tail_sup - self.tail_inf

    def has_limit(self):
        """
        True when liminf and limsup coincide within tolerance or when their
        gap is still closing; None without enough cutoffs.
        """
        if not self.sufficient:
            return None
        if self.diverging is not None:
            return False
        spread = self.spread
        if spread[-1] <= self.settings.limit_tol:
            return True
        return bool(spread[-1] <= self.settings.spread_decay*spread[-3])

    def windows_bounded(self):
        """Boundedness from the window extrema of a log t grid envelope."""
        if self.window_inf is None or len(self.window_inf) < 3:
            return None
        tol = self.settings.window_tol
        wi, ws = np.asarray(self.window_inf), np.asarray(self.window_sup)
        if not (np.all(np.isfinite(wi)) and np.all(np.isfinite(ws))):
            return False
        return bool(abs(wi[-1] - wi[-2]) <= tol and abs(ws[-1] - ws[-2]) <= tol
                    and abs(wi[-2] - wi[-3]) <= 2*tol and abs(ws[-2] - ws[-3]) <= 2*tol)

    def to_json(self, exponentiate=False):
        out = {'name': self.name,
               'cutoffs_log': self.cutoffs,
               'tail_inf': self.tail_inf,
               'tail_sup': self.tail_sup,
               'liminf': self.liminf,
               'limsup': self.limsup,
               'stable': self.stable,
               'diverging': self.diverging,
               'has_limit': self.has_limit(),
               'nsamples': self.nsamples,
               'witnesses': self.witnesses}
        if exponentiate:
            out['exp_liminf'] = exp_clamped(self.liminf)
            out['exp_limsup'] = exp_clamped(self.limsup)
        if self.window_inf is not None:
            out['window_inf'] = self.window_inf
            out['window_sup'] = self.window_sup
        return jsonable(out)

    def view(self):
        PETSc.Sys.Print(f'{self.name}: liminf={self.liminf:.8g} limsup={self.limsup:.8g} '
                        f'stable={self.stable} diverging={self.diverging} '
                        f'cutoffs={self.cutoffs.size} samples={self.nsamples}', comm=mpi.COMM_SELF)


def tail_envelope(name, keys, values, cutoffs, settings=None, indices=None):
    """
    Build the envelope of a stream.

    Parameters
    ==========

    name : str
        Name of the stream.

    keys : array
        Increasing sample positions (log of the index).

    values : array
        Stream values at the samples.

    cutoffs : array
        Candidate cutoffs (same scale as keys); cutoffs with fewer than two
        samples above them are dropped and only the largest
        envelope_ncut are kept.

    indices : list
        The sample indices, used to record where the extrema are attained.

    Returns
    =======

    out : EnvelopeEstimate

    """
    settings = settings if settings is not None else EnvelopeSettings()
    keys = np.asarray(keys, dtype=float)
    values = np.asarray(values, dtype=float)
    order = np.argsort(keys, kind='stable')
    keys, values = keys[order], values[order]
    if indices is not None:
        indices = [indices[i] for i in order]
    n = keys.size
    if n == 0:
        return EnvelopeEstimate(name, [], [], [], 0, settings)
    smin = np.minimum.accumulate(values[::-1])[::-1]
    smax = np.maximum.accumulate(values[::-1])[::-1]
    cutoffs = np.unique(np.asarray(cutoffs, dtype=float))
    pos = np.searchsorted(keys, cutoffs, side='left')
    keep = n - pos >= 2
    cutoffs, pos = cutoffs[keep][-settings.ncut:], pos[keep][-settings.ncut:]
    witnesses = {}
    if indices is not None:
        witnesses = {'argmax': indices[int(np.argmax(values))],
                     'argmin': indices[int(np.argmin(values))]}
    witnesses['max'] = float(np.max(values))
    witnesses['min'] = float(np.min(values))
    return EnvelopeEstimate(name, cutoffs, smin[pos], smax[pos], n, settings, witnesses)


def window_envelope(name, x, values, settings=None):
    """
    Envelope of a function sampled on an increasing log t grid x, with
    extrema over the windows [X/2, X], [X/4, X/2], ... ending at x[-1].
    """
    settings = settings if settings is not None else EnvelopeSettings()
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    bounds = []
    X = x[-1]
    while X/2 >= x[0] and X > 0 and len(bounds) < settings.ncut:
        bounds.append((X/2, X))
        X /= 2
    bounds = bounds[::-1]
    winf, wsup = [], []
    for lo, hi in bounds:
        mask = (x >= lo) & (x <= hi)
        winf.append(float(np.min(values[mask])))
        wsup.append(float(np.max(values[mask])))
    cutoffs = [b[0] for b in bounds]
    env = tail_envelope(name, x, values, cutoffs, settings)
    env.window_inf = winf
    env.window_sup = wsup
    return env


def tail_decay(x, residual, settings=None):
    """
    Decide whether a residual tends to 0 along a log t grid.

    Returns
    =======

    ok : bool
        True when the maximum of |residual| on the last doubling window of
        x is below envelope_limit_tol and not larger than on the previous
        window, or when it shrinks by envelope_decay from one window to
        the next.

    last : float
        Maximum on the last window.

    previous : float
        Maximum on the previous window.

    """
    settings = settings if settings is not None else EnvelopeSettings()
    x = np.asarray(x, dtype=float)
    r = np.abs(np.asarray(residual, dtype=float))
    X = x[-1]
    last = r[(x >= X/2) & (x <= X)]
    prev = r[(x >= X/4) & (x < X/2)]
    if last.size == 0 or prev.size == 0:
        return None, math.nan, math.nan
    lmax, pmax = float(np.max(last)), float(np.max(prev))
    if not (math.isfinite(lmax) and math.isfinite(pmax)):
        return False, lmax, pmax
    ok = lmax < settings.limit_tol or lmax <= settings.decay*pmax
    return bool(ok), lmax, pmax
