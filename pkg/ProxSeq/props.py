# License: BSD 3 clause
"""
Finite horizon checks of logarithmic convexity (lc), moderate growth (mg)
and strong non-quasianalyticity (snq), equivalence of quotient sequences,
almost increase of (p+1)^-gamma m_p and the growth indices omega(M),
gamma(M).
"""
import math
import numpy as np
from petsc4py import PETSc
import mpi4py.MPI as mpi

from .errors import InputError, OutOfReach
from .seqcore import BlockSeq
from .utils import exp_clamped, log_index, log_shift, prefix_sums
from .verdict import (Verdict, PASS, FAIL, INCONCLUSIVE, EnvelopeSettings,
                      tail_envelope)


class PropsSettings(object):
    def __init__(self):
        """
        PETSc.Options
        =============

        props_lc_tol : Real
            Default is 1e-12.
            Relative decrease of consecutive log quotients tolerated by lc.

        props_snq_margin : Real
            Default is 1e-3.
            snq needs liminf m_{kp}/m_p > 1 + props_snq_margin.

        props_snq_horizon : Int
            Default is 100000.
            Smallest enumerable horizon of the tail sum test of snq.

        props_slope_tol : Real
            Default is 0.005.
            A defect growing faster than props_slope_tol times log p over
            the last cutoffs is diverging.

        props_gamma_width : Real
            Default is 0.03.
            Width at which the bisection on gamma stops.

        props_mg_contract : Real
            Default is 0.65.
            A rising tail of m_{2p}/m_p that is not diverging still bounds
            the supremum when its last increment is at most
            props_mg_contract times the previous one; the supremum is then
            extrapolated geometrically. Slower tails are inconclusive.

        props_verbose : Bool
            Default is False.

        """
        OptDB = PETSc.Options()
        self.lc_tol = OptDB.getReal('props_lc_tol', 1e-12)
        self.snq_margin = OptDB.getReal('props_snq_margin', 1e-3)
        self.snq_horizon = OptDB.getInt('props_snq_horizon', 10**5)
        self.slope_tol = OptDB.getReal('props_slope_tol', 0.005)
        self.gamma_width = OptDB.getReal('props_gamma_width', 0.03)
        self.mg_contract = OptDB.getReal('props_mg_contract', 0.65)
        self.verbose = OptDB.getBool('props_verbose', False)


def _horizon(seq, horizon):
    """Bit budget of the schedule and the largest index for a horizon."""
    if horizon is None:
        budget = seq.default_budget()
    else:
        budget = max(16, int(horizon).bit_length())
    top = None if horizon is None else int(horizon)
    if seq.horizon is not None:
        top = seq.horizon if top is None else min(top, seq.horizon)
    return budget, top


def schedule(seq, horizon=None):
    budget, top = _horizon(seq, horizon)
    points = seq.sample_schedule(budget)
    if top is not None:
        points = [p for p in points if p <= top]
    return points


def _cutoff_keys(seq, horizon=None):
    budget, _ = _horizon(seq, horizon)
    return [log_index(c) for c in seq.cutoffs(budget)]


def _safe(f, p):
    try:
        return f(p)
    except OutOfReach:
        return None


def stream(seq, name, f, horizon=None, pmin=1):
    """
    Envelope of the scalar stream f(p) over the schedule, restricted to the
    indices where f can be evaluated.
    """
    keys, values, indices = [], [], []
    for p in schedule(seq, horizon):
        if p < pmin:
            continue
        v = _safe(f, p)
        if v is None:
            continue
        keys.append(log_index(p))
        values.append(v)
        indices.append(p)
    return tail_envelope(name, keys, values, _cutoff_keys(seq, horizon), indices=indices)


def ratio_stream(seq, k, horizon=None):
    """Envelope of log(m_{kp}/m_p)."""
    top = seq.horizon
    def f(p):
        if top is not None and k*p > top:
            raise OutOfReach(k*p)
        return seq.log_quotient_ratio(p, k)
    return stream(seq, f'log_ratio_{k}', f, horizon)


def check_lc(seq, horizon=None):
    """
    Check that the quotients are nondecreasing.

    The enumerable range is checked exhaustively, block families on every
    block boundary of their schedule and the other families on consecutive
    schedule points. The largest jump m_{p+1}/m_p seen is reported.

    Parameters
    ==========

    seq : QuotientSeq
        The sequence.

    horizon : int
        Largest index; the family default when None.

    Returns
    =======

    out : Verdict

    """
    settings = PropsSettings()
    budget, top = _horizon(seq, horizon)
    n = seq.enumerable_limit
    if top is not None:
        n = min(n, top + 1)
    if n < 2:
        return Verdict('lc', INCONCLUSIVE, horizon=top, message='fewer than two quotients')
    lq = seq.log_quotients(n)
    d = np.diff(lq)
    tol = settings.lc_tol*np.maximum(np.abs(lq[1:]), 1.)
    bad = np.nonzero(d < -tol)[0]
    if bad.size:
        p = int(bad[0]) + 1
        return Verdict('lc', FAIL,
                       constants={'log_m_prev': float(lq[p - 1]), 'log_m': float(lq[p])},
                       indices={'violation': p}, horizon=n - 1,
                       message=f'm_{p} < m_{p - 1}')
    jump = float(d.max()) if d.size else 0.
    jump_at = int(np.nonzero(d >= jump*(1 - 1e-12))[0][-1]) if d.size else 0
    checked = n - 1
    if isinstance(seq, BlockSeq):
        values = seq.block_values(budget)
        dv = np.diff(values)
        bad = np.nonzero(dv < -settings.lc_tol*np.maximum(np.abs(values[1:]), 1.))[0]
        if bad.size:
            p = seq.bounds(int(bad[0]) + 1)[0]
            return Verdict('lc', FAIL, indices={'violation': p}, horizon=budget,
                           message='decreasing block values')
        b = int(np.nonzero(dv >= dv.max()*(1 - 1e-12))[0][-1])
        if dv[b] >= jump*(1 - 1e-12):
            jump, jump_at = float(dv[b]), seq.bounds(b)[1] - 1
        checked = seq.bounds(len(values) - 1)[1] - 1
    else:
        points = [p for p in schedule(seq, horizon) if p >= n]
        prev_p, prev = n - 1, float(lq[-1])
        for p in points:
            v = seq.log_quotient(p)
            if v < prev - settings.lc_tol*max(abs(v), 1.):
                return Verdict('lc', FAIL, indices={'violation': p, 'previous': prev_p},
                               horizon=p, message=f'log m decreases between {prev_p} and {p}')
            prev_p, prev = p, v
        if points:
            checked = points[-1]
    return Verdict('lc', PASS,
                   constants={'max_jump': exp_clamped(jump)},
                   indices={'max_jump_at': jump_at},
                   horizon=checked,
                   message='quotients nondecreasing')


def check_mg(seq, horizon=None, criterion='ratio'):
    """
    Check moderate growth.

    criterion 'ratio' bounds sup m_{2p}/m_p, criterion 'beta' bounds
    sup beta_p, i.e. m_p <= A^2 M_p^(1/p) with A = exp(sup beta_p / 2).
    """
    if criterion == 'ratio':
        env = ratio_stream(seq, 2, horizon)
        name, scale = 'mg', 'sup_ratio'
    elif criterion == 'beta':
        env = stream(seq, 'beta', lambda p: seq.alpha_beta(p).beta, horizon)
        name, scale = 'mg_beta', 'sup_beta'
    else:
        raise InputError(f'unknown mg criterion {criterion!r}')
    if not env.sufficient:
        return Verdict(name, INCONCLUSIVE, horizon=env.nsamples, message='not enough cutoffs')
    if env.diverging == 'up':
        return Verdict(name, FAIL,
                       constants={scale: float(env.limsup)},
                       indices={'argmax': env.witnesses.get('argmax')},
                       horizon=env.witnesses.get('argmax'),
                       message='diverging supremum')
    sup = float(env.witnesses['max'])
    extrapolated = False
    if env.rising and env.diverging is None:
        settings = PropsSettings()
        ti = env.tail_inf
        d1, d2 = ti[-2] - ti[-3], ti[-1] - ti[-2]
        if d1 <= 0 or d2 > settings.mg_contract*d1:
            return Verdict(name, INCONCLUSIVE,
                           constants={'increments': [float(d1), float(d2)]},
                           horizon=env.witnesses.get('argmax'),
                           message='lower envelope still rising')
        r = d2/d1
        tail = float(ti[-1] + d2*r/(1 - r))
        extrapolated = tail > sup
        sup = max(sup, tail)
    constants = {scale: exp_clamped(sup) if criterion == 'ratio' else sup,
                 'extrapolated': extrapolated,
                 'limsup': exp_clamped(env.limsup) if criterion == 'ratio' else env.limsup}
    if criterion == 'beta':
        constants['A'] = exp_clamped(sup/2)
    else:
        constants['liminf'] = exp_clamped(env.liminf)
    return Verdict(name, PASS, constants=constants,
                   indices={'argmax': env.witnesses.get('argmax')},
                   horizon=env.witnesses.get('argmax'),
                   message='bounded supremum')


def snq_tail_sums(seq, horizon):
    """
    G(H) = max_{p<=H} m_p sum_{q=p}^{H} 1/((q+1) m_q) at H/4, H/2 and H.
    """
    lq = seq.log_quotients(horizon + 1)
    q = np.arange(horizon + 1, dtype=float)
    w = np.exp(-lq - np.log1p(q))
    c = prefix_sums(w)
    out = []
    for h in (horizon//4, horizon//2, horizon):
        tail = np.maximum(c[h + 1] - c[:h + 1], 0.)
        with np.errstate(divide='ignore'):
            logs = lq[:h + 1] + np.log(tail)
        out.append(exp_clamped(float(np.max(logs))))
    return out


def check_snq(seq, horizon=None, k=None):
    """
    Check strong non-quasianalyticity through liminf m_{kp}/m_p > 1.

    When the ratio stream is still falling the tail sums
    m_p sum_{q>=p} 1/((q+1) m_q) over the enumerable range decide: they
    fail when their growth over the last doublings of the horizon does not
    slow down.
    """
    settings = PropsSettings()
    envs = EnvelopeSettings()
    ks = (2, 4, 8) if k is None else (k,)
    margin = math.log1p(settings.snq_margin)
    tried = {}
    falling = None
    for kk in ks:
        env = ratio_stream(seq, kk, horizon)
        if not env.sufficient:
            tried[kk] = None
            continue
        tried[kk] = exp_clamped(env.liminf)
        if env.tail_inf[-1] > margin and not env.falling:
            return Verdict('snq', PASS,
                           constants={'k': kk, 'liminf': exp_clamped(env.liminf)},
                           indices={'argmin': env.witnesses.get('argmin')},
                           horizon=env.witnesses.get('argmax'),
                           message=f'liminf m_{kk}p/m_p > 1')
        falling = falling or env
    if falling is None:
        return Verdict('snq', INCONCLUSIVE, constants={'liminf': tried},
                       message='not enough cutoffs')
    h = seq.enumerable_limit - 1
    if h < settings.snq_horizon:
        return Verdict('snq', INCONCLUSIVE, constants={'liminf': tried}, horizon=h,
                       message='ratio still falling, horizon too small for the tail sums')
    g = snq_tail_sums(seq, h)
    d1, d2 = g[1] - g[0], g[2] - g[1]
    constants = {'liminf': tried, 'tail_sums': g}
    if d2 > envs.decel*d1 and d2 > envs.tol(g[2]):
        return Verdict('snq', FAIL, constants=constants,
                       indices={'argmin': falling.witnesses.get('argmin')}, horizon=h,
                       message='tail sums keep growing')
    if d2 <= envs.tol(g[2]) or d2 <= envs.decel*d1:
        return Verdict('snq', PASS, constants=constants, horizon=h,
                       message='tail sums bounded')
    return Verdict('snq', INCONCLUSIVE, constants=constants, horizon=h)


def strong_regularity(seq, horizon=None):
    verdicts = [check_lc(seq, horizon), check_mg(seq, horizon), check_snq(seq, horizon)]
    v = Verdict.combine('strongly_regular', verdicts)
    v.constants.update({x.name + '_constants': x.constants for x in verdicts})
    return v


def _joint_schedule(seqA, seqB, horizon):
    pts = set(schedule(seqA, horizon)) | set(schedule(seqB, horizon))
    for s in (seqA, seqB):
        if s.horizon is not None:
            pts = {p for p in pts if p <= s.horizon}
    return sorted(pts)


def check_equiv_quotients(seqA, seqB, horizon=None):
    """
    Check that c <= m_p/l_p <= d for all p, with c, d > 0.

    The bounds of m_p/p (p >= 1) are recorded next to those of m_p/l_p.
    """
    keys, values, over_p, indices = [], [], [], []
    for p in _joint_schedule(seqA, seqB, horizon):
        if p < 1:
            continue
        try:
            v = seqA.log_quotient(p) - seqB.log_quotient(p)
        except OutOfReach:
            continue
        keys.append(log_index(p))
        values.append(v)
        over_p.append(seqA.log_quotient(p) - log_index(p))
        indices.append(p)
    n = min(seqA.enumerable_limit, seqB.enumerable_limit)
    if horizon is not None:
        n = min(n, int(horizon) + 1)
    if n > 1:
        la = seqA.log_quotients(n)
        values.extend((la - seqB.log_quotients(n))[1:].tolist())
        over_p.extend((la[1:] - np.log(np.arange(1, n))).tolist())
    if not values:
        return Verdict('equiv', INCONCLUSIVE, message='no common index')
    constants = {'c': exp_clamped(min(values)), 'd': exp_clamped(max(values)),
                 'c_over_p': exp_clamped(min(over_p)), 'd_over_p': exp_clamped(max(over_p))}
    cuts = sorted(set(_cutoff_keys(seqA, horizon)) | set(_cutoff_keys(seqB, horizon)))
    env = tail_envelope('log_m_ratio', keys, values[:len(keys)], cuts, indices=indices)
    witnesses = {'argmax': env.witnesses.get('argmax'), 'argmin': env.witnesses.get('argmin')}
    if not env.sufficient:
        return Verdict('equiv', INCONCLUSIVE, constants=constants, message='not enough cutoffs')
    if env.diverging is not None:
        return Verdict('equiv', FAIL, constants=constants, indices=witnesses,
                       horizon=indices[-1], message=f'm_p/l_p diverging {env.diverging}')
    if env.stable or env.has_limit():
        return Verdict('equiv', PASS, constants=constants, indices=witnesses,
                       horizon=indices[-1], message='m_p/l_p bounded above and below')
    return Verdict('equiv', INCONCLUSIVE, constants=constants, indices=witnesses,
                   horizon=indices[-1], message='tails still moving')


def _defect_curve(seq, gamma, horizon=None):
    """
    Running defect D(c) = max_{p <= q <= c} (u_p - u_q) with
    u_p = log m_p - gamma log(p+1), at the cutoffs.
    """
    pts = schedule(seq, horizon)
    n = min(seq.enumerable_limit, pts[-1] + 1)
    lq = seq.log_quotients(n)
    far = [p for p in pts if p >= n]
    u = np.concatenate((lq - gamma*np.log1p(np.arange(n, dtype=float)),
                        [seq.log_quotient(p) - gamma*log_shift(p, 1.) for p in far]))
    defect = np.maximum.accumulate(np.maximum.accumulate(u) - u)
    with np.errstate(divide='ignore'):
        keys = np.concatenate((np.log(np.arange(n, dtype=float)), [log_index(p) for p in far]))
    cuts = np.array(_cutoff_keys(seq, horizon))
    pos = np.searchsorted(keys, cuts, side='right') - 1
    ok = (pos >= 0) & (pos < keys.size - 1)
    return cuts[ok], defect[pos[ok]]


def almost_increasing_defect(seq, gamma, horizon=None):
    """
    Smallest C >= 1 with (p+1)^-gamma m_p <= C (q+1)^-gamma m_q for the
    sampled p <= q, or inf when the defect grows like a power of p.

    Parameters
    ==========

    seq : QuotientSeq
        The sequence.

    gamma : float
        Exponent, gamma > 0.

    Returns
    =======

    out : float

    """
    if not gamma > 0:
        raise InputError(f'almost_increasing_defect needs gamma > 0, got {gamma}')
    cuts, d = _defect_curve(seq, gamma, horizon)
    if _diverging_defect(cuts, d):
        return math.inf
    return exp_clamped(float(d[-1])) if d.size else 1.


def _diverging_defect(cuts, d):
    settings = PropsSettings()
    if d.size < 3:
        return False
    slope = (d[-1] - d[-3])/(cuts[-1] - cuts[-3])
    return bool(slope > settings.slope_tol)


def estimate_omega(seq, horizon=None):
    """Envelope of log m_p / log p; its liminf estimates omega(M)."""
    return stream(seq, 'omega', lambda p: seq.log_quotient(p)/log_index(p), horizon, pmin=2)


def estimate_gamma_index(seq, horizon=None, omega_upper=None):
    """
    Bisection on gamma between a bounded and a diverging almost increase
    defect. The sequence must be strongly regular, an InputError names the
    failing properties otherwise.

    Returns
    =======

    lo, hi : float
        gamma(M) lies in [lo, hi]; the lower end is widened by three times
        the slope tolerance of the divergence test.

    status : str
        PASS for a bracket, INCONCLUSIVE when the defect stays bounded up
        to omega_upper + 0.5 (then only the lower end is known).

    """
    settings = PropsSettings()
    sr = strong_regularity(seq, horizon)
    if sr.failed:
        bad = [k for k in ('lc', 'mg', 'snq') if sr.constants.get(k) == FAIL]
        raise InputError(f'estimate_gamma_index needs a strongly regular sequence, '
                         f'{" and ".join(bad)} failed')
    if omega_upper is None:
        env = estimate_omega(seq, horizon)
        omega_upper = env.limsup if env.diverging is None and math.isfinite(env.limsup) else 10.
    lo, hi = 0., float(omega_upper) + 0.5

    def diverges(g):
        cuts, d = _defect_curve(seq, g, horizon)
        return _diverging_defect(cuts, d)

    if not diverges(hi):
        return (hi, math.inf), INCONCLUSIVE
    while hi - lo > settings.gamma_width:
        mid = 0.5*(lo + hi)
        if mid <= 0:
            break
        if diverges(mid):
            hi = mid
        else:
            lo = mid
    if settings.verbose:
        PETSc.Sys.Print(f'gamma index of {seq.name} in [{lo:.4f}, {hi:.4f}]', comm=mpi.COMM_SELF)
    return (max(0., lo - 3*settings.slope_tol), hi), PASS
