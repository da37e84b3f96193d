# License: BSD 3 clause
"""
Sequences built from nonzero proximate orders.

V(t) = t^rho(t) is restricted to the positive axis and spliced below a point
t_0 into the pure power with the tangent exponent A(t_0), so that
phi(x) = V(e^x) is convex and V(0+) = 0. Then
log M_p^V = phi*(p) = sup_x (p x - phi(x)), attained where
V(s) A(s) = p, and l_p = U(p) with U the inverse of V.
"""
import math
import numpy as np
from scipy.optimize import brentq, minimize_scalar
from petsc4py import PETSc
import mpi4py.MPI as mpi

from .errors import InputError, SolverError
from .seqcore import TableSeq, FamilySpec
from .utils import log_grid
from .verdict import Verdict, PASS, FAIL, INCONCLUSIVE, jsonable
from .proxord import make_order, admits


class ConstructSettings(object):
    def __init__(self):
        """
        PETSc.Options
        =============

        construct_xmin : Real
            Default is -20.
            Lower end of the grid in x = log t on which the splice point is
            searched.

        construct_pmax : Int
            Default is 512.
            Number of tabulated terms of M^V and L.

        construct_tol : Real
            Default is 1e-8.
            Relative residual of V(s_p) A(s_p) = p.

        construct_maxiter : Int
            Default is 200.
            Iterations of the root and golden section solvers.

        construct_bic_points : Int
            Default is 64.
            Grid points of the biconjugate check.

        construct_bic_span : Real
            Default is 6.
            Length in x of the grid of the biconjugate check.

        construct_bic_tol : Real
            Default is 1e-6.
            Relative tolerance of the biconjugate identity.

        construct_growth_tol : Real
            Default is 0.25.
            A deviation growing faster than construct_growth_tol log p over
            the last two doublings of p is unbounded.

        construct_verbose : Bool
            Default is False.

        """
        OptDB = PETSc.Options()
        self.xmin = OptDB.getReal('construct_xmin', -20.)
        self.pmax = OptDB.getInt('construct_pmax', 512)
        self.tol = OptDB.getReal('construct_tol', 1e-8)
        self.maxiter = OptDB.getInt('construct_maxiter', 200)
        self.bic_points = OptDB.getInt('construct_bic_points', 64)
        self.bic_span = OptDB.getReal('construct_bic_span', 6.)
        self.bic_tol = OptDB.getReal('construct_bic_tol', 1e-6)
        self.growth_tol = OptDB.getReal('construct_growth_tol', 0.25)
        self.verbose = OptDB.getBool('construct_verbose', False)

    def to_json(self):
        return {'xmin': self.xmin, 'pmax': self.pmax, 'tol': self.tol, 'maxiter': self.maxiter}


class AxisV(object):
    """
    log V on x = log t: rho(x) x for x >= x0 and
    log V(x0) + A(x0) (x - x0) below.

    Parameters
    ==========

    order : ProximateOrder
        A nonzero order.

    settings : ConstructSettings

    """
    def __init__(self, order, settings=None):
        self.settings = settings if settings is not None else ConstructSettings()
        self.order = make_order(order)
        if not self.order.nonzero:
            raise InputError(f'{self.order.name}: the construction needs a nonzero order (rho > 0)')
        s = self.settings
        lo = max(s.xmin, self.order.threshold + 1e-3)
        grid = log_grid(lo, self.order.settings.xmax, self.order.settings.per_decade)
        a = np.asarray(self.order.A(grid), dtype=float)
        da = np.asarray(self.order.dA(grid), dtype=float)
        # phi'' = phi (A^2 + A')
        ok = (a >= 0.5*self.order.rho_inf) & (a*a + da >= 0) & np.isfinite(a) & np.isfinite(da)
        bad = np.nonzero(~ok)[0]
        if bad.size == 0:
            i = 0
        elif bad[-1] + 1 < grid.size:
            i = bad[-1] + 1
        else:
            raise InputError(f'{self.order.name}: no splice point on the grid')
        self.x0 = float(grid[i])
        self.a0 = float(a[i])
        self.logV0 = float(self.order.log_V(self.x0))
        self.grid = grid[i:]
        self.min_convexity = float(np.min(a[i:]*a[i:] + da[i:]))

    def log_V(self, logt):
        logt = float(logt)
        if logt < self.x0:
            return self.logV0 + self.a0*(logt - self.x0)
        return float(self.order.log_V(logt))

    def A(self, logt):
        logt = float(logt)
        if logt < self.x0:
            return self.a0
        return float(self.order.A(logt))

    dlogV = A

    def log_VA(self, logt):
        return self.log_V(logt) + math.log(self.A(logt))

    def log_U(self, logs):
        """Inverse of log V (increasing on the whole axis)."""
        logs = float(logs)
        if logs <= self.logV0:
            return self.x0 + (logs - self.logV0)/self.a0
        return _solve_increasing(lambda t: self.log_V(t) - logs, self.x0, self.settings,
                                 f'U({logs})')

    def to_json(self):
        return jsonable({'order': self.order.to_json(), 'x0': self.x0, 'A0': self.a0,
                         'min_convexity': self.min_convexity})


def make_axis_V(order, settings=None):
    return AxisV(order, settings)


def A_of_s(V, logs):
    """Return A(s) = s V'(s)/V(s)."""
    return V.A(logs)


def _solve_increasing(f, a, settings, what):
    """Root of an increasing f on [a, inf) with f(a) <= 0."""
    b = a + 1.
    it = 0
    while f(b) < 0:
        a, b = b, b + 2*(b - a)
        it += 1
        if it > settings.maxiter:
            raise SolverError(f'no bracket for {what}', bracket=(a, b), iterations=it)
    root, info = brentq(f, a, b, xtol=1e-14, rtol=1e-15, maxiter=settings.maxiter,
                        full_output=True, disp=False)
    if not info.converged:
        raise SolverError(f'{what} did not converge', bracket=(a, b), iterations=info.iterations)
    return root


class SupSolveResult(object):
    """Maximizer s_p (log domain) of p x - V(e^x) and log M_p^V."""
    def __init__(self, p, logs, log_M, iterations, residual, method):
        self.p = p
        self.logs = logs
        self.log_M = log_M
        self.iterations = iterations
        self.residual = residual
        self.method = method

    def to_json(self):
        return jsonable({'p': self.p, 'logs': self.logs, 'log_M': self.log_M,
                         'iterations': self.iterations, 'residual': self.residual,
                         'method': self.method})


def mv_value(V, p):
    """
    Solve V(s) A(s) = p and return log M_p^V = p log s - V(s).

    Parameters
    ==========

    V : AxisV
        The spliced axis.

    p : float
        p >= 0 (integer for sequence terms, real for the Young conjugate).

    Returns
    =======

    out : SupSolveResult

    """
    if p < 0:
        raise InputError(f'mv_value needs p >= 0, got {p}')
    if p == 0:
        return SupSolveResult(0, -math.inf, 0., 0, 0., 'limit')
    s = V.settings
    logp = math.log(p)
    # below the splice V A = exp(logV0 + a0 (x - x0)) a0
    x = V.x0 + (logp - V.logV0 - math.log(V.a0))/V.a0
    method, it = 'splice', 0
    if x > V.x0:
        f = lambda t: V.log_VA(t) - logp
        b = V.x0 + 1.
        while f(b) < 0:
            b = V.x0 + 2*(b - V.x0)
            it += 1
            if it > s.maxiter:
                raise SolverError(f'no bracket for V A = {p}', bracket=(V.x0, b), iterations=it)
        x, info = brentq(f, V.x0, b, xtol=1e-14, rtol=1e-15, maxiter=s.maxiter,
                         full_output=True, disp=False)
        it += info.iterations
        method = 'brentq'
    resid = abs(math.exp(V.log_VA(x)) - p)
    if resid > s.tol*max(1., p):
        g = lambda t: math.exp(V.log_V(t)) - p*t
        res = minimize_scalar(g, bracket=(x - 1., x, x + 1.), method='golden',
                              options={'maxiter': s.maxiter})
        x = float(res.x)
        it += int(res.nit)
        method = 'golden'
        resid = abs(math.exp(V.log_VA(x)) - p)
        if resid > s.tol*max(1., p) and not res.success:
            raise SolverError(f'sup of p x - V for p = {p} did not converge',
                              bracket=(x - 1., x + 1.), iterations=it)
    return SupSolveResult(p, x, p*x - math.exp(V.log_V(x)), it, resid, method)


def young_conjugate(V, y):
    """
    phi*_V(y) = sup_x (x y - V(e^x)); inf for y < 0 and 0 at y = 0.
    """
    if y < 0:
        return math.inf
    return mv_value(V, float(y)).log_M


def lateral_check(V, result):
    """g_p(s_p (1 +- 1e-3)) >= g_p(s_p) with g_p(x) = V(e^x) - p x."""
    p, x = result.p, result.logs
    if p == 0:
        return Verdict('lateral', PASS, message='p = 0')
    g = lambda t: math.exp(V.log_V(t)) - p*t
    g0 = g(x)
    worst = min(g(x + math.log1p(1e-3)), g(x + math.log1p(-1e-3))) - g0
    slack = 1e-12*max(1., abs(g0))
    if worst >= -slack:
        return Verdict('lateral', PASS, constants={'margin': worst}, indices={'p': p})
    return Verdict('lateral', FAIL, constants={'margin': worst}, indices={'p': p},
                   message='s_p is not a minimum of g_p')


def biconjugate_check(V, grid=None):
    """
    Check sup_y (x y - phi*(y)) = V(e^x) on a grid: the maximizer y solves
    s(y) = x and is bracketed by V(e^x) A(e^x) [1/2, 2].
    """
    s = V.settings
    if grid is None:
        a = max(V.x0, -2.)
        grid = np.linspace(a, a + s.bic_span, s.bic_points)
    worst, worst_x = 0., None
    for x in grid:
        x = float(x)
        y0 = math.exp(V.log_VA(x))
        f = lambda y: mv_value(V, y).logs - x
        lo, hi = 0.5*y0, 2.*y0
        it = 0
        while f(lo) > 0:
            lo *= 0.5
            it += 1
        while f(hi) < 0:
            hi *= 2.
            it += 1
            if it > s.maxiter:
                raise SolverError(f'no bracket for the biconjugate at x = {x}', bracket=(lo, hi),
                                  iterations=it)
        y = brentq(f, lo, hi, xtol=1e-14*y0, rtol=1e-15, maxiter=s.maxiter)
        phi = math.exp(V.log_V(x))
        value = x*y - young_conjugate(V, y)
        err = abs(value - phi)/max(1., abs(phi))
        if err > worst:
            worst, worst_x = err, x
    constants = {'max_error': worst, 'points': len(grid)}
    if worst <= s.bic_tol:
        return Verdict('biconjugate', PASS, constants=constants, indices={'worst_x': worst_x},
                       message='(phi*)* = phi')
    return Verdict('biconjugate', FAIL, constants=constants, indices={'worst_x': worst_x},
                   message='biconjugate differs from V')


class ConstructedSeq(TableSeq):
    """
    A tabulated sequence built from a proximate order, with its provenance.
    """
    def __init__(self, log_quotients, provenance, kind='mv', log_M=None, results=None):
        super(ConstructedSeq, self).__init__(log_quotients)
        self.kind = kind
        self.provenance = provenance
        self.results = results if results is not None else []
        if log_M is not None:
            self.prefix = np.asarray(log_M, dtype=float)
        self._spec = FamilySpec('constructed', order=provenance['order'],
                                pmax=provenance['pmax'], kind=kind)

    @property
    def maximizers(self):
        return np.array([r.logs for r in self.results[1:]])

    def table(self):
        import pandas as pd
        p = np.arange(self.values.size + 1)
        out = pd.DataFrame({'p': p, 'log_M': self.prefix})
        if self.results:
            out['logs'] = [r.logs for r in self.results]
        return out


def build_mv_sequence(V, pmax=None):
    """
    Tabulate log M_p^V for p <= pmax.

    Returns
    =======

    out : ConstructedSeq
        Quotients log M_{p+1}^V - log M_p^V, p < pmax.

    """
    s = V.settings
    pmax = s.pmax if pmax is None else int(pmax)
    if pmax < 16:
        raise InputError(f'build_mv_sequence needs pmax >= 16, got {pmax}')
    results = [mv_value(V, p) for p in range(pmax + 1)]
    log_M = np.array([r.log_M for r in results])
    provenance = {'order': V.order.to_json(), 'pmax': pmax, 'axis': V.to_json(),
                  'solver': s.to_json()}
    if s.verbose:
        methods = {r.method for r in results}
        PETSc.Sys.Print(f'M^V of {V.order.name}: {pmax + 1} terms, solvers {sorted(methods)}',
                        comm=mpi.COMM_SELF)
    return ConstructedSeq(np.diff(log_M), provenance, 'mv', log_M, results)


def build_l_sequence(order, pmax=None, V=None):
    """The sequence with quotients l_0 = U(1), l_p = U(p)."""
    V = AxisV(order) if V is None else V
    s = V.settings
    pmax = s.pmax if pmax is None else int(pmax)
    if pmax < 16:
        raise InputError(f'build_l_sequence needs pmax >= 16, got {pmax}')
    lq = np.array([V.log_U(math.log(max(p, 1))) for p in range(pmax)])
    provenance = {'order': V.order.to_json(), 'pmax': pmax, 'axis': V.to_json(),
                  'solver': s.to_json()}
    return ConstructedSeq(lq, provenance, 'l')


def constructed_from_spec(spec, settings=None):
    """Build the sequence of a 'constructed' family spec."""
    q = spec.params
    V = AxisV(make_order(q['order']), settings)
    pmax = q.get('pmax')
    if q.get('kind', 'mv') == 'l':
        return build_l_sequence(V.order, pmax, V)
    return build_mv_sequence(V, pmax)


def mv_checks(V, seq):
    """
    Verdicts on the solved terms: residuals, increasing maximizers, lateral
    minimality and log convexity of M^V.
    """
    s = V.settings
    res = seq.results
    worst = max(r.residual/max(1., r.p) for r in res)
    out = [Verdict('residual', PASS if worst <= s.tol else FAIL,
                   constants={'max_relative_residual': worst})]
    xs = seq.maximizers
    d = np.diff(xs)
    if np.all(d > 0):
        out.append(Verdict('maximizers', PASS, constants={'min_step': float(d.min())}))
    else:
        p = int(np.argmin(d > 0)) + 2
        out.append(Verdict('maximizers', FAIL, indices={'p': p},
                           message='s_p is not increasing'))
    lateral = [lateral_check(V, r) for r in res]
    bad = [v for v in lateral if v.failed]
    out.append(bad[0] if bad else Verdict('lateral', PASS, constants={'points': len(lateral)}))
    logM = seq.prefix
    second = logM[:-2] + logM[2:] - 2*logM[1:-1]
    i = int(np.argmin(second))
    status = PASS if second[i] >= -1e-8 else FAIL
    out.append(Verdict('mv_lc', status, constants={'min_second_difference': float(second[i])},
                       indices={'p': i + 1}))
    return out


def u_sandwich(V, seq):
    """
    (1/B)^p U(p)^p <= M_p^V <= B^p U(p)^p: log B is the largest
    |log M_p^V / p - log U(p)|, which must not keep growing with p.
    """
    n = seq.values.size
    ps = np.arange(1, n + 1)
    dev = np.array([seq.prefix[p]/p - V.log_U(math.log(p)) for p in ps])
    log_B = float(np.max(np.abs(dev)))
    constants = {'B': math.exp(log_B), 'log_B': log_B}
    if _growing(ps, np.abs(dev), V.settings.growth_tol):
        return Verdict('u_sandwich', FAIL, constants=constants, message='log M_p/p - log U(p) grows')
    return Verdict('u_sandwich', PASS, constants=constants, horizon=int(n))


def _growing(ps, values, tol):
    """Running max of values increases by more than tol log 2 over both last doublings of p."""
    top = int(ps[-1])
    if top < 8:
        return False
    run = np.maximum.accumulate(values)
    at = lambda q: run[np.searchsorted(ps, q, side='right') - 1]
    d1 = at(top//2) - at(top//4)
    d2 = at(top) - at(top//2)
    return bool(d1 > tol*math.log(2.) and d2 > tol*math.log(2.))


def vm_sandwich(V, seq, grid=None):
    """
    1 <= V(t)/M(t) <= nu(t)/(nu(t) - 1) for m_1 < t below the last tabulated
    quotient, and V/M -> 1 at the end of the grid.
    """
    from .assoc import assoc_eval
    lq = seq.values
    if grid is None:
        grid = log_grid(lq[1] + 1e-9, lq[-1] - 1e-9, 64)
    worst_low, worst_high, last = 0., 0., math.nan
    at = None
    for x in grid:
        e = assoc_eval(seq, float(x))
        if e.nu < 2 or not math.isfinite(e.log_M):
            continue
        r = V.log_V(float(x)) - e.log_M
        upper = math.log(e.nu/(e.nu - 1))
        worst_low = min(worst_low, r)
        if r - upper > worst_high:
            worst_high, at = r - upper, float(x)
        last = r
    constants = {'min_log_ratio': worst_low, 'max_excess': worst_high,
                 'end_ratio': math.exp(last) if math.isfinite(last) else math.nan}
    if not math.isfinite(last):
        return Verdict('vm_sandwich', INCONCLUSIVE, constants=constants, message='empty grid')
    if worst_low < -1e-8 or worst_high > 1e-8:
        return Verdict('vm_sandwich', FAIL, constants=constants, indices={'logt': at},
                       message='V/M outside [1, nu/(nu-1)]')
    if abs(math.exp(last) - 1) > 1e-2:
        return Verdict('vm_sandwich', FAIL, constants=constants,
                       message='V/M does not tend to 1')
    return Verdict('vm_sandwich', PASS, constants=constants, horizon=float(grid[-1]))


class ClosureReport(object):
    """Stages of the admissibility closure check, stopping at the first failure."""
    def __init__(self, seq_name, order_name, stages):
        self.seq_name = seq_name
        self.order_name = order_name
        self.stages = stages

    @property
    def verdict(self):
        return Verdict.combine('closure', self.stages,
                               message=' -> '.join(f'{v.name}:{v.status}' for v in self.stages))

    @property
    def short_circuit(self):
        return len(self.stages) < 3

    def to_json(self):
        return jsonable({'seq': self.seq_name, 'order': self.order_name,
                         'short_circuit': self.short_circuit,
                         'stages': [v.to_json() for v in self.stages],
                         'status': self.verdict.status})

    def view(self):
        if mpi.COMM_WORLD.rank == 0:
            PETSc.Sys.Print(f'closure of {self.seq_name} under {self.order_name}:',
                            comm=mpi.COMM_SELF)
            for v in self.stages:
                PETSc.Sys.Print(f'    {v.name:<16s} {v.status:<12s} {v.message}',
                                comm=mpi.COMM_SELF)


def admissibility_closure_check(seq, order, pmax=None):
    """
    admits(seq, order), then (M_p / M_p^V)^(1/p) bounded, then regular
    variation of l_p = U(p) with index 1/rho.

    Returns
    =======

    out : ClosureReport

    """
    from .regvar import regvar_index_test
    order = make_order(order)
    stages = []
    adm = admits(seq, order)
    stages.append(adm.verdict)
    if not adm.passed:
        return ClosureReport(seq.name, order.name, stages)
    if not order.nonzero:
        stages.append(Verdict('equivalent_mv', INCONCLUSIVE,
                              message='M^V is built from nonzero orders only'))
        return ClosureReport(seq.name, order.name, stages)
    V = AxisV(order)
    mv = build_mv_sequence(V, pmax)
    n = mv.values.size
    if seq.horizon is not None:
        n = min(n, seq.horizon + 1)
    ps = np.arange(1, n + 1)
    r = np.array([(seq.log_value(int(p)) - mv.prefix[p])/p for p in ps])
    constants = {'min': float(r.min()), 'max': float(r.max())}
    if _growing(ps, np.abs(r), V.settings.growth_tol):
        stages.append(Verdict('equivalent_mv', FAIL, constants=constants,
                              message='(M_p/M_p^V)^(1/p) unbounded'))
        return ClosureReport(seq.name, order.name, stages)
    stages.append(Verdict('equivalent_mv', PASS, constants=constants,
                          message='(M_p/M_p^V)^(1/p) bounded'))
    L = build_l_sequence(order, pmax, V)
    report = regvar_index_test(L)
    status = PASS if report.passed else (FAIL if FAIL in (report.b.status, report.d.status)
                                         else INCONCLUSIVE)
    stages.append(Verdict('l_regvar', status,
                          constants={'omega': report.omega, 'expected': 1./order.rho_inf},
                          message='l_p = U(p) regularly varying'))
    return ClosureReport(seq.name, order.name, stages)
