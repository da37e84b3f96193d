# License: BSD 3 clause
"""
Proximate orders rho(r) evaluated on x = log r.

Builtin orders are sympy expressions in x; rho, d rho/dx and d^2 rho/dx^2
are lambdified to numpy. With d/dx = r d/dr, condition (D)
r rho'(r) log r -> 0 reads x rho_x(x) -> 0.
"""
import os
import math
import json
import numpy as np
import sympy
from scipy.optimize import brentq
from petsc4py import PETSc
import mpi4py.MPI as mpi

from .errors import InputError, SolverError, OutOfReach
from .utils import log_grid
from .assoc import assoc_grid, assoc_eval
from .verdict import (Verdict, PASS, FAIL, INCONCLUSIVE, jsonable,
                      window_envelope, tail_decay)

x = sympy.Symbol('x', real=True)

ORDERS = {'const': ('rho',),
          'rho_alpha_beta': ('alpha', 'beta'),
          'power_decay': ('rho', 'gamma'),
          'log_decay': ('rho', 'gamma'),
          'sin_counterexample': ('rho',),
          'expr': ('expr', 'rho_inf')}

# lower end of the x axis of orders defined for every r > 0
X_MIN = -50.


class OrderSettings(object):
    def __init__(self):
        """
        PETSc.Options
        =============

        proxord_xmax : Real
            Default is 400.
            Upper end of the default grid in x = log r.

        proxord_per_decade : Int
            Default is 64.
            Grid points per decade of r.

        proxord_min_decades : Real
            Default is 6.
            Smallest span (decades of r) of a validation grid.

        proxord_fd_step : Real
            Default is 1e-5.
            Central difference step in x for orders given by a function.

        proxord_verbose : Bool
            Default is False.

        """
        OptDB = PETSc.Options()
        self.xmax = OptDB.getReal('proxord_xmax', 400.)
        self.per_decade = OptDB.getInt('proxord_per_decade', 64)
        self.min_decades = OptDB.getReal('proxord_min_decades', 6.)
        self.fd_step = OptDB.getReal('proxord_fd_step', 1e-5)
        self.verbose = OptDB.getBool('proxord_verbose', False)


def _numeric(expr):
    """Lambdify an expression of x and broadcast constants to the argument shape."""
    f = sympy.lambdify(x, expr, 'numpy')

    def wrapped(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all='ignore'):
            out = np.asarray(f(t), dtype=float)
        out = np.broadcast_to(out, t.shape).copy()
        return out if out.ndim else float(out)
    return wrapped


class ProximateOrder(object):
    """
    A proximate order rho(r) on x = log r > threshold with declared limit
    rho_inf.

    Parameters
    ==========

    name : str
        Family name.

    params : dict
        Parameters of the family (json).

    rho : sympy expression or callable
        rho as a function of x.

    rho_inf : float
        Declared limit of rho.

    threshold : float
        rho is evaluated for x > threshold.

    """
    def __init__(self, name, params, rho, rho_inf, threshold=X_MIN, settings=None):
        self.settings = settings if settings is not None else OrderSettings()
        self.name = name
        self.params = dict(params)
        self.rho_inf = float(rho_inf)
        self.threshold = float(threshold)
        if rho_inf < 0:
            raise InputError(f'{name}: the limit of a proximate order is >= 0, got {rho_inf}')
        if isinstance(rho, sympy.Expr):
            self.expr = rho
            self.rho = _numeric(rho)
            self.drho = _numeric(sympy.diff(rho, x))
            self.d2rho = _numeric(sympy.diff(rho, x, 2))
        else:
            self.expr = None
            self.rho = rho
            h = self.settings.fd_step
            self.drho = lambda t: (rho(np.asarray(t) + h) - rho(np.asarray(t) - h))/(2*h)
            self.d2rho = lambda t: (rho(np.asarray(t) + h) - 2*rho(np.asarray(t))
                                    + rho(np.asarray(t) - h))/h**2
        self._tail = None

    @classmethod
    def from_function(cls, f, rho_inf, threshold=X_MIN, name='function'):
        """Order given by a python function of x; derivatives by central differences."""
        return cls(name, {}, lambda t: np.asarray(f(t), dtype=float), rho_inf, threshold)

    @classmethod
    def from_json(cls, data):
        return make_order(data)

    def to_json(self):
        out = {'order': self.name}
        out.update(self.params)
        return jsonable(out)

    @property
    def nonzero(self):
        return self.rho_inf > 0

    def _check(self, logt):
        t = np.asarray(logt, dtype=float)
        if np.any(t <= self.threshold):
            raise InputError(f'{self.name} is defined for log r > {self.threshold}, got {logt}')

    def log_V(self, logt):
        """Return log V(r) = rho(r) log r."""
        self._check(logt)
        return self.rho(logt)*np.asarray(logt, dtype=float) if np.ndim(logt) \
            else self.rho(logt)*float(logt)

    def A(self, logt):
        """Return d log V / d log r = rho + x rho_x."""
        return self.rho(logt) + np.asarray(logt, dtype=float)*self.drho(logt)

    def dA(self, logt):
        return 2*self.drho(logt) + np.asarray(logt, dtype=float)*self.d2rho(logt)

    def d_residual(self, logt):
        """Return r rho'(r) log r = x rho_x."""
        return np.asarray(logt, dtype=float)*self.drho(logt)

    def default_grid(self, xmax=None):
        s = self.settings
        xmax = s.xmax if xmax is None else xmax
        return log_grid(max(1., self.threshold + 1.), xmax, s.per_decade)

    def samples(self, grid):
        """Grid abscissae, rho and the residual of (D) on a grid of x."""
        grid = np.asarray(grid, dtype=float)
        return grid, np.asarray(self.rho(grid), dtype=float), np.asarray(self.d_residual(grid), dtype=float)

    def tail_start(self):
        """Smallest x of the default grid beyond which V is increasing."""
        if self._tail is None:
            # log V is only defined above the threshold
            lo = max(self.threshold, X_MIN) + 1e-3
            grid = log_grid(lo, self.settings.xmax, self.settings.per_decade)
            a = np.asarray(self.A(grid), dtype=float)
            bad = np.nonzero(~(a > 0))[0]
            if bad.size == 0:
                self._tail = float(grid[0])
            elif bad[-1] + 1 < grid.size:
                self._tail = float(grid[bad[-1] + 1])
            else:
                raise InputError(f'{self.name}: V is not increasing on the grid')
        return self._tail

    def view(self):
        if mpi.COMM_WORLD.rank == 0:
            PETSc.Sys.Print(f'{self.name} {self.params}: rho_inf={self.rho_inf} threshold={self.threshold}',
                            comm=mpi.COMM_SELF)

    def __repr__(self):
        return f'ProximateOrder({self.name!r}, {self.params})'


def _positive(name, value, what):
    if not value > 0:
        raise InputError(f'{name} needs {what} > 0, got {value}')


def _nonnegative(name, value, what):
    if not value >= 0:
        raise InputError(f'{name} needs {what} >= 0, got {value}')


def make_order(spec):
    """
    Build a builtin order from its json spec.

    Parameters
    ==========

    spec : dict, str or ProximateOrder
        {"order": "const", "rho": 0.5},
        {"order": "rho_alpha_beta", "alpha": 1.0, "beta": 2.0},
        {"order": "power_decay", "rho": 1.0, "gamma": 1.0},
        {"order": "log_decay", "rho": 1.0, "gamma": 1.0},
        {"order": "sin_counterexample", "rho": 1.0} or
        {"order": "expr", "expr": "1 + 1/x", "rho_inf": 1.0, "threshold": 0.0};
        strings are parsed by parse_order.

    Returns
    =======

    out : ProximateOrder

    """
    if isinstance(spec, ProximateOrder):
        return spec
    if isinstance(spec, str):
        return parse_order(spec)
    if not isinstance(spec, dict) or 'order' not in spec:
        raise InputError(f'an order spec is a dict with an "order" key, got {spec!r}')
    name = spec['order']
    if name not in ORDERS:
        raise InputError(f'unknown order {name!r}, expected one of {sorted(ORDERS)}')
    missing = [k for k in ORDERS[name] if k not in spec]
    if missing:
        raise InputError(f'order {name} needs the parameters {missing}')
    if name == 'expr':
        try:
            expr = sympy.sympify(spec['expr'], locals={'x': x})
        except (sympy.SympifyError, TypeError) as err:
            raise InputError(f'cannot parse the order expression {spec["expr"]!r}: {err}')
        if expr.free_symbols - {x}:
            raise InputError(f'the order expression may only depend on x, got {expr}')
        return ProximateOrder('expr', {'expr': str(spec['expr']), 'rho_inf': float(spec['rho_inf']),
                                       'threshold': float(spec.get('threshold', 0.))},
                              expr, float(spec['rho_inf']), float(spec.get('threshold', 0.)))
    q = {k: float(spec[k]) for k in ORDERS[name]}
    if name == 'const':
        _nonnegative(name, q['rho'], 'rho')
        return ProximateOrder(name, q, sympy.Float(q['rho']) + 0*x, q['rho'])
    if name == 'rho_alpha_beta':
        _positive(name, q['alpha'], 'alpha')
        a, b = sympy.Float(q['alpha']), sympy.Float(q['beta'])
        return ProximateOrder(name, q, 1/a - (b/a)*sympy.log(x)/x, 1/q['alpha'], threshold=1.)
    if name == 'power_decay':
        _nonnegative(name, q['rho'], 'rho')
        _positive(name, q['gamma'], 'gamma')
        return ProximateOrder(name, q, q['rho'] + sympy.exp(-q['gamma']*x), q['rho'])
    if name == 'log_decay':
        _nonnegative(name, q['rho'], 'rho')
        _positive(name, q['gamma'], 'gamma')
        return ProximateOrder(name, q, q['rho'] + x**(-sympy.Float(q['gamma'])), q['rho'],
                              threshold=0.)
    _nonnegative(name, q['rho'], 'rho')
    return ProximateOrder(name, q, q['rho'] + sympy.sin(sympy.exp(x))*sympy.exp(-x), q['rho'])


def parse_order(text):
    """
    Parse an order given as a dict, a json string, a .json file or the
    short form name:p1:p2 (const:0.5, rho_alpha_beta:1:2, ...).
    """
    if isinstance(text, (dict, ProximateOrder)):
        return make_order(text)
    text = text.strip()
    if text.endswith('.json') and os.path.exists(text):
        with open(text) as f:
            return make_order(json.load(f))
    if text.startswith('{'):
        try:
            return make_order(json.loads(text))
        except json.JSONDecodeError as err:
            raise InputError(f'invalid order json: {err}')
    name, *values = text.split(':')
    if name not in ORDERS or name == 'expr':
        raise InputError(f'unknown order {name!r} in {text!r}')
    keys = ORDERS[name]
    if len(values) != len(keys):
        raise InputError(f'order {name} takes {len(keys)} parameters {keys}, got {text!r}')
    try:
        return make_order(dict(order=name, **{k: float(v) for k, v in zip(keys, values)}))
    except ValueError as err:
        raise InputError(f'invalid parameter in {text!r}: {err}')


class OrderValidation(object):
    """Residual tails and verdicts of conditions (A)-(D)."""
    def __init__(self, name, x, rho, c_residual, d_residual, verdicts, kind):
        self.name = name
        self.x = x
        self.rho = rho
        self.c_residual = c_residual
        self.d_residual = d_residual
        self.verdicts = verdicts
        self.kind = kind

    @property
    def passed(self):
        return all(v.passed for v in self.verdicts.values())

    @property
    def verdict(self):
        v = Verdict.combine('proximate_order', list(self.verdicts.values()), message=self.kind)
        v.constants['kind'] = self.kind
        return v

    def to_json(self):
        return jsonable({'name': self.name, 'kind': self.kind,
                         'verdicts': {k: v.to_json() for k, v in self.verdicts.items()},
                         'c_tail': float(np.max(np.abs(self.c_residual[self.x >= self.x[-1]/2]))),
                         'd_tail': float(np.max(np.abs(self.d_residual[self.x >= self.x[-1]/2])))})

    def view(self):
        if mpi.COMM_WORLD.rank == 0:
            PETSc.Sys.Print(f'{self.name} ({self.kind} proximate order)', comm=mpi.COMM_SELF)
            for k, v in sorted(self.verdicts.items()):
                PETSc.Sys.Print(f'    ({k}) {v.status:<12s} {v.message}', comm=mpi.COMM_SELF)


def _tail_verdict(name, x, residual):
    ok, last, prev = tail_decay(x, residual)
    constants = {'last_window_max': last, 'previous_window_max': prev}
    if ok is None:
        return Verdict(name, INCONCLUSIVE, constants=constants, message='grid too short')
    tail = x >= x[-1]/2
    worst = float(x[tail][np.argmax(np.abs(residual[tail]))])
    if ok:
        return Verdict(name, PASS, constants=constants, indices={'worst_x': worst},
                       horizon=float(x[-1]), message='residual tends to 0')
    return Verdict(name, FAIL, constants=constants, indices={'worst_x': worst},
                   horizon=float(x[-1]), message='residual does not tend to 0')


def validate_order(order, grid=None):
    """
    Check conditions (A)-(D) of a proximate order on a grid of x = log r.

    (A) finiteness of rho and of its derivative, (B) rho >= 0, (C)
    rho -> rho_inf and (D) x rho_x -> 0, the last two through the decay of
    their residuals over the last doublings of the grid.

    Returns
    =======

    out : OrderValidation

    """
    settings = OrderSettings()
    grid = order.default_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.size < 2 or grid[-1] - grid[0] < settings.min_decades*math.log(10.):
        raise InputError(f'a validation grid spans at least {settings.min_decades} decades of r')
    xs, rho, dres = order.samples(grid)
    verdicts = {}
    finite = np.isfinite(rho) & np.isfinite(dres)
    if finite.all():
        verdicts['A'] = Verdict('A', PASS, message='finite on the grid')
    else:
        verdicts['A'] = Verdict('A', FAIL, indices={'x': float(xs[np.argmin(finite)])},
                                message='not finite')
    neg = np.nonzero(rho < 0)[0]
    if neg.size:
        verdicts['B'] = Verdict('B', FAIL, indices={'x': float(xs[neg[0]])},
                                constants={'rho': float(rho[neg[0]])}, message='rho < 0')
    else:
        verdicts['B'] = Verdict('B', PASS, constants={'min_rho': float(rho.min())},
                                message='rho >= 0')
    c_res = rho - order.rho_inf
    verdicts['C'] = _tail_verdict('C', xs, np.where(finite, c_res, np.inf))
    verdicts['D'] = _tail_verdict('D', xs, np.where(finite, dres, np.inf))
    kind = 'nonzero' if order.nonzero else 'zero'
    out = OrderValidation(order.name, xs, rho, c_res, dres, verdicts, kind)
    if settings.verbose:
        out.view()
    return out


def V_of(order, logt):
    """Return log V(t) = rho(t) log t."""
    return order.log_V(logt)


def U_of(order, logs):
    """
    Return log U(s), U the inverse of V on its increasing tail.

    Parameters
    ==========

    order : ProximateOrder
        A nonzero order.

    logs : float
        log s, in the range of log V on the tail.

    Returns
    =======

    out : float

    """
    if not order.nonzero:
        raise InputError(f'{order.name}: U is defined for nonzero orders')
    logs = float(logs)
    a = order.tail_start()
    f = lambda t: order.log_V(t) - logs
    fa = f(a)
    if fa > 0:
        raise OutOfReach(f'{order.name}: log s = {logs} is below log V = {fa + logs} '
                         f'at the start x = {a} of the increasing tail')
    b = max(2*abs(a), 1.)
    it = 0
    while f(b) < 0:
        a, b = b, 2*b
        it += 1
        if it > 60:
            raise SolverError(f'{order.name}: no bracket for log s = {logs}', bracket=(a, b),
                              iterations=it)
    root, info = brentq(f, a, b, xtol=1e-13, rtol=1e-14, maxiter=200, full_output=True)
    if not info.converged:
        raise SolverError(f'{order.name}: U did not converge', bracket=(a, b),
                          iterations=info.iterations)
    if not order.A(root) > 0:
        raise InputError(f'{order.name}: V is not increasing near log s = {logs} (x = {root})')
    return root


class ConjugateOrder(ProximateOrder):
    """
    rho*(s) = log U(s) / log s, evaluated parametrically: for x on the tail of
    the base order, y = log V(x) and rho* = x / y, with condition (D)
    residual 1/A(x) - x/y.
    """
    def __init__(self, base):
        if not base.nonzero:
            raise InputError(f'{base.name}: only nonzero orders have a conjugate')
        self.base = base
        super(ConjugateOrder, self).__init__(f'conjugate({base.name})', {'base': base.to_json()},
                                             self._rho, 1./base.rho_inf,
                                             threshold=0., settings=base.settings)

    def _rho(self, logs):
        logs = np.asarray(logs, dtype=float)
        if logs.ndim == 0:
            return U_of(self.base, float(logs))/float(logs)
        return np.array([U_of(self.base, s)/s for s in logs])

    def default_grid(self, xmax=None):
        return self.base.default_grid(xmax)

    def samples(self, grid):
        """grid holds x = log r of the base order; returns y = log V(x)."""
        xb = np.asarray(grid, dtype=float)
        xb = xb[xb >= self.base.tail_start()]
        y = np.asarray(self.base.log_V(xb), dtype=float)
        keep = y > 0
        xb, y = xb[keep], y[keep]
        a = np.asarray(self.base.A(xb), dtype=float)
        return y, xb/y, 1./a - xb/y


def conjugate_order(order):
    return ConjugateOrder(make_order(order))


def orders_equivalent(o1, o2, grid=None):
    """Verdict on (rho_1 - rho_2) log r -> 0 along the grid."""
    o1, o2 = make_order(o1), make_order(o2)
    if grid is None:
        lo = max(1., o1.threshold + 1., o2.threshold + 1.)
        grid = log_grid(lo, o1.settings.xmax, o1.settings.per_decade)
    grid = np.asarray(grid, dtype=float)
    res = (np.asarray(o1.rho(grid), dtype=float) - np.asarray(o2.rho(grid), dtype=float))*grid
    v = _tail_verdict('orders_equivalent', grid, res)
    v.constants['zero_nonzero_match'] = o1.nonzero == o2.nonzero
    if v.passed and o1.nonzero != o2.nonzero:
        v.status = FAIL
        v.message = 'one order is zero, the other is not'
    return v


class DMOrder(ProximateOrder):
    """
    d_M(t) = log M(t)/log t as a candidate proximate order; the residual of
    condition (D) is nu(t)/M(t) - d_M(t), the right derivative expression.
    """
    def __init__(self, seq, grid=None):
        self.seq = seq
        table = assoc_grid(seq, grid)
        table = table[np.isfinite(table['d'])]
        if len(table) < 8:
            raise InputError(f'{seq.name}: d_M is not defined on enough grid points')
        self.table = table
        self._x = table['logt'].to_numpy()
        self._d = table['d'].to_numpy()
        self._res = table['residual'].to_numpy()
        super(DMOrder, self).__init__(f'd_M({seq.name})', {'seq': seq.spec.to_json()},
                                      self._interp, max(0., float(self._d[-1])),
                                      threshold=float(self._x[0]) - 1e-12)

    def _interp(self, logt):
        return np.interp(logt, self._x, self._d)

    def default_grid(self, xmax=None):
        return self._x

    def samples(self, grid):
        grid = np.asarray(grid, dtype=float)
        if np.array_equal(grid, self._x):
            return self._x, self._d, self._res
        rows = [assoc_eval(self.seq, t) for t in grid]
        return (grid, np.array([r.d for r in rows]), np.array([r.residual for r in rows]))


def dM_order(seq, grid=None):
    return DMOrder(seq, grid)


class AdmissibilityReport(object):
    """Envelope of log(t)(rho(t) - d_M(t)) = log V(t) - log M(t)."""
    def __init__(self, seq_name, order_name, envelope, bounds, verdict):
        self.seq_name = seq_name
        self.order_name = order_name
        self.envelope = envelope
        self.A, self.B = bounds
        self.verdict = verdict

    @property
    def passed(self):
        return self.verdict.passed

    def to_json(self):
        return jsonable({'seq': self.seq_name, 'order': self.order_name, 'A': self.A,
                         'B': self.B, 'verdict': self.verdict.to_json(),
                         'envelope': self.envelope.to_json()})

    def view(self):
        if mpi.COMM_WORLD.rank == 0:
            PETSc.Sys.Print(f'{self.seq_name} admits {self.order_name}: {self.verdict.status} '
                            f'A={self.A:.6g} B={self.B:.6g}', comm=mpi.COMM_SELF)


def admits(seq, order, grid=None):
    """
    Decide whether A <= log(t)(rho(t) - d_M(t)) <= B on the grid.

    Returns
    =======

    out : AdmissibilityReport

    """
    order = make_order(order)
    if grid is None:
        grid = order.default_grid()
    grid = np.asarray(grid, dtype=float)
    grid = grid[grid > order.threshold]
    table = assoc_grid(seq, grid)
    table = table[np.isfinite(table['log_M']) & (table['M'] > 0)]
    if len(table) < 8:
        v = Verdict('admits', INCONCLUSIVE, message='M(t) is not defined on enough grid points')
        env = window_envelope('logV_minus_logM', [1., 2.], [0., 0.])
        return AdmissibilityReport(seq.name, order.name, env, (math.nan, math.nan), v)
    xs = table['logt'].to_numpy()
    f = np.asarray(order.log_V(xs), dtype=float) - table['log_M'].to_numpy()
    env = window_envelope('logV_minus_logM', xs, f)
    bounded = env.windows_bounded()
    wi, ws = env.window_inf, env.window_sup
    bounds = (min(wi[-3:]), max(ws[-3:])) if wi and len(wi) >= 3 else (math.nan, math.nan)
    constants = {'A': bounds[0], 'B': bounds[1]}
    if bounded is None:
        v = Verdict('admits', INCONCLUSIVE, constants=constants, message='too few windows')
    elif bounded:
        v = Verdict('admits', PASS, constants=constants, horizon=float(xs[-1]),
                    message='log V - log M bounded')
    else:
        i = int(np.argmax(np.abs(f - f[0])))
        v = Verdict('admits', FAIL, constants=constants, indices={'logt': float(xs[i])},
                    horizon=float(xs[-1]), message='log V - log M unbounded')
    return AdmissibilityReport(seq.name, order.name, env, bounds, v)
