# License: BSD 3 clause
"""
Sequences given by their quotients m_p = M_{p+1}/M_p.

Every family is evaluated in the log domain: log m_p, log M_p (through the
mean log M_p / p, which stays representable for indices of any size) and
the counting function nu(t) = #{j : m_j <= t}. Indices are python ints.
"""
import math
import json
import threading
import numpy as np
from scipy.special import gammaln, expi
from petsc4py import PETSc
import mpi4py.MPI as mpi

from .errors import InputError, OutOfReach
from .utils import LOG2, LOG3, EXACT_INDEX, log_index, log_shift, log_ratio, index_from_log, prefix_sums

# e + 1, shift of log log(e + p + 1)
_C = math.e + 1.

FAMILIES = {'gevrey': ('alpha',),
            'm_alpha_beta': ('alpha', 'beta'),
            'm_zero_beta': ('beta',),
            'm_q': ('q',),
            'example_a': (),
            'example_b': (),
            'example_riesz': (),
            'table': ('log_quotients',),
            'constructed': ('order',)}


class SeqSettings(object):
    def __init__(self):
        """
        Evaluation limits of the sequence families.

        PETSc.Options
        =============

        seq_enumerable : Int
            Default is 1000000.
            Largest number of quotients enumerated in vectorized checks.

        seq_budget : Int
            Default is 64.
            Bit length of the largest index of the default schedules of
            the families without block structure.

        seq_table_size : Int
            Default is 1048576.
            Number of tabulated quotients of m_alpha_beta and m_zero_beta.

        seq_depth_a : Int
            Default is 12.
            Number of superblocks of example_a covered by the schedules.

        seq_depth_b : Int
            Default is 16.
            Number of superblocks of example_b covered by the schedules.

        seq_depth_riesz : Int
            Default is 12.
            Largest n such that k_n = 2^(3^n) enters the schedules of
            example_riesz.

        seq_max_blocks : Int
            Default is 1048576.
            Largest number of dyadic blocks a block family may build.

        seq_verbose : Bool
            Default is False.

        """
        OptDB = PETSc.Options()
        self.enumerable = OptDB.getInt('seq_enumerable', 10**6)
        self.budget = OptDB.getInt('seq_budget', 64)
        self.table_size = OptDB.getInt('seq_table_size', 2**20)
        self.depth_a = OptDB.getInt('seq_depth_a', 12)
        self.depth_b = OptDB.getInt('seq_depth_b', 16)
        self.depth_riesz = OptDB.getInt('seq_depth_riesz', 12)
        self.max_blocks = OptDB.getInt('seq_max_blocks', 2**20)
        self.verbose = OptDB.getBool('seq_verbose', False)


class FamilySpec(object):
    """
    Name and parameters of a sequence family.

    Parameters
    ==========

    family : str
        One of FAMILIES.

    params : dict
        Family parameters (alpha, beta, q, log_quotients, order, pmax).

    """
    def __init__(self, family, **params):
        if family not in FAMILIES:
            raise InputError(f'unknown family {family!r}, expected one of {sorted(FAMILIES)}')
        missing = [k for k in FAMILIES[family] if k not in params]
        if missing:
            raise InputError(f'family {family} needs the parameters {missing}')
        self.family = family
        self.params = params
        self._validate()

    def _validate(self):
        q = self.params
        try:
            for k in ('alpha', 'beta', 'q'):
                if k in q:
                    q[k] = float(q[k])
        except (TypeError, ValueError):
            raise InputError(f'non numeric parameter in {self.family}: {q}')
        if self.family in ('gevrey', 'm_alpha_beta') and not q['alpha'] > 0:
            raise InputError(f'{self.family} needs alpha > 0, got {q["alpha"]}')
        if self.family == 'm_zero_beta' and not q['beta'] > 0:
            raise InputError(f'm_zero_beta needs beta > 0, got {q["beta"]}')
        if self.family == 'm_q' and not q['q'] > 1:
            raise InputError(f'm_q needs q > 1, got {q["q"]}')
        if 'beta' in q and not math.isfinite(q['beta']):
            raise InputError('beta must be finite')
        if self.family == 'table':
            values = q['log_quotients']
            try:
                values = [float(v) for v in values]
            except (TypeError, ValueError):
                raise InputError('table log_quotients must be a list of numbers')
            if len(values) == 0 or not all(math.isfinite(v) for v in values):
                raise InputError('table log_quotients must be a nonempty list of finite numbers')
            q['log_quotients'] = values

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict) or 'family' not in data:
            raise InputError(f'family specification needs a "family" key, got {data!r}')
        params = dict(data)
        family = params.pop('family')
        return cls(family, **params)

    def to_json(self):
        out = {'family': self.family}
        out.update(self.params)
        return out

    def __str__(self):
        if self.family == 'table':
            return 'table:' + ','.join(repr(v) for v in self.params['log_quotients'])
        if self.family == 'constructed':
            return json.dumps(self.to_json(), sort_keys=True)
        values = [f'{self.params[k]:g}' for k in FAMILIES[self.family]]
        return ':'.join([self.family] + values)

    def __eq__(self, other):
        return isinstance(other, FamilySpec) and self.to_json() == other.to_json()


def parse_family(text):
    """
    Parse a family specification.

    Parameters
    ==========

    text : str or dict
        A json object, the path of a json file or a short form such as
        gevrey:1, m_alpha_beta:1:2, m_q:2, example_a or table:0,0.69.

    Returns
    =======

    out : FamilySpec

    """
    if isinstance(text, FamilySpec):
        return text
    if isinstance(text, dict):
        return FamilySpec.from_json(text)
    text = text.strip()
    if text.startswith('{'):
        try:
            return FamilySpec.from_json(json.loads(text))
        except json.JSONDecodeError as e:
            raise InputError(f'invalid family json: {e}')
    if text.endswith('.json'):
        try:
            with open(text) as f:
                return FamilySpec.from_json(json.load(f))
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f'cannot read family file {text}: {e}')
    name, _, rest = text.partition(':')
    if name not in FAMILIES:
        raise InputError(f'unknown family {name!r}')
    if name == 'table':
        try:
            return FamilySpec('table', log_quotients=[float(v) for v in rest.split(',') if v])
        except ValueError:
            raise InputError(f'invalid table {rest!r}')
    if name == 'constructed':
        raise InputError('constructed families are given as json')
    values = rest.split(':') if rest else []
    keys = FAMILIES[name]
    if len(values) != len(keys):
        raise InputError(f'{name} takes {len(keys)} parameters {keys}, got {values}')
    return FamilySpec(name, **dict(zip(keys, values)))


def log_factorial(p):
    return float(gammaln(p + 1))


def mean_log_factorial(p):
    """Return log(p!)/p for p >= 1, Stirling beyond EXACT_INDEX."""
    if p < EXACT_INDEX:
        return float(gammaln(p + 1))/p
    lp = log_index(p)
    x = math.exp(-lp)
    return lp - 1. + (0.5*(math.log(2*math.pi) + lp) + x/12)*x


class SamplePoint(object):
    """
    log m_p, log M_p and the indices alpha_p = log m_p and
    beta_p = log m_p - log M_p / p (beta_0 = alpha_0).
    """
    def __init__(self, p, log_m, mean):
        self.p = p
        self.log_m = log_m
        self.alpha = log_m
        self.mean = mean
        if p == 0:
            self.log_M = 0.
            self.beta = log_m
        else:
            self.log_M = p*mean if p.bit_length() < 1000 else math.inf
            self.beta = log_m - mean

    def to_json(self):
        return {'p': self.p, 'log_m': self.log_m, 'log_M': self.log_M,
                'alpha': self.alpha, 'beta': self.beta}


class QuotientSeq(object):
    """
    Evaluation contract of a sequence M_0 = 1, M_{p+1} = m_p M_p.

    Subclasses implement log_quotient, mean_log_quotient and count_below.
    """
    nondecreasing = True
    horizon = None

    def __init__(self, settings=None):
        self.settings = settings if settings is not None else SeqSettings()
        self._spec = None

    @property
    def spec(self):
        return self._spec

    @property
    def name(self):
        return str(self._spec)

    @property
    def enumerable_limit(self):
        limit = self.settings.enumerable
        return limit if self.horizon is None else min(limit, self.horizon + 1)

    @staticmethod
    def _check_index(p):
        if isinstance(p, (bool, np.bool_)) or not isinstance(p, (int, np.integer)):
            raise InputError(f'index must be an integer, got {p!r}')
        p = int(p)
        if p < 0:
            raise InputError(f'negative index {p}')
        return p

    def log_quotient(self, p):
        raise NotImplementedError

    def log_quotient_ratio(self, p, k):
        """Return log(m_{kp}/m_p)."""
        return self.log_quotient(k*p) - self.log_quotient(p)

    def mean_log_quotient(self, p):
        raise NotImplementedError

    def count_below(self, logt):
        raise NotImplementedError

    def log_value(self, p):
        p = self._check_index(p)
        if p == 0:
            return 0.
        if p.bit_length() > 1000:
            raise OutOfReach(f'log M_p overflows for p of {p.bit_length()} bits, use mean_log_quotient')
        return p*self.mean_log_quotient(p)

    def log_quotients(self, n):
        """Return the array of log m_p for p < n."""
        return np.array([self.log_quotient(p) for p in range(n)], dtype=float)

    def log_values(self, n):
        """Return the array of log M_p for p <= n."""
        return prefix_sums(self.log_quotients(n))

    def _refine_count(self, guess, logt):
        c = max(int(guess), 0)
        if c >= EXACT_INDEX:
            return c
        while self.log_quotient(c) <= logt:
            c += 1
        while c > 0 and self.log_quotient(c - 1) > logt:
            c -= 1
        return c

    def structural_points(self, bits):
        return []

    def default_budget(self):
        return self.settings.budget

    def cutoffs(self, budget=None):
        """Indices at which tail envelopes are cut."""
        budget = self.default_budget() if budget is None else budget
        return [1 << i for i in range(4, budget)]

    def sample_schedule(self, budget=None):
        """
        Deterministic sample indices: powers of two with quarter points,
        thinned powers beyond 64 bits and the structural points of the
        family, all of bit length at most budget.
        """
        budget = self.default_budget() if budget is None else int(budget)
        if budget < 16:
            raise InputError(f'schedule budget must be >= 16, got {budget}')
        points = set(range(16))
        for i in range(min(budget, 64)):
            b = 1 << i
            points.add(b)
            if i >= 2:
                points.update(b + q*(b >> 2) for q in (1, 2, 3))
        i = 64
        while i < budget:
            points.add(1 << i)
            points.add(3 << (i - 1))
            i = max(i + 1, int(i*1.25))
        points.update(self.structural_points(budget))
        out = sorted(p for p in points if p.bit_length() <= budget)
        if self.horizon is not None:
            out = [p for p in out if p <= self.horizon]
        return out

    def alpha_beta(self, p):
        p = self._check_index(p)
        log_m = self.log_quotient(p)
        mean = self.mean_log_quotient(p) if p > 0 else 0.
        return SamplePoint(p, log_m, mean)

    def view(self):
        if mpi.COMM_WORLD.rank == 0:
            PETSc.Sys.Print(f'{self.__class__.__name__} {self.name}: horizon={self.horizon} '
                            f'nondecreasing={self.nondecreasing} budget={self.default_budget()}',
                            comm=mpi.COMM_SELF)

    def __repr__(self):
        return f'{self.__class__.__name__}({self.name})'


class GevreySeq(QuotientSeq):
    """M_p = (p!)^alpha, m_p = (p+1)^alpha."""
    def __init__(self, alpha, settings=None):
        super(GevreySeq, self).__init__(settings)
        if not alpha > 0:
            raise InputError(f'gevrey needs alpha > 0, got {alpha}')
        self.alpha = float(alpha)
        self._spec = FamilySpec('gevrey', alpha=self.alpha)

    def log_quotient(self, p):
        return self.alpha*log_shift(self._check_index(p), 1.)

    def log_quotient_ratio(self, p, k):
        # no cancellation between log(kp+1) and log(p+1)
        p = self._check_index(p)
        return self.alpha*log_ratio(k*p + 1, p + 1)

    def log_quotients(self, n):
        return self.alpha*np.log(np.arange(1, n + 1, dtype=float))

    def log_values(self, n):
        return self.alpha*gammaln(np.arange(1, n + 2, dtype=float))

    def mean_log_quotient(self, p):
        return self.alpha*mean_log_factorial(p)

    def count_below(self, logt):
        if logt < 0:
            return 0
        return self._refine_count(index_from_log(logt/self.alpha), logt)


def _loglog(p):
    return math.log(log_shift(p, _C))


def _em_loglog(x):
    """Euler-Maclaurin primitive of sum_{k<x} log log(k + e + 1)."""
    y = x + _C
    ly = math.log(y)
    return y*math.log(ly) - float(expi(ly)) - 0.5*math.log(ly) + 1/(12*y*ly)


def _mean_loglog(p):
    """(1/p) sum_{k<p} log log(k + e + 1) for p >= 2^60."""
    lp = log_index(p)
    s, term = 0., 1/lp
    for k in range(13):
        s += term
        term *= (k + 1)/lp
    return math.log(lp) - s


class MAlphaBetaSeq(QuotientSeq):
    """
    M_p = (p!)^alpha prod_{k<=p} log(e + k)^beta, so that
    m_p = (p+1)^alpha log(e + p + 1)^beta.

    For beta < 0 the first quotients are replaced by the running maximum so
    that the sequence is logarithmically convex.
    """
    def __init__(self, alpha, beta, settings=None, family='m_alpha_beta'):
        super(MAlphaBetaSeq, self).__init__(settings)
        self.alpha = float(alpha)
        self.beta = float(beta)
        if family == 'm_zero_beta':
            self._spec = FamilySpec('m_zero_beta', beta=self.beta)
        else:
            self._spec = FamilySpec('m_alpha_beta', alpha=self.alpha, beta=self.beta)
        n = self.settings.table_size
        k = np.arange(n, dtype=float)
        raw = self.alpha*np.log1p(k) + self.beta*np.log(np.log(k + _C))
        table = np.maximum.accumulate(raw)
        changed = np.nonzero(table != raw)[0]
        self.fix = int(changed[-1]) + 1 if changed.size else 0
        if self.fix >= n - 1:
            raise InputError(f'quotients of {self.name} still decrease at index {n}')
        self.table = table
        self.prefix = prefix_sums(table)
        self._tail_base = self.prefix[n] - self._raw_log_value(n)

    def _raw_log_value(self, p):
        return self.alpha*log_factorial(p) + self.beta*_em_loglog(p)

    def log_quotient(self, p):
        p = self._check_index(p)
        if p < self.table.size:
            return float(self.table[p])
        return self.alpha*log_shift(p, 1.) + self.beta*_loglog(p)

    def log_quotients(self, n):
        if n <= self.table.size:
            return self.table[:n].copy()
        return super(MAlphaBetaSeq, self).log_quotients(n)

    def log_values(self, n):
        if n <= self.table.size:
            return self.prefix[:n + 1].copy()
        return super(MAlphaBetaSeq, self).log_values(n)

    def mean_log_quotient(self, p):
        n = self.table.size
        if p <= n:
            return float(self.prefix[p])/p
        if p < 2**60:
            return (self._tail_base + self._raw_log_value(p))/p
        return self.alpha*mean_log_factorial(p) + self.beta*_mean_loglog(p)

    def count_below(self, logt):
        if logt < self.table[0]:
            return 0
        if logt < self.table[-1]:
            return int(np.searchsorted(self.table, logt, side='right'))
        if self.alpha == 0:
            y = math.exp(logt/self.beta)
            if y > 2**16:
                raise OutOfReach(f'counting value of {self.name} at log t = {logt} has more than 2^16 digits')
            return self._refine_count(index_from_log(y) - 3, logt)
        u = logt/self.alpha
        for _ in range(100):
            lpc = u + math.log1p(math.e*math.exp(-u)) if u > 1 else math.log(math.exp(u) + math.e)
            unew = (logt - self.beta*math.log(lpc))/self.alpha
            if abs(unew - u) <= 1e-15*abs(u):
                u = unew
                break
            u = unew
        return self._refine_count(index_from_log(u), logt)


class MQSeq(QuotientSeq):
    """M_p = q^(p^2), m_p = q^(2p+1)."""
    def __init__(self, q, settings=None):
        super(MQSeq, self).__init__(settings)
        if not q > 1:
            raise InputError(f'm_q needs q > 1, got {q}')
        self.q = float(q)
        self.lq = math.log(self.q)
        self._spec = FamilySpec('m_q', q=self.q)

    def log_quotient(self, p):
        p = self._check_index(p)
        return float(2*p + 1)*self.lq

    def log_quotients(self, n):
        return (2*np.arange(n, dtype=float) + 1)*self.lq

    def log_values(self, n):
        return np.arange(n + 1, dtype=float)**2*self.lq

    def mean_log_quotient(self, p):
        return float(p)*self.lq

    def count_below(self, logt):
        if logt < self.lq:
            return 0
        guess = int(math.floor((logt/self.lq - 1)/2)) + 1
        return self._refine_count(guess, logt)


class TableSeq(QuotientSeq):
    """Finitely many given quotients log m_0, ..., log m_{n-1}."""
    def __init__(self, log_quotients, settings=None):
        super(TableSeq, self).__init__(settings)
        values = np.asarray(log_quotients, dtype=float)
        if values.ndim != 1 or values.size == 0 or not np.all(np.isfinite(values)):
            raise InputError('a table needs a nonempty list of finite log quotients')
        self.values = values
        self.horizon = values.size - 1
        self.nondecreasing = bool(np.all(np.diff(values) >= 0))
        self.prefix = prefix_sums(values)
        self._spec = FamilySpec('table', log_quotients=values.tolist())

    def log_quotient(self, p):
        p = self._check_index(p)
        if p > self.horizon:
            raise OutOfReach(f'table has {self.values.size} quotients, index {p} requested')
        return float(self.values[p])

    def log_value(self, p):
        p = self._check_index(p)
        if p > self.values.size:
            raise OutOfReach(f'table determines M_p for p <= {self.values.size}, index {p} requested')
        return float(self.prefix[p])

    def mean_log_quotient(self, p):
        return self.log_value(p)/p

    def log_quotients(self, n):
        if n > self.values.size:
            raise OutOfReach(f'table has {self.values.size} quotients, {n} requested')
        return self.values[:n].copy()

    def log_values(self, n):
        if n > self.values.size:
            raise OutOfReach(f'table determines M_p for p <= {self.values.size}, {n} requested')
        return self.prefix[:n + 1].copy()

    def count_below(self, logt):
        if not self.nondecreasing:
            raise InputError('the counting function needs nondecreasing quotients')
        if logt >= self.values[-1]:
            raise OutOfReach(f'log t = {logt} is beyond the last tabulated quotient')
        return int(np.searchsorted(self.values, logt, side='right'))

    def default_budget(self):
        return max(16, self.values.size.bit_length())

    def cutoffs(self, budget=None):
        return [1 << i for i in range(2, self.values.size.bit_length())]


class BlockSeq(QuotientSeq):
    """
    Quotients constant on blocks: the explicit head blocks
    [start, end) and then the dyadic blocks
    [2^e + offset, 2^(e+1) + offset) for e >= first_exponent.

    log M_p is obtained from the mean of log m over [0, p), updated block
    after block without materializing the (huge) block starts.
    """
    head = ()
    offset = 0
    first_exponent = 0

    def __init__(self, settings=None):
        super(BlockSeq, self).__init__(settings)
        self._lock = threading.Lock()
        self._nhead = len(self.head)
        self._values = []
        self._means = []
        m = 0.
        for s, e, v in self.head:
            self._means.append(m)
            self._values.append(v)
            m = (s*m + (e - s)*v)/e
        self._next_mean = m
        self._varray = None
        assert self.head[-1][1] == self._start(self.first_exponent)

    def block_value(self, e):
        raise NotImplementedError

    def _start(self, e):
        return (1 << e) + self.offset

    def _ratios(self, e):
        # s_e/s_{e+1} and (s_{e+1} - s_e)/s_{e+1}
        if e < 900:
            s, t = self._start(e), self._start(e + 1)
            return s/t, (t - s)/t
        return 0.5, 0.5

    def _exponent(self, b):
        return self.first_exponent + b - self._nhead

    def _ensure(self, b):
        if len(self._values) > b:
            return
        if b - self._nhead >= self.settings.max_blocks:
            raise OutOfReach(f'{self.name}: block exponent {self._exponent(b)} beyond seq_max_blocks')
        with self._lock:
            while len(self._values) <= b:
                e = self._exponent(len(self._values))
                v = self.block_value(e)
                r0, r1 = self._ratios(e)
                self._means.append(self._next_mean)
                self._values.append(v)
                self._next_mean = self._next_mean*r0 + v*r1

    def _value_array(self):
        if self._varray is None or self._varray.size != len(self._values):
            self._varray = np.asarray(self._values)
        return self._varray

    def bounds(self, b):
        """Return the block [start, end) of block number b."""
        if b < self._nhead:
            return self.head[b][0], self.head[b][1]
        e = self._exponent(b)
        return self._start(e), self._start(e + 1)

    def locate(self, p):
        """Return the number of the block containing p and its start."""
        for b, (s, e, _) in enumerate(self.head):
            if p < e:
                return b, s
        e = (p - self.offset).bit_length() - 1
        b = self._nhead + e - self.first_exponent
        self._ensure(b)
        return b, self._start(e)

    def block_number(self, e):
        return self._nhead + e - self.first_exponent

    def log_quotient(self, p):
        b, _ = self.locate(self._check_index(p))
        return self._values[b]

    def mean_log_quotient(self, p):
        b, s = self.locate(self._check_index(p))
        return self._means[b]*(s/p) + self._values[b]*((p - s)/p)

    def log_quotients(self, n):
        if n == 0:
            return np.zeros(0)
        last, _ = self.locate(n - 1)
        lengths = []
        for b in range(last + 1):
            s, e = self.bounds(b)
            lengths.append(min(e, n) - s)
        return np.repeat(np.asarray(self._values[:last + 1]), lengths)

    def block_values(self, bits):
        """Block values of all blocks whose start has at most bits bits."""
        e = bits - 1
        b = self.block_number(e)
        self._ensure(b)
        return np.asarray(self._values[:b + 1])

    def count_below(self, logt):
        if logt < self._values[0]:
            return 0
        nb = max(len(self._values), 64)
        while True:
            k = int(np.searchsorted(self._value_array(), logt, side='right'))
            if k < len(self._values):
                return self.bounds(k)[0]
            if nb - self._nhead >= self.settings.max_blocks:
                raise OutOfReach(f'{self.name}: log t = {logt} beyond the largest block')
            nb = min(2*nb, self._nhead + self.settings.max_blocks)
            self._ensure(nb - 1)

    def _schedule_exponents(self, bits):
        raise NotImplementedError

    def structural_points(self, bits):
        points = set()
        for s, e, _ in self.head:
            points.update((s, e - 1))
        for e in self._schedule_exponents(bits):
            s, t = self._start(e), self._start(e + 1)
            points.update((s, t - 1, s + ((t - s) >> 1)))
        return points


def _superblock_offsets(k):
    """Offsets j of the blocks sampled in superblock k."""
    n = 1 << k
    if k <= 6:
        return range(n)
    js = set(range(min(k + 4, n)))
    js.update((1 << i) for i in range(k))
    js.update((n - 3, n - 2, n - 1))
    return sorted(js)


class ExampleA(BlockSeq):
    """
    m_0 = m_1 = 1, m_2 = m_3 = 2, m_4 = ... = m_7 = 6 and, for k >= 1 and
    1 <= j <= 2^k, on the block 2^(2^k+j) <= p < 2^(2^k+j+1):
    log m_p = 2^k log 2 + log 3 + (j-1)/(2^k-1) (2^k log 2 - log 3).

    m_{2p}/m_p oscillates between 2 and 3.
    """
    head = ((0, 2, 0.), (2, 4, LOG2), (4, 8, math.log(6.)))
    offset = 0
    first_exponent = 3

    def __init__(self, settings=None):
        super(ExampleA, self).__init__(settings)
        self.depth = self.settings.depth_a
        self._spec = FamilySpec('example_a')

    def block_value(self, e):
        k = (e - 1).bit_length() - 1
        j = e - (1 << k)
        n = 1 << k
        return n*LOG2 + LOG3 + ((j - 1)/(n - 1))*(n*LOG2 - LOG3)

    def default_budget(self):
        return (1 << (self.depth + 1)) + 1

    def _schedule_exponents(self, bits):
        out = []
        for k in range(1, self.depth + 1):
            out.extend((1 << k) + j for j in _superblock_offsets(k))
        # superblock k holds the blocks 2^k + j, j = 1..2^k
        return [e + 1 for e in out if e + 1 < bits]

    def cutoffs(self, budget=None):
        return [1 << ((1 << k) + 1) for k in range(1, self.depth + 1)]


class ExampleB(BlockSeq):
    """
    m_0 = m_1 = 1, m_2 = 2 and, with tau_k = (2^k - 2k)/(2^k - k), on the
    block 2^(2^k+j) < p <= 2^(2^k+j+1), 0 <= j < 2^k:
    log_2 m_p = 2^k + 2 min(j+1, k) + tau_k max(0, j+1-k).

    m_{2p}/m_p takes the values 4 and 2^tau_k, with liminf 2 and limsup 4.
    """
    head = ((0, 2, 0.), (2, 3, LOG2))
    offset = 1
    first_exponent = 1

    def __init__(self, settings=None):
        super(ExampleB, self).__init__(settings)
        self.depth = self.settings.depth_b
        self._spec = FamilySpec('example_b')

    @staticmethod
    def tau(k):
        n = 1 << k
        return (n - 2*k)/(n - k)

    def block_value(self, e):
        k = e.bit_length() - 1
        j = e - (1 << k)
        log2m = (1 << k) + 2*min(j + 1, k) + self.tau(k)*max(0, j + 1 - k)
        return log2m*LOG2

    def default_budget(self):
        return (1 << (self.depth + 1)) + 1

    def _schedule_exponents(self, bits):
        out = []
        for k in range(0, self.depth + 1):
            out.extend((1 << k) + j for j in _superblock_offsets(k))
        return [e for e in out if e + 1 < bits]

    def cutoffs(self, budget=None):
        return [(1 << (1 << k)) + 1 for k in range(1, self.depth + 1)]


def make_family(spec, settings=None):
    """
    Build the evaluator of a family.

    Parameters
    ==========

    spec : FamilySpec, dict or str
        The family (see parse_family).

    settings : SeqSettings
        Evaluation limits, read from the options database when None.

    Returns
    =======

    out : QuotientSeq

    """
    spec = parse_family(spec)
    q = spec.params
    if spec.family == 'gevrey':
        return GevreySeq(q['alpha'], settings)
    if spec.family == 'm_alpha_beta':
        return MAlphaBetaSeq(q['alpha'], q['beta'], settings)
    if spec.family == 'm_zero_beta':
        return MAlphaBetaSeq(0., q['beta'], settings, family='m_zero_beta')
    if spec.family == 'm_q':
        return MQSeq(q['q'], settings)
    if spec.family == 'example_a':
        return ExampleA(settings)
    if spec.family == 'example_b':
        return ExampleB(settings)
    if spec.family == 'example_riesz':
        from .riesz import RieszSeq
        return RieszSeq(settings=settings)
    if spec.family == 'table':
        return TableSeq(q['log_quotients'], settings)
    from .construct import constructed_from_spec
    return constructed_from_spec(spec)


def log_m(seq, p):
    return seq.log_quotient(p)


def log_M(seq, p):
    return seq.log_value(p)


def alpha_beta(seq, p):
    return seq.alpha_beta(p)


def sample_schedule(seq, budget=None):
    return seq.sample_schedule(budget)
