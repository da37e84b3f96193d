# License: BSD 3 clause
"""
Riesz means t_p = (sum_{k<=p} delta_k/k) / log p of piecewise constant
sequences delta, the sequence whose log quotients are these partial sums,
and the corrected Moricz expressions.
"""
import math
import numpy as np
import pandas as pd
from petsc4py import PETSc
import mpi4py.MPI as mpi

from .errors import InputError, OutOfReach
from .seqcore import QuotientSeq, FamilySpec
from .utils import (LOG2, EULER_GAMMA, harmonic, harmonic_diff, harmonic_eps,
                    harmonic_diff_pow2, harmonic_eps_pow2, log_index, index_from_log)
from .verdict import Verdict, PASS, FAIL, tail_envelope, jsonable


class RieszSettings(object):
    def __init__(self):
        """
        PETSc.Options
        =============

        riesz_nmax : Int
            Default is 20.
            Number of subsequence points k_n = 2^(3^n), q_n = k_n^2.

        riesz_max_bits : Int
            Default is 2097152.
            Largest bit length of a block bound built as an integer.

        riesz_term_cap : Int
            Default is 50000000.
            Largest number of terms summed by moricz_expression.

        riesz_chunk : Int
            Default is 4194304.
            Number of terms summed at once.

        riesz_per_block : Int
            Default is 8.
            Number of exponents sampled inside each block by
            within_block_envelope.

        riesz_verbose : Bool
            Default is False.

        """
        OptDB = PETSc.Options()
        self.nmax = OptDB.getInt('riesz_nmax', 20)
        self.max_bits = OptDB.getInt('riesz_max_bits', 2**21)
        self.term_cap = OptDB.getInt('riesz_term_cap', 5*10**7)
        self.chunk = OptDB.getInt('riesz_chunk', 2**22)
        self.per_block = OptDB.getInt('riesz_per_block', 8)
        self.verbose = OptDB.getBool('riesz_verbose', False)


class DeltaBlock(object):
    """
    delta_k = delta for 2^lo_exp < k <= 2^hi_exp; lo_exp None stands for
    k >= 1 and hi_exp None for an unbounded block.
    """
    def __init__(self, lo_exp, hi_exp, delta, max_bits=2**21):
        self.lo_exp = lo_exp
        self.hi_exp = hi_exp
        self.delta = float(delta)
        self.lo = 0 if lo_exp is None else ((1 << lo_exp) if lo_exp <= max_bits else None)
        if hi_exp is None or hi_exp > max_bits:
            self.hi = None
        else:
            self.hi = 1 << hi_exp

    def contains_bits(self, m):
        """True when p with (p-1).bit_length() == m lies in the block."""
        lo = -1 if self.lo_exp is None else self.lo_exp
        return lo < m and (self.hi_exp is None or m <= self.hi_exp)

    def to_json(self):
        return {'lo_exp': self.lo_exp, 'hi_exp': self.hi_exp, 'delta': self.delta}


class DeltaSeq(object):
    """
    Piecewise constant delta_k on blocks with power of two bounds.

    Parameters
    ==========

    blocks : list of DeltaBlock
        Consecutive blocks, the first one starting at k = 1.

    name : str
        Name used in reports.

    """
    def __init__(self, blocks, name='delta'):
        if not blocks or blocks[0].lo_exp is not None:
            raise InputError('the first delta block must start at k = 1')
        for b0, b1 in zip(blocks[:-1], blocks[1:]):
            if b0.hi_exp is None or b0.hi_exp != b1.lo_exp:
                raise InputError('delta blocks must be consecutive')
        self.blocks = blocks
        self.name = name
        # S at the lower end of each block
        self.prefix = [0.]
        for b in blocks[:-1]:
            self.prefix.append(self.prefix[-1] + b.delta*harmonic_diff_pow2(b.lo_exp, b.hi_exp))

    @classmethod
    def counterexample(cls, nmax=20, max_bits=2**21):
        """
        delta = 2 on {1, 2} and on (q_n, k_{n+1}], delta = 3 on (k_n, q_n],
        with k_n = 2^(3^n) and q_n = k_n^2, for n <= nmax.
        """
        blocks = [DeltaBlock(None, 1, 2., max_bits), DeltaBlock(1, 2, 3., max_bits)]
        for n in range(1, nmax + 2):
            blocks.append(DeltaBlock(2*3**(n - 1), 3**n, 2., max_bits))
            blocks.append(DeltaBlock(3**n, 2*3**n, 3., max_bits))
        return cls(blocks, name='counterexample')

    @classmethod
    def constant(cls, c):
        return cls([DeltaBlock(None, None, c)], name=f'constant:{c:g}')

    def block_of(self, p):
        if p < 1:
            raise InputError(f'delta_k is defined for k >= 1, got {p}')
        m = (p - 1).bit_length()
        for i, b in enumerate(self.blocks):
            if b.contains_bits(m):
                return i
        raise OutOfReach(f'index of {p.bit_length()} bits beyond the delta blocks of {self.name}')

    def block_of_exponent(self, e):
        for i, b in enumerate(self.blocks):
            lo = -1 if b.lo_exp is None else b.lo_exp
            if lo < e and (b.hi_exp is None or e <= b.hi_exp):
                return i
        raise OutOfReach(f'2^{e} beyond the delta blocks of {self.name}')

    def delta(self, k):
        return self.blocks[self.block_of(k)].delta

    def log_sum(self, p):
        """Return sum_{k<=p} delta_k/k for an integer p >= 0."""
        if p == 0:
            return 0.
        i = self.block_of(p)
        b = self.blocks[i]
        if b.lo is None:
            raise OutOfReach(f'block 2^{b.lo_exp} of {self.name} is not materialized')
        return self.prefix[i] + b.delta*harmonic_diff(b.lo, p)

    def log_sum_pow2(self, e):
        """Return sum_{k<=2^e} delta_k/k from the exponent e alone."""
        i = self.block_of_exponent(e)
        b = self.blocks[i]
        return self.prefix[i] + b.delta*harmonic_diff_pow2(b.lo_exp, e)

    def to_json(self):
        return {'name': self.name, 'blocks': [b.to_json() for b in self.blocks]}


def riesz_mean(delta, p):
    """
    Riesz mean t_p = (1/log p) sum_{k<=p} delta_k/k.

    Parameters
    ==========

    delta : DeltaSeq
        The sequence delta.

    p : int
        Index, p >= 2.

    Returns
    =======

    out : float

    """
    if p < 2:
        raise InputError(f'riesz_mean needs p >= 2, got {p}')
    return delta.log_sum(p)/log_index(p)


def riesz_mean_pow2(delta, e):
    """Riesz mean at p = 2^e, e >= 1, without building p."""
    if e < 1:
        raise InputError(f'riesz_mean_pow2 needs e >= 1, got {e}')
    return delta.log_sum_pow2(e)/(e*LOG2)


class RieszReport(object):
    """
    Riesz means of the counterexample delta along k_n = 2^(3^n) and
    q_n = k_n^2, computed blockwise and through the relations
    t_q = t_k/2 + 3/2 + 3(eps_q - eps_k)/log q and
    t_k' = 2 t_q/3 + 2/3 + 2(eps_k' - eps_q)/log k'.
    """
    def __init__(self, ns, t_k, t_q, t_k_rec, t_q_rec, t_k_chain, t_q_chain, values=None):
        self.ns = list(ns)
        self.log2_k = [3**n for n in ns]
        self.t_k = np.asarray(t_k)
        self.t_q = np.asarray(t_q)
        self.t_k_rec = np.asarray(t_k_rec)
        self.t_q_rec = np.asarray(t_q_rec)
        self.t_k_chain = np.asarray(t_k_chain)
        self.t_q_chain = np.asarray(t_q_chain)
        self.values = values if values is not None else {}
        self.limit_k = float(self.t_k[-1])
        self.limit_q = float(self.t_q[-1])

    @property
    def recurrence_gap(self):
        """Largest gap between blockwise and one step recurrence values."""
        gk = np.nanmax(np.abs(self.t_k - self.t_k_rec))
        gq = np.nanmax(np.abs(self.t_q - self.t_q_rec))
        return float(max(gk, gq))

    @property
    def chain_gap(self):
        return float(max(np.max(np.abs(self.t_k - self.t_k_chain)),
                         np.max(np.abs(self.t_q - self.t_q_chain))))

    def no_limit(self, gap=0.1):
        """Verdict that t_p has no limit: the two subsequence limits differ."""
        diff = abs(self.limit_q - self.limit_k)
        status = PASS if diff > gap else FAIL
        return Verdict('riesz_no_limit', status,
                       constants={'limit_k': self.limit_k, 'limit_q': self.limit_q, 'gap': diff},
                       indices={'log2_k_last': self.log2_k[-1]},
                       horizon=self.ns[-1],
                       message='t_{k_n} and t_{q_n} converge to different limits')

    def table(self):
        return pd.DataFrame({'n': self.ns,
                             'log2_k': self.log2_k,
                             't_k': self.t_k,
                             't_q': self.t_q,
                             't_k_rec': self.t_k_rec,
                             't_q_rec': self.t_q_rec})

    def to_json(self):
        return jsonable({'n': self.ns, 'log2_k': self.log2_k,
                         't_k': self.t_k, 't_q': self.t_q,
                         't_k_rec': self.t_k_rec, 't_q_rec': self.t_q_rec,
                         't_k_chain': self.t_k_chain, 't_q_chain': self.t_q_chain,
                         'limit_k': self.limit_k, 'limit_q': self.limit_q,
                         'recurrence_gap': self.recurrence_gap, 'chain_gap': self.chain_gap,
                         'values': self.values})

    def view(self):
        if mpi.COMM_WORLD.rank == 0:
            for n, tk, tq in zip(self.ns, self.t_k, self.t_q):
                PETSc.Sys.Print(f'n={n:3d} t_k={tk:.12f} t_q={tq:.12f}', comm=mpi.COMM_SELF)
            PETSc.Sys.Print(f'{self.recurrence_gap=:.3e} {self.chain_gap=:.3e}', comm=mpi.COMM_SELF)


def _next_k(t_q, ek, eq):
    # k' = 2^(3 ek) with ek = log2 k, eq = log2 q = 2 ek
    ekp = 3*ek
    return 2*t_q/3 + 2/3 + 2*(harmonic_eps_pow2(ekp) - harmonic_eps_pow2(eq))/(ekp*LOG2)


def _next_q(t_k, ek):
    eq = 2*ek
    return t_k/2 + 1.5 + 3*(harmonic_eps_pow2(eq) - harmonic_eps_pow2(ek))/(eq*LOG2)


def riesz_subsequences(delta=None, nmax=None, small=(2, 3, 4, 8)):
    """
    Riesz means along k_n and q_n for 0 <= n <= nmax.

    Parameters
    ==========

    delta : DeltaSeq
        Default is DeltaSeq.counterexample(nmax).

    nmax : int
        Default is the option riesz_nmax.

    small : tuple
        Indices whose Riesz means are reported as exact small values.

    Returns
    =======

    out : RieszReport

    """
    settings = RieszSettings()
    nmax = settings.nmax if nmax is None else nmax
    if nmax < 1:
        raise InputError(f'riesz_subsequences needs nmax >= 1, got {nmax}')
    delta = DeltaSeq.counterexample(nmax, settings.max_bits) if delta is None else delta
    ns = list(range(nmax + 1))
    t_k = [riesz_mean_pow2(delta, 3**n) for n in ns]
    t_q = [riesz_mean_pow2(delta, 2*3**n) for n in ns]
    t_q_rec = [_next_q(t_k[n], 3**n) for n in ns]
    t_k_rec = [t_k[0]] + [_next_k(t_q[n - 1], 3**(n - 1), 2*3**(n - 1)) for n in ns[1:]]
    t_k_chain, t_q_chain = [t_k[0]], []
    for n in ns:
        t_q_chain.append(_next_q(t_k_chain[n], 3**n))
        if n < nmax:
            t_k_chain.append(_next_k(t_q_chain[n], 3**n, 2*3**n))
    values = {str(p): riesz_mean(delta, p) for p in small}
    report = RieszReport(ns, t_k, t_q, t_k_rec, t_q_rec, t_k_chain, t_q_chain, values)
    if settings.verbose:
        report.view()
    return report


def within_block_envelope(delta=None, nmax=None, per_block=None):
    """
    Envelope of t_p sampled at p = 2^e for exponents spread inside each
    block up to k_nmax, cut at the k_n.
    """
    settings = RieszSettings()
    nmax = settings.nmax if nmax is None else nmax
    per_block = settings.per_block if per_block is None else per_block
    delta = DeltaSeq.counterexample(nmax, settings.max_bits) if delta is None else delta
    top = 3**nmax
    exps = set()
    for b in delta.blocks:
        lo = 0 if b.lo_exp is None else b.lo_exp
        hi = top if b.hi_exp is None else min(b.hi_exp, top)
        if lo >= top:
            break
        exps.update(lo + int(round(i*(hi - lo)/per_block)) for i in range(1, per_block + 1))
        exps.add(lo + 1)
    exps = sorted(e for e in exps if 1 <= e <= top)
    keys = [e*LOG2 for e in exps]
    values = [riesz_mean_pow2(delta, e) for e in exps]
    cutoffs = [3**n*LOG2 for n in range(1, nmax + 1)]
    return tail_envelope('riesz_within_blocks', keys, values, cutoffs, indices=[f'2^{e}' for e in exps])


def moricz_expression(s, lam, p, corrected=True, settings=None):
    """
    Evaluate the Moricz expression of a sequence s at p.

    For lam > 1, with P = floor(p^lam),
    (1/N) sum_{k=p+1}^{P} (s_k - s_p)/k, and for lam < 1
    (1/N) sum_{k=P+1}^{p} (s_p - s_k)/k.
    The corrected normalizer is N = |H_P - H_p|, the uncorrected one
    N = |P - p| H_p.

    Parameters
    ==========

    s : callable
        Vectorized sequence, s(k) for a float array of indices.

    lam : float
        Exponent, lam != 1.

    p : int
        Index, p >= 3.

    corrected : bool
        Normalizer choice.

    Returns
    =======

    out : float

    """
    settings = settings if settings is not None else RieszSettings()
    if p < 3:
        raise InputError(f'moricz_expression needs p >= 3, got {p}')
    if lam <= 0 or lam == 1:
        raise InputError(f'moricz_expression needs 0 < lam != 1, got {lam}')
    x = math.exp(lam*math.log(p))
    P = int(round(x)) if abs(x - round(x)) <= 1e-9*x else int(math.floor(x))
    lo, hi = (p, P) if lam > 1 else (P, p)
    if hi <= lo:
        raise InputError(f'empty summation range for p = {p}, lam = {lam}')
    if hi - lo > settings.term_cap:
        raise OutOfReach(f'{hi - lo} terms requested, riesz_term_cap is {settings.term_cap}')
    sp = float(s(np.array([float(p)]))[0])
    partial = []
    for a in range(lo + 1, hi + 1, settings.chunk):
        k = np.arange(a, min(a + settings.chunk, hi + 1), dtype=np.float64)
        partial.append(float(np.sum((s(k) - sp)/k)))
    total = math.fsum(partial)
    if lam < 1:
        total = -total
    if corrected:
        norm = harmonic_diff(lo, hi)
    else:
        norm = (hi - lo)*harmonic(p)
    return total/norm


def moricz_scan(s, lambdas=(1.1, 1.25, 1.5, 0.7, 0.8, 0.9), ps=(10**3, 10**4, 10**5), corrected=None):
    """
    Table of Moricz expressions over lambdas and ps; corrected None gives
    both normalizers.
    """
    settings = RieszSettings()
    rows = []
    modes = (True, False) if corrected is None else (corrected,)
    for lam in lambdas:
        for p in ps:
            row = {'lambda': lam, 'p': p}
            for mode in modes:
                key = 'corrected' if mode else 'uncorrected'
                try:
                    row[key] = moricz_expression(s, lam, p, mode, settings)
                except OutOfReach:
                    row[key] = math.nan
            rows.append(row)
    return pd.DataFrame(rows)


def moricz_comparison(s=None, lam=1.5, ps=(10**3, 10**4, 10**5)):
    """
    Compare both normalizers on s (default s_k = log log k): the corrected
    expression is stable in p, the uncorrected one decays.
    """
    if s is None:
        s = lambda k: np.log(np.log(k))
    table = moricz_scan(s, (lam,), ps)
    corr = table['corrected'].to_numpy()
    unc = table['uncorrected'].to_numpy()
    spread = float((corr.max() - corr.min())/abs(corr).max())
    decay = float(abs(unc[0])/abs(unc[-1])) if unc[-1] != 0 else math.inf
    status = PASS if spread < 0.1 and decay >= 10 else FAIL
    return Verdict('moricz_normalizer', status,
                   constants={'corrected_spread': spread, 'uncorrected_decay': decay,
                              'lambda': lam},
                   indices={'p': list(ps)},
                   horizon=max(ps),
                   message='corrected stable, uncorrected decaying'), table


class RieszSeq(QuotientSeq):
    """
    log m_p = sum_{k<=p} delta_k/k, so that log m_p/log p is the Riesz mean
    t_p. With the counterexample delta, liminf t_p = 5/2 (along k_n) and
    limsup t_p = 11/4 (along q_n).
    """
    def __init__(self, delta=None, settings=None):
        super(RieszSeq, self).__init__(settings)
        self.depth = self.settings.depth_riesz
        self.delta_seq = DeltaSeq.counterexample(self.depth + 1) if delta is None else delta
        self._spec = FamilySpec('example_riesz')
        # mean of log m over [0, lo] at the lower end of each block
        self._cum = [0.]
        for i, b in enumerate(self.delta_seq.blocks[:-1]):
            if b.hi is None:
                break
            a, c = b.lo, b.hi
            S = self.delta_seq.prefix[i]
            nxt = (self._cum[-1]*((a + 1)/(c + 1)) + ((c - a)/(c + 1))*(S - b.delta)
                   + b.delta*harmonic_diff_pow2(b.lo_exp, b.hi_exp))
            self._cum.append(nxt)

    def log_quotient(self, p):
        return self.delta_seq.log_sum(self._check_index(p))

    def mean_log_quotient(self, p):
        p = self._check_index(p)
        x = p - 1
        if x == 0:
            return 0.
        i = self.delta_seq.block_of(x)
        if i >= len(self._cum):
            raise OutOfReach(f'index of {p.bit_length()} bits beyond the tabulated blocks')
        b = self.delta_seq.blocks[i]
        a = b.lo
        S = self.delta_seq.prefix[i]
        return (self._cum[i]*((a + 1)/p) + ((x - a)/p)*(S - b.delta)
                + b.delta*harmonic_diff(a, x))

    def log_quotients(self, n):
        if n == 0:
            return np.zeros(0)
        k = np.arange(1, n, dtype=np.float64)
        return np.concatenate(([0.], np.cumsum(self._delta_array(n)/k)))

    def _delta_array(self, n):
        # delta_k for 1 <= k < n
        out = np.empty(max(n - 1, 0))
        for b in self.delta_seq.blocks:
            lo = b.lo
            hi = n - 1 if b.hi is None else min(b.hi, n - 1)
            if lo >= n - 1:
                break
            out[lo:hi] = b.delta
        return out

    def count_below(self, logt):
        if logt < 0:
            return 0
        blocks, prefix = self.delta_seq.blocks, self.delta_seq.prefix
        for i, b in enumerate(blocks):
            top = prefix[i + 1] if i + 1 < len(prefix) else math.inf
            if logt < top:
                break
        else:
            raise OutOfReach(f'log t = {logt} beyond the delta blocks')
        if i + 1 >= len(prefix) or b.lo is None:
            raise OutOfReach(f'log t = {logt} beyond the tabulated blocks')
        r = (logt - prefix[i])/b.delta
        if b.lo == 0:
            logx = max(r - EULER_GAMMA, 0.)
        else:
            logx = log_index(b.lo) + r + harmonic_eps(b.lo)
        return self._refine_count(index_from_log(logx) + 1, logt)

    def default_budget(self):
        return 2*3**self.depth + 2

    def structural_points(self, bits):
        points = set()
        for n in range(self.depth + 1):
            ek, eq = 3**n, 2*3**n
            for e in (ek, eq):
                if e + 1 <= bits:
                    v = 1 << e
                    points.update((v - 1, v, v + 1))
            for lo, hi in ((ek, eq), (eq, 3*ek)):
                for i in range(1, 9):
                    e = lo + ((hi - lo)*i)//9
                    if e + 1 <= bits:
                        points.add(1 << e)
        return points

    def cutoffs(self, budget=None):
        return [1 << 3**n for n in range(1, self.depth + 1)]
