# License: BSD 3 clause
"""
Log-domain helpers for exact (unbounded) integer indices and
harmonic numbers.

Indices are plain python ints; their logarithms are derived with
math.log, which is correctly rounded for ints of any size.
"""
import math
import sys
from functools import lru_cache
import numpy as np

from .errors import InputError

LOG2 = math.log(2.)
LOG3 = math.log(3.)
EULER_GAMMA = float(np.euler_gamma)

# harmonic numbers are summed term by term up to this index
HARMONIC_EXACT = 10**7
# counting values above this are only float accurate
EXACT_INDEX = 2**50

# largest argument of math.exp with a finite result
LOG_FLOAT_MAX = math.log(sys.float_info.max)


def exp_clamped(x):
    """Return exp(x), inf when it overflows the double range."""
    if x >= LOG_FLOAT_MAX:
        return math.inf
    return math.exp(x)


def log_index(p):
    """
    Return log(p) for a nonnegative integer p of any size.

    Parameters
    ==========

    p : int
        The index.

    Returns
    =======

    out : float
        log(p), -inf for p = 0.

    """
    if p < 0:
        raise InputError(f'negative index {p}')
    if p == 0:
        return -math.inf
    return math.log(p)


def log2_index(p):
    if p <= 0:
        return -math.inf
    return math.log2(p)


def log_ratio(p, a):
    """
    Return log(p/a) for positive integers without cancellation when p is
    close to a.
    """
    if 0 < p < 2*a and a < 2*p:
        return math.log1p((p - a)/a)
    return math.log(p) - math.log(a)


def log_shift(p, c):
    """Return log(p + c) for an integer p >= 0 and a float c >= 0."""
    if p < 2**53:
        return math.log(p + c)
    lp = math.log(p)
    return lp + math.log1p(c*math.exp(-lp))


def index_from_log(logp):
    """
    Return floor(exp(logp)) as an int.

    The result is exact as long as exp(logp) is representable; beyond the
    double range only the 53 leading bits are significant.
    """
    if logp < 0:
        return 0
    if logp < 700.:
        return int(math.floor(math.exp(logp)))
    l2 = logp/LOG2
    e = int(math.floor(l2))
    mant = 2.**(l2 - e)
    return int(mant*2**52) << (e - 52)


def log_grid(xmin, xmax, per_decade=64):
    """
    Return an equispaced grid in x = log(t) with per_decade points for each
    decade of t.
    """
    h = math.log(10.)/per_decade
    n = int(math.floor((xmax - xmin)/h + 1e-9)) + 1
    return xmin + h*np.arange(n)


def _eps_series(x):
    return x/2 - x**2/12 + x**4/120 - x**6/252


def harmonic_asymptotic(p):
    """Euler-Maclaurin expansion of H_p, accurate to rounding for p > 20."""
    lp = log_index(p)
    x = 1/p
    return lp + EULER_GAMMA + _eps_series(x)


@lru_cache(maxsize=4096)
def harmonic(p):
    """
    Return the harmonic number H_p = 1 + 1/2 + ... + 1/p.

    Parameters
    ==========

    p : int
        The index, p >= 1.

    Returns
    =======

    out : float
        H_p, summed term by term for p <= HARMONIC_EXACT and with the
        asymptotic expansion log p + gamma + 1/(2p) - 1/(12p^2) + ...
        beyond.

    """
    if p < 1:
        raise InputError(f'harmonic number needs p >= 1, got {p}')
    if p <= 10**5:
        return math.fsum(1./np.arange(1, p + 1))
    if p <= HARMONIC_EXACT:
        # numpy sums pairwise
        return float(np.sum(1./np.arange(p, 0, -1, dtype=np.float64)))
    return harmonic_asymptotic(p)


def harmonic_eps(p):
    """Return H_p - log p - gamma."""
    if p <= HARMONIC_EXACT:
        return harmonic(p) - math.log(p) - EULER_GAMMA
    return _eps_series(1/p)


def harmonic_diff(a, b):
    """Return H_b - H_a for 0 <= a <= b (H_0 = 0)."""
    if b < a:
        raise InputError(f'harmonic_diff needs a <= b, got {a} > {b}')
    if a == b:
        return 0.
    if a == 0:
        return harmonic(b)
    if b <= HARMONIC_EXACT:
        return harmonic(b) - harmonic(a)
    return log_ratio(b, a) + harmonic_eps(b) - harmonic_eps(a)


def harmonic_eps_pow2(e):
    """Return H_p - log p - gamma for p = 2**e, with e possibly huge."""
    if e <= 23:
        return harmonic_eps(2**e)
    return _eps_series(math.ldexp(1., -e))


def harmonic_pow2(e):
    """Return H_{2^e} without materializing 2^e."""
    return e*LOG2 + EULER_GAMMA + harmonic_eps_pow2(e)


def harmonic_diff_pow2(ea, eb):
    """
    Return H_{2^eb} - H_{2^ea}; ea = None stands for the lower index 0.
    """
    if ea is None:
        return harmonic_pow2(eb)
    return (eb - ea)*LOG2 + harmonic_eps_pow2(eb) - harmonic_eps_pow2(ea)


def prefix_sums(x, chunk=1024):
    """
    Return the array [0, x_0, x_0 + x_1, ...] of length len(x) + 1.

    Partial sums are formed inside chunks and the chunk offsets are
    accumulated with Neumaier compensation, so the absolute error stays
    near the rounding of the result.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    out = np.zeros(n + 1)
    if n == 0:
        return out
    nchunk = (n + chunk - 1)//chunk
    padded = np.zeros(nchunk*chunk)
    padded[:n] = x
    local = np.cumsum(padded.reshape(nchunk, chunk), axis=1)
    offsets = np.zeros(nchunk)
    s, c = 0., 0.
    for i, total in enumerate(local[:, -1]):
        offsets[i] = s + c
        t = s + total
        if abs(s) >= abs(total):
            c += (s - t) + total
        else:
            c += (total - t) + s
        s = t
    out[1:] = (local + offsets[:, None]).ravel()[:n]
    return out
