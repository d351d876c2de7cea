# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: sieves, batched divisor-law summaries, divisor products.

The NumPy fallback friabilis._kernels_py exposes the same functions with the
same dtypes; friabilis._backend picks whichever imports.
"""

from libc.math cimport exp as cexp
from libc.math cimport floor, log

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


def kahan_sum(values):
    """Compensated (Kahan) sum of a float64 array."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] arr = np.ascontiguousarray(
        values, dtype=np.float64)
    cdef double total = 0.0, comp = 0.0, y, t
    cdef Py_ssize_t i, n = arr.shape[0]
    for i in range(n):
        y = arr[i] - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def prime_mask(limit):
    """Boolean array of length limit+1, True exactly at primes."""
    if limit < 0:
        raise ValueError("limit must be >= 0")
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] mask = np.ones(limit + 1, dtype=np.uint8)
    cdef Py_ssize_t i, j, n = limit
    if n >= 0:
        mask[0] = 0
    if n >= 1:
        mask[1] = 0
    i = 2
    while i * i <= n:
        if mask[i]:
            j = i * i
            while j <= n:
                mask[j] = 0
                j += i
        i += 1
    return mask.view(np.bool_)


def spf_sieve(limit):
    """Smallest-prime-factor table for 0..limit (spf[0] = 0, spf[1] = 1)."""
    if limit < 0:
        raise ValueError("limit must be >= 0")
    cdef cnp.ndarray[cnp.int64_t, ndim=1] spf = np.zeros(limit + 1, dtype=np.int64)
    cdef Py_ssize_t i, j, n = limit
    if n >= 1:
        spf[1] = 1
    i = 2
    while i <= n:
        if spf[i] == 0:
            spf[i] = i
            if i * i <= n:
                j = i * i
                while j <= n:
                    if spf[j] == 0:
                        spf[j] = i
                    j += i
        i += 1
    return spf


def moment_scan(limit):
    """Divisor-law summary for every n in 0..limit.

    Returns (tau, m2, m4) as in the fallback: divisor counts and the second
    and fourth central moments of the uniform log-divisor law.
    """
    if limit < 0:
        raise ValueError("limit must be >= 0")
    cdef cnp.ndarray[cnp.int64_t, ndim=1] spf = spf_sieve(limit)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] tau = np.ones(limit + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] m2 = np.zeros(limit + 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] m4 = np.zeros(limit + 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] logt = np.zeros(limit + 1, dtype=np.float64)
    cdef Py_ssize_t n, m
    cdef long long p, nu, t
    cdef double lp, lp2, a2, a4
    tau[0] = 0
    # log only needed at primes; fill lazily from spf
    for n in range(2, limit + 1):
        if spf[n] == n:
            logt[n] = log(<double>n)
    for n in range(2, limit + 1):
        m = n
        t = 1
        a2 = 0.0
        a4 = 0.0
        while m > 1:
            p = spf[m]
            nu = 0
            while m > 1 and spf[m] == p:
                m //= p
                nu += 1
            lp = logt[p]
            lp2 = lp * lp
            a2 += nu * (nu + 2) * lp2
            a4 += nu * (nu + 2) * (3 * nu * nu + 6 * nu - 4) * lp2 * lp2
            t *= nu + 1
        tau[n] = t
        m2[n] = a2 / 12.0
        m4[n] = a4 / 240.0
    return tau, m2, m4


def divisor_products(primes, exponents):
    """All divisors of prod p**e as a sorted int64 array."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ps = np.ascontiguousarray(
        primes, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] es = np.ascontiguousarray(
        exponents, dtype=np.int64)
    cdef Py_ssize_t k = ps.shape[0], i, size = 1, j, b
    cdef long long total = 1, p, e, pw
    for i in range(k):
        total *= es[i] + 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] divs = np.empty(total, dtype=np.int64)
    divs[0] = 1
    for i in range(k):
        p = ps[i]
        e = es[i]
        pw = 1
        for j in range(1, e + 1):
            pw *= p
            for b in range(size):
                divs[size * j + b] = divs[b] * pw
        size *= e + 1
    divs_np = np.asarray(divs)
    divs_np.sort()
    return divs_np


def tau_sieve(limit):
    """Divisor counts tau(n) for n in 0..limit (tau[0] = 0)."""
    if limit < 0:
        raise ValueError("limit must be >= 0")
    cdef cnp.ndarray[cnp.int64_t, ndim=1] tau = np.zeros(limit + 1, dtype=np.int64)
    cdef Py_ssize_t d, m, n = limit
    for d in range(1, n + 1):
        m = d
        while m <= n:
            tau[m] += 1
            m += d
    return tau


def small_divisor_count_sieve(limit, v):
    """Counts of divisors d of n with d <= n**v, for every n in 0..limit."""
    if limit < 0:
        raise ValueError("limit must be >= 0")
    cdef double vv = v
    if not 0.0 < vv <= 1.0:
        raise ValueError("v must lie in (0, 1]")
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(limit + 1, dtype=np.int64)
    cdef double inv = 1.0 / vv
    cdef long long inv_int = <long long>floor(inv + 0.5)
    cdef bint exact = (inv - inv_int < 1e-12) and (inv - inv_int > -1e-12)
    cdef long long d, m0, start, m, n = limit, j
    for d in range(1, n + 1):
        if exact:
            m0 = 1
            for j in range(inv_int):
                m0 *= d
                if m0 > n:
                    break
        else:
            if d == 1:
                m0 = 1
            else:
                m0 = <long long>floor(cexp(log(<double>d) * inv))
                if m0 < 1:
                    m0 = 1
                while vv * log(<double>m0) < log(<double>d):
                    m0 += 1
                while m0 > 1 and vv * log(<double>(m0 - 1)) >= log(<double>d):
                    m0 -= 1
        if m0 > n:
            break
        start = ((m0 + d - 1) // d) * d
        if start > n:
            continue
        m = start
        while m <= n:
            out[m] += 1
            m += d
    return out
