"""Smooth-integer arithmetic: prime sieves, canonical factorizations,
ordered enumeration of S(x, y) = {n <= x : P(n) <= y}, and exact counts
of |S(x, y)| by two independent methods.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from functools import cached_property
from heapq import heappop, heappush
from math import isqrt, log
from typing import Iterator

import numpy as np

from friabilis._backend import kernels
from friabilis.errors import DomainError, ResourceLimitError

SIEVE_CEILING = 10**7  # largest admissible sieve limit
ENUM_CEILING = 10**8  # largest admissible |S(x, y)| per enumeration
MEMO_CEILING = 10**7  # largest admissible recursion memo table
N_CEILING = 2**62  # divisor products must stay inside int64

CACHE_ENV = "FRIABILIS_CACHE"
_CACHE_MAGIC = b"FBSV"
_CACHE_VERSION = 1

# tiny in-process cache of recent prime masks, keyed by limit
_mask_cache: dict[int, np.ndarray] = {}
_MASK_CACHE_SLOTS = 4


def _cache_path(cache_dir: str, limit: int) -> str:
    return os.path.join(cache_dir, f"sieve_{limit}.bits")


def _write_sieve_cache(path: str, limit: int, mask: np.ndarray) -> None:
    # little-endian header: magic, version u16, limit u64, then packed bits
    payload = np.packbits(mask.view(np.uint8), bitorder="little").tobytes()
    header = _CACHE_MAGIC + struct.pack("<HQ", _CACHE_VERSION, limit)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(payload)
    os.replace(tmp, path)


def _read_sieve_cache(path: str, limit: int) -> np.ndarray | None:
    try:
        with open(path, "rb") as fh:
            header = fh.read(len(_CACHE_MAGIC) + 10)
            if len(header) < len(_CACHE_MAGIC) + 10:
                return None
            if header[: len(_CACHE_MAGIC)] != _CACHE_MAGIC:
                return None
            version, stored = struct.unpack("<HQ", header[len(_CACHE_MAGIC) :])
            if version != _CACHE_VERSION or stored != limit:
                return None
            payload = fh.read()
    except OSError:
        return None
    bits = np.frombuffer(payload, dtype=np.uint8)
    mask = np.unpackbits(bits, count=limit + 1, bitorder="little")
    return mask.view(np.bool_)


def _prime_mask(limit: int, cache_dir: str | None = None) -> np.ndarray:
    cached = _mask_cache.get(limit)
    if cached is not None:
        return cached
    directory = cache_dir if cache_dir is not None else os.environ.get(CACHE_ENV)
    mask = None
    if directory:
        mask = _read_sieve_cache(_cache_path(directory, limit), limit)
    if mask is None:
        mask = kernels.prime_mask(limit)
        if directory:
            os.makedirs(directory, exist_ok=True)
            _write_sieve_cache(_cache_path(directory, limit), limit, mask)
    if len(_mask_cache) >= _MASK_CACHE_SLOTS:
        _mask_cache.pop(next(iter(_mask_cache)))
    _mask_cache[limit] = mask
    return mask


def sieve_primes(limit, *, ceiling: int = SIEVE_CEILING, cache_dir: str | None = None):
    """All primes <= limit as an ascending int64 array.

    Parameters
    ----------
    limit : int
        Upper bound, inclusive.  Values below 2 give an empty array.
    ceiling : int
        Resource guard; limits above it raise ResourceLimitError.
    cache_dir : str, optional
        Directory for the versioned bitset cache.  Defaults to the
        FRIABILIS_CACHE environment variable; caching is off when neither
        is set.
    """
    limit = int(limit)
    if limit > ceiling:
        raise ResourceLimitError(
            f"sieve limit {limit} exceeds ceiling {ceiling}"
        )
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = _prime_mask(limit, cache_dir)
    return np.nonzero(mask)[0].astype(np.int64)


@dataclass(frozen=True)
class Factorization:
    """Canonical factorization n = prod p**e with strictly increasing primes.

    The empty tuple represents n = 1.  Exponents are >= 1; both constraints
    are enforced on construction.
    """

    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        last = 1
        for p, e in self.factors:
            if p <= last:
                raise DomainError("primes must be strictly increasing")
            if e < 1:
                raise DomainError("exponents must be >= 1")
            last = p

    @cached_property
    def n(self) -> int:
        value = 1
        for p, e in self.factors:
            value *= p**e
        return value

    @cached_property
    def log_n(self) -> float:
        return sum(e * log(p) for p, e in self.factors)

    @property
    def tau(self) -> int:
        t = 1
        for _, e in self.factors:
            t *= e + 1
        return t

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def max_prime(self) -> int:
        """Largest prime factor, with the convention P(1) = 1."""
        return self.factors[-1][0] if self.factors else 1

    def is_smooth(self, y) -> bool:
        return self.max_prime <= y

    @classmethod
    def from_int(cls, n) -> "Factorization":
        return factorize(n)


def factorize(n) -> Factorization:
    """Factor n by trial division over sieved primes.

    n must satisfy 1 <= n < 2**62 so downstream divisor products stay in
    int64.  Trial primes stop at min(sqrt(n), SIEVE_CEILING); a cofactor
    small enough to have been reached by that range is prime, and anything
    larger raises ResourceLimitError rather than guessing.
    """
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    if n >= N_CEILING:
        raise DomainError(f"n must be < 2**62, got {n}")
    if n == 1:
        return Factorization(())
    factors = []
    m = n
    bound = min(isqrt(n), SIEVE_CEILING)
    for p in sieve_primes(bound).tolist():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
    if m > 1:
        if isqrt(m) > bound:
            raise ResourceLimitError(
                f"cofactor {m} has no prime factor <= {bound}; "
                "certifying it needs trial division past the sieve ceiling"
            )
        factors.append((m, 1))
    return Factorization(tuple(factors))


def _factors_from_spf(n: int, spf: np.ndarray) -> tuple[tuple[int, int], ...]:
    factors = []
    m = n
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        factors.append((p, e))
    return tuple(factors)


def _iter_smooth_heap(x: int, y: int, limit: int) -> Iterator[Factorization]:
    primes = sieve_primes(min(x, y)).tolist()
    # heap entries (n, i, factors): i is the index of P(n); each smooth
    # number is pushed exactly once because prime indices never decrease
    heap: list[tuple[int, int, tuple[tuple[int, int], ...]]] = [(1, 0, ())]
    emitted = 0
    while heap:
        n, i, factors = heappop(heap)
        emitted += 1
        if emitted > limit:
            raise ResourceLimitError(
                f"enumeration of S({x}, {y}) exceeds ceiling {limit}"
            )
        f = Factorization(factors)
        f.__dict__["n"] = n  # seed the cached property; the heap already knows n
        yield f
        for j in range(i, len(primes)):
            p = primes[j]
            if n * p > x:
                break
            if j == i and factors:
                child = factors[:-1] + ((p, factors[-1][1] + 1),)
            else:
                child = factors + ((p, 1),)
            heappush(heap, (n * p, j, child))


def _iter_smooth_range(x: int, limit: int) -> Iterator[Factorization]:
    if x > limit:
        raise ResourceLimitError(f"enumeration of [1, {x}] exceeds ceiling {limit}")
    spf = kernels.spf_sieve(x)
    yield Factorization(())
    for n in range(2, x + 1):
        f = Factorization(_factors_from_spf(n, spf))
        f.__dict__["n"] = n
        yield f


@dataclass(frozen=True)
class SmoothSet:
    """S(x, y) as a restartable stream of factorizations in increasing n.

    Each __iter__ call starts an independent enumeration, so one SmoothSet
    can back several consumers.
    """

    x: int
    y: int
    limit: int = ENUM_CEILING

    def __iter__(self) -> Iterator[Factorization]:
        if self.y >= self.x and self.x <= SIEVE_CEILING:
            return _iter_smooth_range(self.x, self.limit)
        return _iter_smooth_heap(self.x, self.y, self.limit)

    def count(self) -> int:
        return psi_exact(self.x, self.y, limit=self.limit)


def enumerate_smooth(x, y, *, limit: int = ENUM_CEILING) -> SmoothSet:
    """The stream of y-smooth integers n <= x, ascending, as Factorizations.

    Raises ResourceLimitError mid-stream if the count passes `limit`.
    """
    x = int(x)
    y = int(y)
    if x < 1:
        raise DomainError("x must be >= 1")
    if y < 2:
        raise DomainError("y must be >= 2")
    return SmoothSet(x, y, limit)


def psi_exact(x, y, *, limit: int = ENUM_CEILING) -> int:
    """|S(x, y)| by explicit enumeration (depth-first product walk).

    Every smooth integer is visited once; no counting identities are used,
    which keeps this independent of psi_recursive.
    """
    x = int(x)
    y = int(y)
    if x < 1:
        return 0
    if y < 2:
        return 1
    primes = sieve_primes(min(x, y)).tolist()
    total = 0
    stack = [(x, 0)]
    while stack:
        bound, i = stack.pop()
        total += 1
        if total > limit:
            raise ResourceLimitError(
                f"enumeration of S({x}, {y}) exceeds ceiling {limit}"
            )
        for j in range(i, len(primes)):
            p = primes[j]
            if p > bound:
                break
            stack.append((bound // p, j))
    return total


def psi_recursive(x, y, *, memo_limit: int = MEMO_CEILING) -> int:
    """|S(x, y)| via the memoized recursion Psi(x, y) = 1 + sum over p <= y
    of Psi(x/p, p), splitting on the largest prime factor.
    """
    x = int(x)
    y = int(y)
    if x < 1:
        return 0
    if y < 2:
        return 1
    primes = sieve_primes(min(x, y)).tolist()
    memo: dict[tuple[int, int], int] = {}

    def rec(bound: int, k: int) -> int:
        # number of integers <= bound composed of the first k primes
        while k > 0 and primes[k - 1] > bound:
            k -= 1
        if k == 0:
            return 1 if bound >= 1 else 0
        key = (bound, k)
        hit = memo.get(key)
        if hit is not None:
            return hit
        total = 1
        for j in range(k):
            total += rec(bound // primes[j], j + 1)
        if len(memo) >= memo_limit:
            raise ResourceLimitError(f"memo table exceeds ceiling {memo_limit}")
        memo[key] = total
        return total

    return rec(x, len(primes))
