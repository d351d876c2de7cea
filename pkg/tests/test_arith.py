"""Factorization, smooth enumeration, and Psi counting against brute-force
oracles that share no code with the implementations under test."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from friabilis.arith import (
    ENUM_CEILING,
    Factorization,
    SmoothSet,
    enumerate_smooth,
    factorize,
    psi_exact,
    psi_recursive,
    sieve_primes,
)
from friabilis.errors import DomainError, ResourceLimitError


def brute_factor(n: int) -> tuple[tuple[int, int], ...]:
    out = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def brute_psi(x: int, y: int) -> int:
    # largest-prime-factor scan, O(x log x), fully independent of the package
    lpf = np.zeros(x + 1, dtype=np.int64)
    for p in range(2, x + 1):
        if lpf[p] == 0:
            lpf[p::p] = p
    return 1 + int(np.count_nonzero(lpf[2:] <= y))


@pytest.mark.parametrize("n", [1, 2, 12, 97, 720720, 2**19, 2**61, 3**37, 104729**2])
def test_factorize_matches_trial_division(n):
    assert factorize(n).factors == brute_factor(n)


def test_factorize_refuses_uncertifiable_cofactor():
    # 2**62 - 1 = 3 * 715827883 * 2147483647; the big primes sit past the
    # sieve ceiling, so trial division cannot certify the cofactor
    with pytest.raises(ResourceLimitError):
        factorize(2**62 - 1)


@given(st.integers(min_value=1, max_value=10**6))
@settings(max_examples=200, deadline=None)
def test_factorize_roundtrip(n):
    f = factorize(n)
    prod = 1
    for p, e in f.factors:
        prod *= p**e
    assert prod == n == f.n
    assert all(e >= 1 for _, e in f.factors)
    assert list(dict(f.factors)) == sorted(p for p, _ in f.factors)


def test_factorize_domain():
    with pytest.raises(DomainError):
        factorize(0)
    with pytest.raises(DomainError):
        factorize(2**62)


def test_factorization_accessors():
    f = factorize(360)
    assert f.tau == 24
    assert f.omega == 3
    assert f.max_prime == 5
    assert f.is_smooth(5) and not f.is_smooth(4)
    assert f.log_n == pytest.approx(math.log(360), rel=1e-15)
    one = factorize(1)
    assert one.tau == 1 and one.omega == 0 and one.max_prime == 1


def test_sieve_primes_small():
    assert sieve_primes(50).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


def test_sieve_cache_roundtrip(tmp_path):
    first = sieve_primes(10_000, cache_dir=str(tmp_path))
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    second = sieve_primes(10_000, cache_dir=str(tmp_path))
    np.testing.assert_array_equal(first, second)


def test_sieve_cache_rejects_corruption(tmp_path):
    sieve_primes(2_000, cache_dir=str(tmp_path))
    path = next(tmp_path.iterdir())
    raw = bytearray(path.read_bytes())
    raw[0] ^= 0xFF
    path.write_bytes(bytes(raw))
    # corrupt magic falls back to a fresh sieve rather than bad primes
    np.testing.assert_array_equal(
        sieve_primes(2_000, cache_dir=str(tmp_path)), sieve_primes(2_000)
    )


@pytest.mark.parametrize(
    "x,y",
    [(1, 2), (10, 3), (100, 2), (100, 3), (1000, 7), (5000, 13), (300, 300)],
)
def test_psi_against_brute_scan(x, y):
    expect = brute_psi(x, y)
    assert psi_exact(x, y) == expect
    assert psi_recursive(x, y) == expect


def test_enumeration_matches_brute_membership():
    x, y = 2000, 11
    got = sorted(f.n for f in enumerate_smooth(x, y))
    lpf = np.zeros(x + 1, dtype=np.int64)
    for p in range(2, x + 1):
        if lpf[p] == 0:
            lpf[p::p] = p
    expect = [1] + [n for n in range(2, x + 1) if lpf[n] <= y]
    assert got == expect


def test_enumeration_factorizations_are_consistent():
    for f in enumerate_smooth(3000, 7):
        assert f.factors == brute_factor(f.n)
        assert f.max_prime <= 7


def test_heap_and_range_paths_agree():
    # y >= x takes the sieve path; a filtered heap run must agree with it
    range_ns = [f.n for f in SmoothSet(400, 400)]
    heap_ns = [f.n for f in SmoothSet(400, 397)]  # 397 is the largest prime <= 400
    assert range_ns == heap_ns


def test_smoothset_is_restartable():
    s = enumerate_smooth(500, 5)
    assert [f.n for f in s] == [f.n for f in s]
    assert s.count() == len(list(s))


def test_enumeration_is_sorted_unique():
    ns = [f.n for f in enumerate_smooth(10**5, 13)]
    assert ns == sorted(set(ns))


def test_enumeration_limit_raises():
    with pytest.raises(ResourceLimitError):
        list(SmoothSet(10**6, 7, limit=10))


def test_psi_conventions_and_limits():
    # degenerate corners take the counting convention, not an error:
    # nothing is <= 0, and only n = 1 is 1-smooth
    assert psi_exact(0, 10) == 0
    assert psi_exact(10, 1) == 1
    assert psi_recursive(0, 10) == 0
    assert psi_recursive(10, 1) == 1
    with pytest.raises(ResourceLimitError):
        psi_exact(10**6, 97, limit=100)
    assert ENUM_CEILING >= 10**8


@given(
    st.integers(min_value=2, max_value=3000),
    st.sampled_from([2, 3, 5, 7, 11, 13, 19, 97]),
)
@settings(max_examples=80, deadline=None)
def test_psi_pair_agreement(x, y):
    assert psi_exact(x, y) == psi_recursive(x, y)


def test_factorization_rejects_bad_tuples():
    with pytest.raises(DomainError):
        Factorization(((3, 1), (2, 1)))  # out of order
    with pytest.raises(DomainError):
        Factorization(((2, 1), (2, 1)))  # repeated prime
    with pytest.raises(DomainError):
        Factorization(((2, 0),))  # zero exponent
