"""The exact law of the uniform random log-divisor of n: closed-form
moments, the full atom list by convolution over prime powers, tail queries
with a closed >= convention, and the additive statistics the averaged model
predicts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import log, sqrt
from typing import Iterator

import numpy as np

from friabilis._backend import kernels
from friabilis.arith import Factorization, N_CEILING
from friabilis.errors import DomainError, ResourceLimitError
from friabilis.saddle import SaddleContext

TAU_CEILING = 2 * 10**6  # largest admissible atom count
MERGE_TOL = 1e-12  # atoms closer than this collapse into one
NUDGE_SCALE = 1e-9  # collision nudge, in units of log n


@dataclass(frozen=True)
class DivisorMoments:
    """Closed-form summary of the log-divisor law of one n.

    m2 is the variance, m4 the fourth central moment, w = m2**2 / m4 the
    balance ratio (>= 5/9, with w = 1 when n = 1), t_max the largest single
    contribution (nu + 1) log p over p^nu || n (0 when n = 1).
    """

    tau: int
    m2: float
    m4: float
    w: float
    t_max: float

    @property
    def sigma_sq(self) -> float:
        return self.m2

    @property
    def sigma(self) -> float:
        return sqrt(self.m2)


def moments(f: Factorization) -> DivisorMoments:
    """Moment summary from the closed per-prime-power forms."""
    tau = 1
    m2 = 0.0
    m4 = 0.0
    t_max = 0.0
    for p, e in f.factors:
        lp = log(p)
        lp2 = lp * lp
        tau *= e + 1
        m2 += e * (e + 2) * lp2
        m4 += e * (e + 2) * (3 * e * e + 6 * e - 4) * lp2 * lp2
        t_max = max(t_max, (e + 1) * lp)
    m2 /= 12.0
    m4 /= 240.0
    w = 1.0 if not f.factors else m2 * m2 / m4
    return DivisorMoments(tau=tau, m2=m2, m4=m4, w=w, t_max=t_max)


@dataclass(frozen=True)
class DivisorLaw:
    """The exact distribution of log d for a uniform divisor d of n.

    values are the distinct atom positions (ascending float64), counts the
    integer multiplicities; masses are counts/tau exactly.  divisors holds
    the sorted integer divisors backing the law.
    """

    n: int
    tau: int
    mean: float
    values: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)
    divisors: np.ndarray = field(repr=False)
    _cum: np.ndarray = field(repr=False)

    def atoms(self) -> Iterator[tuple[float, Fraction]]:
        """(position, exact mass) pairs, ascending."""
        for v, c in zip(self.values.tolist(), self.counts.tolist()):
            yield v, Fraction(int(c), self.tau)

    def count_ge(self, t: float) -> int:
        """Number of divisors with log d >= t (atoms at t count fully)."""
        i = int(np.searchsorted(self.values, t, side="left"))
        return self.tau - (int(self._cum[i - 1]) if i > 0 else 0)

    def count_le(self, t: float) -> int:
        """Number of divisors with log d <= t."""
        i = int(np.searchsorted(self.values, t, side="right"))
        return int(self._cum[i - 1]) if i > 0 else 0

    def upper_tail(self, t: float) -> float:
        return self.count_ge(t) / self.tau

    def nearest_atom_gap(self, t: float) -> float:
        i = int(np.searchsorted(self.values, t))
        gap = np.inf
        if i < len(self.values):
            gap = min(gap, abs(float(self.values[i]) - t))
        if i > 0:
            gap = min(gap, abs(float(self.values[i - 1]) - t))
        return gap


def exact_law(f: Factorization, *, tau_ceiling: int = TAU_CEILING) -> DivisorLaw:
    """Build the full atom list of the log-divisor law of n.

    Divisors come from iterated integer convolution over the prime powers
    (the kernel), so distinct divisors are exact; atom positions closer than
    MERGE_TOL (possible only from float log collisions) are merged.
    """
    tau = f.tau
    if tau > tau_ceiling:
        raise ResourceLimitError(f"tau = {tau} exceeds ceiling {tau_ceiling}")
    n = f.n
    if n >= N_CEILING:
        raise DomainError("n must be < 2**62 for exact divisor products")
    primes = np.array([p for p, _ in f.factors], dtype=np.int64)
    exps = np.array([e for _, e in f.factors], dtype=np.int64)
    divisors = kernels.divisor_products(primes, exps)
    logs = np.log(divisors.astype(np.float64))
    if len(logs) > 1 and np.any(np.diff(logs) < MERGE_TOL):
        keep = np.empty(len(logs), dtype=bool)
        keep[0] = True
        keep[1:] = np.diff(logs) >= MERGE_TOL
        groups = np.cumsum(keep) - 1
        values = logs[keep]
        counts = np.bincount(groups).astype(np.int64)
    else:
        values = logs
        counts = np.ones(len(logs), dtype=np.int64)
    return DivisorLaw(
        n=n,
        tau=tau,
        mean=0.5 * f.log_n,
        values=values,
        counts=counts,
        divisors=divisors,
        _cum=np.cumsum(counts),
    )


def exact_upper_tail(law: DivisorLaw, t: float) -> float:
    """P(log-divisor >= t) under the closed convention (atoms at t included)."""
    return law.upper_tail(t)


def nudge_off_atom(law: DivisorLaw, t: float) -> tuple[float, bool]:
    """Move a query off an atom it collides with (within MERGE_TOL).

    The shift is NUDGE_SCALE * log n, repeated if the landing spot collides
    again.  n = 1 has its single atom at 0 and a zero shift unit, so it is
    returned unchanged; the closed convention covers it.
    """
    if law.n == 1:
        return t, False
    if law.nearest_atom_gap(t) >= MERGE_TOL:
        return t, False
    step = NUDGE_SCALE * log(law.n)
    nudged = t
    for _ in range(64):
        nudged += step
        if law.nearest_atom_gap(nudged) >= MERGE_TOL:
            return nudged, True
    raise DomainError(f"could not move query off atoms of n = {law.n}")


def additive_fk(f: Factorization, k: int) -> float:
    """f_k(n) = sum over p^nu || n of (nu log p)^k; k = 0 counts prime
    factors without multiplicity.  Supported for 0 <= k <= 8."""
    if not 0 <= k <= 8:
        raise DomainError("k must lie in [0, 8]")
    if k == 0:
        return float(f.omega)
    return sum((e * log(p)) ** k for p, e in f.factors)


def model_mean_additive(ctx: SaddleContext, k: int, *, rel_tol: float = 1e-15) -> float:
    """Mean of f_k under the independent model at the saddle tilt:
    sum over p <= y, nu >= 1 of (nu log p)^k p^(-nu alpha) (1 - p^(-alpha)).

    The nu-sum stops once the geometric tail bound falls below rel_tol of
    the accumulated value, uniformly over primes.
    """
    if not 0 <= k <= 8:
        raise DomainError("k must lie in [0, 8]")
    lp = ctx.log_primes
    r = np.exp(-ctx.alpha * lp)  # p^-alpha, in (0, 1)
    acc = np.zeros_like(lp)
    power = np.ones_like(lp)
    nu = 0
    while True:
        nu += 1
        power = power * r
        term = power if k == 0 else (nu * lp) ** k * power
        acc += term
        # ratio of consecutive terms is r ((nu+1)/nu)^k < 1 for nu >= k/ln(1/r)
        ratio = r * ((nu + 1.0) / nu) ** k
        if np.all(ratio < 1.0):
            tail = term * ratio / (1.0 - ratio)
            if np.all(tail <= rel_tol * np.maximum(acc, 1e-300)):
                break
        if nu > 100000:
            raise ResourceLimitError("nu-sum failed to converge")
    return kernels.kahan_sum(acc * (1.0 - r))


def omega_window(f: Factorization, ctx: SaddleContext) -> int:
    """Count of p^nu || n with sqrt(y) < p <= y and u/(2 u_bar) <= nu
    <= 2u/u_bar: the window where typical prime-power factors live."""
    root_y = sqrt(ctx.y)
    lo = ctx.u / (2.0 * ctx.u_bar)
    hi = 2.0 * ctx.u / ctx.u_bar
    count = 0
    for p, e in f.factors:
        if p > root_y and p <= ctx.y and lo <= e <= hi:
            count += 1
    return count
