"""Tail machinery for the log-divisor law of a single n: the moment
generating function Z(s) = E exp(s log d), derivatives of log Z through
order four, the tilt beta solving the saddle equation, the tilted-Gaussian
tail approximation, and a truncated contour-integral evaluation of the tail.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import erfc, exp, log, pi, sqrt

import numpy as np

from friabilis.arith import Factorization, factorize
from friabilis.divdist import exact_law, moments, nudge_off_atom
from friabilis.errors import ConvergenceError, DomainError

_SQRT2 = sqrt(2.0)

# even-index Bernoulli numbers B_2 .. B_26, exact
_BERNOULLI = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
    Fraction(-174611, 330),
    Fraction(854513, 138),
    Fraction(-236364091, 2730),
    Fraction(8553103, 6),
)


def _series_coeffs(order: int) -> tuple[float, ...]:
    # gt_j(v, s) = v**j * P_j(x) with x = v s; P_j in powers of x**2 with an
    # extra factor x for odd-regular orders; coefficients B_k prod (k-i) / k!
    out = []
    fact = 1
    for m, b in enumerate(_BERNOULLI, start=1):
        k = 2 * m
        fact = fact * (k - 1) * k
        coeff = b
        for i in range(1, order):
            coeff *= k - i
        if order >= 3 and k == 2:
            continue  # the (k-1)(k-2).. factor vanishes; skip the k=2 slot
        out.append(float(Fraction(coeff) / fact))
    return tuple(out)


_C1 = _series_coeffs(1)
_C2 = _series_coeffs(2)
_C3 = _series_coeffs(3)
_C4 = _series_coeffs(4)

_SWITCH_X = 0.9  # |v s| below this uses the series; above, the closed form


def _poly_even(coeffs: tuple[float, ...], t: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def _gt(order: int, v: float, s: float) -> float:
    """Regular part of the order-th derivative kernel: g_order minus its
    v-independent pole term, evaluated without cancellation.

    g_1(v; s) = v / (1 - e^{-vs}) and g_{j+1} = d g_j / ds; the pole terms
    (-1)^{j-1} (j-1)!/s^j drop out of per-factor differences, so only the
    regular parts are ever combined.
    """
    x = v * s
    if abs(x) <= _SWITCH_X:
        t = x * x
        if order == 1:
            return v * (0.5 + x * _poly_even(_C1, t))
        if order == 2:
            return v * v * _poly_even(_C2, t)
        if order == 3:
            return v**3 * x * _poly_even(_C3, t)
        return v**4 * _poly_even(_C4, t)
    e = exp(-x)
    d = -np.expm1(-x)  # 1 - e^{-x}, sign-correct for x < 0
    if order == 1:
        return (x - 1.0 + e) / (s * d)
    if order == 2:
        return (d * d - x * x * e) / (s * d) ** 2
    if order == 3:
        return (x**3 * e * (1.0 + e) - 2.0 * d**3) / (s * d) ** 3
    return (6.0 * d**4 - x**4 * e * (1.0 + 4.0 * e + e * e)) / (s * d) ** 4


def log_mgf_derivative(f: Factorization, s: float, order: int) -> float:
    """Derivative of log Z(s) of the given order (1 through 4) at real s.

    Assembled per prime power as the difference of regular kernel parts at
    v = (e+1) log p and v = log p; exact values at s = 0 are the law's
    cumulants: half log n, the variance, 0, and the fourth cumulant.
    """
    if order not in (1, 2, 3, 4):
        raise DomainError("order must be 1, 2, 3, or 4")
    s = float(s)
    total = 0.0
    for p, e in f.factors:
        lp = log(p)
        total += _gt(order, (e + 1) * lp, s) - _gt(order, lp, s)
    return total


def log_mgf(f: Factorization, s: float) -> float:
    """log Z(s) at real s, via per-factor shifted geometric sums."""
    s = float(s)
    total = 0.0
    for p, e in f.factors:
        ls = log(p) * s
        shift = max(e * ls, 0.0)
        acc = 0.0
        for j in range(e + 1):
            acc += exp(j * ls - shift)
        total += shift + log(acc) - log(e + 1)
    return total


def mgf(f: Factorization, s) -> complex:
    """Z(s) = E exp(s log d) for complex s, as the product over p^e || n of
    the equal-weight geometric sums (1/(e+1)) sum_j p^{js}.

    The sum form is entire, so there are no pole special cases.
    """
    s = complex(s)
    out = complex(1.0)
    for p, e in f.factors:
        step = np.exp(log(p) * s)
        acc = complex(1.0)
        term = complex(1.0)
        for _ in range(e):
            term *= step
            acc += term
        out *= acc / (e + 1)
    return out


def _mgf_on_grid(f: Factorization, s: np.ndarray) -> np.ndarray:
    out = np.ones_like(s)
    for p, e in f.factors:
        step = np.exp(log(p) * s)
        acc = np.ones_like(s)
        term = np.ones_like(s)
        for _ in range(e):
            term = term * step
            acc = acc + term
        out *= acc / (e + 1)
    return out


def gaussian_tail(z) -> float:
    """Upper tail of the standard normal via the platform's erfc."""
    return 0.5 * erfc(float(z) / _SQRT2)


def tail_quantile_domain(f: Factorization) -> float:
    """Supremum of admissible z for solve_beta: log n / (2 sigma)."""
    mom = moments(f)
    if mom.m2 == 0.0:
        raise DomainError("n = 1 has a degenerate law")
    return f.log_n / (2.0 * mom.sigma)


def solve_beta(f: Factorization, z, *, tol: float = 1e-10, max_iter: int = 100) -> float:
    """The tilt beta >= 0 with (log Z)'(beta) = z sigma + half log n.

    Newton iteration guarded by a maintained bracket; the residual stops
    under tol * log n.  z must lie in [0, log n / (2 sigma)); the supremum
    itself (and anything past it) is outside the reachable range.
    """
    z = float(z)
    mom = moments(f)
    if mom.m2 == 0.0:
        raise DomainError("n = 1 has a degenerate law")
    if z < 0:
        raise DomainError("z must be >= 0; use the law's symmetry for z < 0")
    if z == 0.0:
        return 0.0
    log_n = f.log_n
    target = 0.5 * log_n + z * mom.sigma
    if target >= log_n:
        raise DomainError(
            f"z = {z} is at or beyond the supremum {log_n / (2 * mom.sigma)}"
        )
    resid_tol = tol * log_n

    lo = 0.0
    hi = 1.0
    grow = 0
    while log_mgf_derivative(f, hi, 1) < target:
        lo = hi
        hi *= 2.0
        grow += 1
        if grow > 60:
            raise ConvergenceError("tilt bracket failed to close")

    beta = min(hi, z * mom.sigma / mom.m2)  # first-order guess
    if beta <= lo:
        beta = 0.5 * (lo + hi)
    for _ in range(max_iter):
        r = log_mgf_derivative(f, beta, 1) - target
        if abs(r) <= resid_tol:
            return beta
        if r > 0:
            hi = beta
        else:
            lo = beta
        curv = log_mgf_derivative(f, beta, 2)
        step = r / curv if curv > 0 else 0.0
        beta -= step
        if not lo < beta < hi:
            beta = 0.5 * (lo + hi)
    raise ConvergenceError(f"tilt solve did not reach tolerance {resid_tol}")


@dataclass(frozen=True)
class SaddleTail:
    """Tilted-Gaussian tail approximation and its ingredients.

    value = exp(exponent) * Phi(beta * mu2), where mu2 is the curvature
    sqrt((log Z)''(beta)) and exponent collects the tilt correction; the
    exponent vanishes at z = 0, making value exactly one half there.
    """

    value: float
    beta: float
    mu2: float
    exponent: float


def saddle_tail_approx(f: Factorization, z, *, tol: float = 1e-10) -> SaddleTail:
    """Approximate P(log d >= half log n + z sigma) by tilting the law."""
    z = float(z)
    beta = solve_beta(f, z, tol=tol)
    mom = moments(f)
    curv = log_mgf_derivative(f, beta, 2)
    mu2 = sqrt(curv)
    target = 0.5 * f.log_n + z * mom.sigma
    exponent = log_mgf(f, beta) - target * beta + 0.5 * beta * beta * curv
    return SaddleTail(
        value=exp(exponent) * gaussian_tail(beta * mu2),
        beta=beta,
        mu2=mu2,
        exponent=exponent,
    )


_GL_X = np.array(
    [-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526]
)
_GL_W = np.array(
    [0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538]
)
_CHUNK = 250_000


def perron_tail_quadrature(
    f: Factorization, z, *, T: float = 200.0, steps: int = 200_000
) -> float:
    """Tail probability by integrating Z(s) e^{-ts}/s over the truncated
    vertical line Re s = beta, |Im s| <= T, using conjugate symmetry to fold
    onto [0, T] and 4-point Gauss-Legendre panels.

    Accuracy is limited by the truncation at T; the quadrature itself
    resolves the oscillation as long as panels are shorter than the fastest
    wavelength, and warns when they are not.  z must be positive (beta = 0
    puts the contour on the pole) and the query point must not be an atom.
    """
    z = float(z)
    T = float(T)
    steps = int(steps)
    if T < 1.0:
        raise DomainError("T must be >= 1")
    if steps < 1:
        raise DomainError("steps must be >= 1")
    if z <= 0:
        raise DomainError("the contour needs z > 0")
    mom = moments(f)
    if mom.m2 == 0.0:
        raise DomainError("n = 1 has a degenerate law")
    t = 0.5 * f.log_n + z * mom.sigma
    # an atom at the query point makes the truncated integral ill-posed
    d0 = round(exp(t))
    if d0 >= 1 and f.n % d0 == 0 and abs(log(d0) - t) < 1e-12:
        raise DomainError(f"query t = {t} collides with the atom log {d0}")
    beta = solve_beta(f, z)

    panel = T / steps
    max_freq = max(t, f.log_n - t)
    if max_freq > 0 and 2.0 * pi / max_freq < panel:
        warnings.warn(
            "panel width exceeds the fastest oscillation wavelength; "
            "increase steps or lower T",
            RuntimeWarning,
            stacklevel=2,
        )

    total = 0.0
    nodes_per_chunk = max(1, _CHUNK // 4)
    for start in range(0, steps, nodes_per_chunk):
        stop = min(start + nodes_per_chunk, steps)
        edges = np.arange(start, stop + 1, dtype=np.float64) * panel
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes = (mid[:, None] + (0.5 * panel) * _GL_X[None, :]).ravel()
        wts = np.broadcast_to(0.5 * panel * _GL_W, (stop - start, 4)).ravel()
        s = beta + 1j * nodes
        vals = _mgf_on_grid(f, s) * np.exp(-t * s) / s
        total += float(np.dot(wts, vals.real))
    return total / pi


@dataclass(frozen=True)
class TailReport:
    """One n, one z: the exact tail next to its three approximations."""

    n: int
    z: float
    t: float
    nudged: bool
    exact_tail: float
    gaussian: float
    saddle: float
    perron: float | None
    beta: float
    mu2: float
    exponent: float
    rel_err_gaussian: float
    rel_err_saddle: float


def tail_report(
    n_or_f, z, *, perron: tuple[float, int] | None = None
) -> TailReport:
    """Assemble a TailReport for P(log d >= half log n + z sigma).

    `perron`, when given, is (T, steps) for the contour evaluation; it is
    skipped otherwise.  n = 1 is excluded (degenerate law).
    """
    f = n_or_f if isinstance(n_or_f, Factorization) else factorize(n_or_f)
    z = float(z)
    law = exact_law(f)
    mom = moments(f)
    if mom.m2 == 0.0:
        raise DomainError("n = 1 has a degenerate law")
    t = 0.5 * f.log_n + z * mom.sigma
    t, nudged = nudge_off_atom(law, t)
    exact = law.upper_tail(t)
    gauss = gaussian_tail(z)
    tilted = saddle_tail_approx(f, z)
    perron_val = None
    if perron is not None:
        perron_val = perron_tail_quadrature(f, z, T=perron[0], steps=perron[1])
    return TailReport(
        n=f.n,
        z=z,
        t=t,
        nudged=nudged,
        exact_tail=exact,
        gaussian=gauss,
        saddle=tilted.value,
        perron=perron_val,
        beta=tilted.beta,
        mu2=tilted.mu2,
        exponent=tilted.exponent,
        rel_err_gaussian=abs(gauss / exact - 1.0) if exact > 0 else float("inf"),
        rel_err_saddle=abs(tilted.value / exact - 1.0) if exact > 0 else float("inf"),
    )
