"""Sampling distribution of the median scaled difference for IID normal data.

Everything is computed on the standardized scale (the subject observation
x0 is a standard normal deviate). Conditional on x0, each absolute scaled
difference of the subject against an independent standard normal partner
has distribution function

    F(d | x0) = Phi(x0 + d*sqrt(2)) - Phi(x0 - d*sqrt(2)),

and the subject's statistic is the median of n-1 such values, which are
independent given x0. Order-statistic theory then gives the conditional
distribution of the median in closed form; the marginal distribution is
the integral of that against the normal weight of x0.

Even n leaves an odd count of differences and a regularized incomplete
beta expression. Odd n leaves an even count, whose mean-of-central-order-
statistics median needs one extra inner integral. Very large odd n is
served by the next even case, which differs by less than 5e-5 in
probability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError
from .numerics import find_root, integrate, integrate_batch

__all__ = [
    "DistSpec",
    "conditional_cdf",
    "conditional_sf",
    "conditional_pdf",
    "cdf_even",
    "cdf_odd",
    "cdf_asymptotic",
    "cdf",
    "quantile",
    "ASYMPTOTIC_LOWER_BOUND",
]

_SQRT2 = math.sqrt(2.0)
_X0_CUTOFF = 8.5  # normal weight beyond this is < 1e-17, below every tolerance used

# The asymptotic distribution is zero left of (half-normal median)/sqrt(2).
ASYMPTOTIC_LOWER_BOUND = float(special.ndtri(0.75)) / _SQRT2


@dataclass(frozen=True)
class DistSpec:
    """Size and parity bookkeeping for the distribution of one statistic."""

    n: int
    parity: str          # "even" or "odd"
    r: int               # n/2 for even n, (n-1)/2 for odd n

    @classmethod
    def for_n(cls, n: int) -> "DistSpec":
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise DomainError(f"n must be an integer, got {n!r}")
        if n < 3:
            raise DomainError(f"n must be at least 3, got {n}")
        n = int(n)
        if n % 2 == 0:
            return cls(n, "even", n // 2)
        return cls(n, "odd", (n - 1) // 2)


def conditional_cdf(d, x0):
    """P(|D| <= d) for one scaled difference, given the subject value x0."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise DomainError("absolute difference must be non-negative")
    a = np.abs(x0)  # symmetric in x0
    s = d * _SQRT2
    return special.ndtr(s - a) - special.ndtr(-s - a)


def conditional_sf(d, x0):
    """Upper tail 1 - F(d | x0), in a form free of cancellation."""
    d = np.asarray(d, dtype=float)
    a = np.abs(x0)
    s = d * _SQRT2
    return special.ndtr(a - s) + special.ndtr(-a - s)


def conditional_pdf(d, x0):
    """Density of |D| given x0: sqrt(2) * (phi(x0 - d*sqrt(2)) + phi(x0 + d*sqrt(2)))."""
    d = np.asarray(d, dtype=float)
    a = np.abs(x0)
    s = d * _SQRT2
    return _SQRT2 * (_norm_pdf(s - a) + _norm_pdf(s + a))


def _norm_pdf(z):
    return np.exp(-0.5 * np.square(z)) / math.sqrt(2.0 * math.pi)


def _validate_q(q) -> float:
    q = float(q)
    if not math.isfinite(q) or q < 0:
        raise DomainError(f"quantile argument must be finite and >= 0, got {q}")
    return q


def cdf_even(q, n, tol: float = 1e-9) -> float:
    """Marginal P(Q_E <= q) for even n.

    The conditional probability that the median of an odd count n-1 of
    differences is at most q equals the probability of at least r = n/2
    successes in n-1 trials with success probability F(q | x0), i.e. the
    regularized incomplete beta I_{F(q|x0)}(r, n-r).
    """
    q = _validate_q(q)
    spec = DistSpec.for_n(n)
    if spec.parity != "even":
        raise DomainError(f"cdf_even requires even n, got {n}")
    if q == 0.0:
        return 0.0
    r = spec.r

    def integrand(x0):
        f = conditional_cdf(q, x0)
        return special.betainc(r, spec.n - r, f) * _norm_pdf(x0)

    val = 2.0 * integrate(integrand, 0.0, _X0_CUTOFF, tol=0.5 * tol)
    return min(max(val, 0.0), 1.0)


def _odd_conditional_cdf(q: float, x0: np.ndarray, r: int,
                         inner_tol: float) -> np.ndarray:
    """P(median of 2r differences <= q | x0), batched over x0.

    With m(t) = mean of the r-th and (r+1)-th order statistics, the
    conditional CDF is

        (2 / B(r, r)) * int_0^q F(t)^(r-1) [S(t)^r - S(2q-t)^r] f(t) dt,

    all of F, S, f conditional on x0. The bracketed difference is
    evaluated in factored form because both survival powers underflow
    together at large r. The beta-function constant (which reaches 1e57
    by r = 94) multiplies the integrand, not the integral: the quadrature
    tolerance is absolute and only meaningful on the O(1) scale of the
    final probability.
    """
    const = 2.0 / special.beta(r, r)

    def g(t):
        tc = t[:, None]
        f_cdf = conditional_cdf(tc, x0[None, :])
        sf1 = conditional_sf(tc, x0[None, :])
        sf2 = conditional_sf(2.0 * q - tc, x0[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            # sf1 >= sf2 >= 0 on t <= q; diff = sf1^r - sf2^r without cancellation
            ratio_log = r * (np.log(sf2) - np.log(sf1))
            diff = np.where(sf1 > 0.0, -np.power(sf1, r) * np.expm1(ratio_log), 0.0)
        if r > 1:
            body = np.power(f_cdf, r - 1) * diff
        else:
            body = diff
        return const * body * conditional_pdf(tc, x0[None, :])

    return integrate_batch(g, 0.0, q, tol=inner_tol)


def cdf_odd(q, n, inner_tol: float = 1e-10, outer_tol: float = 1e-8) -> float:
    """Marginal P(Q_E <= q) for odd n by the nested double integral."""
    q = _validate_q(q)
    spec = DistSpec.for_n(n)
    if spec.parity != "odd":
        raise DomainError(f"cdf_odd requires odd n, got {n}")
    if q == 0.0:
        return 0.0
    r = spec.r

    def outer(x0):
        return _odd_conditional_cdf(q, x0, r, inner_tol) * _norm_pdf(x0)

    val = 2.0 * integrate(outer, 0.0, _X0_CUTOFF, tol=outer_tol)
    return min(max(val, 0.0), 1.0)


def cdf_asymptotic(q) -> float:
    """Limiting CDF for large n: an indicator-integral with no quadrature.

    As n grows the conditional distribution of the median concentrates at
    its conditional population median, so the event "median <= q" becomes
    "F(q | x0) >= 1/2", whose normal probability is 2*Phi(x0*) - 1 with
    x0* the positive root of F(q | x0*) = 1/2.
    """
    q = _validate_q(q)
    if q <= ASYMPTOTIC_LOWER_BOUND:
        return 0.0
    hi = q * _SQRT2 + 10.0
    x0_star = find_root(lambda x0: float(conditional_cdf(q, x0)) - 0.5, 0.0, hi)
    return 2.0 * float(special.ndtr(x0_star)) - 1.0


def cdf(q, n, *, odd_exact_limit: int = 99) -> float:
    """P(Q_E <= q) for a dataset of size n; n may be math.inf.

    Odd n above ``odd_exact_limit`` is served by the even case at n+1,
    which for such n agrees within 5e-5 in probability.
    """
    if n == math.inf:
        return cdf_asymptotic(q)
    spec = DistSpec.for_n(n)
    if spec.parity == "even":
        return cdf_even(q, spec.n)
    if spec.n <= odd_exact_limit:
        return cdf_odd(q, spec.n)
    return cdf_even(q, spec.n + 1)


_QUANTILE_BRACKET_HI = 10.0


def quantile(p, n, *, odd_exact_limit: int = 99) -> float:
    """Inverse of ``cdf`` in q, accurate to better than 1e-6 in probability."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie strictly inside (0, 1), got {p}")
    if n == math.inf:
        lo = ASYMPTOTIC_LOWER_BOUND
        return find_root(lambda q: cdf_asymptotic(q) - p,
                         lo + 1e-12, _QUANTILE_BRACKET_HI)
    DistSpec.for_n(n)
    hi = _QUANTILE_BRACKET_HI
    if cdf(hi, n, odd_exact_limit=odd_exact_limit) < p:
        raise ConvergenceError(
            f"quantile bracket [0, {hi:g}] does not reach p={p}")
    return find_root(lambda q: cdf(q, n, odd_exact_limit=odd_exact_limit) - p,
                     0.0, hi)
