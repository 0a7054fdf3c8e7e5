"""q-Pochhammer symbols and the 2phi1 series.

Three evaluation routes: exact terminating summation (including the
extended definition for the exceptional parameter case), certified
truncated numerics for non-terminating series, and finite products that
work over any ring (scalars or rational functions).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .approx import ApproxScalar, default_precision
from .errors import (
    InvalidDomain,
    NoConvergence,
    NotTerminating,
    ZeroDenominator,
)
from .exact import ExactScalar

TERMINATION_BOUND = 64


@dataclass(frozen=True)
class Phi21Params:
    """The five arguments of 2phi1(a, b; c; q, x)."""

    a: object
    b: object
    c: object
    q: object
    x: object

    def as_exact(self) -> "Phi21Params":
        return Phi21Params(*(ExactScalar.coerce(v) for v in (self.a, self.b, self.c, self.q, self.x)))

    def as_numeric(self, prec: int | None = None) -> "Phi21Params":
        return Phi21Params(*(ApproxScalar.coerce(v, prec) for v in (self.a, self.b, self.c, self.q, self.x)))


@dataclass(frozen=True)
class SeriesValue:
    """Result of a series or infinite-product evaluation."""

    value: object
    terms_used: int
    terminated: bool
    certified: bool


def qpoch_finite(base, q, count: int):
    """prod_{j=0}^{count-1} (1 - base*q^j); empty product is 1.

    Generic over the coefficient ring: works for Fractions, field
    elements, ApproxScalars and rational functions alike.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    out = _one_like(base)
    qpow = _one_like(q)
    for _ in range(count):
        out = out * (1 - base * qpow)
        qpow = qpow * q
    return out


def _one_like(v):
    if isinstance(v, ApproxScalar):
        return ApproxScalar.coerce(1, v.prec)
    if isinstance(v, ExactScalar):
        return ExactScalar.from_rational(1)
    from .poly import MultiPoly, RationalFunction

    if isinstance(v, RationalFunction):
        return RationalFunction.const(1)
    if isinstance(v, MultiPoly):
        return MultiPoly.const(1, v.vars)
    return Fraction(1)


def qpoch_infinite(base, q, tol: float, prec: int | None = None) -> SeriesValue:
    """(base; q)_infinity as a certified partial product.

    Truncates at M once the tail bound (exp(|base||q|^M / (1-|q|)) - 1)
    scaled by the partial product magnitude drops to tol.
    """
    prec = default_precision() if prec is None else prec
    b = ApproxScalar.coerce(base, prec)
    qq = ApproxScalar.coerce(q, prec)
    if qq.magnitude() >= 1:
        raise InvalidDomain("qpoch_infinite requires |q| < 1")
    with mpmath.workprec(prec + 8):
        absq = qq.magnitude()
        absb = b.magnitude()
        one_minus_q = 1 - absq
        partial = ApproxScalar.coerce(1, prec)
        qpow = ApproxScalar.coerce(1, prec)
        m = 0
        while True:
            if partial.magnitude() == 0:
                return SeriesValue(partial, m, False, True)
            tail = (mpmath.exp(absb * absq**m / one_minus_q) - 1) * partial.magnitude()
            if tail <= tol:
                value = ApproxScalar(partial.val, partial.err + tail, partial.certified, prec)
                return SeriesValue(value, m, False, True)
            partial = partial * (1 - b * qpow)
            qpow = qpow * qq
            m += 1
            if m > 100 * prec:
                raise NoConvergence("qpoch_infinite failed to meet tolerance")


def detect_termination(a, b, q, bound: int = TERMINATION_BOUND):
    """Smallest r <= bound with a*q^r = 1 or b*q^r = 1, exactly; None if none."""
    best = None
    for v in (a, b):
        acc = v
        for r in range(bound + 1):
            if _eq_one(acc):
                if best is None or r < best:
                    best = r
                break
            acc = acc * q
    return best


def _eq_one(v) -> bool:
    if isinstance(v, ExactScalar):
        return v.is_one()
    return v == 1


def phi21_exact(p: Phi21Params, bound: int = TERMINATION_BOUND) -> SeriesValue:
    """Exact evaluation of a terminating 2phi1 (standard or exceptional case).

    Sums i = 0..r with incremental term updates; every denominator factor
    (1 - c*q^(i-1)) and (1 - q^i) is asserted nonzero before division, so
    the exceptional case c = q^(-s) with r < s is covered and anything
    else raises ZeroDenominator.
    """
    p = p.as_exact()
    r = detect_termination(p.a, p.b, p.q, bound)
    if r is None:
        raise NotTerminating(f"no terminating exponent r <= {bound} detected")
    one = ExactScalar.from_rational(1)
    term = one
    total = one
    aq, bq, cq, qq = p.a, p.b, p.c, one
    for i in range(1, r + 1):
        qq = qq * p.q  # q^i
        den1 = one - qq
        den2 = one - cq
        if den1.is_zero() or den2.is_zero():
            raise ZeroDenominator(
                f"(c;q) or (q;q) factor vanishes at i={i} inside the summation range"
            )
        term = term * (one - aq) * (one - bq) / (den1 * den2) * p.x
        total = total + term
        aq = aq * p.q
        bq = bq * p.q
        cq = cq * p.q
    return SeriesValue(total, r + 1, True, True)


def phi21_numeric(p: Phi21Params, tol: float, prec: int | None = None,
                  bound: int = TERMINATION_BOUND) -> SeriesValue:
    """Adaptive truncated 2phi1 for |q| < 1.

    Stops once three consecutive terms are below tol relative to the
    running partial sum; reports certified=True only when a geometric
    tail certificate holds at the stopping index.
    """
    prec = default_precision() if prec is None else prec
    p = p.as_numeric(prec)
    if p.q.magnitude() >= 1:
        raise InvalidDomain("phi21_numeric requires |q| < 1")
    eps = mpmath.mpf(2) ** (-(prec // 2))
    term_limit = _numeric_termination(p, bound, eps)
    if term_limit is None and p.x.magnitude() >= 1:
        raise InvalidDomain("phi21_numeric requires |x| < 1 for non-terminating series")

    one = ApproxScalar.coerce(1, prec)
    total = one
    term = one
    aq, bq, cq = p.a, p.b, p.c
    qq = one
    small_streak = 0
    growth_streak = 0
    prev_mag = term.magnitude()
    i = 0
    max_terms = term_limit + 1 if term_limit is not None else 20000
    while True:
        i += 1
        if term_limit is not None and i > term_limit:
            return SeriesValue(total, i, True, total.certified)
        if i >= max_terms:
            raise NoConvergence(f"no convergence after {i} terms")
        qq = qq * p.q
        den1 = one - qq
        den2 = one - cq
        if den2.magnitude() <= den2.err or den1.magnitude() <= den1.err:
            raise ZeroDenominator(f"denominator factor numerically zero at i={i}")
        term = term * (one - aq) * (one - bq) / (den1 * den2) * p.x
        total = total + term
        aq = aq * p.q
        bq = bq * p.q
        cq = cq * p.q
        mag = term.magnitude()
        if term_limit is None:
            if mag < tol * (total.magnitude() + 1):
                small_streak += 1
                if small_streak >= 3:
                    return _certify_tail(p, total, term, i, tol, prec)
            else:
                small_streak = 0
            growth_streak = growth_streak + 1 if mag > prev_mag else 0
            if growth_streak >= 32:
                raise NoConvergence("term growth for 32 consecutive terms")
            prev_mag = mag


def _numeric_termination(p: Phi21Params, bound: int, eps):
    best = None
    for v in (p.a, p.b):
        acc = v
        for r in range(bound + 1):
            if abs(acc.val - 1) <= eps:
                if best is None or r < best:
                    best = r
                break
            acc = acc * p.q
    return best


def _certify_tail(p: Phi21Params, total, last_term, i, tol, prec) -> SeriesValue:
    """Geometric certificate: if |t_{j+1}/t_j| <= rho < 1 for all j >= i,
    the tail is bounded by |t_i| * rho / (1 - rho)."""
    with mpmath.workprec(prec + 8):
        absq = p.q.magnitude()
        qi = absq**i
        den1 = 1 - absq ** (i + 1)
        den2 = 1 - p.c.magnitude() * qi
        certified = False
        err_extra = 3 * last_term.magnitude() + tol  # heuristic fallback
        if den1 > 0 and den2 > 0:
            rho = p.x.magnitude() * (1 + p.a.magnitude() * qi) * (1 + p.b.magnitude() * qi) / (den1 * den2)
            if rho < 1:
                certified = True
                err_extra = last_term.magnitude() * rho / (1 - rho)
        value = ApproxScalar(total.val, total.err + err_extra, total.certified and certified, prec)
        return SeriesValue(value, i, False, certified and total.certified)
