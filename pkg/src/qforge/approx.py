"""High-precision complex scalars with propagated absolute error bounds.

Error bounds are worst-case (interval style): certified inputs with
certified propagation yield certified outputs.  When any input carries a
heuristic bound the result keeps the same arithmetic bound but is flagged
uncertified.  Default mantissa is 113 bits, overridable per value or via
set_default_precision (the CLI wires QFORGE_PRECISION into this).
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from .errors import DivisionByZero

_DEFAULT_PREC = 113


def set_default_precision(bits: int) -> None:
    global _DEFAULT_PREC
    if bits < 64:
        raise ValueError("precision must be at least 64 bits")
    _DEFAULT_PREC = int(bits)


def default_precision() -> int:
    return _DEFAULT_PREC


def _to_mpc(v, prec: int):
    with mpmath.workprec(prec):
        if isinstance(v, Fraction):
            return mpmath.mpf(v.numerator) / mpmath.mpf(v.denominator)
        if isinstance(v, int):
            return mpmath.mpf(v)
        if isinstance(v, (float, complex, mpmath.mpf, mpmath.mpc)):
            return mpmath.mpc(v) if isinstance(v, (complex, mpmath.mpc)) else mpmath.mpf(v)
        to_c = getattr(v, "to_complex", None)
        if to_c is not None:
            return to_c(prec)
    raise TypeError(f"cannot convert {type(v).__name__} to ApproxScalar")


class ApproxScalar:
    """A complex value with an absolute error bound.

    `err` is a rigorous bound when `certified` is true, else a heuristic
    estimate.  Values are immutable.
    """

    __slots__ = ("val", "err", "certified", "prec")

    def __init__(self, value, err=0, certified: bool = True, prec: int | None = None):
        prec = _DEFAULT_PREC if prec is None else int(prec)
        val = _to_mpc(value, prec)
        with mpmath.workprec(prec):
            e = mpmath.mpf(err)
        if e < 0:
            raise ValueError("err must be non-negative")
        object.__setattr__(self, "val", val)
        object.__setattr__(self, "err", e)
        object.__setattr__(self, "certified", bool(certified))
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, *_):
        raise AttributeError("ApproxScalar is immutable")

    @staticmethod
    def coerce(v, prec: int | None = None) -> "ApproxScalar":
        if isinstance(v, ApproxScalar):
            return v
        # exact inputs carry only the representation rounding error
        prec = _DEFAULT_PREC if prec is None else prec
        val = _to_mpc(v, prec)
        rnd = abs(val) * mpmath.mpf(2) ** (2 - prec)
        return ApproxScalar(val, rnd, True, prec)

    # -- views ------------------------------------------------------------
    @property
    def re(self):
        return mpmath.mpc(self.val).real

    @property
    def im(self):
        return mpmath.mpc(self.val).imag

    def magnitude(self):
        return abs(self.val)

    def __repr__(self):
        tag = "certified" if self.certified else "heuristic"
        return f"ApproxScalar({self.val}, err={mpmath.nstr(self.err, 3)}, {tag})"

    # -- arithmetic ---------------------------------------------------------
    def _binary(self, other, op):
        o = ApproxScalar.coerce(other, self.prec)
        prec = max(self.prec, o.prec)
        with mpmath.workprec(prec):
            return op(self, o, prec)

    def _rounding(self, v, prec):
        return abs(v) * mpmath.mpf(2) ** (2 - prec)

    def __add__(self, other):
        def op(x, y, prec):
            v = x.val + y.val
            e = x.err + y.err + self._rounding(v, prec)
            return ApproxScalar(v, e, x.certified and y.certified, prec)

        return self._binary(other, op)

    __radd__ = __add__

    def __neg__(self):
        with mpmath.workprec(self.prec):
            return ApproxScalar(-self.val, self.err, self.certified, self.prec)

    def __sub__(self, other):
        return self.__add__(-ApproxScalar.coerce(other, self.prec))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        def op(x, y, prec):
            v = x.val * y.val
            e = abs(x.val) * y.err + abs(y.val) * x.err + x.err * y.err
            e += self._rounding(v, prec)
            return ApproxScalar(v, e, x.certified and y.certified, prec)

        return self._binary(other, op)

    __rmul__ = __mul__

    def __truediv__(self, other):
        def op(x, y, prec):
            ay = abs(y.val)
            if ay == 0 or ay <= y.err:
                raise DivisionByZero("divisor not bounded away from zero")
            v = x.val / y.val
            e = (x.err + abs(v) * y.err) / (ay - y.err)
            e += self._rounding(v, prec)
            return ApproxScalar(v, e, x.certified and y.certified, prec)

        return self._binary(other, op)

    def __rtruediv__(self, other):
        return ApproxScalar.coerce(other, self.prec).__truediv__(self)

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return ApproxScalar.coerce(1, self.prec) / (self ** (-e))
        out = ApproxScalar.coerce(1, self.prec)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def to_complex(self, prec: int | None = None):
        return self.val
