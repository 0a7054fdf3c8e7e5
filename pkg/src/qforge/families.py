"""Parameter families that collapse the three-term relation to two terms.

A family assigns each of a, b, c, x a rational function of its free
symbols (and q); root-of-unity symbols carry a fixed exact binding that
random sampling leaves untouched.  Construction rejects the excluded
degenerate loci (a=1, b=1, a=c=0, b=c=0, c=x=0, x=0)."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DegenerateFamily
from .exact import ExactScalar
from .poly import RationalFunction
from .relations import ShiftVector

PARAM_KEYS = ("a", "b", "c", "x")


@dataclass(frozen=True)
class ParamFamily:
    name: str
    free_symbols: tuple[str, ...]
    assignment: dict  # {"a"|"b"|"c"|"x": RationalFunction}
    fixed_bindings: dict = field(default_factory=dict)  # {sym: ExactScalar}

    def __post_init__(self):
        missing = [k for k in PARAM_KEYS if k not in self.assignment]
        if missing:
            raise ValueError(f"family must assign {missing}")
        a, b, c, x = (self.assignment[k] for k in PARAM_KEYS)
        if a == 1:
            raise DegenerateFamily("excluded locus a = 1")
        if b == 1:
            raise DegenerateFamily("excluded locus b = 1")
        if x.is_zero():
            raise DegenerateFamily("excluded locus x = 0")
        if a.is_zero() and c.is_zero():
            raise DegenerateFamily("excluded locus a = c = 0")
        if b.is_zero() and c.is_zero():
            raise DegenerateFamily("excluded locus b = c = 0")
        if c.is_zero() and x.is_zero():
            raise DegenerateFamily("excluded locus c = x = 0")

    def param_values(self, point: dict) -> dict:
        """Evaluate the assignment at concrete free-symbol values; the
        point must bind q and every free symbol not carried as fixed."""
        full = dict(self.fixed_bindings)
        full.update(point)
        return {k: self.assignment[k].eval(full) for k in PARAM_KEYS}

    def describe(self) -> str:
        body = ", ".join(f"{k}={self.assignment[k]!r}" for k in PARAM_KEYS)
        return f"{self.name}: {body}"


def shift_params(fam: ParamFamily, shift, step: int) -> ParamFamily:
    """Compose a family with (a,b,c,x) -> (a*q^(k(step-1)), ...)."""
    shift = ShiftVector.coerce(shift)
    if step < 1:
        raise ValueError("step must be a positive integer")
    q = RationalFunction.var("q")
    e = step - 1
    exps = dict(zip(PARAM_KEYS, shift.as_tuple()))
    assignment = {k: self_v * q ** (exps[k] * e) for k, self_v in fam.assignment.items()}
    return ParamFamily(fam.name, fam.free_symbols, assignment, fam.fixed_bindings)


def _rf(sym: str) -> RationalFunction:
    return RationalFunction.var(sym)


def family_qbinom2() -> ParamFamily:
    a, x = _rf("a"), _rf("x")
    q = _rf("q")
    return ParamFamily(
        "(a, -a, -q, x)", ("a", "x"),
        {"a": a, "b": -a, "c": -q, "x": x},
    )


def family_qgauss() -> ParamFamily:
    a, b, c = _rf("a"), _rf("b"), _rf("c")
    return ParamFamily(
        "(a, b, c, c/(ab))", ("a", "b", "c"),
        {"a": a, "b": b, "c": c, "x": c / (a * b)},
    )


def family_qkummer() -> ParamFamily:
    a, b = _rf("a"), _rf("b")
    q = _rf("q")
    return ParamFamily(
        "(a, b, bq/a, -q/a)", ("a", "b"),
        {"a": a, "b": b, "c": b * q / a, "x": -q / a},
    )


def family_root_of_unity(order: int) -> ParamFamily:
    """(zeta_l * q, b, zeta_l * b, 1) with the root carried as the fixed
    symbol w."""
    b, w = _rf("b"), _rf("w")
    q = _rf("q")
    one = RationalFunction.const(1)
    return ParamFamily(
        f"(z{order}*q, b, z{order}*b, 1)", ("b", "w"),
        {"a": w * q, "b": b, "c": w * b, "x": one},
        {"w": ExactScalar.zeta(order)},
    )


def solution_families(shift) -> list[ParamFamily]:
    """Registered and pattern-matched families for a shift vector.

    Patterns: (l,l,0,n) with n positive even -> (a,-a,-q,x);
    k+l-m+n = 0 -> (a,b,c,c/(ab)); (k,l,l-k,-k) with l positive even ->
    (a,b,bq/a,-q/a); (0,l,l,0) with l >= 2 -> (zeta_l q, b, zeta_l b, 1).
    """
    s = ShiftVector.coerce(shift)
    k, l, m, n = s.as_tuple()
    out: list[ParamFamily] = []
    if k == l and l >= 0 and m == 0 and n > 0 and n % 2 == 0:
        out.append(family_qbinom2())
    if k + l - m + n == 0:
        out.append(family_qgauss())
    if l > 0 and l % 2 == 0 and m == l - k and n == -k:
        out.append(family_qkummer())
    if k == 0 and n == 0 and m == l and l >= 2:
        out.append(family_root_of_unity(l))
    return out
