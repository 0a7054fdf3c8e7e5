"""Symmetry group action on shift vectors and parameter quadruples.

Words over the generators apply left to right (the leftmost generator
acts first).  The derived generators expand syntactically into words over
the four basic ones before acting on parameters; their shift-component
closed forms are kept alongside for cross-checking.  Orbit and
canonical-representative computations run in lambda coordinates, where
the group becomes a finite set of integer matrices found once by BFS.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import NoRepresentativeFound, UndefinedAction
from .poly import RationalFunction
from .relations import ShiftVector

WORD_EXPANSION = {
    4: (3, 2, 1, 3, 1, 2, 3),
    5: (1, 3, 1, 3, 1, 2),
    6: (1, 3, 1, 3, 1, 3),
}


def expand_word(word) -> tuple[int, ...]:
    """Expand sigma_4..sigma_6 into sigma_0..sigma_3, purely syntactically."""
    out: list[int] = []
    for g in word:
        if g in WORD_EXPANSION:
            out.extend(WORD_EXPANSION[g])
        elif g in (0, 1, 2, 3):
            out.append(g)
        else:
            raise ValueError(f"unknown generator sigma_{g}")
    return tuple(out)


def shift_action(g: int, s) -> ShiftVector:
    """The (k,l,m,n)-component action of a single generator."""
    s = ShiftVector.coerce(s)
    k, l, m, n = s.as_tuple()
    if g == 0:
        return ShiftVector(-k, -l, -m, -n)
    if g == 1:
        return ShiftVector(n, m - k, l + n, k)
    if g == 2:
        return ShiftVector(-k, -l, -m, k + l - m + n)
    if g == 3:
        return ShiftVector(l, k, m, n)
    if g in WORD_EXPANSION:
        return apply_word_shift(WORD_EXPANSION[g], s)
    raise ValueError(f"unknown generator sigma_{g}")


def apply_word_shift(word, s) -> ShiftVector:
    s = ShiftVector.coerce(s)
    for g in expand_word(word):
        s = shift_action(g, s)
    return s


# closed forms of the derived shift actions, for cross-checks
SHIFT_FORMULAS = {
    0: lambda k, l, m, n: (-k, -l, -m, -n),
    1: lambda k, l, m, n: (n, m - k, l + n, k),
    2: lambda k, l, m, n: (-k, -l, -m, k + l - m + n),
    3: lambda k, l, m, n: (l, k, m, n),
    4: lambda k, l, m, n: (-n, l, m - k - n, -k),
    5: lambda k, l, m, n: (k - m, l - m, -m, n),
    6: lambda k, l, m, n: (m - l, m - k, m, k + l - m + n),
}


@dataclass(frozen=True)
class FullPoint:
    """Shift vector together with the parameter quadruple as rational
    functions, so generator actions like c/a and abx/c stay exact."""

    shift: ShiftVector
    a: RationalFunction
    b: RationalFunction
    c: RationalFunction
    x: RationalFunction

    @staticmethod
    def generic(shift) -> "FullPoint":
        a, b, c, x = (RationalFunction.var(s) for s in ("a", "b", "c", "x"))
        return FullPoint(ShiftVector.coerce(shift), a, b, c, x)

    def params(self):
        return (self.a, self.b, self.c, self.x)


def _qpow(e: int) -> RationalFunction:
    q = RationalFunction.var("q")
    return q**e


def apply_generator(g: int, p: FullPoint) -> FullPoint:
    """Apply sigma_g to a full point; sigma_4..sigma_6 act by expansion."""
    if g in WORD_EXPANSION:
        return apply_word_point(WORD_EXPANSION[g], p)
    k, l, m, n = p.shift.as_tuple()
    a, b, c, x = p.params()
    q = RationalFunction.var("q")
    new_shift = shift_action(g, p.shift)
    if g == 0:
        return FullPoint(new_shift, a * _qpow(k), b * _qpow(l), c * _qpow(m), x * _qpow(n))
    if g == 1:
        if a.is_zero():
            raise UndefinedAction("sigma_1 needs a != 0")
        return FullPoint(new_shift, x, c / a, b * x, a)
    if g == 2:
        if a.is_zero() or b.is_zero() or c.is_zero():
            raise UndefinedAction("sigma_2 needs a, b, c != 0")
        return FullPoint(new_shift, q / a, q / b, q**2 / c, a * b * x / c)
    if g == 3:
        return FullPoint(new_shift, b, a, c, x)
    raise ValueError(f"unknown generator sigma_{g}")


def apply_word_point(word, p: FullPoint) -> FullPoint:
    for g in expand_word(word):
        p = apply_generator(g, p)
    return p


# -- lambda coordinates -------------------------------------------------------------


@dataclass(frozen=True)
class LambdaVector:
    l1: int
    l2: int
    l3: int
    l4: int

    def as_tuple(self):
        return (self.l1, self.l2, self.l3, self.l4)


def to_lambda(s) -> LambdaVector:
    s = ShiftVector.coerce(s)
    return LambdaVector(s.k, s.l, -s.n, s.k + s.l - s.m)


def from_lambda(v) -> ShiftVector:
    l1, l2, l3, l4 = v.as_tuple() if isinstance(v, LambdaVector) else tuple(v)
    return ShiftVector(l1, l2, l1 + l2 - l4, -l3)


# the five lambda-space maps conjugate to sigma'_0, sigma'_3, sigma'_4,
# sigma'_5, sigma'_0 sigma'_6; rows act on column (l1, l2, l3, l4)
_LAMBDA_GENS = (
    ((0,), ((-1, 0, 0, 0), (0, -1, 0, 0), (0, 0, -1, 0), (0, 0, 0, -1))),
    ((3,), ((0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))),
    ((4,), ((0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1))),
    ((5,), ((0, -1, 0, 1), (-1, 0, 0, 1), (0, 0, 1, 0), (0, 0, 0, 1))),
    ((0, 6), ((-1, 0, 0, 1), (0, -1, 0, 1), (0, 0, -1, 1), (0, 0, 0, 1))),
)


def _mat_apply(mat, vec):
    return tuple(sum(mij * vj for mij, vj in zip(row, vec)) for row in mat)


def _mat_mul(m1, m2):
    """Matrix of 'apply m2 first, then m1'."""
    return tuple(
        tuple(sum(m1[i][t] * m2[t][j] for t in range(4)) for j in range(4))
        for i in range(4)
    )


@lru_cache(maxsize=1)
def lambda_group():
    """BFS closure of the five lambda maps: list of (matrix, word) sorted
    for determinism; the word maps lambda(s) to matrix @ lambda(s) when
    its generators are applied left to right."""
    ident = tuple(tuple(1 if i == j else 0 for j in range(4)) for i in range(4))
    seen = {ident: ()}
    frontier = [ident]
    while frontier:
        nxt = []
        for mat in frontier:
            for word, gen in _LAMBDA_GENS:
                new = _mat_mul(gen, mat)  # mat acts first, then gen
                if new not in seen:
                    seen[new] = seen[mat] + word
                    nxt.append(new)
        frontier = nxt
    return sorted(seen.items(), key=lambda kv: (len(kv[1]), kv[1]))


def representative_condition(lam) -> bool:
    l1, l2, l3, l4 = lam
    return l4 >= 0 and l4 - l3 <= l3 and l3 <= l1 and l1 <= l2


def canonical_representative(s) -> tuple[ShiftVector, tuple[int, ...]]:
    """The orbit member in {0 <= (k+l-m)/2 <= -n <= k <= l} together with
    a generator word mapping s to it (lexicographically smallest shift
    among qualifying images as the tie-break)."""
    s = ShiftVector.coerce(s)
    lam = to_lambda(s).as_tuple()
    best = None
    for mat, word in lambda_group():
        image = _mat_apply(mat, lam)
        if representative_condition(image):
            shift = from_lambda(image)
            key = shift.as_tuple()
            if best is None or key < best[0]:
                best = (key, shift, word)
    if best is None:
        raise NoRepresentativeFound(f"no qualifying image for {s}")
    return best[1], best[2]


def orbit_enumerate(s) -> set[ShiftVector]:
    """Closure of {s} under the five lambda actions (via the cached group)."""
    lam = to_lambda(s).as_tuple()
    return {from_lambda(_mat_apply(mat, lam)) for mat, _ in lambda_group()}


def qualifying_members(s) -> set[ShiftVector]:
    """Orbit members satisfying the representative condition (the
    exactly-one check reports any orbit where this is not a singleton)."""
    out = set()
    for member in orbit_enumerate(s):
        if representative_condition(to_lambda(member).as_tuple()):
            out.add(member)
    return out
