import random
from fractions import Fraction as F

import pytest

from qforge.errors import BudgetExceeded, NotInTable
from qforge.poly import RationalFunction as RF
from qforge.relations import (
    TABLE_SHIFTS,
    ShiftVector,
    ThreeTermRelation,
    qr_derive,
    qr_lookup,
    relation_residual,
    sample_relation_point,
    verify_relation,
)

A, B, C, Q, X = (RF.var(s) for s in "abcqx")


def test_lookup_printed_forms():
    rel = qr_lookup((0, 1, 1, 0))
    assert rel.Q == -(1 - A) * (C - A * B * X) / (A - C)
    assert rel.R == A * (1 - C) / (A - C)
    rel = qr_lookup((1, 2, 1, -1))
    assert rel.R == (1 - C) * Q / ((1 - B * Q) * (Q - X))
    rel = qr_lookup((0, 0, 0, 2))
    assert rel.R == (C + (1 - A - B) * X * Q) / (C - A * B * X * Q)


def test_lookup_point_values():
    rel = qr_lookup((0, 1, 1, 0))
    pt = {"a": F(2), "b": F(3), "c": F(5), "x": F(7), "q": F(11)}
    assert rel.Q.eval(pt) == F(37, 3)
    assert rel.R.eval(pt) == F(8, 3)


def test_lookup_unknown_shift():
    with pytest.raises(NotInTable):
        qr_lookup((5, 5, 5, 5))


def test_derive_identity_shift():
    rel = qr_derive((0, 0, 0, 0))
    assert rel.Q.is_zero() and rel.R == 1


def test_derive_x_step():
    rel = qr_derive((0, 0, 0, 1))
    assert rel.Q == -X * (1 - A) * (1 - B) / (1 - C)
    assert rel.R == 1


@pytest.mark.parametrize("shift", TABLE_SHIFTS)
def test_derive_matches_table(shift):
    der = qr_derive(shift)
    look = qr_lookup(shift)
    assert der.Q == look.Q
    assert der.R == look.R


def test_residual_invariant_tight():
    # type invariant: residual < 1e-20 in 128-bit floats at random points
    rng = random.Random(2)
    for shift in TABLE_SHIFTS:
        rel = qr_lookup(shift)
        point = sample_relation_point(rng, rel.shift)
        res = relation_residual(rel, point, 1e-22, prec=128)
        assert res < 1e-20


def test_residual_example_and_perturbation_control():
    rel = qr_lookup((0, 1, 1, 0))
    point = {"a": F(1, 3), "b": F(1, 5), "c": F(1, 7), "x": F(1, 4), "q": F(1, 2)}
    assert relation_residual(rel, point, 1e-13) < 1e-12
    bad = ThreeTermRelation(rel.shift, rel.Q + 1, rel.R)
    assert relation_residual(bad, point, 1e-13) > 0.1
    rel2 = qr_lookup((0, 0, 0, 2))
    assert relation_residual(rel2, point, 1e-13) < 1e-12


def test_verify_relation_runs():
    verify_relation(qr_lookup((0, 2, 2, 0)), n_points=20, tol=1e-10)


def test_derived_relation_residuals():
    rel = qr_derive((1, 1, 2, 0))
    verify_relation(rel, n_points=20, tol=1e-10)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        qr_derive((0, 3, 3, 0), degree_budget=1)


def test_sum_zero_shifts_have_locus_factor():
    # for k+l-m+n = 0 the derived Q vanishes on x = c/(ab)
    rng = random.Random(4)
    for shift in [(0, 1, 1, 0), (1, 1, 2, 0)]:
        rel = qr_derive(shift)
        on_locus = rel.Q.subs({"x": C / (A * B)})
        assert on_locus.is_zero()
        count = 0
        while count < 20:
            pt = {s: F(rng.randint(1, 40), rng.randint(41, 97)) for s in ("a", "b", "c", "q")}
            pt["x"] = pt["c"] / (pt["a"] * pt["b"])
            try:
                v = rel.Q.eval(pt)
            except Exception:
                continue
            assert v == 0
            count += 1


def test_relation_json_round_trip():
    rel = qr_lookup((0, 2, 2, 0))
    obj = rel.to_json()
    back = ThreeTermRelation.from_json(obj)
    assert back.shift == rel.shift and back.Q == rel.Q and back.R == rel.R


def test_shift_vector_parse():
    s = ShiftVector.parse("1,2,1,-1")
    assert s.as_tuple() == (1, 2, 1, -1)
    assert str(s) == "1,2,1,-1"
    with pytest.raises(ValueError):
        ShiftVector.parse("1,2,3")
