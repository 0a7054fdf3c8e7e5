from fractions import Fraction as F

import pytest

from qforge.errors import DegenerateFamily
from qforge.exact import ExactScalar
from qforge.families import (
    ParamFamily,
    family_qbinom2,
    family_qgauss,
    family_qkummer,
    family_root_of_unity,
    shift_params,
    solution_families,
)
from qforge.poly import RationalFunction as RF

A, B, C, Q, X = (RF.var(s) for s in "abcqx")


def _names(shift):
    return [f.name for f in solution_families(shift)]


def test_registered_families_for_table_shifts():
    assert "(a, b, c, c/(ab))" in _names((0, 1, 1, 0))
    assert "(a, -a, -q, x)" in _names((0, 0, 0, 2))
    assert "(a, b, bq/a, -q/a)" in _names((0, 2, 2, 0))
    assert "(a, b, bq/a, -q/a)" in _names((1, 2, 1, -1))
    assert "(z3*q, b, z3*b, 1)" in _names((0, 3, 3, 0))


def test_pattern_matching():
    assert "(a, -a, -q, x)" in _names((2, 2, 0, 2))
    assert "(a, b, c, c/(ab))" in _names((1, 1, 2, 0))
    assert "(a, b, bq/a, -q/a)" in _names((2, 4, 2, -2))
    assert "(z4*q, b, z4*b, 1)" in _names((0, 4, 4, 0))
    assert _names((5, 7, 1, 2)) == []
    # odd l does not match the kummer pattern
    assert "(a, b, bq/a, -q/a)" not in _names((1, 3, 2, -1))


def test_remark2_exclusions():
    one = RF.const(1)
    zero = RF.const(0)
    with pytest.raises(DegenerateFamily):
        ParamFamily("bad", ("b", "c", "x"), {"a": one, "b": B, "c": C, "x": X})
    with pytest.raises(DegenerateFamily):
        ParamFamily("bad", ("a", "c", "x"), {"a": A, "b": one, "c": C, "x": X})
    with pytest.raises(DegenerateFamily):
        ParamFamily("bad", ("b", "x"), {"a": zero, "b": B, "c": zero, "x": X})
    with pytest.raises(DegenerateFamily):
        ParamFamily("bad", ("a", "x"), {"a": A, "b": zero, "c": zero, "x": X})
    with pytest.raises(DegenerateFamily):
        ParamFamily("bad", ("a", "b", "c"), {"a": A, "b": B, "c": C, "x": zero})
    with pytest.raises(DegenerateFamily):
        ParamFamily("bad", ("a", "b"), {"a": A, "b": B, "c": zero, "x": zero})


def test_shift_params_step_one_is_identity():
    fam = family_qkummer()
    out = shift_params(fam, (1, 2, 1, -1), 1)
    assert all(out.assignment[k] == fam.assignment[k] for k in "abcx")


def test_shift_params_kummer_step_two():
    fam = family_qkummer()
    out = shift_params(fam, (1, 2, 1, -1), 2)
    assert out.assignment["a"] == A * Q
    assert out.assignment["b"] == B * Q**2
    assert out.assignment["c"] == B * Q**2 / A
    assert out.assignment["x"] == -1 / A


def test_shift_params_qbinom2_step_three():
    fam = family_qbinom2()
    out = shift_params(fam, (0, 0, 0, 2), 3)
    assert out.assignment["a"] == A
    assert out.assignment["b"] == -A
    assert out.assignment["c"] == -Q
    assert out.assignment["x"] == X * Q**4


def test_param_values_with_fixed_root():
    fam = family_root_of_unity(3)
    vals = fam.param_values({"b": F(1, 5), "q": F(1, 2)})
    z = ExactScalar.zeta(3)
    assert vals["a"] == z * F(1, 2)
    assert vals["c"] == z * F(1, 5)
    assert vals["x"] == 1


def test_qgauss_assignment():
    fam = family_qgauss()
    assert fam.assignment["x"] == C / (A * B)
