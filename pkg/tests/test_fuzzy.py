import numpy as np
import pytest

from survopt.errors import DegenerateInputError
from survopt.oracle import quadrature
from survopt.fuzzy import (
    TrapezoidalFuzzy as TF,
    graded_mean,
    left_inverse,
    membership,
    right_inverse,
)


def test_graded_mean_formula():
    assert graded_mean(TF(1, 2, 4, 7)) == pytest.approx((1 + 4 + 8 + 7) / 6)


def test_graded_mean_of_crisp_is_value():
    assert graded_mean(TF.crisp(3.25)) == 3.25


def test_addition_and_subtraction_are_componentwise():
    A, B = TF(1, 2, 3, 4), TF(0.5, 1, 1.5, 2)
    assert (A + B).as_tuple() == (1.5, 3, 4.5, 6)
    assert (A - B).as_tuple() == (-1, 0.5, 2, 3.5)


def test_product_and_quotient():
    A, B = TF(1, 2, 3, 4), TF(1, 2, 4, 8)
    assert (A * B).as_tuple() == (1, 4, 12, 32)
    assert (A / B).as_tuple() == (0.125, 0.5, 1.5, 4)


def test_division_by_zero_touching_number():
    with pytest.raises(DegenerateInputError):
        TF(1, 2, 3, 4) / TF(0, 1, 2, 3)


def test_scalar_operands_are_lifted():
    A = TF(1, 2, 3, 4)
    assert (2 * A).as_tuple() == (2, 4, 6, 8)
    assert (A + 1).as_tuple() == (2, 3, 4, 5)
    assert (10 - A).as_tuple() == (6, 7, 8, 9)


def test_negation_reverses_order():
    assert (-TF(1, 2, 3, 4)).as_tuple() == (-4, -3, -2, -1)


def test_membership_shape():
    t = TF(0, 1, 2, 4)
    assert membership(-1, t) == 0.0
    assert membership(0.5, t) == 0.5
    assert membership(1.5, t) == 1.0
    assert membership(3, t) == 0.5
    assert t.membership(5) == 0.0


def test_membership_requires_canonical_order():
    with pytest.raises(DegenerateInputError):
        membership(1, TF(4, 3, 2, 1))


def test_level_inverses_bound_the_core():
    t = TF(0, 1, 2, 4)
    assert left_inverse(0, t) == 0 and left_inverse(1, t) == 1
    assert right_inverse(0, t) == 4 and right_inverse(1, t) == 2


def test_graded_mean_is_mean_of_level_midpoints():
    # GM = integral_0^1 h (L^-1(h) + R^-1(h)) / 2 dh / integral_0^1 h dh
    t = TF(0.3, 1.1, 2.5, 4.0)
    num = quadrature(lambda h: h * (left_inverse(h, t) + right_inverse(h, t)) / 2, 0.0, 1.0)
    assert num / 0.5 == pytest.approx(graded_mean(t), rel=1e-12)


def test_from_seq_length_check():
    with pytest.raises(DegenerateInputError):
        TF.from_seq([1, 2, 3])


def test_random_linearity():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        A = TF.from_seq(np.sort(rng.uniform(0, 5, 4)))
        B = TF.from_seq(np.sort(rng.uniform(0, 5, 4)))
        s, t = rng.uniform(-3, 3, 2)
        assert graded_mean(A * s + B * t) == pytest.approx(s * graded_mean(A) + t * graded_mean(B), abs=1e-12)
