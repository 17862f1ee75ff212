import itertools
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chow_obstruct.errors import InputError
from chow_obstruct.exact_math import (
    AffineForm,
    QMatrix,
    affine_eval,
    bernoulli_plus,
    det,
    format_rational,
    inverse,
    parse_rational,
    solve,
)
from conftest import NILL_PAFFENHOLZ_VERTICES

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)
small_ints = st.integers(min_value=-4, max_value=4)


def series_of_todd_by_long_division(order):
    """Invert (1 - e^{-x}) / x = sum (-1)^k x^k / (k+1)! term by term."""
    g = [Fraction((-1) ** k, factorial(k + 1)) for k in range(order + 1)]
    inv = [Fraction(0)] * (order + 1)
    inv[0] = 1 / g[0]
    for k in range(1, order + 1):
        inv[k] = -sum(g[j] * inv[k - j] for j in range(1, k + 1)) / g[0]
    return inv


def leibniz_det(rows):
    n = len(rows)
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = (-1) ** inversions
        for i, p in enumerate(perm):
            term *= rows[i][p]
            if not term:
                break
        total += term
    return total


class TestBernoulli:
    def test_zero(self):
        assert bernoulli_plus(0) == [1]

    def test_first_three(self):
        assert bernoulli_plus(2) == [1, Fraction(1, 2), Fraction(1, 6)]

    def test_up_to_four(self):
        b = bernoulli_plus(4)
        assert b[3] == 0
        assert b[4] == Fraction(-1, 30)

    def test_matches_series_long_division(self):
        expected = series_of_todd_by_long_division(16)
        got = [b / factorial(k) for k, b in enumerate(bernoulli_plus(16))]
        assert got == expected

    def test_single_weight_todd_series(self):
        # x/(1-e^{-x}) = 1 + x/2 + x^2/12 - x^4/720 + ...
        coeffs = [b / factorial(k) for k, b in enumerate(bernoulli_plus(5))]
        assert coeffs == [1, Fraction(1, 2), Fraction(1, 12), 0, Fraction(-1, 720), 0]

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            bernoulli_plus(-1)


class TestDet:
    def test_identity(self):
        assert det(QMatrix.identity(3)) == 1

    def test_two_by_two(self):
        assert det(QMatrix.from_rows([[1, 0], [-1, -1]])) == -1

    def test_reference_chart_is_unimodular(self):
        cols = [NILL_PAFFENHOLZ_VERTICES[i - 1] for i in (1, 2, 3, 7, 8, 9, 11)]
        m = QMatrix.from_columns(cols)
        expected = leibniz_det(m.to_rows())
        assert abs(expected) == 1
        assert det(m) == expected

    def test_rational_entries(self):
        m = QMatrix.from_rows([[Fraction(1, 2), 3], [Fraction(2, 3), Fraction(-1, 5)]])
        assert det(m) == Fraction(1, 2) * Fraction(-1, 5) - 3 * Fraction(2, 3)

    def test_non_square(self):
        with pytest.raises(ValueError):
            det(QMatrix.from_rows([[1, 2, 3], [4, 5, 6]]))

    def test_singular(self):
        assert det(QMatrix.from_rows([[1, 2], [2, 4]])) == 0

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 5).flatmap(
        lambda n: st.tuples(
            st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n),
            st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n),
        )))
    def test_multiplicative(self, pair):
        a, b = (QMatrix.from_rows(x) for x in pair)
        assert det(a @ b) == det(a) * det(b)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n)))
    def test_matches_leibniz(self, rows):
        assert det(QMatrix.from_rows(rows)) == leibniz_det(rows)


def random_unimodular(rng, n, steps=30):
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-2, 2)
        rows[i] = [x + c * y for x, y in zip(rows[i], rows[j])]
    return rows


class TestSolve:
    def test_identity(self):
        b = [Fraction(3), Fraction(-1, 2), Fraction(7)]
        assert solve(QMatrix.identity(3), b) == b

    def test_diagonal(self):
        assert solve(QMatrix.from_rows([[2, 0], [0, 4]]), [1, 1]) == [Fraction(1, 2), Fraction(1, 4)]

    def test_singular(self):
        with pytest.raises(ZeroDivisionError):
            solve(QMatrix.from_rows([[1, 2], [2, 4]]), [1, 1])

    def test_unimodular_round_trip(self):
        import random

        rng = random.Random(7)
        for _ in range(20):
            rows = random_unimodular(rng, 5)
            a = QMatrix.from_rows(rows)
            assert abs(det(a)) == 1
            b = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(5)]
            assert a.apply(solve(a, b)) == b

    def test_inverse(self):
        a = QMatrix.from_rows([[1, 0], [-1, -1]])
        assert inverse(a) @ a == QMatrix.identity(2)


class TestRationals:
    @given(fractions, fractions, fractions)
    def test_field_laws(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c

    @pytest.mark.parametrize("x, text", [
        (Fraction(3), "3"), (Fraction(-7, 3), "-7/3"), (Fraction(0), "0"), (Fraction(4, 8), "1/2"),
    ])
    def test_format(self, x, text):
        assert format_rational(x) == text
        assert parse_rational(text) == x

    def test_parse_garbage(self):
        with pytest.raises(InputError):
            parse_rational("1/0")


class TestAffineForm:
    def test_constant(self):
        assert affine_eval(AffineForm.const(3), {"x": 99}) == 3

    def test_difference(self):
        f = AffineForm.var("alpha") - AffineForm.var("beta")
        assert affine_eval(f, {"alpha": 2, "beta": 5}) == -3

    def test_recurring_form(self):
        from conftest import s_form

        point = {"alpha1": 1, "alpha2": 1, "alpha3": 1, "beta1": 0, "beta2": 0, "beta3": 0, "gamma": 1}
        assert affine_eval(s_form(), point) == 1

    def test_missing_binding(self):
        with pytest.raises(InputError):
            affine_eval(AffineForm.var("a"), {"b": 1})

    def test_no_zero_coefficients(self):
        f = AffineForm.var("a") - AffineForm.var("a") + 2
        assert dict(f.coeffs) == {}
        assert f == 2

    def test_undeclared_parameter(self):
        with pytest.raises(InputError):
            AffineForm.var("zeta").check_params(["a", "b"])

    def test_json_round_trip(self):
        f = AffineForm(Fraction(-1, 3), {"b": Fraction(5, 2), "a": Fraction(-1)})
        obj = f.to_json(["a", "b"])
        assert obj == {"const": "-1/3", "coeffs": {"a": "-1", "b": "5/2"}}
        assert list(obj["coeffs"]) == ["a", "b"]
        assert AffineForm.from_json(obj) == f

    def test_ratio(self):
        f = AffineForm.var("a", 2) - AffineForm.var("b", 4)
        assert (f * Fraction(3, 7)).ratio_to(f) == Fraction(3, 7)
        assert (f + AffineForm.var("a")).ratio_to(f) is None

    def test_format(self):
        f = AffineForm(Fraction(1, 2), {"a": 2, "b": -1})
        assert f.format(["a", "b"]) == "2*a - b + 1/2"
        assert AffineForm().format() == "0"
        assert (-AffineForm.var("a")).format() == "-a"

    @given(fractions, fractions, fractions, fractions, fractions, fractions, fractions)
    def test_linear(self, c1, a1, c2, a2, scale, x, y):
        f = AffineForm(c1, {"x": a1, "y": a2})
        g = AffineForm(c2, {"y": a1, "x": a2})
        point = {"x": x, "y": y}
        assert affine_eval(f + g, point) == affine_eval(f, point) + affine_eval(g, point)
        assert affine_eval(f * scale, point) == scale * affine_eval(f, point)
