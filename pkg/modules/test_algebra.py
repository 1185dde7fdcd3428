# test_algebra.py
# Unit and property tests for the exact polynomial kernel
import os
import sys

# Add the parent directory to sys.path to allow module imports
parent_path = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
sys.path.insert(0, parent_path)

import math
import unittest
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from modules.algebra import (FIRST, SECOND, AlgebraError, Frac2, ParseError, Poly2, UniPoly, axis_valuation,
                             coprime, eval_origin, exact_divide, gcd2, gcd_uni, jacobian, monomial_split,
                             parse_poly, partial_derivative, rational_roots, reduce_fraction, restrict_axis,
                             resultant, series_inverse, series_truncate, shift_axis, substitute_blowup)

x1 = Poly2.variable(1)
x2 = Poly2.variable(2)

small_polys = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)),
    st.integers(-5, 5).filter(bool),
    min_size=1, max_size=4,
).map(Poly2)


class TestPoly2(unittest.TestCase):
    def test_zero_coefficients_are_dropped(self):
        p = Poly2({(1, 0): 2, (0, 1): 0})
        self.assertEqual(dict(p.terms), {(1, 0): Fraction(2)})
        self.assertTrue((x1 - x1).is_zero())

    def test_arithmetic(self):
        p = (x1 + x2) ** 2
        self.assertEqual(p, x1 * x1 + x2.scale(2) * x1 + x2 * x2)
        self.assertEqual(p.total_degree(), 2)
        self.assertEqual((x1 * x2 + 1).evaluate(2, Fraction(1, 2)), Fraction(2))

    def test_format_is_descending_lex(self):
        p = Poly2({(2, 1): 3, (0, 0): -1, (1, 0): Fraction(1, 2)})
        self.assertEqual(p.format(), "3*x1^2*x2 + 1/2*x1 - 1")
        self.assertEqual(str(-x1 * x2), "-x1*x2")
        self.assertEqual(str(Poly2()), "0")

    def test_floats_are_rejected(self):
        with self.assertRaises(AlgebraError):
            Poly2({(1, 0): 0.5})

    def test_negative_exponent_rejected(self):
        with self.assertRaises(AlgebraError):
            Poly2.monomial(-1, 0)


class TestParse(unittest.TestCase):
    def test_parse_round_trip(self):
        p = parse_poly("x1^2*x2 - 3/2*x1 + 4")
        self.assertEqual(p, Poly2({(2, 1): 1, (1, 0): Fraction(-3, 2), (0, 0): 4}))
        self.assertEqual(parse_poly(p.format()), p)

    def test_parse_expands_products(self):
        self.assertEqual(parse_poly("x1*x2*(1 + x1)"), x1 * x2 + x1 * x1 * x2)

    def test_target_names(self):
        self.assertEqual(parse_poly("y1 + y2^2"), x1 + x2 * x2)

    def test_rejects(self):
        for text in ("", "x1**2", "x1 + y1", "sin(x1)", "x3", "x1/x2", "1.5*x1"):
            with self.subTest(text=text):
                with self.assertRaises(ParseError):
                    parse_poly(text)


class TestKernel(unittest.TestCase):
    def test_substitute_blowup(self):
        p = Poly2({(2, 0): 1, (1, 1): 1})
        self.assertEqual(substitute_blowup(p, FIRST), Poly2({(2, 0): 1, (2, 1): 1}))
        self.assertEqual(substitute_blowup(p, SECOND), Poly2({(2, 2): 1, (1, 2): 1}))
        with self.assertRaises(AlgebraError):
            substitute_blowup(p, "Third")

    def test_shift_axis(self):
        self.assertEqual(shift_axis(x2 * x2, 2, 1), x2 * x2 + x2.scale(2) + 1)
        self.assertEqual(shift_axis(x1 * x2, 1, 0), x1 * x2)

    def test_monomial_split(self):
        e1, e2, residual = monomial_split(Poly2({(2, 1): 1, (3, 2): 1}))
        self.assertEqual((e1, e2), (2, 1))
        self.assertEqual(residual, 1 + x1 * x2)
        with self.assertRaises(AlgebraError):
            monomial_split(Poly2())

    def test_axis_valuation(self):
        self.assertEqual(axis_valuation(x1 * x1 * x2 + x1 ** 3, 1), 2)
        self.assertEqual(axis_valuation(Poly2(), 2), math.inf)

    def test_reduce_fraction(self):
        f = reduce_fraction(x1 * x1 - x1, x1.scale(2))
        self.assertEqual(f.num, (x1 - 1).scale(Fraction(1, 2)))
        self.assertEqual(f.den, Poly2.constant(1))
        with self.assertRaises(AlgebraError):
            reduce_fraction(x1, Poly2())

    def test_frac_arithmetic(self):
        f = Frac2.of(x1) / Frac2.of(1 + x2)
        self.assertEqual((f * Frac2.of(1 + x2)), Frac2.of(x1))
        self.assertEqual(Frac2.of(x2).shift(1), Frac2.of(x2 - 1))
        self.assertEqual(f.evaluate_origin(), 0)

    def test_exact_divide(self):
        self.assertEqual(exact_divide(x1 * x1 * x2, x1 * x2), x1)
        with self.assertRaises(AlgebraError):
            exact_divide(x1 + 1, x1)

    def test_gcd2_is_monic_common_factor(self):
        g = gcd2((x1 * x2).scale(3), (x1 * x1).scale(6))
        self.assertEqual(g, x1)
        self.assertEqual(gcd2(Poly2(), x2.scale(4)), x2)
        with self.assertRaises(AlgebraError):
            gcd2(Poly2(), Poly2())

    def test_restrict_axis(self):
        p = x1 * x2 + x2 * x2 - 2
        self.assertEqual(restrict_axis(p, 1), UniPoly([-2, 0, 1]))
        self.assertEqual(restrict_axis(p, 2), UniPoly([-2]))
        self.assertTrue(restrict_axis(x1, 1).is_zero())
        self.assertEqual(restrict_axis(x1 * x1 + x2 - 3, 2), UniPoly([-3, 0, 1]))
        self.assertEqual(restrict_axis(x1 * x1 + x2 - 3, 1), UniPoly([-3, 1]))

    def test_rational_roots(self):
        self.assertEqual(rational_roots(UniPoly([-1, 0, 1])), ({Fraction(1), Fraction(-1)}, False))
        self.assertEqual(rational_roots(UniPoly([-2, 0, 1])), (set(), True))
        roots, irrational = rational_roots(UniPoly([0, -2, 0, 1]))
        self.assertEqual(roots, {Fraction(0)})
        self.assertTrue(irrational)

    def test_gcd_uni(self):
        u = UniPoly([-1, 0, 1])
        v = UniPoly([2, -2])
        self.assertEqual(gcd_uni(u, v), UniPoly([-1, 1]))
        self.assertEqual(gcd_uni(UniPoly(), v), UniPoly([-1, 1]))

    def test_resultant(self):
        # eliminating x1 from x1 - x2 and x1 + x2 - 2 leaves 2*x2 - 2
        self.assertEqual(resultant(x1 - x2, x1 + x2 - 2, 1), UniPoly([-2, 2]))

    def test_coprime(self):
        self.assertTrue(coprime(x1, x2))
        self.assertTrue(coprime(x1 + x2, x1 - x2))
        self.assertTrue(coprime(Poly2.constant(3), x1))
        # common factor in x1 only
        self.assertFalse(coprime(x1 * x2, x1))
        self.assertFalse(coprime(x1 * (x2 + 1), x1 * x2 - x1))
        self.assertFalse(coprime((x1 - x2) * (x1 + 1), (x1 - x2) * x2))
        self.assertFalse(coprime(Poly2(), x1))
        self.assertTrue(coprime(Poly2(), Poly2.constant(2)))

    def test_series_inverse(self):
        self.assertEqual(series_inverse(1 + x1, 3), 1 - x1 + x1 * x1 - x1 ** 3)
        with self.assertRaises(AlgebraError):
            series_inverse(x1, 3)

    def test_series_truncate(self):
        f = reduce_fraction(x1, 1 - x2)
        self.assertEqual(series_truncate(f, 3), x1 + x1 * x2 + x1 * x2 * x2)

    def test_jacobian(self):
        j = jacobian(Frac2.of(x1 * x1), Frac2.of(x1 * x2))
        self.assertEqual(j, Frac2.of((x1 * x1).scale(2)))


class TestKernelProperties(unittest.TestCase):
    @settings(max_examples=500, deadline=None)
    @given(small_polys, small_polys, small_polys)
    def test_gcd_divides_with_coprime_residuals(self, d, p, q):
        a, b = d * p, d * q
        g = gcd2(a, b)
        r1, r2 = exact_divide(a, g), exact_divide(b, g)
        self.assertEqual(r1 * g, a)
        self.assertEqual(r2 * g, b)
        self.assertTrue(coprime(r1, r2), (r1, r2))
        # d is a common divisor, so it divides the gcd
        exact_divide(g, d)

    @settings(max_examples=300, deadline=None)
    @given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
    def test_monomial_jacobian_identity(self, a, b, c, d):
        det = a * d - b * c
        j = jacobian(Frac2.of(Poly2.monomial(a, b)), Frac2.of(Poly2.monomial(c, d)))
        expected = Poly2.monomial(a + c - 1, b + d - 1, det) if det else Poly2()
        self.assertEqual(j.num, expected)
        self.assertEqual(j.den, Poly2.constant(1))

    @settings(max_examples=100, deadline=None)
    @given(small_polys, st.integers(-3, 3))
    def test_shift_is_invertible(self, p, c):
        self.assertEqual(shift_axis(shift_axis(p, 2, c), 2, -c), p)
        self.assertEqual(eval_origin(shift_axis(p, 1, c)), p.evaluate(c, 0))

    @settings(max_examples=300, deadline=None)
    @given(small_polys, small_polys)
    def test_reduce_fraction_is_idempotent(self, p, q):
        f = reduce_fraction(p, q)
        self.assertEqual(reduce_fraction(f.num, f.den), f)
        # same value: p / q == num / den
        self.assertEqual(p * f.den, q * f.num)
        self.assertTrue(coprime(f.num, f.den) or f.num.is_zero())

    @settings(max_examples=300, deadline=None)
    @given(small_polys, small_polys, st.sampled_from([1, 2]))
    def test_product_rule(self, p, q, axis):
        left = partial_derivative(p * q, axis)
        self.assertEqual(left, partial_derivative(p, axis) * q + p * partial_derivative(q, axis))


if __name__ == '__main__':
    unittest.main()
