# test_ramification.py
# Tests for r_log, R_log, component images and subcase classification
import os
import sys

# Add the parent directory to sys.path to allow module imports
parent_path = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
sys.path.insert(0, parent_path)

import math
import unittest

from hypothesis import HealthCheck, given, settings, strategies as st

from modules.algebra import Frac2, Poly2, parse_poly
from modules.model import (ORIGINAL, X_SIDE, ComponentId, ImpossibleSubcase, build_state, validate_germ)
from modules.ramification import (IMPOSSIBLE_SUBCASES, ONTO_COMPONENT, ONTO_POINT, classify_subcase,
                                  component_image, exponent_matrix, log_jacobian, ramification_divisor,
                                  toroidal_at)

G1 = ComponentId(X_SIDE, ORIGINAL, 1)
G2 = ComponentId(X_SIDE, ORIGINAL, 2)
x1 = Poly2.variable(1)
x2 = Poly2.variable(2)


def germ(f1, f2, bx, by, validate=True):
    s = build_state(parse_poly(f1) if isinstance(f1, str) else f1,
                    parse_poly(f2) if isinstance(f2, str) else f2, bx, by, validate=validate)
    g = s.x_germs[1]
    return s, g, s.target_of(g)


@st.composite
def log_germs(draw):
    """Pullback pairs that are valid log germs by construction (a unit times a monomial)."""
    k = draw(st.integers(-3, 3))
    unit = Poly2.constant(1) + x1.scale(k)
    shape = draw(st.sampled_from(["2p1q", "2p2q", "1p1q", "1p2q"]))
    if shape.startswith("2p"):
        a, b, c, d = (draw(st.integers(1 if shape == "2p1q" else 0, 4)) for _ in range(4))
        if a * d - b * c == 0 or (a + c) == 0 or (b + d) == 0:
            a, b, c, d = 1, 1, 1, 2
        f1, f2 = Poly2.monomial(a, b), Poly2.monomial(c, d) * unit
        by = {1} if shape == "2p1q" else {1, 2}
        return f1, f2, {1, 2}, by
    a, c = draw(st.integers(1, 4)), draw(st.integers(0 if shape == "1p1q" else 1, 4))
    if shape == "1p1q":
        return Poly2.monomial(a, 0) * unit, Poly2.monomial(c, 1), {1}, {1}
    return Poly2.monomial(a, 0), Poly2.monomial(c, 0) * (Poly2.constant(1) + x2), {1}, {1, 2}


class TestLogJacobian(unittest.TestCase):
    def test_flagship(self):
        s, g, y = germ("x1^2", "x1*x2", {1}, {1})
        self.assertEqual(log_jacobian(g, y), Frac2.of(x1.scale(2)))
        self.assertEqual(ramification_divisor(s).as_dict(), {"G1": 1})
        self.assertFalse(toroidal_at(g, y))

    def test_identity_is_toroidal(self):
        s, g, y = germ("x1", "x2", {1, 2}, {1, 2})
        self.assertTrue(toroidal_at(g, y))
        self.assertFalse(ramification_divisor(s))

    def test_two_component_divisor(self):
        s, g, y = germ("x1*x2", "x1^3*x2^2", {1, 2}, {1})
        self.assertEqual(ramification_divisor(s).as_dict(), {"G1": 3, "G2": 2})

    def test_unit_factor(self):
        s, g, y = germ("x1*x2", "x1*x2*(1 + x1)", {1, 2}, {1, 2})
        r = log_jacobian(g, y)
        self.assertEqual(r.num, -x1)
        self.assertEqual(r.den, 1 + x1)
        self.assertEqual(ramification_divisor(s).as_dict(), {"G1": 1})

    def test_free_point(self):
        s, g, y = germ("x1 + x2^2", "x2", set(), set())
        self.assertTrue(toroidal_at(g, y))
        self.assertEqual(classify_subcase(g, y).subcase, "S0p0q0")


class TestImages(unittest.TestCase):
    def test_onto_point(self):
        s, g, y = germ("x1^2", "x1*x2", {1}, {1})
        self.assertEqual(component_image(g, y, 1), (ONTO_POINT, None))

    def test_onto_component(self):
        s, g, y = germ("x1", "x2", {1, 2}, {1, 2})
        self.assertEqual(component_image(g, y, 1), (ONTO_COMPONENT, 1))
        self.assertEqual(component_image(g, y, 2), (ONTO_COMPONENT, 2))
        with self.assertRaises(ValueError):
            component_image(*germ("x1^2", "x1*x2", {1}, {1})[1:], 2)

    def test_exponent_matrix(self):
        s, g, y = germ("x1^2", "x1*x2", {1}, {1})
        self.assertEqual(exponent_matrix(g), [[2, 0], [1, 1]])


class TestClassify(unittest.TestCase):
    def test_flagship(self):
        _s, g, y = germ("x1^2", "x1*x2", {1}, {1})
        data = classify_subcase(g, y)
        self.assertEqual(data.subcase, "S1p1q1")
        self.assertEqual((data.a, data.b, data.i_o, data.i_s), (2, 0, 1, math.inf))

    def test_identity(self):
        _s, g, y = germ("x1", "x2", {1, 2}, {1, 2})
        data = classify_subcase(g, y)
        self.assertEqual(data.subcase, "S2p2q0")
        self.assertEqual(data.det, 1)
        self.assertEqual(data.matrix(), [[1, 0], [0, 1]])

    def test_two_p_one_q_one(self):
        _s, g, y = germ("x1*x2", "x1", {1, 2}, {1})
        data = classify_subcase(g, y)
        self.assertEqual(data.subcase, "S2p1q1")
        self.assertEqual((data.a, data.b, data.i_o), (1, 1, 1))
        self.assertEqual(data.primary_axis, 1)

    def test_two_p_one_q_two(self):
        _s, g, y = germ("x1*x2", "x1^3*x2^2", {1, 2}, {1})
        data = classify_subcase(g, y)
        self.assertEqual(data.subcase, "S2p1q2")
        self.assertEqual((data.i_o, data.j_o, data.i_s, data.j_s), (3, 2, math.inf, math.inf))
        self.assertEqual(data.as_dict()["i_s"], "inf")

    def test_on_ray_terms(self):
        _s, g, y = germ("x1*x2", "x1^2*x2^2 + x1^3*x2", {1, 2}, {1}, validate=False)
        data = classify_subcase(g, y)
        self.assertEqual((data.i_s, data.j_s), (2, 2))
        self.assertEqual((data.i_o, data.j_o), (3, 1))

    def test_degenerate_two_q(self):
        _s, g, y = germ("x1*x2", "x1*x2*(1 + x1)", {1, 2}, {1, 2})
        data = classify_subcase(g, y)
        self.assertEqual(data.subcase, "S2p2q2")
        self.assertEqual(data.det, 0)

    def test_target_boundary_on_second_axis(self):
        _s, g, y = germ("x1*x2", "x1^2", {1}, {2}, validate=False)
        data = classify_subcase(g, y)
        self.assertEqual(data.y_axis, 2)
        self.assertEqual(data.a, 2)

    def test_impossible_subcase(self):
        _s, g, y = germ("x1", "x2", {1}, {1, 2}, validate=False)
        with self.assertRaises(ImpossibleSubcase):
            classify_subcase(g, y)


class TestProperties(unittest.TestCase):
    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(0, 6), min_size=4, max_size=4).filter(lambda e: any(e[:2]) and any(e[2:])))
    def test_monomial_toroidal_iff_det_nonzero(self, e):
        a, b, c, d = e
        _s, g, y = germ(Poly2.monomial(a, b), Poly2.monomial(c, d), {1, 2}, {1, 2}, validate=False)
        self.assertEqual(toroidal_at(g, y), a * d - b * c != 0)

    @settings(max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(log_germs())
    def test_classifier_and_codimension(self, data):
        f1, f2, bx, by = data
        s, g, y = germ(f1, f2, bx, by, validate=False)
        if not validate_germ(g, y)[0]:
            return
        self.assertNotIn(classify_subcase(g, y).subcase, IMPOSSIBLE_SUBCASES)
        divisor = ramification_divisor(s)
        for k in g.axes():
            if divisor.get(g.boundary[k - 1]) > 0:
                self.assertEqual(component_image(g, y, k)[0], ONTO_POINT)


if __name__ == '__main__':
    unittest.main()
