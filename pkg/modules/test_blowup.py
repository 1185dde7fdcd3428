# test_blowup.py
# Tests for point blowups, recentering and retargeting
import os
import sys

# Add the parent directory to sys.path to allow module imports
parent_path = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
sys.path.insert(0, parent_path)

import unittest
from fractions import Fraction

from hypothesis import assume, given, settings, strategies as st

from modules.algebra import FIRST, SECOND, Frac2, Poly2, parse_poly
from modules.blowup import (blowup_x, blowup_y, choose_chart, ensure_y_recentered, recenter_at_point,
                            recenter_exceptional, retarget, retarget_after_blowup, sibling_first_chart)
from modules.model import (ORIGINAL, RECENTER, Y_SIDE, ComponentId, RetargetError, build_state,
                           validate_germ)
from modules.principalize import canonical_principalize
from modules.ramification import ramification_divisor, toroidal_at

H1 = ComponentId(Y_SIDE, ORIGINAL, 1)


def state(f1, f2, bx, by):
    return build_state(parse_poly(f1), parse_poly(f2), bx, by)


def pulls(g):
    return (str(g.pull1), str(g.pull2))


class TestBlowupY(unittest.TestCase):
    def test_charts_and_boundary(self):
        s = state("x1^2", "x1*x2", {1}, {1})
        first, second, exc = blowup_y(s, 1)
        self.assertEqual(first.boundary, (exc, None))
        self.assertEqual(second.boundary, (H1, exc))
        self.assertEqual(s.active_y, {first.id, second.id})
        self.assertEqual(first.lineage.chart, FIRST)
        event = s.events[-1]
        self.assertEqual(event.kind, "YBlowup")
        self.assertEqual(event.payload["center_type"], "1_q")
        self.assertEqual(s.stats["y_blowups"], 1)


class TestBlowupX(unittest.TestCase):
    def test_total_transform(self):
        s = state("x1^2", "x1*x2", {1}, {1})
        first, second, exc = blowup_x(s, 1)
        self.assertEqual(pulls(first), ("x1^2", "x1^2*x2"))
        self.assertEqual(pulls(second), ("x1^2*x2^2", "x1*x2^2"))
        self.assertEqual(first.boundary, (exc, None))
        self.assertEqual(second.boundary[1], exc)
        self.assertEqual(first.target, 1)
        self.assertNotIn(1, s.active_x)
        self.assertEqual(s.components[exc]["origin"], 1)

    def test_sibling(self):
        s = state("x1^2", "x1*x2", {1}, {1})
        first, second, _exc = blowup_x(s, 1)
        self.assertEqual(sibling_first_chart(s, second), first)
        self.assertIsNone(sibling_first_chart(s, first))


class TestRecenter(unittest.TestCase):
    def test_recenter_exceptional(self):
        s = state("x1^2", "x1*x2", {1}, {1})
        first, _second, exc = blowup_x(s, 1)
        new = recenter_exceptional(s, first.id, 2)
        self.assertEqual(new.boundary, (exc, None))
        self.assertEqual(new.pull2.num, Poly2({(2, 1): 1, (2, 0): 2}))
        self.assertEqual(new.lineage.chart, RECENTER)
        self.assertEqual(new.lineage.shift, Fraction(2))
        self.assertEqual(s.events[-1].kind, "Recenter")
        with self.assertRaises(ValueError):
            recenter_exceptional(s, first.id, 0)

    def test_recenter_needs_exceptional_axis(self):
        s = state("x1^2", "x1*x2", {1}, {1})
        with self.assertRaises(ValueError):
            recenter_exceptional(s, 1, 1)

    def test_y_recentering_is_shared(self):
        s = state("x1", "x1*x2", {1}, {1})
        first, _second, _exc = blowup_y(s, 1)
        a = ensure_y_recentered(s, first.id, 1)
        b = ensure_y_recentered(s, first.id, Fraction(1))
        self.assertEqual(a.id, b.id)
        self.assertEqual(a.boundary, (first.boundary[0], None))

    def test_second_chart_point_moves_to_first_chart(self):
        s = state("x1^2", "x1*x2", {1}, {1})
        first, second, _exc = blowup_x(s, 1)
        new = recenter_at_point(s, second, 2, 2)
        self.assertEqual(new.lineage.parent, first.id)
        self.assertEqual(new.lineage.axis, 1)
        self.assertEqual(new.lineage.shift, Fraction(1, 2))


class TestRetarget(unittest.TestCase):
    def test_principal_first_chart(self):
        s = state("x1", "x1*x2", {1}, {1})
        first, _second, _exc = blowup_y(s, 1)
        self.assertEqual(choose_chart(s.x_germs[1]), [FIRST, SECOND])
        g = retarget_after_blowup(s, 1)
        self.assertEqual(g.target, first.id)
        self.assertEqual(pulls(g), ("x1", "x2"))
        self.assertTrue(validate_germ(g, s.target_of(g))[0])

    def test_overlap_point_uses_first_chart(self):
        s = state("x1^2", "x1^2 + x1^3*x2", {1}, {1})
        first, _second, _exc = blowup_y(s, 1)
        g = retarget_after_blowup(s, 1)
        y = s.target_of(g)
        self.assertEqual(y.lineage.parent, first.id)
        self.assertEqual(y.lineage.shift, Fraction(1))
        self.assertEqual(pulls(g), ("x1^2", "x1*x2"))

    def test_after_principalization(self):
        s = state("x1^2", "x1*x2", {1}, {1})
        yfirst, ysecond, _e = blowup_y(s, 1)
        first, second, _exc = blowup_x(s, 1)
        a = retarget_after_blowup(s, first.id)
        b = retarget_after_blowup(s, second.id)
        self.assertEqual((a.target, pulls(a)), (yfirst.id, ("x1^2", "x2")))
        self.assertEqual((b.target, pulls(b)), (ysecond.id, ("x1", "x1*x2^2")))
        self.assertEqual(s.stats["retargets"], 2)

    def test_non_principal_cannot_retarget(self):
        s = state("x1^2", "x1*x2", {1}, {1})
        blowup_y(s, 1)
        with self.assertRaises(RetargetError):
            retarget_after_blowup(s, 1)

    def test_unrelated_target(self):
        s = state("x1", "x1*x2", {1}, {1})
        first, _second, _exc = blowup_y(s, 1)
        g = retarget_after_blowup(s, 1)
        with self.assertRaises(RetargetError):
            retarget(s, g.id, first.id)


@st.composite
def monomial_pairs(draw):
    a, b, c, d = (draw(st.integers(0, 3)) for _ in range(4))
    assume(a + b > 0 and c + d > 0 and a * d != b * c)
    return Poly2.monomial(a, b), Poly2.monomial(c, d)


class TestBlowupProperties(unittest.TestCase):
    @settings(max_examples=100, deadline=None)
    @given(monomial_pairs())
    def test_toroidal_monomial_germ_stays_monomial(self, pair):
        s = build_state(*pair, {1, 2}, {1, 2})
        for child in blowup_x(s, 1)[:2]:
            for f in child.pulls():
                self.assertEqual(len(f.num.terms), 1, child)
                self.assertEqual(f.den, Poly2.constant(1))
            self.assertTrue(toroidal_at(child, s.target_of(child)), child)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 4), st.integers(-3, 3).filter(bool))
    def test_chart_follows_valuations(self, a, c, lam):
        # nu(pull1) = a and nu(pull2) = c along G1
        s = build_state(Poly2.monomial(a, 0), Poly2.monomial(c, 0) * (Poly2.variable(2) + lam), {1}, {1})
        first, second, _exc = blowup_y(s, 1)
        canonical_principalize(s, 1)
        g = retarget_after_blowup(s, 1)
        if a > c:
            self.assertEqual(g.target, second.id)
        elif a < c:
            self.assertEqual(g.target, first.id)
        else:
            lineage = s.target_of(g).lineage
            self.assertEqual((lineage.parent, lineage.chart, lineage.shift), (first.id, RECENTER, lam))

    @settings(max_examples=50, deadline=None)
    @given(monomial_pairs())
    def test_toroidal_germs_stay_toroidal(self, pair):
        s = build_state(*pair, {1, 2}, {1, 2})
        self.assertFalse(ramification_divisor(s))
        blowup_y(s, 1)
        canonical_principalize(s, 1)
        for g in s.germs_over(1):
            retarget_after_blowup(s, g.id)
        self.assertFalse(ramification_divisor(s))
        for g in s.active_x_germs():
            self.assertTrue(toroidal_at(g, s.target_of(g)), g)


if __name__ == '__main__':
    unittest.main()
