# canonical principalization in dimension 2: blow up exactly the points where the
# pulled-back maximal ideal of the target centre is not principal
# 2025 toro
from dataclasses import dataclass

from modules.algebra import (AlgebraError, coprime, eval_origin, exact_divide, gcd2, gcd_uni, rational_roots,
                             restrict_axis)
from modules.blowup import blowup_x, recenter_at_point
from modules.log import logger
from modules.model import IrrationalCenter, NonTermination, origin_keys, position_key
import modules.settings as my_settings


@dataclass
class PointOfInterest:
    germ: int
    axis: int = None  # None for the germ's own centre
    w: object = 0
    keys: frozenset = frozenset()

    def label(self):
        if self.axis is None:
            return f"X{self.germ}:origin"
        return f"X{self.germ}:axis{self.axis}={self.w}"


def ideal_residuals(g):
    # pull denominators are units at the centre, numerators generate the ideal
    n1, n2 = g.pull1.num, g.pull2.num
    if n1.is_zero() and n2.is_zero():
        raise AlgebraError(f"X{g.id} pulls back the target centre to the zero ideal")
    d = gcd2(n1, n2)
    h1, h2 = exact_divide(n1, d), exact_divide(n2, d)
    if not coprime(h1, h2):
        raise AlgebraError(f"residuals of X{g.id} share a factor after dividing by {d}")
    return h1, h2


def is_principal_at(g):
    h1, h2 = ideal_residuals(g)
    return not (eval_origin(h1) == 0 and eval_origin(h2) == 0)


def regular_on_axis(g, axis, w):
    # both pulls are defined at the point axis=w of the germ's chart
    return all(restrict_axis(f.den, axis).evaluate(w) != 0 for f in g.pulls())


def _axis_candidates(g, axis, h1, h2):
    r1, r2 = restrict_axis(h1, axis), restrict_axis(h2, axis)
    common = gcd_uni(r1, r2)
    if common.degree() < 1:
        return []
    roots, irrational = rational_roots(common)
    if irrational:
        raise IrrationalCenter(f"ideal of X{g.id} is not principal at an irrational point of "
                               f"{g.boundary[axis - 1]} (common factor {common})")
    found = []
    for w in sorted(roots):
        if w == 0:
            continue
        if not regular_on_axis(g, axis, w):
            logger.debug(f"Principalize: skipping X{g.id} axis{axis}={w}, outside the chart's regular locus")
            continue
        found.append(w)
    return found


def nonprincipal_points(s, ygerm_id):
    """Points over the given target centre where the pulled-back ideal is not principal.

    Covers each active germ's centre and the nonzero rational points of its
    exceptional axes; one entry per physical point, in germ order.
    """
    points = []
    seen = set()
    for g in s.germs_over(ygerm_id):
        h1, h2 = ideal_residuals(g)
        if eval_origin(h1) == 0 and eval_origin(h2) == 0:
            keys = frozenset(origin_keys(g))
            if not keys & seen:
                points.append(PointOfInterest(g.id, None, 0, keys))
                seen |= keys
        for axis in g.axes():
            if not g.boundary[axis - 1].is_exceptional():
                continue
            for w in _axis_candidates(g, axis, h1, h2):
                key = position_key(g, axis, w)
                # a germ already centred here reports the point itself
                if key in s.x_point_index or key in seen:
                    continue
                points.append(PointOfInterest(g.id, axis, w, frozenset({key})))
                seen.add(key)
    return points


def canonical_principalize(s, ygerm_id, cap=None):
    """Blow up non-principal points over the target centre until none remain."""
    cap = my_settings.PRINCIPALIZE_CAP if cap is None else cap
    blowups = 0
    while True:
        points = nonprincipal_points(s, ygerm_id)
        if not points:
            break
        logger.debug(f"Principalize: Y{ygerm_id} non-principal at {[p.label() for p in points]}")
        for point in points:
            g = s.x_germs[point.germ]
            if point.axis is not None:
                g = recenter_at_point(s, g, point.axis, point.w)
            blowup_x(s, g.id)
            blowups += 1
            if blowups > cap:
                raise NonTermination(f"canonical principalization over Y{ygerm_id} exceeded {cap} blowups", s)
    s.stats["max_principalization"] = max(s.stats["max_principalization"], blowups)
    if blowups:
        logger.debug(f"Principalize: Y{ygerm_id} principal after {blowups} blowups")
    return s
