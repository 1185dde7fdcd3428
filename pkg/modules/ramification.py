# logarithmic ramification: r_log, R_log, toroidality, component images, subcase classification
# 2025 toro
import math

from modules.algebra import (Frac2, Poly2, axis_valuation, eval_origin, jacobian, restrict_axis,
                             series_truncate)
from modules.log import logger
from modules.model import (ImpossibleSubcase, InvariantError, SubcaseData, ValidationError, WeilDivisor,
                           validate_germ)
import modules.settings as my_settings

ONTO_POINT = "OntoPoint"
ONTO_COMPONENT = "OntoComponent"
IMPOSSIBLE_SUBCASES = ("S1p2q0", "S2p1q0")


def require_valid(g, ygerm):
    ok, clause, message = validate_germ(g, ygerm)
    if not ok:
        raise ValidationError(clause, message)


def log_jacobian(g, ygerm):
    """r_log = J * prod(source boundary coordinates) / prod(pulled-back target boundary coordinates)."""
    num = jacobian(g.pull1, g.pull2)
    for k in g.axes():
        num = num * Frac2.of(Poly2.variable(k))
    den = Frac2.of(Poly2.constant(1))
    pulls = g.pulls()
    for k in ygerm.axes():
        den = den * pulls[k - 1]
    return num / den


def toroidal_at(g, ygerm):
    r = log_jacobian(g, ygerm)
    return eval_origin(r.num) != 0 and eval_origin(r.den) != 0


def frac_valuation(f, axis):
    return axis_valuation(f.num, axis) - axis_valuation(f.den, axis)


def component_coefficient(g, ygerm, axis):
    if g.boundary[axis - 1] is None:
        raise ValueError(f"axis {axis} is not a boundary axis of germ X{g.id}")
    r = log_jacobian(g, ygerm)
    value = frac_valuation(r, axis)
    if value < 0:
        raise InvariantError(f"negative coefficient {value} on {g.boundary[axis - 1]} at germ X{g.id}")
    return value


def ramification_divisor(s):
    coefficients = {}
    seen_at = {}
    for g in s.active_x_germs():
        y = s.target_of(g)
        for k in g.axes():
            comp = g.boundary[k - 1]
            value = component_coefficient(g, y, k)
            if comp in coefficients and coefficients[comp] != value:
                raise InvariantError(f"coefficient of {comp} is {coefficients[comp]} at X{seen_at[comp]} "
                                     f"but {value} at X{g.id}")
            coefficients[comp] = value
            seen_at[comp] = g.id
    return WeilDivisor(coefficients)


def component_image(g, ygerm, axis):
    """(ONTO_POINT, None) or (ONTO_COMPONENT, target axis) for a boundary axis of g."""
    if g.boundary[axis - 1] is None:
        raise ValueError(f"axis {axis} is not a boundary axis of germ X{g.id}")
    vanishes = [restrict_axis(f.num, axis).is_zero() for f in g.pulls()]
    if all(vanishes):
        return ONTO_POINT, None
    for k in (1, 2):
        if vanishes[k - 1] and ygerm.boundary[k - 1] is not None:
            return ONTO_COMPONENT, k
    raise InvariantError(f"boundary {g.boundary[axis - 1]} of X{g.id} maps neither to a point nor to a target component")


def exponent_matrix(g):
    # valuations of the pulls along the two axes
    return [[frac_valuation(f, 1), frac_valuation(f, 2)] for f in g.pulls()]


def _oriented_terms(f, swap, order):
    series = f.num if f.den == Poly2.constant(1) else series_truncate(f, order)
    return [((j, i) if swap else (i, j)) for (i, j) in series.terms]


def _on_ray_minimum(terms, a, b):
    ray = sorted((i, j) for i, j in terms if (i, j) != (0, 0) and a * j == b * i)
    if not ray:
        return math.inf, math.inf
    for (i0, j0), (i1, j1) in zip(ray, ray[1:]):
        if i1 < i0 or j1 < j0:
            raise InvariantError(f"collinear exponents {ray} are not ordered componentwise")
    return ray[0]


def classify_subcase(g, ygerm, series_order=None):
    """Subcase record for the germ g over ygerm.

    Pulls are oriented so that y1 is the boundary coordinate of a 1_q target and
    x1 is the primary source axis (the boundary axis of a 1_p point, the axis
    mapping onto q in S2p1q1).
    """
    series_order = my_settings.SERIES_ORDER if series_order is None else series_order
    x_axes, y_axes = g.axes(), ygerm.axes()
    images = {k: component_image(g, ygerm, k)[0] for k in x_axes}
    onto = [k for k in x_axes if images[k] == ONTO_POINT]
    if not x_axes:
        if y_axes:
            raise InvariantError(f"X{g.id} has no boundary but its target has {len(y_axes)} components")
        code = "S0p0q0"
    else:
        if not y_axes:
            raise InvariantError(f"X{g.id} has boundary but its target has none")
        code = f"S{len(x_axes)}p{len(y_axes)}q{len(onto)}"
    if code in IMPOSSIBLE_SUBCASES:
        raise ImpossibleSubcase(f"X{g.id} classified as {code}, which no valid log morphism produces")

    y_axis = y_axes[0] if len(y_axes) == 1 else 1
    p1, p2 = g.pulls() if y_axis == 1 else (g.pull2, g.pull1)
    if len(x_axes) == 1:
        primary = x_axes[0]
    elif code == "S2p1q1":
        primary = onto[0]
    else:
        primary = 1
    swap = primary == 2
    other = 1 if primary == 2 else 2

    data = SubcaseData(code, primary_axis=primary, y_axis=y_axis)
    data.a = frac_valuation(p1, primary)
    data.b = frac_valuation(p1, other) if len(x_axes) == 2 else 0
    if code == "S0p0q0":
        return data
    if code.startswith("S2p2q") or code == "S1p2q1":
        c = frac_valuation(p2, primary)
        d = frac_valuation(p2, other) if len(x_axes) == 2 else 0
        data.i_o, data.j_o = c, d
        data.det = data.a * d - data.b * c
        return data

    bound = max(f.num.total_degree() + f.den.total_degree() for f in (p1, p2)) + data.a + data.b + series_order
    terms = _oriented_terms(p2, swap, bound)
    a, b = data.a, data.b
    if code.startswith("S1p1q"):
        data.i_o = min((i for i, j in terms if j > 0), default=math.inf)
        data.i_s = min((i for i, j in terms if j == 0), default=math.inf)
    elif code == "S2p1q1":
        data.i_o = min((i for i, j in terms if j == 0), default=math.inf)
        data.i_s, data.j_s = _on_ray_minimum(terms, a, b)
    elif code == "S2p1q2":
        off_ray = [(i, j) for i, j in terms if a * j != b * i]
        data.i_o = min((i for i, _ in off_ray), default=math.inf)
        data.j_o = min((j for _, j in off_ray), default=math.inf)
        data.i_s, data.j_s = _on_ray_minimum(terms, a, b)
    logger.debug(f"Toroidalize: X{g.id} classified {data.as_dict()}")
    return data
