# state of a toroidalization run: components, germs on both sides, divisors and the trace
# 2025 toro
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from types import MappingProxyType

from modules.algebra import (FIRST, SECOND, Frac2, Poly2, eval_origin, jacobian, monomial_split,
                             reduce_fraction, scalar, shift_axis)
from modules.log import logger, traceLogger

X_SIDE = "X"
Y_SIDE = "Y"
ORIGINAL = "Original"
EXCEPTIONAL = "Exceptional"
RECENTER = "Recenter"

LESS = "Less"
EQUAL = "Equal"
GREATER = "Greater"

# identity Moebius map (alpha, beta, gamma, delta)
IDENTITY_POSITION = (Fraction(1), Fraction(0), Fraction(0), Fraction(1))
INVERSION_POSITION = (Fraction(0), Fraction(1), Fraction(1), Fraction(0))

EVENT_KINDS = ("RamificationComputed", "YBlowup", "XBlowup", "Recenter", "Retarget",
               "SubcaseClassified", "MonitorCheck", "Done")


class ToroError(Exception):
    pass


class ValidationError(ToroError):
    def __init__(self, clause, message):
        super().__init__(f"condition ({clause}) violated: {message}")
        self.clause = clause
        self.detail = message


class IrrationalCenter(ToroError):
    pass


class NonTermination(ToroError):
    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class InvariantError(ToroError):
    pass


class ImpossibleSubcase(InvariantError):
    pass


class RetargetError(InvariantError):
    pass


@dataclass(frozen=True, order=True)
class ComponentId:
    side: str
    kind: str
    index: int

    def is_exceptional(self):
        return self.kind == EXCEPTIONAL

    def __str__(self):
        if self.kind == ORIGINAL:
            return f"{'G' if self.side == X_SIDE else 'H'}{self.index}"
        return f"{'Ep' if self.side == X_SIDE else 'Eq'}{self.index}"


@dataclass(frozen=True)
class Lineage:
    parent: int
    chart: str
    shift: Fraction = None
    axis: int = None

    def label(self):
        if self.chart == RECENTER:
            return f"Recenter(axis{self.axis}, {self.shift})"
        return self.chart


@dataclass(frozen=True)
class YGerm:
    id: int
    boundary: tuple = (None, None)
    lineage: Lineage = None
    depth: int = 0

    def axes(self):
        return [k for k in (1, 2) if self.boundary[k - 1] is not None]


@dataclass(frozen=True)
class XGerm:
    id: int
    boundary: tuple
    target: int
    pull1: Frac2
    pull2: Frac2
    lineage: Lineage = None
    depth: int = 0
    # per axis: Moebius map from the local axis parameter to the component's home parameter
    positions: tuple = (None, None)

    def axes(self):
        return [k for k in (1, 2) if self.boundary[k - 1] is not None]

    def pulls(self):
        return (self.pull1, self.pull2)


def point_type_x(g):
    return f"{len(g.axes())}_p"


def point_type_y(y):
    return f"{len(y.axes())}_q"


class WeilDivisor:
    """Integer combination of boundary components; zero coefficients are not stored."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients=None):
        clean = {}
        for comp, value in (coefficients or {}).items():
            if value < 0:
                raise InvariantError(f"negative coefficient {value} on {comp}")
            if value:
                clean[comp] = int(value)
        self.coefficients = MappingProxyType(clean)

    def __bool__(self):
        return bool(self.coefficients)

    def __eq__(self, other):
        if not isinstance(other, WeilDivisor):
            return NotImplemented
        return dict(self.coefficients) == dict(other.coefficients)

    def get(self, comp):
        return self.coefficients.get(comp, 0)

    def as_dict(self):
        return {str(c): v for c, v in sorted(self.coefficients.items())}

    def __str__(self):
        if not self.coefficients:
            return "0"
        return " + ".join(f"{v}*{c}" for c, v in sorted(self.coefficients.items()))

    def __repr__(self):
        return f"WeilDivisor({self.as_dict()})"


def sorted_key(divisor):
    return tuple(sorted(divisor.coefficients.values(), reverse=True))


def compare_divisors(r1, r2):
    k1, k2 = list(sorted_key(r1)), list(sorted_key(r2))
    width = max(len(k1), len(k2))
    k1 += [0] * (width - len(k1))
    k2 += [0] * (width - len(k2))
    if k1 < k2:
        return LESS
    if k1 > k2:
        return GREATER
    return EQUAL


@dataclass
class SubcaseData:
    subcase: str
    a: int = 0
    b: int = 0
    i_o: float = math.inf
    j_o: float = math.inf
    i_s: float = math.inf
    j_s: float = math.inf
    det: int = None
    primary_axis: int = 1
    y_axis: int = 1

    def matrix(self):
        # S2p2q* and S1p2q1 keep [[a, b], [c, d]] in the (a, b, i_o, j_o) slots
        return [[self.a, self.b], [self.i_o, self.j_o]]

    def as_dict(self):
        def num(v):
            return "inf" if v == math.inf else int(v)
        out = {"subcase": self.subcase, "a": num(self.a), "b": num(self.b),
               "i_o": num(self.i_o), "j_o": num(self.j_o), "i_s": num(self.i_s), "j_s": num(self.j_s)}
        if self.det is not None:
            out["det"] = self.det
        return out


@dataclass
class TraceEvent:
    seq: int
    kind: str
    payload: dict

    def as_dict(self):
        return {"seq": self.seq, "kind": self.kind, **self.payload}


@dataclass
class State:
    y_germs: dict = field(default_factory=dict)
    x_germs: dict = field(default_factory=dict)
    active_x: set = field(default_factory=set)
    active_y: set = field(default_factory=set)
    components: dict = field(default_factory=dict)
    events: list = field(default_factory=list)
    step: int = 0
    next_x: int = 1
    next_y: int = 1
    next_component: int = 1
    # position key -> X germ id centred at that point
    x_point_index: dict = field(default_factory=dict)
    y_recentered: dict = field(default_factory=dict)
    x_blowups: dict = field(default_factory=dict)
    y_blowups: dict = field(default_factory=dict)
    subcase_log: dict = field(default_factory=dict)
    # (parent id, parent subcase, chart, child id, child subcase) per X blowup
    transitions: list = field(default_factory=list)
    stats: dict = field(default_factory=lambda: {"y_blowups": 0, "x_blowups": 0, "recenters": 0,
                                                 "retargets": 0, "max_principalization": 0})

    def emit(self, kind, **payload):
        event = TraceEvent(len(self.events) + 1, kind, payload)
        self.events.append(event)
        traceLogger.debug(f"{event.seq:4d} {kind} {payload}")
        return event

    def new_component(self, side, origin):
        comp = ComponentId(side, EXCEPTIONAL, self.next_component)
        self.next_component += 1
        self.components[comp] = {"step": self.step, "origin": origin}
        return comp

    def add_x(self, germ_fields):
        g = XGerm(id=self.next_x, **germ_fields)
        self.next_x += 1
        self.x_germs[g.id] = g
        self.active_x.add(g.id)
        for key in origin_keys(g):
            self.x_point_index.setdefault(key, g.id)
        return g

    def add_y(self, germ_fields):
        y = YGerm(id=self.next_y, **germ_fields)
        self.next_y += 1
        self.y_germs[y.id] = y
        self.active_y.add(y.id)
        return y

    def target_of(self, g):
        return self.y_germs[g.target]

    def active_x_germs(self):
        return [self.x_germs[i] for i in sorted(self.active_x)]

    def germs_over(self, yid):
        return [g for g in self.active_x_germs() if g.target == yid]


def mobius_apply(m, w):
    alpha, beta, gamma, delta = m
    den = gamma * w + delta
    if den == 0:
        return None  # point at infinity of the home chart
    return (alpha * w + beta) / den


def mobius_shift(m, c):
    alpha, beta, gamma, delta = m
    return (alpha, alpha * c + beta, gamma, gamma * c + delta)


def position_key(g, axis, w):
    comp = g.boundary[axis - 1]
    m = g.positions[axis - 1]
    if comp is None or m is None:
        return None
    return (comp, mobius_apply(m, scalar(w)))


def origin_keys(g):
    keys = {("germ", g.id)}
    for k in g.axes():
        key = position_key(g, k, 0)
        if key is not None:
            keys.add(key)
    return keys


def build_state(f_y1, f_y2, boundary_x, boundary_y, validate=True):
    """Initial state: one target germ at q, one source germ at p mapping to it.

    f_y1, f_y2 are Poly2 or Frac2 pullbacks; boundary_x/boundary_y are sets of axes.
    """
    s = State()
    y = s.add_y({"boundary": tuple(ComponentId(Y_SIDE, ORIGINAL, k) if k in boundary_y else None for k in (1, 2))})
    pulls = [f if isinstance(f, Frac2) else Frac2.of(f) for f in (f_y1, f_y2)]
    g = s.add_x({"boundary": tuple(ComponentId(X_SIDE, ORIGINAL, k) if k in boundary_x else None for k in (1, 2)),
                 "target": y.id, "pull1": pulls[0], "pull2": pulls[1]})
    for comp in list(g.boundary) + list(y.boundary):
        if comp is not None:
            s.components[comp] = {"step": 0, "origin": None}
    if validate:
        ok, clause, message = validate_germ(g, y)
        if not ok:
            raise ValidationError(clause, message)
    logger.debug(f"System: built state with pulls ({g.pull1}, {g.pull2})")
    return s


def validate_germ(g, ygerm):
    """Check the log-category conditions at the centre of g.

    Returns (ok, clause, message); clause is None when ok.
    """
    pulls = g.pulls()
    for k, f in enumerate(pulls, start=1):
        if eval_origin(f.den) == 0:
            return False, "i", f"denominator of pull{k} = {f.den} vanishes at the origin"
    for k, f in enumerate(pulls, start=1):
        if eval_origin(f.num) != 0:
            return False, "center", f"pull{k} = {f} does not vanish at the origin"
    jac = jacobian(*pulls)
    if jac.is_zero():
        return False, "iv", "Jacobian is identically zero (not dominant)"

    x_axes = set(g.axes())
    y_axes = ygerm.axes()
    if not y_axes:
        if x_axes:
            return False, "ii", f"source boundary on axes {sorted(x_axes)} but the target has none"
    else:
        product = Poly2.constant(1)
        for k in y_axes:
            product = product * pulls[k - 1].num
        if product.is_zero():
            return False, "ii", "pullback of the target boundary is identically zero"
        e1, e2, residual = monomial_split(product)
        if eval_origin(residual) == 0:
            return False, "ii", f"pullback of the target boundary has non-monomial zero locus through the origin: {product}"
        support = {k for k, e in ((1, e1), (2, e2)) if e > 0}
        if support != x_axes:
            return False, "ii", f"pullback of the target boundary vanishes on axes {sorted(support)}, declared {sorted(x_axes)}"

    e1, e2, residual = monomial_split(jac.num)
    if eval_origin(residual) == 0:
        return False, "iii", f"Jacobian residual {residual} vanishes at the origin (not smooth off the boundary)"
    stray = {k for k, e in ((1, e1), (2, e2)) if e > 0} - x_axes
    if stray:
        return False, "iii", f"Jacobian {jac} vanishes along non-boundary axes {sorted(stray)}"
    return True, None, None


def shifted_pulls(g, axis, c):
    # recentre at c along the given axis: shift the other coordinate
    other = 2 if axis == 1 else 1
    return tuple(reduce_fraction(shift_axis(f.num, other, c), shift_axis(f.den, other, c)) for f in g.pulls())


def recentered_fields(g, axis, c):
    pull1, pull2 = shifted_pulls(g, axis, c)
    boundary = tuple(g.boundary[k - 1] if k == axis else None for k in (1, 2))
    positions = tuple(mobius_shift(g.positions[k - 1], c) if k == axis and g.positions[k - 1] else None
                      for k in (1, 2))
    return {"boundary": boundary, "target": g.target, "pull1": pull1, "pull2": pull2,
            "lineage": Lineage(g.id, RECENTER, scalar(c), axis), "depth": g.depth + 1, "positions": positions}


def overlap_parameter(c):
    c = scalar(c)
    if c == 0:
        raise ValueError("point is a chart origin, not on the chart overlap")
    return 1 / c


def identify_overlap_point(germ_a, germ_b, c, ygerm=None):
    """Coordinate in germ_b of the exceptional point seen at c in germ_a.

    germ_a and germ_b are the two charts of one blowup. When ygerm is given,
    both recentred copies must validate the same way.
    """
    image = overlap_parameter(c)
    la, lb = germ_a.lineage, germ_b.lineage
    if la is None or lb is None or la.parent != lb.parent or {la.chart, lb.chart} != {FIRST, SECOND}:
        raise ValueError(f"germs {germ_a.id} and {germ_b.id} are not sibling blowup charts")
    if ygerm is not None:
        axis_a = 1 if la.chart == FIRST else 2
        axis_b = 1 if lb.chart == FIRST else 2
        ra = replace(germ_a, **recentered_fields(germ_a, axis_a, c))
        rb = replace(germ_b, **recentered_fields(germ_b, axis_b, image))
        va, vb = validate_germ(ra, ygerm), validate_germ(rb, ygerm)
        if va[:2] != vb[:2]:
            raise InvariantError(f"overlap point {c} validates differently in germs {germ_a.id} and {germ_b.id}: {va} vs {vb}")
    return image
