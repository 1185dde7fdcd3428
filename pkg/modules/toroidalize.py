# toroidalization loop: compute R_log, blow up its image on the target, canonically
# principalize on the source, retarget, repeat; every step is checked against the
# termination monitor and the coefficient formulas
# 2025 toro
import time
from dataclasses import dataclass, field

from modules.algebra import eval_origin, monomial_split, restrict_axis, rational_roots
from modules.blowup import blowup_y, recenter_exceptional, retarget_after_blowup
from modules.log import getPrettyDuration, logger
from modules.model import (GREATER, LESS, RECENTER, X_SIDE, InvariantError, IrrationalCenter, NonTermination,
                           compare_divisors, point_type_x, point_type_y, position_key, sorted_key)
from modules.principalize import canonical_principalize, regular_on_axis
from modules.ramification import (ONTO_POINT, classify_subcase, component_image, exponent_matrix,
                                  frac_valuation, log_jacobian, ramification_divisor, toroidal_at)
from modules.toric2 import ToricError, germ_exponent_fan, strong_factorize
import modules.settings as my_settings


@dataclass
class MonitorResult:
    ok: bool = True
    clause: str = None
    message: str = None

    def as_dict(self):
        return {"ok": self.ok, "clause": self.clause, "message": self.message}


@dataclass
class StepReport:
    step: int
    before: object
    after: object = None
    centers: list = field(default_factory=list)
    subcases: dict = field(default_factory=dict)
    y_blowups: int = 0
    x_blowups: int = 0
    recenters: int = 0
    oracle_failures: list = field(default_factory=list)
    monitor: MonitorResult = None

    def center_types(self):
        return {c["type"] for c in self.centers}


@dataclass
class RunResult:
    state: object
    reports: list
    atlas: list
    violations: list
    elapsed: float = 0.0

    @property
    def steps(self):
        return len(self.reports)

    @property
    def ok(self):
        return not self.violations


def monitor_check(prev, nxt, center_types, run_length=0, bound=None):
    """Termination monitor between consecutive divisors.

    (o) never increase, (ii) strictly decrease when a 1_q centre is blown up,
    (i) an all-2_q run may not outgrow its bound.
    """
    order = compare_divisors(nxt, prev)
    if order == GREATER:
        return MonitorResult(False, "o", f"R_log increased: {sorted_key(prev)} -> {sorted_key(nxt)}")
    if "1_q" in center_types and order != LESS:
        return MonitorResult(False, "ii", f"R_log did not decrease across a 1_q centre: {sorted_key(prev)} -> {sorted_key(nxt)}")
    if bound is not None and run_length > bound:
        return MonitorResult(False, "i", f"{run_length} consecutive all-2_q steps exceed the bound {bound}")
    return MonitorResult()


def two_q_bound(s):
    # largest a+b+c+d over non-toroidal germs, det-0 matrices first
    sums, det_zero = [], []
    for g in s.active_x_germs():
        y = s.target_of(g)
        if toroidal_at(g, y):
            continue
        (a, b), (c, d) = exponent_matrix(g)
        sums.append(a + b + c + d)
        if a * d - b * c == 0:
            det_zero.append(a + b + c + d)
    return max(det_zero or sums or [1], default=1) or 1


class TerminationMonitor:
    def __init__(self):
        self.run_length = 0
        self.bound = None
        self.longest_run = 0

    def begin_step(self, s, center_types):
        if center_types and center_types <= {"2_q"}:
            if self.run_length == 0:
                self.bound = two_q_bound(s)
            self.run_length += 1
            self.longest_run = max(self.longest_run, self.run_length)
        else:
            self.run_length = 0
            self.bound = None

    def check(self, prev, nxt, center_types):
        return monitor_check(prev, nxt, center_types, self.run_length, self.bound)


def center_points(s, divisor):
    """Target germs whose centres are images of positive-coefficient components."""
    centers = set()
    for g in s.active_x_germs():
        y = s.target_of(g)
        for k in g.axes():
            comp = g.boundary[k - 1]
            if divisor.get(comp) <= 0:
                continue
            kind, _ = component_image(g, y, k)
            if kind != ONTO_POINT:
                raise InvariantError(f"{comp} has coefficient {divisor.get(comp)} but maps onto a target component")
            centers.add(g.target)
    return sorted(centers)


def exceptional_rule(data, g, divisor):
    """(relation, bound) for X-exceptional components created over a germ of this subcase."""
    code = data.subcase
    if code == "S2p1q1":
        return "<", divisor.get(g.boundary[data.primary_axis - 1])
    if code == "S2p1q2":
        return "<", max(divisor.get(g.boundary[0]), divisor.get(g.boundary[1]))
    if code.startswith("S1p1q") or code.startswith("S2p2q") or code == "S1p2q1":
        return "=", 0
    return None, None


def _attribute(s, xid, start_active):
    # walk back to the germ that was active when the step began, stopping at
    # recenterings on components older than this step
    gid = xid
    while gid not in start_active:
        g = s.x_germs[gid]
        lin = g.lineage
        if lin is None:
            break
        if lin.chart == RECENTER:
            comp = g.boundary[lin.axis - 1]
            if s.components[comp]["step"] < s.step:
                return gid
        gid = lin.parent
    return gid


def _scan_residual_zeros(s, germ_ids):
    # r_log is a unit times a monomial near new exceptional divisors; any other
    # zero on such an axis inside the chart gets its own germ, which has to map
    # onto the centre of the target. Zeros of the denominator are poles of the
    # pulls, points that the neighbouring chart covers.
    born = {c for c, info in s.components.items() if c.side == X_SIDE and info["step"] == s.step}
    found = []
    for xid in sorted(germ_ids):
        if xid not in s.active_x:
            continue
        g = s.x_germs[xid]
        r = log_jacobian(g, s.target_of(g))
        for axis in g.axes():
            if g.boundary[axis - 1] not in born:
                continue
            _e1, _e2, residual = monomial_split(r.num)
            restricted = restrict_axis(residual, axis)
            if restricted.degree() < 1:
                continue
            roots, irrational = rational_roots(restricted)
            if irrational:
                raise IrrationalCenter(f"r_log of X{g.id} vanishes at an irrational point of {g.boundary[axis - 1]}")
            for w in sorted(roots):
                if w == 0 or not regular_on_axis(g, axis, w):
                    continue
                key = position_key(g, axis, w)
                if key in s.x_point_index:
                    logger.debug(f"Toroidalize: r_log zero X{g.id} axis{axis}={w} is the centre of X{s.x_point_index[key]}")
                    continue
                new = recenter_exceptional(s, g.id, w, axis=axis)
                found.append(new.id)
                if any(eval_origin(f.num) != 0 for f in new.pulls()):
                    raise InvariantError(f"r_log zero X{g.id} axis{axis}={w} maps off the centre of Y{g.target}")
    return found


def algorithm_step(s, monitor=None, check_formulas=None):
    """One pass of ramification, target blowup, principalization and retargeting."""
    check_formulas = my_settings.check_formulas if check_formulas is None else check_formulas
    monitor = monitor or TerminationMonitor()
    before = ramification_divisor(s)
    if not before:
        raise ValueError("state is already toroidal, refusing to step")
    s.step += 1
    s.emit("RamificationComputed", step=s.step, divisor=before.as_dict(), key=list(sorted_key(before)))
    stats0 = dict(s.stats)
    report = StepReport(s.step, before)

    centers = center_points(s, before)
    report.centers = [{"germ": f"Y{yid}", "type": point_type_y(s.y_germs[yid])} for yid in centers]
    start_active = set(s.active_x)
    expected, rules = {}, {}
    for yid in centers:
        y = s.y_germs[yid]
        for g in s.germs_over(yid):
            data = classify_subcase(g, y)
            report.subcases[g.id] = data
            s.subcase_log[g.id] = data.subcase
            s.emit("SubcaseClassified", germ=f"X{g.id}", **data.as_dict())
            rules[g.id] = exceptional_rule(data, g, before)
            for k in g.axes():
                comp = g.boundary[k - 1]
                if component_image(g, y, k)[0] != ONTO_POINT:
                    # the image is a target component, away from the centre
                    expected[comp] = before.get(comp)
                    continue
                m = min(frac_valuation(g.pull1, k), frac_valuation(g.pull2, k))
                expected[comp] = before.get(comp) - (2 - len(y.axes())) * m
    monitor.begin_step(s, report.center_types())

    for yid in centers:
        blowup_y(s, yid)
    for yid in centers:
        canonical_principalize(s, yid)
    touched = set()
    for yid in centers:
        for g in s.germs_over(yid):
            retarget_after_blowup(s, g.id)
            touched.add(g.id)
    _scan_residual_zeros(s, touched)

    after = ramification_divisor(s)
    report.after = after
    report.y_blowups = s.stats["y_blowups"] - stats0["y_blowups"]
    report.x_blowups = s.stats["x_blowups"] - stats0["x_blowups"]
    report.recenters = s.stats["recenters"] - stats0["recenters"]
    if check_formulas:
        report.oracle_failures = _check_formulas(s, before, after, expected, rules, start_active)
    report.monitor = monitor.check(before, after, report.center_types())
    s.emit("MonitorCheck", step=s.step, before=list(sorted_key(before)), after=list(sorted_key(after)),
           centers=sorted(report.center_types()), **report.monitor.as_dict())
    if not report.monitor.ok:
        logger.error(f"Toroidalize: monitor clause ({report.monitor.clause}) violated: {report.monitor.message}")
    for failure in report.oracle_failures:
        logger.error(f"Toroidalize: {failure}")
    logger.info(f"Toroidalize: step {s.step} centers {[c['germ'] + ' ' + c['type'] for c in report.centers]} "
                f"R_log {sorted_key(before)} -> {sorted_key(after)}")
    return report


def _check_formulas(s, before, after, expected, rules, start_active):
    failures = []
    for comp in sorted(set(before.coefficients) | set(expected)):
        want = expected.get(comp, before.get(comp))
        if after.get(comp) != want:
            failures.append(f"coefficient of {comp} is {after.get(comp)} after step {s.step}, expected {want}")
    for comp, info in sorted(s.components.items()):
        if comp.side != X_SIDE or info["step"] != s.step:
            continue
        owner = _attribute(s, info["origin"], start_active)
        if owner in rules:
            relation, bound = rules[owner]
        else:
            g = s.x_germs[owner]
            data = classify_subcase(g, s.y_germs[g.target])
            relation, bound = exceptional_rule(data, g, before)
            rules[owner] = (relation, bound)
        value = after.get(comp)
        if relation == "<" and not value < bound:
            failures.append(f"exceptional {comp} over X{owner} has coefficient {value}, expected < {bound}")
        elif relation == "=" and value != bound:
            failures.append(f"exceptional {comp} over X{owner} has coefficient {value}, expected {bound}")
        elif relation is None:
            failures.append(f"exceptional {comp} created over X{owner}, whose subcase blows up nothing")
    return failures


def atlas_entry(s, g, factor):
    y = s.target_of(g)
    matrix = exponent_matrix(g)
    (a, b), (c, d) = matrix
    data = classify_subcase(g, y)
    entry = {"germ": f"X{g.id}", "target": f"Y{y.id}", "point_type": point_type_x(g), "target_type": point_type_y(y),
             "boundary": [str(c) if c else None for c in g.boundary],
             "target_boundary": [str(c) if c else None for c in y.boundary],
             "pulls": [str(g.pull1), str(g.pull2)], "exponents": matrix, "det": a * d - b * c,
             "subcase": data.subcase, "toroidal": toroidal_at(g, y)}
    if factor and data.subcase.startswith("S2p2q") and abs(a * d - b * c) == 1 and min(a, b, c, d) >= 0:
        try:
            source, refined = germ_exponent_fan(matrix)
            ups, downs = strong_factorize(source, refined)
            entry["factorization"] = {"ups": ups, "downs": downs}
        except ToricError as e:
            logger.warning(f"Toric: atlas entry X{g.id} not factored: {e}")
    return entry


def run(s, max_steps=None, check_formulas=None, factor=None):
    """Iterate algorithm_step until every active germ is toroidal."""
    max_steps = my_settings.MAX_STEPS if max_steps is None else max_steps
    factor = my_settings.factor_atlas if factor is None else factor
    start = time.monotonic()
    monitor = TerminationMonitor()
    reports = []
    while True:
        divisor = ramification_divisor(s)
        if not divisor:
            s.emit("RamificationComputed", step=s.step + 1, divisor={}, key=[])
            break
        if len(reports) >= max_steps:
            raise NonTermination(f"no toroidal atlas after {max_steps} steps, R_log key {sorted_key(divisor)}", s)
        reports.append(algorithm_step(s, monitor, check_formulas))

    violations = []
    for r in reports:
        if not r.monitor.ok:
            violations.append(f"step {r.step}: monitor ({r.monitor.clause}) {r.monitor.message}")
        violations.extend(f"step {r.step}: {f}" for f in r.oracle_failures)
    atlas = [atlas_entry(s, g, factor) for g in s.active_x_germs()]
    for entry in atlas:
        if not entry["toroidal"]:
            raise InvariantError(f"{entry['germ']} is not toroidal although R_log is zero")
        if entry["point_type"] == "2_p" and entry["target_type"] == "2_q" and entry["det"] == 0:
            violations.append(f"{entry['germ']}: singular exponent matrix {entry['exponents']} at a 2_p2_q point")
    s.stats["longest_2q_run"] = monitor.longest_run
    s.emit("Done", steps=len(reports), toroidal=True, germs=len(atlas))
    elapsed = time.monotonic() - start
    logger.info(f"Toroidalize: toroidal after {len(reports)} steps, {s.stats['y_blowups']} Y blowups, "
                f"{s.stats['x_blowups']} X blowups in {getPrettyDuration(elapsed)}")
    return RunResult(s, reports, atlas, violations, elapsed)
