# point blowups on both sides, recentering on exceptional divisors, retargeting after a Y blowup
# 2025 toro
from dataclasses import replace

from modules.algebra import (FIRST, SECOND, eval_origin, exact_divide, gcd2, reduce_fraction, scalar,
                             substitute_blowup)
from modules.log import logger
from modules.model import (IDENTITY_POSITION, INVERSION_POSITION, RECENTER, X_SIDE, Y_SIDE, Lineage,
                           RetargetError, identify_overlap_point, overlap_parameter, point_type_y,
                           recentered_fields)
from modules.ramification import classify_subcase


def blowup_y(s, ygerm_id):
    """Blow up the centre of a target germ; returns (first, second, E)."""
    y = s.y_germs[ygerm_id]
    exc = s.new_component(Y_SIDE, ygerm_id)
    first = s.add_y({"boundary": (exc, y.boundary[1]), "lineage": Lineage(y.id, FIRST), "depth": y.depth + 1})
    second = s.add_y({"boundary": (y.boundary[0], exc), "lineage": Lineage(y.id, SECOND), "depth": y.depth + 1})
    s.active_y.discard(y.id)
    s.y_blowups[y.id] = (first.id, second.id, exc)
    s.stats["y_blowups"] += 1
    s.emit("YBlowup", germ=f"Y{y.id}", center_type=point_type_y(y), exceptional=str(exc),
           charts={FIRST: f"Y{first.id}", SECOND: f"Y{second.id}"})
    logger.debug(f"Blowup: Y{y.id} ({point_type_y(y)}) -> Y{first.id}, Y{second.id} with {exc}")
    return first, second, exc


def _record_transitions(s, g, first, second):
    """Subcase of the blown-up germ and of both new chart origins over the same target point."""
    y = s.target_of(g)
    if not y.axes():
        return {}
    codes = {f"X{h.id}": classify_subcase(h, y).subcase for h in (g, first, second)}
    for chart, h in ((FIRST, first), (SECOND, second)):
        s.transitions.append((g.id, codes[f"X{g.id}"], chart, h.id, codes[f"X{h.id}"]))
    logger.debug(f"Blowup: subcase {codes[f'X{g.id}']} at X{g.id} -> {codes[f'X{first.id}']} ({FIRST}), "
                 f"{codes[f'X{second.id}']} ({SECOND})")
    return codes


def blowup_x(s, xgerm_id):
    """Blow up the centre of a source germ; pulls are total transforms, target unchanged."""
    g = s.x_germs[xgerm_id]
    exc = s.new_component(X_SIDE, xgerm_id)
    children = []
    for chart in (FIRST, SECOND):
        pulls = [reduce_fraction(substitute_blowup(f.num, chart), substitute_blowup(f.den, chart)) for f in g.pulls()]
        if chart == FIRST:
            boundary = (exc, g.boundary[1])
            positions = (IDENTITY_POSITION, g.positions[1])
        else:
            boundary = (g.boundary[0], exc)
            positions = (g.positions[0], INVERSION_POSITION)
        children.append(s.add_x({"boundary": boundary, "target": g.target, "pull1": pulls[0], "pull2": pulls[1],
                                 "lineage": Lineage(g.id, chart), "depth": g.depth + 1, "positions": positions}))
    s.active_x.discard(g.id)
    first, second = children
    s.x_blowups[g.id] = (first.id, second.id, exc)
    s.stats["x_blowups"] += 1
    subcases = _record_transitions(s, g, first, second)
    s.emit("XBlowup", germ=f"X{g.id}", exceptional=str(exc), charts={FIRST: f"X{first.id}", SECOND: f"X{second.id}"},
           subcases=subcases)
    logger.debug(f"Blowup: X{g.id} -> X{first.id} ({first.pull1}, {first.pull2}), X{second.id} ({second.pull1}, {second.pull2})")
    return first, second, exc


def _default_exceptional_axis(g):
    candidates = [k for k in g.axes() if g.boundary[k - 1].is_exceptional()]
    if not candidates:
        raise ValueError(f"X{g.id} has no exceptional axis to recenter on")
    # newest component first
    return max(candidates, key=lambda k: g.boundary[k - 1].index)


def recenter_exceptional(s, germ_id, c, axis=None, side=X_SIDE):
    """New germ centred at the point with parameter c on an exceptional axis."""
    c = scalar(c)
    if c == 0:
        raise ValueError("recentering at 0 is the chart origin itself")
    if side == Y_SIDE:
        return ensure_y_recentered(s, germ_id, c, axis or 1)
    g = s.x_germs[germ_id]
    axis = axis or _default_exceptional_axis(g)
    fields = recentered_fields(g, axis, c)
    new = s.add_x(fields)
    s.stats["recenters"] += 1
    s.emit("Recenter", side=X_SIDE, germ=f"X{g.id}", new=f"X{new.id}", axis=axis, c=str(c))
    logger.debug(f"Blowup: recentered X{g.id} at {c} on axis{axis} -> X{new.id}")
    return new


def ensure_y_recentered(s, ygerm_id, c, axis=1):
    key = (ygerm_id, axis, c)
    if key in s.y_recentered:
        return s.y_germs[s.y_recentered[key]]
    y = s.y_germs[ygerm_id]
    boundary = tuple(y.boundary[k - 1] if k == axis else None for k in (1, 2))
    new = s.add_y({"boundary": boundary, "lineage": Lineage(y.id, RECENTER, c, axis), "depth": y.depth + 1})
    s.y_recentered[key] = new.id
    s.stats["recenters"] += 1
    s.emit("Recenter", side=Y_SIDE, germ=f"Y{y.id}", new=f"Y{new.id}", axis=axis, c=str(c))
    return new


def _chart_pulls(p1, p2, chart):
    if chart == FIRST:
        if p1.is_zero():
            raise RetargetError("pull1 is zero, chart First undefined")
        return p1, p2 / p1
    if p2.is_zero():
        raise RetargetError("pull2 is zero, chart Second undefined")
    return p1 / p2, p2


def _composed_pulls(s, g, new_y):
    """Pullbacks of new_y's coordinates, given g's pullbacks of its current target's coordinates."""
    lin = new_y.lineage
    if lin is None:
        raise RetargetError(f"Y{new_y.id} is not a blowup chart")
    if lin.parent == g.target and lin.chart in (FIRST, SECOND):
        return _chart_pulls(g.pull1, g.pull2, lin.chart)
    if lin.chart == RECENTER:
        base = s.y_germs[lin.parent]
        if base.lineage is None or base.lineage.parent != g.target or base.lineage.chart not in (FIRST, SECOND):
            raise RetargetError(f"Y{new_y.id} is not over X{g.id}'s target Y{g.target}")
        p1, p2 = _chart_pulls(g.pull1, g.pull2, base.lineage.chart)
        shifted = [p1, p2]
        other = 2 if lin.axis == 1 else 1
        shifted[other - 1] = shifted[other - 1].shift(lin.shift)
        return tuple(shifted)
    raise RetargetError(f"Y{new_y.id} is not over X{g.id}'s target Y{g.target}")


def retarget(s, xgerm_id, new_ygerm_id):
    """Compose the pulls of an X germ with the chart map of a blown-up target."""
    g = s.x_germs[xgerm_id]
    new_y = s.y_germs[new_ygerm_id]
    pull1, pull2 = _composed_pulls(s, g, new_y)
    for k, f in ((1, pull1), (2, pull2)):
        if eval_origin(f.den) == 0:
            raise RetargetError(f"pull{k} = {f} of X{g.id} is not regular at the origin in Y{new_y.id}")
        if eval_origin(f.num) != 0:
            raise RetargetError(f"X{g.id} does not map to the centre of Y{new_y.id} (pull{k}(0) = {f.evaluate_origin()})")
    new = s.x_germs[g.id] = replace(g, target=new_y.id, pull1=pull1, pull2=pull2)
    s.stats["retargets"] += 1
    s.emit("Retarget", germ=f"X{g.id}", old=f"Y{g.target}", new=f"Y{new_y.id}", pulls=[str(pull1), str(pull2)])
    return new


def choose_chart(g):
    # the chart whose divided coordinate is a multiple of the other near the origin
    n1, n2 = g.pull1.num, g.pull2.num
    d = gcd2(n1, n2)
    h2 = exact_divide(n2, d)
    return [SECOND, FIRST] if eval_origin(h2) != 0 else [FIRST, SECOND]


def retarget_after_blowup(s, xgerm_id):
    """Move an X germ over a blown-up target onto the chart (or overlap point) it maps to."""
    g = s.x_germs[xgerm_id]
    first_id, second_id, _exc = s.y_blowups[g.target]
    failures = []
    for chart in choose_chart(g):
        try:
            p1, p2 = _chart_pulls(g.pull1, g.pull2, chart)
        except RetargetError as e:
            failures.append(str(e))
            continue
        if eval_origin(p1.den) == 0 or eval_origin(p2.den) == 0:
            failures.append(f"{chart}: not regular")
            continue
        if chart == FIRST:
            u = p2.evaluate_origin()
            target = first_id if u == 0 else ensure_y_recentered(s, first_id, u).id
        else:
            v = p1.evaluate_origin()
            # overlap points are kept in chart First
            target = second_id if v == 0 else ensure_y_recentered(s, first_id, overlap_parameter(v)).id
        return retarget(s, xgerm_id, target)
    raise RetargetError(f"X{g.id} maps into neither chart over Y{g.target}: {failures}")


def sibling_first_chart(s, g):
    """Active chart-First sibling of a chart-Second germ, or None."""
    lin = g.lineage
    if lin is None or lin.chart != SECOND or lin.parent not in s.x_blowups:
        return None
    first_id, second_id, _exc = s.x_blowups[lin.parent]
    if second_id != g.id or first_id not in s.active_x:
        return None
    return s.x_germs[first_id]


def recenter_at_point(s, g, axis, w):
    """Germ centred at the point with parameter w on the given axis of g.

    Points on the new exceptional axis of a chart-Second germ are represented in
    the chart-First sibling when it is still active.
    """
    exc = s.x_blowups.get(g.lineage.parent, (None, None, None))[2] if g.lineage else None
    sibling = sibling_first_chart(s, g)
    if axis == 2 and sibling is not None and g.boundary[1] == exc:
        c = identify_overlap_point(g, sibling, w, s.target_of(g))
        return recenter_exceptional(s, sibling.id, c, axis=1)
    return recenter_exceptional(s, g.id, w, axis=axis)
