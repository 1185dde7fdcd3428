# trace documents, blowup forests as DOT, and text summaries for the command line
# 2025 toro
import json
from string import Template

from modules.log import getPrettyDuration
from modules.model import point_type_x, point_type_y, sorted_key
from modules.ramification import (ONTO_POINT, classify_subcase, component_image, log_jacobian,
                                  ramification_divisor, toroidal_at)

ANALYZE_TEMPLATE = Template("""germ:        ($pull1, $pull2)
boundary:    X $boundary_x  Y $boundary_y  ($subcase)
validation:  $validation
r_log:       $r_log
R_log:       $divisor
toroidal:    $toroidal
images:
$images
""")

RUN_TEMPLATE = Template("""$name: toroidal after $steps steps in $elapsed
  Y blowups $y_blowups, X blowups $x_blowups, recenterings $recenters
  longest principalization $max_principalization, longest all-2_q run $longest_2q_run
  final germs $germs, violations $violations
""")

DOT_NODE = Template('  "$id" [label="$id\\n$label"];')
DOT_EDGE = Template('  "$parent" -> "$id" [label="$label"];')


def _tree(s, side):
    germs = s.x_germs if side == "X" else s.y_germs
    nodes, edges = [], []
    for gid in sorted(germs):
        g = germs[gid]
        if side == "X":
            label = s.subcase_log.get(gid, point_type_x(g))
        else:
            label = point_type_y(g)
        nodes.append({"id": f"{side}{gid}", "label": label})
        if g.lineage is not None:
            edges.append({"parent": f"{side}{g.lineage.parent}", "id": f"{side}{gid}", "label": g.lineage.label()})
    return {"nodes": nodes, "edges": edges}


def trace_document(result):
    """JSON-ready trace: events, final atlas, both blowup forests and counters."""
    s = result.state
    stats = {k: v for k, v in sorted(s.stats.items())}
    stats["steps"] = result.steps
    return {"events": [e.as_dict() for e in s.events], "atlas": result.atlas,
            "trees": {"X": _tree(s, "X"), "Y": _tree(s, "Y")}, "stats": stats,
            "violations": list(result.violations)}


def to_json(document):
    # stable bytes: sorted keys, no timings
    return json.dumps(document, sort_keys=True, indent=1, default=str) + "\n"


def to_dot(s, side):
    tree = _tree(s, side)
    lines = [f"digraph {side} {{"]
    lines += [DOT_NODE.substitute(n) for n in tree["nodes"]]
    lines += [DOT_EDGE.substitute(e) for e in tree["edges"]]
    lines.append("}")
    return "\n".join(lines) + "\n"


def _axis_names(axes, prefix):
    return "{" + ", ".join(f"{prefix}{k}" for k in axes) + "}"


def analyze_text(s, validation):
    """Text report of one germ before any blowup; validation is (ok, clause, message)."""
    g = s.x_germs[min(s.x_germs)]
    y = s.target_of(g)
    ok, clause, message = validation
    fields = {"pull1": g.pull1, "pull2": g.pull2, "boundary_x": _axis_names(g.axes(), "x"),
              "boundary_y": _axis_names(y.axes(), "y"), "subcase": f"{point_type_x(g)} over {point_type_y(y)}",
              "validation": "ok" if ok else f"FAILED clause ({clause}): {message}",
              "r_log": "-", "divisor": "-", "toroidal": "-", "images": "  -"}
    if ok:
        divisor = ramification_divisor(s)
        data = classify_subcase(g, y)
        fields["subcase"] = data.subcase
        fields["r_log"] = log_jacobian(g, y)
        fields["divisor"] = f"{divisor} (key {list(sorted_key(divisor))})"
        fields["toroidal"] = "yes" if toroidal_at(g, y) else "no"
        rows = []
        for k in g.axes():
            kind, target = component_image(g, y, k)
            image = "centre of Y" if kind == ONTO_POINT else str(y.boundary[target - 1])
            rows.append(f"  {g.boundary[k - 1]} (x{k}) -> {image}, coefficient {divisor.get(g.boundary[k - 1])}")
        fields["images"] = "\n".join(rows) or "  none"
    return ANALYZE_TEMPLATE.substitute(fields)


def run_summary(name, result):
    s = result.state
    return RUN_TEMPLATE.substitute(name=name, steps=result.steps, elapsed=getPrettyDuration(result.elapsed),
                                   germs=len(result.atlas), violations=len(result.violations),
                                   y_blowups=s.stats["y_blowups"], x_blowups=s.stats["x_blowups"],
                                   recenters=s.stats["recenters"],
                                   max_principalization=s.stats["max_principalization"],
                                   longest_2q_run=s.stats.get("longest_2q_run", 0))
