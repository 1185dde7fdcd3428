# 2D smooth fans: star subdivision, strong factorization by Stern-Brocot mediant paths,
# and the local fan pair of a unimodular germ exponent matrix
# 2025 toro
import math
from dataclasses import dataclass
from functools import cmp_to_key

from modules.log import logger
from modules.model import ToroError


class ToricError(ToroError):
    pass


class SupportMismatch(ToricError):
    pass


def det2(r, s):
    return r[0] * s[1] - r[1] * s[0]


def make_ray(u, v=None):
    if v is None:
        u, v = u
    if isinstance(u, bool) or isinstance(v, bool) or not isinstance(u, int) or not isinstance(v, int):
        raise ToricError(f"ray ({u}, {v}) must have integer coordinates")
    if u == 0 and v == 0:
        raise ToricError("the zero vector is not a ray")
    if math.gcd(u, v) != 1:
        raise ToricError(f"ray ({u}, {v}) is not primitive")
    return (u, v)


def _half(r):
    return 0 if r[1] > 0 or (r[1] == 0 and r[0] > 0) else 1


def _ccw_compare(r, s):
    if _half(r) != _half(s):
        return _half(r) - _half(s)
    return -det2(r, s)


@dataclass(frozen=True)
class Fan2:
    """Smooth 2D fan: primitive rays in strict counterclockwise order.

    An incomplete fan is the window of cones between its first and last ray; a
    complete fan also has the cone from the last ray back to the first, and its
    rays always start at the first one counterclockwise from the positive x1 axis.
    """

    rays: tuple
    complete: bool = False

    def __post_init__(self):
        rays = tuple(make_ray(r) for r in self.rays)
        if self.complete and rays:
            start = rays.index(min(rays, key=cmp_to_key(_ccw_compare)))
            rays = rays[start:] + rays[:start]
        object.__setattr__(self, "rays", rays)
        self.validate()

    def cones(self):
        pairs = list(zip(self.rays, self.rays[1:]))
        if self.complete:
            pairs.append((self.rays[-1], self.rays[0]))
        return pairs

    def validate(self):
        if len(self.rays) < 2 or (self.complete and len(self.rays) < 3):
            raise ToricError(f"fan {self.rays} has too few rays")
        if len(set(self.rays)) != len(self.rays):
            raise ToricError(f"fan {self.rays} repeats a ray")
        for i, (r, s) in enumerate(self.cones()):
            d = det2(r, s)
            if d <= 0:
                raise ToricError(f"cone {i} ({r}, {s}) is not strictly convex in counterclockwise order")
            if d != 1:
                raise ToricError(f"cone {i} ({r}, {s}) is singular (det {d})")
        if self.complete:
            if list(self.rays) != sorted(self.rays, key=cmp_to_key(_ccw_compare)):
                raise ToricError(f"fan {self.rays} winds around the origin more than once")

    def support(self):
        return "complete" if self.complete else (self.rays[0], self.rays[-1])

    def containing_cone(self, ray):
        """Index of the cone whose interior contains ray, or None if ray is already a ray."""
        if ray in self.rays:
            return None
        for i, (r, s) in enumerate(self.cones()):
            if det2(r, ray) > 0 and det2(ray, s) > 0:
                return i
        raise SupportMismatch(f"ray {ray} is outside the support of {self.rays}")

    def as_dict(self):
        return {"rays": [list(r) for r in self.rays], "complete": self.complete}


def star_subdivide(fan, cone_index):
    """Insert the sum of the two rays of a cone between them."""
    cones = fan.cones()
    if not isinstance(cone_index, int) or not 0 <= cone_index < len(cones):
        raise ToricError(f"fan has no cone {cone_index} (it has {len(cones)})")
    r, s = cones[cone_index]
    mediant = (r[0] + s[0], r[1] + s[1])
    rays = list(fan.rays)
    rays.insert(cone_index + 1, mediant)
    return Fan2(tuple(rays), fan.complete)


def apply_script(fan, script):
    """Replay subdivisions; each entry names the cone and the ray it must produce."""
    for entry in script:
        r, s = fan.cones()[entry["cone"]]
        if [r[0] + s[0], r[1] + s[1]] != list(entry["ray"]):
            raise ToricError(f"script entry {entry} does not match cone ({r}, {s})")
        fan = star_subdivide(fan, entry["cone"])
    return fan


def refine_to_include(fan, ray, script):
    # walk the mediant path from the containing cone towards ray
    ray = make_ray(ray)
    while True:
        i = fan.containing_cone(ray)
        if i is None:
            return fan
        r, s = fan.cones()[i]
        mediant = (r[0] + s[0], r[1] + s[1])
        fan = star_subdivide(fan, i)
        script.append({"cone": i, "ray": list(mediant)})


def strong_factorize(fa, fb, max_rounds=64):
    """Subdivision scripts (ups from fa, downs from fb) reaching a common refinement."""
    if fa.support() != fb.support():
        raise SupportMismatch(f"fans have different supports: {fa.support()} vs {fb.support()}")
    ups, downs = [], []
    for _ in range(max_rounds):
        if fa.rays == fb.rays:
            logger.debug(f"Toric: common refinement with {len(fa.rays)} rays after {len(ups)} ups, {len(downs)} downs")
            return ups, downs
        for ray in fb.rays:
            fa = refine_to_include(fa, ray, ups)
        for ray in fa.rays:
            fb = refine_to_include(fb, ray, downs)
    raise ToricError(f"no common refinement after {max_rounds} rounds")


def germ_exponent_fan(matrix):
    """(source, target) fans over the positive quadrant for a unimodular exponent matrix.

    The source is the standard cone; the target is the coarsest mediant
    refinement of it containing the cone spanned by the matrix columns.
    """
    (a, b), (c, d) = matrix
    if abs(a * d - b * c) != 1:
        raise ToricError(f"exponent matrix {matrix} is not unimodular")
    if min(a, b, c, d) < 0:
        raise ToricError(f"exponent matrix {matrix} has negative entries, its cone leaves the quadrant")
    source = Fan2(((1, 0), (0, 1)))
    target = source
    script = []
    for column in sorted([(a, c), (b, d)], key=cmp_to_key(_ccw_compare)):
        target = refine_to_include(target, column, script)
    return source, target
