# input files: morphism germs as TOML, fans as JSON
# 2025 toro
import json
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field

from modules.algebra import ParseError, parse_poly
from modules.log import logger
from modules.model import build_state
from modules.toric2 import Fan2

X_NAMES = {"x1": 1, "x2": 2}
Y_NAMES = {"y1": 1, "y2": 2}
OPTION_KEYS = ("max_steps", "trace", "dot_x", "dot_y")
EXPECT_KEYS = ("toroidal", "steps", "exit", "subcase", "x_blowups")


class InputError(ParseError):
    pass


@dataclass
class InputSpec:
    f_y1: str
    f_y2: str
    boundary_x: frozenset = frozenset()
    boundary_y: frozenset = frozenset()
    name: str = None
    options: dict = field(default_factory=dict)
    expect: dict = field(default_factory=dict)
    path: str = None

    def pulls(self):
        return parse_poly(self.f_y1, ("x1", "x2")), parse_poly(self.f_y2, ("x1", "x2"))

    def axes_x(self):
        return {X_NAMES[n] for n in self.boundary_x}

    def axes_y(self):
        return {Y_NAMES[n] for n in self.boundary_y}

    def to_state(self, validate=True):
        f1, f2 = self.pulls()
        return build_state(f1, f2, self.axes_x(), self.axes_y(), validate=validate)


def _boundary(value, names, key, where):
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise InputError(f"{where}: {key} must be a list of names from {sorted(names)}")
    unknown = set(value) - set(names)
    if unknown:
        raise InputError(f"{where}: {key} has unknown coordinates {sorted(unknown)}")
    return frozenset(value)


def spec_from_dict(data, where="<input>"):
    for key in ("f_y1", "f_y2"):
        if not isinstance(data.get(key), str):
            raise InputError(f"{where}: missing polynomial string {key}")
    spec = InputSpec(data["f_y1"], data["f_y2"],
                     _boundary(data.get("boundary_x", []), X_NAMES, "boundary_x", where),
                     _boundary(data.get("boundary_y", []), Y_NAMES, "boundary_y", where),
                     name=data.get("name"), path=where)
    options = data.get("options", {})
    expect = data.get("expect", {})
    for table, allowed, label in ((options, OPTION_KEYS, "options"), (expect, EXPECT_KEYS, "expect")):
        if not isinstance(table, dict):
            raise InputError(f"{where}: [{label}] must be a table")
        extra = set(table) - set(allowed)
        if extra:
            raise InputError(f"{where}: unknown {label} keys {sorted(extra)}")
    spec.options, spec.expect = dict(options), dict(expect)
    # parse now so grammar errors surface with the file name
    try:
        spec.pulls()
    except ParseError as e:
        raise InputError(f"{where}: {e}") from e
    return spec


def load_spec(path):
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise InputError(f"{path} is not valid TOML: {e}") from e
    spec = spec_from_dict(data, path)
    spec.name = spec.name or os.path.splitext(os.path.basename(path))[0]
    logger.debug(f"System: loaded {spec.name} from {path}")
    return spec


def corpus_files(path):
    """Input files under a directory (sorted), or the file itself."""
    if os.path.isdir(path):
        return sorted(os.path.join(path, f) for f in os.listdir(path) if f.endswith(".toml"))
    return [path]


def load_fan(path):
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(data, dict) or not isinstance(data.get("rays"), list):
        raise InputError(f"{path}: expected an object with a rays list")
    return Fan2(tuple(tuple(r) for r in data["rays"]), bool(data.get("complete", False)))
