"""JSON input for polytopes and cones, and "p/q" encoding of rationals."""

import json
from fractions import Fraction

from .exactgeom import GeometryError, convex_hull


class InputError(ValueError):
    """Malformed or invalid input; the message says where and why."""


def parse_rational(x, where="value"):
    """An int, an integral float, or a "p/q" string, as a Fraction."""
    if isinstance(x, bool):
        raise InputError(f"{where}: expected a number, got a boolean")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not x.is_integer():
            raise InputError(f"{where}: non-integral float {x!r}; write rationals as \"p/q\" strings")
        return Fraction(int(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"{where}: cannot parse {x!r} as a rational") from None
    raise InputError(f"{where}: expected a number, got {type(x).__name__}")


def format_rational(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def loads(text, source="<input>"):
    """Parse JSON, reporting syntax errors with their byte offset."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        offset = len(text[:e.pos].encode())
        raise InputError(f"{source}: malformed JSON at byte {offset} (line {e.lineno}, column {e.colno}): {e.msg}") from None


def load(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        text = raw.decode()
    except UnicodeDecodeError as e:
        raise InputError(f"{path}: invalid UTF-8 at byte {e.start}") from None
    return loads(text, str(path))


def _vectors(obj, key, d, integral, required=True):
    if key not in obj:
        if required:
            raise InputError(f"missing field {key!r}")
        return []
    rows = obj[key]
    if not isinstance(rows, list):
        raise InputError(f"{key!r} must be a list of coordinate lists")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise InputError(f"{key}[{i}] must be a list")
        if d is not None and len(row) != d:
            raise InputError(f"{key}[{i}] has {len(row)} coordinates, expected {d}")
        vec = tuple(parse_rational(x, f"{key}[{i}][{j}]") for j, x in enumerate(row))
        if integral and any(c.denominator != 1 for c in vec):
            raise InputError(f"{key}[{i}] = {[str(c) for c in vec]} is not a lattice point")
        out.append(tuple(int(c) for c in vec) if integral else vec)
    return out


def _dim(obj):
    d = obj.get("dim", obj.get("ambient_dim"))
    if d is None:
        return None
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise InputError(f"'dim' must be a positive integer, got {d!r}")
    return d


def polytope_from_obj(obj):
    """Build a Polytope from ``{"dim": d, "vertices": [[int, ...], ...]}``."""
    if not isinstance(obj, dict):
        raise InputError("polytope JSON must be an object with 'dim' and 'vertices'")
    d = _dim(obj)
    pts = _vectors(obj, "vertices", d, integral=True)
    if not pts:
        raise InputError("'vertices' is empty")
    try:
        return convex_hull(pts)
    except GeometryError as e:
        raise InputError(str(e)) from None


def cone_from_obj(obj):
    """Build a Cone from ``{"dim": d, "rays": [...], "lineality": [...]}``
    or ``{"dim": d, "inequalities": [...], "equalities": [...]}`` meaning a·x <= 0, c·x = 0."""
    from .cones import Cone
    if not isinstance(obj, dict):
        raise InputError("cone JSON must be an object")
    d = _dim(obj)
    if d is None:
        raise InputError("missing field 'dim'")
    try:
        if "inequalities" in obj or "equalities" in obj:
            ineq = _vectors(obj, "inequalities", d, False, required=False)
            eq = _vectors(obj, "equalities", d, False, required=False)
            return Cone.from_inequalities(ineq, eq, d)
        key = "rays" if "rays" in obj else "generators"
        gens = _vectors(obj, key, d, False, required="lineality" not in obj)
        lin = _vectors(obj, "lineality", d, False, required=False)
        return Cone.from_generators(gens, lin, d)
    except GeometryError as e:
        raise InputError(str(e)) from None


def load_polytope(path):
    return polytope_from_obj(load(path))


def load_cone(path):
    return cone_from_obj(load(path))


__all__ = ["InputError", "cone_from_obj", "format_rational", "load", "load_cone", "load_polytope",
           "loads", "parse_rational", "polytope_from_obj"]
