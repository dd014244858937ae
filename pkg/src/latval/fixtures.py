"""Built-in polytopes: unit cubes, standard simplices and Reeve tetrahedra."""

from itertools import product

from .exactgeom import convex_hull
from .io import InputError


def cube(d):
    """The unit cube [0, 1]^d."""
    return convex_hull(list(product((0, 1), repeat=d)))


def simplex(d):
    """The standard simplex conv(0, e_1, ..., e_d)."""
    pts = [tuple(0 for _ in range(d))]
    pts += [tuple(int(i == j) for j in range(d)) for i in range(d)]
    return convex_hull(pts)


def reeve(h):
    """The Reeve tetrahedron conv(0, e_1, e_2, (1, 1, h))."""
    return convex_hull([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, h)])


BUILTINS = {"cube": cube, "simplex": simplex, "reeve": reeve}


def builtin(spec):
    """Resolve "name:param", e.g. "cube:3" or "reeve:5"."""
    name, _, arg = spec.partition(":")
    if name not in BUILTINS:
        raise InputError(f"unknown builtin {name!r}; choose from {', '.join(sorted(BUILTINS))}")
    try:
        n = int(arg)
    except ValueError:
        raise InputError(f"builtin {spec!r} needs an integer parameter, e.g. {name}:3") from None
    if n < 1:
        raise InputError(f"builtin parameter must be positive, got {n}")
    if name != "reeve" and n > 6:
        raise InputError(f"dimension {n} exceeds the supported maximum 6")
    return BUILTINS[name](n)


__all__ = ["BUILTINS", "builtin", "cube", "reeve", "simplex"]
