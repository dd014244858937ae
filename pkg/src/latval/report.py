"""Claims and reports shared by the fitting and experiment layers."""

import time
from dataclasses import dataclass, field
from fractions import Fraction


def jsonable(x):
    """Rationals become "p/q" strings; numpy scalars become Python numbers."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_dict"):
        return jsonable(x.to_dict())
    if hasattr(x, "item"):
        return x.item()
    if hasattr(x, "tolist"):
        return x.tolist()
    return str(x)


@dataclass
class Claim:
    """One checked statement: observed against expected within a tolerance.

    ``anchor`` names the mathematical statement being checked and ``basis``
    says where the expected value comes from: "closed form" for a published
    formula or "independent computation" for an oracle in this package.
    """

    description: str
    anchor: str
    expected: object
    observed: object
    tolerance: float
    passed: bool
    basis: str = "closed form"
    stderr: float = 0.0

    def to_dict(self):
        return {"description": self.description, "anchor": self.anchor,
                "expected": jsonable(self.expected), "observed": jsonable(self.observed),
                "stderr": self.stderr, "tolerance": self.tolerance, "passed": bool(self.passed),
                "basis": self.basis}


def numeric_claim(description, anchor, expected, observed, stderr=0.0, sigmas=3.0,
                  floor=1e-9, basis="closed form", sign=None):
    """Claim |observed - expected| <= max(sigmas·stderr, floor).

    With ``sign="negative"`` the claim is observed < -max(sigmas·stderr, floor) instead.
    """
    tol = max(sigmas * stderr, floor)
    if sign == "negative":
        ok = float(observed) < -tol
    elif sign == "nonnegative":
        ok = float(observed) >= -tol
    else:
        ok = abs(float(observed) - float(expected)) <= tol
    return Claim(description, anchor, expected, observed, tol, ok, basis, stderr)


@dataclass
class ExperimentReport:
    name: str
    inputs: dict
    claims: list = field(default_factory=list)
    runtime: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.claims)

    def add(self, claim):
        self.claims.append(claim)
        return claim

    def to_dict(self, timing=False):
        # runtime is opt-in so that reruns with the same seed are byte-identical
        out = {"name": self.name, "inputs": jsonable(self.inputs), "passed": self.passed,
               "claims": [c.to_dict() for c in self.claims],
               **{k: jsonable(v) for k, v in self.extra.items()}}
        if timing:
            out["runtime"] = round(self.runtime, 3)
        return out


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
