"""Command-line front end: ``latval <subcommand> ...``.

Exit codes: 0 on success, 1 when a checked claim fails, 2 on invalid input.
"""

import argparse
import csv
import io
import json
import os
import sys

from . import _mc
from .exactgeom import GeometryError
from .experiments import NoWitnessFound
from .io import InputError, load_cone, load_polytope
from .report import jsonable

FAMILIES = ("L", "N", "A", "Ak", "Gk", "V")
SUITES = ("identities", "reeve", "witness", "scan", "gauss", "all")


class UsageError(Exception):
    pass


# output

def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render(obj, fmt):
    """JSON, or a two-column key/value CSV holding exactly the same scalars."""
    obj = jsonable(obj)
    if fmt == "json":
        return json.dumps(obj, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in _flatten(obj):
        w.writerow([k, json.dumps(v) if not isinstance(v, str) else v])
    return buf.getvalue()


def emit(obj, args):
    text = render(obj, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# inputs

def _polytope(args):
    if bool(args.polytope) == bool(args.builtin):
        raise UsageError("give exactly one of --polytope FILE or --builtin NAME:N")
    if args.builtin:
        from .fixtures import builtin
        return builtin(args.builtin)
    return load_polytope(args.polytope)


NEED_SEED = "this command samples random directions; pass --seed N or set LATVAL_SEED"


def _seed(args, needed=True):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("LATVAL_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"LATVAL_SEED must be an integer, got {env!r}") from None
    if needed:
        raise UsageError(NEED_SEED)
    return None


def _with_angles(args, fn):
    """Call fn(seed, method). Without a seed only closed-form angles are allowed."""
    from .valuations import NeedsSampling
    if args.family in ("L", "N"):
        return fn(0, args.method)
    seed = _seed(args, needed=False)
    if seed is not None:
        return fn(seed, args.method)
    if args.method == "mc":
        raise UsageError(NEED_SEED)
    try:
        return fn(0, "exact")
    except NeedsSampling:
        raise UsageError(NEED_SEED) from None


def _needs_k(args, family):
    if family in ("Ak", "Gk", "V") and args.k is None:
        raise UsageError(f"family {family} needs --k")


# subcommands

def cmd_count(args):
    from .lattice import count_points, interior_count
    P = _polytope(args)
    out = {"count": count_points(P, args.dilate)}
    if args.interior:
        out["interior"] = interior_count(P, args.dilate)
    emit(out, args)
    return 0


def cmd_valuation(args):
    from .valuations import evaluate
    P = _polytope(args)
    _needs_k(args, args.family)
    v = _with_angles(args, lambda seed, m: evaluate(P, args.family, args.dilate, args.k, args.samples, seed, m))
    emit(v.to_dict(), args)
    return 0


def cmd_ehrhart(args):
    from .ehrfit import check_reciprocity, fit_family
    P = _polytope(args)
    if args.family == "V":
        raise UsageError("family V is a single number, not a polynomial; use 'valuation'")
    _needs_k(args, args.family)
    p = _with_angles(args, lambda seed, m: fit_family(P, args.family, args.k, args.samples, seed, m))
    out = p.to_dict()
    if args.check:
        claims = check_reciprocity(p, args.family, P, (1, 2, 3), args.k)
        out["claims"] = [c.to_dict() for c in claims]
        emit(out, args)
        return 0 if all(c.passed for c in claims) else 1
    emit(out, args)
    return 0


def cmd_hstar(args):
    from .ehrfit import FittedPolynomial, fit_family, from_hstar, to_hstar
    from .io import parse_rational
    if args.coeffs is not None:
        coeffs = [parse_rational(x, f"coefficient {i}") for i, x in enumerate(args.coeffs.split(","))]
        p = to_hstar(FittedPolynomial(coeffs, True), args.degree)
        emit({"coeffs": coeffs, "hstar": p.hstar}, args)
        return 0
    if args.hvec is not None:
        h = [parse_rational(x, f"h*_{i}") for i, x in enumerate(args.hvec.split(","))]
        emit({"hstar": h, "coeffs": from_hstar(h)}, args)
        return 0
    P = _polytope(args)
    _needs_k(args, args.family)
    p = _with_angles(args, lambda seed, m: fit_family(P, args.family, args.k, args.samples, seed, m))
    p = to_hstar(p, args.degree)
    emit(p.to_dict(), args)
    return 0


WHAT = {"solid": "solid", "upsilon": "intrinsic", "intrinsic": "intrinsic", "gamma": "gamma",
        "alpha_mod": "alpha", "alpha": "alpha"}


def cmd_angles(args):
    from .angles import alpha_vector, conic_intrinsic_volumes, gamma_vector, solid_angle
    if bool(args.cone) == bool(args.tangent):
        raise UsageError("give exactly one of --cone FILE or --tangent FACE_VERTICES (with a polytope)")
    if args.cone:
        C = load_cone(args.cone)
    else:
        from .cones import tangent_cone
        P = _polytope(args)
        try:
            idx = [int(i) for i in args.tangent.split(",")]
        except ValueError:
            raise UsageError("--tangent takes comma-separated vertex indices, e.g. 0,1") from None
        F = P.face_by_vertices(idx)
        if F is None:
            raise UsageError(f"vertices {idx} do not span a face")
        C = tangent_cone(P, F)
    seed = _seed(args)
    out = {"cone": C.to_json(), "dim": C.dim}
    kinds = ("solid", "intrinsic", "gamma", "alpha") if args.kind == "all" else (args.kind,)
    if args.what:
        names = [w.strip() for w in args.what.split(",") if w.strip()]
        bad = [w for w in names if w not in WHAT]
        if bad:
            raise UsageError(f"--what: unknown angle kind(s) {', '.join(bad)}; choose from {', '.join(WHAT)}")
        kinds = tuple(dict.fromkeys(WHAT[w] for w in names))
    if "solid" in kinds:
        out["solid"] = solid_angle(C, args.samples, seed).to_dict()
    if "intrinsic" in kinds:
        out["intrinsic"] = conic_intrinsic_volumes(C, args.samples, seed).to_dict()
    if "gamma" in kinds:
        out["gamma"] = [g.to_dict() for g in gamma_vector(C, args.samples, seed, args.angle_method)]
    if "alpha" in kinds:
        out["alpha"] = [a.to_dict() for a in alpha_vector(C, args.samples, seed, args.angle_method)]
    emit(out, args)
    return 0


def _report_exit(reports, args):
    out = [r.to_dict(args.timing) for r in reports]
    emit(out[0] if len(out) == 1 else out, args)
    return 0 if all(r.passed for r in reports) else 1


def cmd_reeve(args):
    from .experiments import run_reeve
    if args.h < 1:
        raise UsageError("--h must be at least 1")
    return _report_exit([run_reeve(args.h, args.samples, _seed(args))], args)


def cmd_gauss_image(args):
    from .experiments import run_gauss_image
    C = load_cone(args.cone)
    if not 1 <= args.k <= C.ambient_dim:
        raise UsageError(f"--k must lie in 1..{C.ambient_dim}")
    return _report_exit([run_gauss_image(C, args.k, args.trials, args.samples, _seed(args))], args)


def cmd_verify(args):
    from . import experiments as ex
    from .cones import Cone
    seed = _seed(args)
    n = args.samples
    suites = ("identities", "reeve", "witness", "scan", "gauss") if args.suite == "all" else (args.suite,)
    reports = []
    for s in suites:
        if s == "identities":
            reports.append(ex.run_identity_suite(args.cones, n, seed))
        elif s == "reeve":
            reports += [ex.run_reeve(h, n, seed) for h in (1, 3, 6)]
        elif s == "witness":
            reports += [ex.run_negativity_witness(2, 0, n, seed), ex.run_negativity_witness(3, 1, n, seed)]
        elif s == "scan":
            reports.append(ex.run_conjecture_scan(3, args.trials_scan, n, seed))
        elif s == "gauss":
            quadrant = Cone.from_generators([(1, 0), (0, 1)], (), 2)
            reports.append(ex.run_gauss_image(quadrant, 1, 10_000, n, seed))
    return _report_exit(reports, args)


# parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (required for sampled quantities; falls back to $LATVAL_SEED)")
    common.add_argument("--samples", type=int, default=_mc.DEFAULT_SAMPLES,
                        help="Monte Carlo samples per angle (default %(default)s)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for sampling; results do not depend on it (default: logical cores)")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="output format")
    common.add_argument("--out", default=None, help="write output to this file instead of stdout")
    common.add_argument("--timing", action="store_true", help="include wall-clock runtime in reports")

    poly = argparse.ArgumentParser(add_help=False)
    poly.add_argument("--polytope", help='polytope JSON file: {"dim": d, "vertices": [[...], ...]}')
    poly.add_argument("--builtin", help="built-in polytope: cube:D, simplex:D or reeve:H")

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--family", choices=FAMILIES, default="L",
                     help="L (det-weighted count), N (plain count), A, Ak, Gk or V")
    fam.add_argument("--k", type=int, default=None, help="index k for Ak, Gk and V")
    fam.add_argument("--method", choices=("auto", "mc", "exact"), default="auto",
                     help="angle evaluation: closed forms where possible, always sampled, or closed forms only")

    p = argparse.ArgumentParser(prog="latval", description="Discrete volumes, solid-angle valuations, "
                                "discrete intrinsic volumes and Grassmann valuations of lattice polytopes.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("count", parents=[common, poly], help="lattice points of a dilate")
    s.add_argument("--dilate", type=int, default=1)
    s.add_argument("--interior", action="store_true", help="also report relative-interior points")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("valuation", parents=[common, poly, fam], help="evaluate a valuation on a dilate")
    s.add_argument("--dilate", type=int, default=1)
    s.set_defaults(func=cmd_valuation)

    s = sub.add_parser("ehrhart", parents=[common, poly, fam], help="fit the polynomial n -> φ(nP)")
    s.add_argument("--check", action="store_true", help="also check reciprocity or parity")
    s.set_defaults(func=cmd_ehrhart)

    s = sub.add_parser("hstar", parents=[common, poly, fam], help="h* coordinates of a fitted polynomial")
    s.add_argument("--coeffs", help="convert given monomial coefficients c0,c1,... instead")
    s.add_argument("--hvec", help="convert a given h* vector back to monomial coefficients")
    s.add_argument("--degree", type=int, default=None, help="binomial basis degree (default: polynomial degree)")
    s.set_defaults(func=cmd_hstar)

    s = sub.add_parser("angles", parents=[common, poly], help="angles of a cone")
    s.add_argument("--cone", help='cone JSON file: {"dim": d, "rays": [...], "lineality": [...]}')
    s.add_argument("--tangent", help="tangent cone of the polytope at the face spanned by these vertex indices")
    s.add_argument("--kind", choices=("solid", "intrinsic", "gamma", "alpha", "all"), default="all")
    s.add_argument("--what", default=None,
                   help="comma-separated subset of solid, upsilon, gamma, alpha_mod (overrides --kind)")
    s.add_argument("--angle-method", choices=("mc", "crofton"), default="mc",
                   help="Grassmann angles by sampling or from intrinsic volumes")
    s.set_defaults(func=cmd_angles)

    s = sub.add_parser("verify", parents=[common], help="run verification suites")
    s.add_argument("--suite", choices=SUITES, default="all")
    s.add_argument("--cones", type=int, default=20, help="random cones in the identity suite")
    s.add_argument("--trials-scan", type=int, default=20, help="random simplices in the positivity scan")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("reeve", parents=[common], help="Reeve tetrahedron experiment")
    s.add_argument("--h", type=int, required=True)
    s.set_defaults(func=cmd_reeve)

    s = sub.add_parser("gauss-image", parents=[common], help="mean υ_k of Gaussian images of a cone")
    s.add_argument("--cone", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--trials", type=int, default=10_000)
    s.set_defaults(func=cmd_gauss_image)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.samples <= 0:
            raise UsageError("--samples must be positive")
        if getattr(args, "dilate", 0) < 0:
            raise UsageError("--dilate must be non-negative")
        _mc.set_threads(args.threads)
        return args.func(args)
    except (UsageError, InputError, GeometryError, ValueError) as e:
        print(f"latval: error: {e}", file=sys.stderr)
        return 2
    except NoWitnessFound as e:
        print(f"latval: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
