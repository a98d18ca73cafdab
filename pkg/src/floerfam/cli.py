"""Command-line front end.

Every command writes one JSON report (sorted keys) to stdout or --out.
Exit status: 0 when all checks pass, 1 when a check fails or the
criterion refuses, 2 on unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import affinoid_domains as aff
from . import novikov
from . import family_engine as fe
from . import sheaf_analysis as sa
from .ainf_core import ValidationError, category_to_dict, check_ainf_relations, check_units, load_category
from .ainf_modules import build_yoneda, module_to_dict
from .bar_convolution import Convolution, stable_cone_ranks
from .complexes import stable_cohomology
from .decoration import Decoration, DecoratedCategory, check_extension_relations
from .fixtures import FIXTURES, build_fixture, generate_fixture
from .novikov import ParseError, to_fraction
from .torus_ring import ZeroInput, exp_poly_zeros, parse_laurent, parse_point

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class JobSpec:
    command: str
    inputs: Dict[str, str] = field(default_factory=dict)
    truncation: int = 2
    samples: int = 10
    cutoff: Optional[Fraction] = None
    seed: int = 0
    grading: Optional[str] = None
    out: Optional[str] = None


class CheckFailed(Exception):
    """Raised inside a command to finish with exit status 1 and a report."""

    def __init__(self, report: dict):
        super().__init__("check failed")
        self.report = report


# ------------------------------------------------------------ inputs

def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}", "", exc.pos, path) from None


def _inline_or_file(text: str):
    if text.lstrip().startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", text, exc.pos, "inline JSON") from None
    return _read_json(text)


def _category(args):
    """(category, decoration or None) from --fixture or --category/--decoration."""
    if args.fixture:
        cat, deco = build_fixture(args.fixture, args.seed, args.size)
    elif args.category:
        cat = load_category(args.category)
        deco = Decoration.load(args.decoration) if args.decoration else None
    else:
        raise ValidationError("give --fixture or --category")
    if args.grading and args.grading != cat.grading:
        raise ValidationError(f"category is {cat.grading}-graded, --grading asked for {args.grading}")
    if deco is not None:
        deco.validate_against(cat, args.decoration)
    return cat, deco


def _family(args) -> fe.FamilyBimodule:
    cat, deco = _category(args)
    if deco is None:
        raise ValidationError("this command needs a decoration")
    return fe.build_local_system_family(cat, deco)


def _points(args, n: int) -> List:
    if args.point:
        pts = [parse_point(p, "--point") for p in args.point]
        for p in pts:
            if p.n != n:
                raise ValidationError(f"point {p} has {p.n} coordinates, lattice rank is {n}")
        return pts
    return fe.seeded_points(n, args.samples, args.seed)


def _complex(args):
    if args.complex:
        return sa.complex_from_dict(_read_json(args.complex), args.complex)
    fam = _family(args)
    src = args.source or fam.cat.objects[0]
    tgt = args.target or src
    return sa.floer_sheaf(fam, src, tgt)


def _yoneda_spec(text: str):
    if text == "diagonal":
        return "diagonal"
    parts = text.split(":")
    if parts[0] in ("right", "left") and len(parts) == 2:
        return (parts[0], parts[1])
    if parts[0] == "bimodule" and len(parts) == 3:
        return tuple(parts)
    raise ValidationError(f"bad module spec {text!r}; use diagonal, right:L, left:L or bimodule:L:L'")


def _polytope(args, n: int) -> aff.Polytope:
    if args.polytope:
        return aff.Polytope.from_dict(_read_json(args.polytope), args.polytope)
    if args.box:
        lows, highs = [], []
        for part in args.box.split(","):
            lo, hi = part.split(":")
            lows.append(to_fraction(lo))
            highs.append(to_fraction(hi))
        if len(lows) != n:
            raise ValidationError(f"box has {len(lows)} coordinates, ring rank is {n}")
        return aff.Polytope.box(lows, highs)
    raise ValidationError("give --polytope or --box")


def _frac_list(text: str) -> List[Fraction]:
    return [to_fraction(x) for x in text.split(",")]


# ------------------------------------------------------------ commands

def cmd_validate(args) -> dict:
    cat, deco = _category(args)
    rel = check_ainf_relations(cat, args.truncation)
    report = {"category": cat.name, "relations": rel.as_dict()}
    ok = rel.passed
    if cat.units:
        units = check_units(cat)
        report["units"] = units.as_dict()
        ok = ok and units.passed
    if deco is not None:
        ext = check_extension_relations(DecoratedCategory(cat, deco), min(args.truncation, max(cat.k_max + 1, 3)))
        report["decoration"] = ext.as_dict()
        ok = ok and ext.passed
    report["passed"] = ok
    if not ok:
        raise CheckFailed(report)
    return report


def cmd_fixture(args) -> dict:
    paths = generate_fixture(args.name, args.dir, args.seed, args.size)
    return {"fixture": args.name, "files": paths}


def cmd_convolve(args) -> dict:
    cat, _ = _category(args)
    factors = [build_yoneda(cat, _yoneda_spec(s)) for s in args.factor]
    N = args.truncation
    big = Convolution(factors, N + 1)
    C = big.complex(args.source, args.target)
    small = {b for b in C.basis if big.mid_length(b) <= N}
    stable = stable_cohomology(C, small)
    return {"factors": args.factor, "truncation": N, "generators": len(small),
            "stable_cohomology": {str(k): v for k, v in sorted(stable.items())}}


def cmd_collapse(args) -> dict:
    fam = _family(args)
    out = {}
    ok = True
    for p in _points(args, fam.rank):
        reps = fe.collapse_reports(fam, p, args.truncation)
        out[str(p)] = {k: r.as_dict() for k, r in sorted(reps.items())}
        ok = ok and all(r.acyclic for r in reps.values())
    report = {"points": out, "passed": ok}
    if not ok:
        raise CheckFailed(report)
    return report


def cmd_family(args) -> dict:
    fam = _family(args)
    if args.action == "build":
        return {"rank": fam.rank, "objects": list(fam.cat.objects), "generators": len(fam.module.basis()),
                "checked": True}
    if args.action == "restrict":
        pts = _points(args, fam.rank)
        return {str(p): module_to_dict(fe.restrict_family(fam, p), args.bound) for p in pts}
    if args.action == "action-check":
        obj = args.source or fam.cat.objects[0]
        h = fe.build_decorated_yoneda_family(fam.cat, obj, fam.decoration)
        out, ok = {}, True
        for p in _points(args, fam.rank):
            rep = fe.action_cone_report(h, fam, p, args.truncation)
            out[str(p)] = rep.as_dict()
            ok = ok and rep.acyclic
        report = {"object": obj, "points": out, "passed": ok}
        if not ok:
            raise CheckFailed(report)
        return report
    if args.action == "grouplike":
        pairs = fe.seeded_pairs(fam.rank, args.samples, args.seed)
        rep = fe.grouplike_check(fam, pairs, N=min(args.truncation, 1) or 1)
        if not rep.passed:
            raise CheckFailed(rep.as_dict())
        return rep.as_dict()
    raise ValidationError(f"unknown family action {args.action!r}")


def cmd_sheaf(args) -> dict:
    if args.action == "floer":
        return sa.complex_to_dict(_complex(args))
    if args.action == "stabilizer":
        fam = _family(args)
        obj = args.source or fam.cat.objects[0]
        kernel = [[int(x) for x in row.split(",")] for row in args.kernel.split(";")] if args.kernel else []
        rep = sa.stabilizer_locus(fam, obj, kernel, args.samples, args.seed)
        if not rep.passed:
            raise CheckFailed(rep.as_dict())
        return rep.as_dict()
    C = _complex(args)
    n = C.ring_rank or 1
    if args.action == "ranks":
        return {str(p): {str(k): v for k, v in sorted(sa.rank_at_point(C, p).items())} for p in _points(args, n)}
    if args.action == "stratify":
        strat = sa.rank_stratification(C, n, seed=args.seed)
        report = strat.as_dict()
        checks = {}
        for p in _points(args, n):
            checks[str(p)] = strat.predict(p) == {k: v for k, v in sa.rank_at_point(C, p).items()}
        report["pointwise_agreement"] = checks
        if not all(checks.values()):
            raise CheckFailed(report)
        return report
    if args.action == "real-line":
        alpha = _frac_list(args.alpha) if args.alpha else [Fraction(1)] * n
        return sa.real_line_exceptional_set(C, alpha, n).as_dict()
    if args.action == "exactness":
        if args.cocycle:
            raw = _inline_or_file(args.cocycle)
            s = {_basis_key(C, k): parse_laurent(v, n, source=args.cocycle) for k, v in raw.items()}
        else:
            s = {C.basis[0]: 1}
        loc = sa.exactness_locus(C, s, n)
        report = loc.as_dict()
        if args.point:
            pts = _points(args, n)
            report["membership"] = {str(p): loc.contains(p) for p in pts}
            # the locus formula against a direct linear solve at the same point
            report["solve_agrees"] = all(loc.contains(p) == loc.contains_by_solve(p) for p in pts)
            if not report["solve_agrees"]:
                raise CheckFailed(report)
        return report
    raise ValidationError(f"unknown sheaf action {args.action!r}")


def _basis_key(C, key: str):
    for b in C.basis:
        if str(b) == key:
            return b
    raise ValidationError(f"cocycle names unknown basis element {key!r}")


def cmd_zeros(args) -> dict:
    f = parse_laurent(args.poly, 1, real=True, source="--poly")
    return exp_poly_zeros(f).report()


def cmd_affinoid(args) -> dict:
    if args.action == "semicont":
        C = sa.complex_from_dict(_read_json(args.complex), args.complex) if args.complex else _complex(args)
        n = C.ring_rank or 1
        P = _polytope(args, n)
        res = aff.semicontinuity_shrink(C, P, args.samples, args.seed, eps_exponent=args.eps_exponent)
        if not res.validated:
            raise CheckFailed(res.as_dict())
        return res.as_dict()
    n = args.rank
    f = parse_laurent(args.poly, n, source="--poly")
    P = _polytope(args, n)
    if args.action == "norm":
        return aff.sup_norm_over_polytope(f, P, args.tail_bound).as_dict()
    if args.action == "shrink":
        return aff.shrink_polytope_invertibility(f, P, args.eps_exponent).as_dict()
    raise ValidationError(f"unknown affinoid action {args.action!r}")


# ------------------------------------------------------------ parser

def _common(p: argparse.ArgumentParser):
    p.add_argument("--fixture", choices=FIXTURES)
    p.add_argument("--size", type=int, default=3, help="size of the random fixture")
    p.add_argument("--category")
    p.add_argument("--decoration")
    p.add_argument("--source")
    p.add_argument("--target")
    p.add_argument("--point", action="append", help="torus point, e.g. '(T^(1/2), 2)'; repeatable")


def build_parser() -> argparse.ArgumentParser:
    glob = argparse.ArgumentParser(add_help=False)
    glob.add_argument("--config", help="JSON file of default option values")
    glob.add_argument("--truncation", type=int, default=2)
    glob.add_argument("--cutoff", type=Fraction, default=None)
    glob.add_argument("--samples", type=int, default=10)
    glob.add_argument("--seed", type=int, default=0)
    glob.add_argument("--grading", choices=("z", "z2"))
    glob.add_argument("--out")
    top = argparse.ArgumentParser(prog="floerfam",
                                  description="Exact computations with families of A-infinity bimodules.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[glob])
    _common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("fixture", parents=[glob])
    p.add_argument("name", choices=FIXTURES)
    p.add_argument("--dir", default=".")
    p.add_argument("--size", type=int, default=3)
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("convolve", parents=[glob])
    _common(p)
    p.add_argument("--factor", action="append", required=True)
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("collapse", parents=[glob])
    _common(p)
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("family", parents=[glob])
    p.add_argument("action", choices=("build", "restrict", "action-check", "grouplike"))
    _common(p)
    p.add_argument("--bound", type=int, default=3)
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("sheaf", parents=[glob])
    p.add_argument("action", choices=("floer", "ranks", "stratify", "real-line", "exactness", "stabilizer"))
    _common(p)
    p.add_argument("--complex")
    p.add_argument("--alpha", help="comma-separated rational direction")
    p.add_argument("--cocycle", help="JSON map basis id -> Laurent entry, inline or a file")
    p.add_argument("--kernel", help="kernel lattice rows, e.g. '0,1;1,0'")
    p.set_defaults(func=cmd_sheaf)

    p = sub.add_parser("zeros", parents=[glob])
    p.add_argument("--poly", required=True, help="expression in T and z1 with rational exponents")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("affinoid", parents=[glob])
    p.add_argument("action", choices=("norm", "shrink", "semicont"))
    _common(p)
    p.add_argument("--poly")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--polytope")
    p.add_argument("--box", help="lo:hi per coordinate, comma separated")
    p.add_argument("--eps-exponent", type=Fraction, default=Fraction(0))
    p.add_argument("--tail-bound", type=Fraction, default=None)
    p.add_argument("--complex")
    p.set_defaults(func=cmd_affinoid)
    return top


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    data = _read_json(known.config)
    if not isinstance(data, dict):
        raise ValidationError(f"{known.config}: config must be a JSON object")
    for action in parser._subparsers._group_actions:
        for p in action.choices.values():
            p.set_defaults(**{k.replace("-", "_"): v for k, v in data.items()
                              if any(a.dest == k.replace("-", "_") for a in p._actions)})


def emit(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    args = parser.parse_args(argv)
    if args.cutoff is not None:
        # relative precision for inverting non-monomial series
        novikov.CONFIG = novikov.NovikovConfig(to_fraction(args.cutoff))
    status = EXIT_OK
    try:
        report = args.func(args)
    except CheckFailed as exc:
        report, status = exc.report, EXIT_FAIL
    except aff.Refusal as exc:
        report = {"refused": True, "kind": type(exc).__name__, "reason": str(exc), "diagnostics": exc.diagnostics}
        status = EXIT_FAIL
    except aff.SampledPointNotAcyclic as exc:
        report = {"refused": True, "kind": type(exc).__name__, "reason": str(exc), "point": str(exc.point),
                  "ranks": {str(k): v for k, v in sorted(exc.ranks.items())}}
        status = EXIT_FAIL
    except (ParseError, ValidationError, ZeroInput, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    emit(report, args.out)
    return status


def main() -> None:
    sys.exit(run())
