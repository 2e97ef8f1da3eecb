"""``treedim`` command line: dimension reports, normalization traces, oracle sweeps.

Exit codes: 0 success, 2 validation error, 3 precondition failure (a
non-uniform tree where uniformity is required), 4 enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from . import __version__
from ._numeric import DEFAULT_PREC
from .cover_engine import (
    COST_RTOL,
    DEFAULT_BUDGET,
    BudgetExceededError,
    CoverError,
    NonUniformTreeError,
    brute_force_min_cover,
    cost_close,
    min_level_cost,
    normalize_cover,
)
from .dimension import DEFAULT_TAIL_FRACTION, DimensionError, dimension_report
from .families import FAMILY_NAMES, SetSpec, family_pair
from .profinite import (
    GroupError,
    c2_tower,
    cyclic_tower,
    density_subgroup_spec,
    group_dimension_report,
)
from .specs import canonical_json, load_cover, load_system, load_tree, tree_spec
from .tree_core import EnumerationLimitError, TreeError, TreeValidationError, check_subtree, is_levelwise_uniform

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PRECONDITION = 3
EXIT_BUDGET = 4

DEFAULT_R_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1), Fraction(3, 2), Fraction(2))
# strict improvement an oracle sweep must show on a non-uniform tree
IMPROVEMENT_MARGIN = 1e-6


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    depth: int | None = None
    r_values: tuple[Fraction, ...] = DEFAULT_R_GRID
    n: int = 0
    tail_fraction: Fraction = Fraction(DEFAULT_TAIL_FRACTION)
    precision: int = DEFAULT_PREC
    output_format: str = "text"
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if any(r < 0 for r in self.r_values):
            raise UsageError("r must be >= 0")
        if self.precision < 64:
            raise UsageError("precision must be >= 64 bits")
        if self.budget < 1:
            raise UsageError("budget must be >= 1")
        if self.n < 0:
            raise UsageError("n must be >= 0")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _r_grid(text: str) -> tuple[Fraction, ...]:
    return tuple(_fraction(x) for x in text.split(",") if x.strip())


def _config(args) -> RunConfig:
    r_values = (args.r,) if getattr(args, "r", None) is not None else getattr(args, "r_grid", None) or DEFAULT_R_GRID
    return RunConfig(
        command=args.command,
        inputs={k: v for k, v in vars(args).items() if k in ("s", "t", "cover", "system", "family")},
        depth=getattr(args, "depth", None),
        r_values=tuple(r_values),
        n=getattr(args, "n", 0),
        tail_fraction=getattr(args, "tail_fraction", Fraction(DEFAULT_TAIL_FRACTION)),
        precision=getattr(args, "precision", DEFAULT_PREC),
        output_format=getattr(args, "format", "text"),
        budget=getattr(args, "budget", DEFAULT_BUDGET),
    )


def _trees(args):
    """``(S, T)`` from ``--family`` or from ``--s`` / ``--t`` spec files."""
    if args.family:
        if args.depth is None:
            raise UsageError("--family needs --depth")
        return family_pair(args.family, args.depth, args.bs, args.bt)
    if not args.s or not args.t:
        raise UsageError("give --family, or both --s and --t")
    S = load_tree(args.s, args.depth)
    T = load_tree(args.t, args.depth)
    if S.depth != T.depth:
        raise TreeValidationError(f"S has depth {S.depth} but T has depth {T.depth}")
    if not check_subtree(S, T):
        raise TreeValidationError("S is not a subtree of T")
    return S, T


def _emit(text: str, out) -> None:
    out.write(text if text.endswith("\n") else text + "\n")


# -- commands --------------------------------------------------------------


def cmd_dims(args, out) -> int:
    cfg = _config(args)
    S, T = _trees(args)
    label = args.family or f"{S.name} in {T.name}"
    report = dimension_report(S, T, cfg.tail_fraction, cfg.precision, label=label)
    _emit(_render(report, cfg.output_format), out)
    return EXIT_OK


def _render(report, fmt: str) -> str:
    if fmt == "json":
        return report.to_json()
    if fmt == "csv":
        return report.to_csv()
    return report.to_text()


def cmd_normalize(args, out) -> int:
    cfg = _config(args)
    S, T = _trees(args)
    if len(cfg.r_values) != 1:
        raise UsageError("normalize takes a single --r")
    cover = load_cover(args.cover)
    trace = normalize_cover(cover, S, T, cfg.r_values[0], cfg.n)
    if cfg.output_format == "json":
        _emit(json.dumps(trace.to_dict(), indent=2, sort_keys=True), out)
    else:
        _emit(trace.to_text(), out)
    return EXIT_OK


def cmd_oracle_verify(args, out) -> int:
    cfg = _config(args)
    S, T = _trees(args)
    uniform = bool(is_levelwise_uniform(S))
    rows = []
    for r in cfg.r_values:
        cover, best = brute_force_min_cover(S, T, r, cfg.n, budget=cfg.budget)
        k, level = min_level_cost(S, T, r, cfg.n)
        if uniform:
            ok = cost_close(best, level, COST_RTOL)
            verdict = "equal" if ok else "MISMATCH"
        else:
            with mpmath.workprec(cfg.precision):
                margin = level.value - best.value
                ok = margin > IMPROVEMENT_MARGIN
            verdict = "strictly-cheaper" if ok else "no-improvement"
        rows.append(
            {
                "r": str(r),
                "oracle_cost": str(best),
                "min_level_cost": str(level),
                "min_level": k,
                "oracle_cover_size": len(cover.nodes),
                "verdict": verdict,
                "pass": bool(ok),
            }
        )
    passed = all(r["pass"] for r in rows) if uniform else any(r["pass"] for r in rows)
    summary = {
        "tree": args.family or S.name,
        "depth": S.depth,
        "n": cfg.n,
        "uniform": uniform,
        "expectation": "oracle equals min level cost" if uniform else "oracle strictly cheaper for some r",
        "results": rows,
        "pass": passed,
    }
    if cfg.output_format == "json":
        _emit(json.dumps(summary, indent=2, sort_keys=True), out)
    elif cfg.output_format == "csv":
        keys = ["r", "oracle_cost", "min_level_cost", "min_level", "verdict"]
        lines = [",".join(keys)] + [",".join(str(row[k]) for k in keys) for row in rows]
        _emit("\n".join(lines), out)
    else:
        lines = [f"oracle-verify {summary['tree']} depth={S.depth} n={cfg.n} uniform={uniform}"]
        for row in rows:
            lines.append(
                f"  r={row['r']:<6} oracle={row['oracle_cost']:<28} level(k={row['min_level']})={row['min_level_cost']:<28} "
                f"{row['verdict']}"
            )
        lines.append(f"{'PASS' if passed else 'FAIL'}: {summary['expectation']}")
        _emit("\n".join(lines), out)
    return EXIT_OK if passed else 1


def _system_and_generators(args):
    if args.system:
        sys_ = load_system(args.system)
    elif args.tower == "c2":
        sys_ = c2_tower(_need_depth(args))
    else:
        sys_ = cyclic_tower(args.p, _need_depth(args))
    exact = None
    if args.density:
        if sys_.spec is None or sys_.spec.get("kind") != "c2-tower":
            raise UsageError("--density needs the C_2 tower")
        dens = density_subgroup_spec(SetSpec.parse(args.density), sys_.depth)
        gens, exact = list(dens.generators), dens.exact_limits()
    elif args.generators is not None:
        try:
            gens = json.loads(args.generators)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--generators is not JSON: {exc}") from None
        if not isinstance(gens, list):
            raise UsageError("--generators must be a JSON list of elements")
        # JSON object keys are strings; sparse elements use integer coordinates
        gens = [{int(k): v for k, v in g.items()} if isinstance(g, dict) else g for g in gens]
    else:
        gens = []
    return sys_, gens, exact


def _need_depth(args) -> int:
    if args.depth is None:
        raise UsageError("--tower needs --depth")
    return args.depth


def cmd_group_dims(args, out) -> int:
    cfg = _config(args)
    sys_, gens, exact = _system_and_generators(args)
    report = group_dimension_report(sys_, gens, cfg.tail_fraction, cfg.precision, exact, label=sys_.name)
    _emit(_render(report, cfg.output_format), out)
    return EXIT_OK


def cmd_gen_family(args, out) -> int:
    S, T = family_pair(args.name, args.depth, args.bs, args.bt)
    _emit(canonical_json(tree_spec(T if args.ambient else S)), out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def _tree_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=FAMILY_NAMES, help="named example family")
    p.add_argument("--s", help="tree spec file for S")
    p.add_argument("--t", help="tree spec file for the ambient tree T")
    p.add_argument("--depth", type=int, help="truncation depth (overrides spec files)")
    p.add_argument("--bs", type=int, default=2, help="S branching for constant-ratio (default 2)")
    p.add_argument("--bt", type=int, default=4, help="T branching for constant-ratio (default 4)")


def _report_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tail-fraction", type=_fraction, default=Fraction(DEFAULT_TAIL_FRACTION))
    p.add_argument("--precision", type=int, default=DEFAULT_PREC, help="working precision in bits (>= 64)")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treedim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"treedim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dims", help="box/Hausdorff/packing report for S inside T")
    _tree_options(p)
    _report_options(p)
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("normalize", help="trace the cover normalization procedure")
    _tree_options(p)
    p.add_argument("--cover", required=True, help="cover file (JSON list or one node per line)")
    p.add_argument("--r", type=_fraction, required=True)
    p.add_argument("--n", type=int, default=0, help="covers use nodes of length >= n")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("oracle-verify", help="brute-force minimal covers against level covers")
    _tree_options(p)
    p.add_argument("--r", type=_fraction, help="single exponent (overrides --r-grid)")
    p.add_argument("--r-grid", type=_r_grid, default=DEFAULT_R_GRID, help="comma-separated exponents")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max subproblems the oracle may visit")
    p.add_argument("--precision", type=int, default=DEFAULT_PREC)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=cmd_oracle_verify)

    p = sub.add_parser("group-dims", help="dimensions of a closed subgroup of a profinite group")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--system", help="inverse system spec file")
    src.add_argument("--tower", choices=("c2", "cyclic"), help="built-in tower")
    p.add_argument("--p", type=int, default=2, help="prime for --tower cyclic")
    p.add_argument("--depth", type=int)
    gen = p.add_mutually_exclusive_group()
    gen.add_argument("--generators", help="JSON list of elements of L_N (index, coordinate list or {coord: value})")
    gen.add_argument("--density", help="set R for the C_2 tower: periodic:1,0,0 or geometric:BASE:SCALE:0,1")
    _report_options(p)
    p.set_defaults(func=cmd_group_dims)

    p = sub.add_parser("gen-family", help="write the tree spec of a named family")
    p.add_argument("name", choices=FAMILY_NAMES)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--ambient", action="store_true", help="emit T instead of S")
    p.add_argument("--bs", type=int, default=2)
    p.add_argument("--bt", type=int, default=4)
    p.set_defaults(func=cmd_gen_family)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except NonUniformTreeError as exc:
        print(f"treedim: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (BudgetExceededError, EnumerationLimitError) as exc:
        print(f"treedim: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, TreeError, CoverError, GroupError, DimensionError, ValueError, OSError) as exc:
        print(f"treedim: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
