"""Command-line front end: averages, maximal values, region classification,
scaling families, domination probe suites, and norms.

Artifacts (CSV, JSON, SVG) are deterministic for identical arguments and
seed; JSON documents conform to the schemas shipped under schemas/.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import numpy as np

from . import counterexamples as cex
from .figures import (
    save_domination_figure,
    save_lemma_figure,
    save_region_figure,
    save_scaling_figure,
)
from .funcspec import Constant, FunctionSpec, Indicator, PowerLog, PowerLogTail
from .operators import (
    TGrid,
    check_bilinear_domination,
    check_multilinear_domination,
    spherical_average,
    spherical_maximal,
)
from .region import ExponentPoint, classify, region_figure
from .sphere import build_sphere_rule

DEFAULT_SEED = 20260816
OUT_ENV = "SPHEREMAX_OUT"


def parse_funcspec(text: str) -> FunctionSpec:
    """Parse the flag mini-syntax: ind:a,b | plog:alpha,beta,s | ptail:alpha,beta,R | const:c."""
    try:
        kind, _, rest = text.partition(":")
        args = [float(v) for v in rest.split(",")] if rest else []
        if kind == "ind" and len(args) == 2:
            return Indicator(*args)
        if kind == "plog" and len(args) == 3:
            return PowerLog(*args)
        if kind == "ptail" and len(args) == 3:
            return PowerLogTail(*args)
        if kind == "const" and len(args) == 1:
            return Constant(*args)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad function spec {text!r}: {exc}") from exc
    raise argparse.ArgumentTypeError(
        f"bad function spec {text!r}; expected ind:a,b | plog:alpha,beta,s | "
        "ptail:alpha,beta,R | const:c"
    )


def parse_q(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(part) for part in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad exponent list {text!r}: {exc}") from exc


def parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}: {exc}") from exc


def load_schema(name: str) -> dict:
    """Load one of the shipped JSON schemas by file name."""
    return json.loads(resources.files("spheremax.schemas").joinpath(name).read_text())


@dataclass(frozen=True)
class RunConfig:
    """Effective run options: defaults < config file < environment < flags."""

    seed: int = DEFAULT_SEED
    out_dir: str = "out"
    level: int | None = None
    slice_level: int | None = None

    @classmethod
    def resolve(cls, args: argparse.Namespace) -> "RunConfig":
        opts = {}
        config_path = getattr(args, "config", None)
        if config_path:
            with open(config_path) as fh:
                loaded = json.load(fh)
            for key in ("seed", "out", "level", "slice_level"):
                if key in loaded:
                    opts["out_dir" if key == "out" else key] = loaded[key]
        if os.environ.get(OUT_ENV):
            opts["out_dir"] = os.environ[OUT_ENV]
        for key, field in (("seed", "seed"), ("out", "out_dir"),
                           ("level", "level"), ("slice_level", "slice_level")):
            val = getattr(args, key, None)
            if val is not None:
                opts[field] = val
        return cls(**opts)

    def ensure_out(self) -> str:
        os.makedirs(self.out_dir, exist_ok=True)
        return self.out_dir


def _dump_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _write(path: str, text: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _collect_fs(args) -> list[FunctionSpec]:
    fs = list(args.f or [])
    if getattr(args, "g", None):
        fs += list(args.g)
    m = getattr(args, "m", None)
    if m is not None and len(fs) != m:
        raise argparse.ArgumentTypeError(f"got {len(fs)} functions for m = {m}")
    if len(fs) < 2:
        raise argparse.ArgumentTypeError("need at least two functions (--f/--g)")
    return fs


def _sphere_rule_for(cfg: RunConfig, m: int):
    level = cfg.level if cfg.level is not None else {2: 10, 3: 6}.get(m, 4)
    return build_sphere_rule(m, level, cfg.slice_level)


def _grid_from(args, fs, x: float) -> TGrid:
    if args.t_min is not None and args.t_max is not None:
        return TGrid(args.t_min, args.t_max, args.ratio, args.refine_depth)
    return TGrid.from_supports(fs, x, ratio=args.ratio,
                               local_refine_depth=args.refine_depth)


def cmd_avg(cfg: RunConfig, args) -> int:
    fs = _collect_fs(args)
    rule = _sphere_rule_for(cfg, len(fs))
    value = spherical_average(fs, args.t, args.x, rule)
    sys.stdout.write(_dump_json(value))
    return 0


def cmd_max(cfg: RunConfig, args) -> int:
    fs = _collect_fs(args)
    rule = _sphere_rule_for(cfg, len(fs))
    grid = _grid_from(args, fs, args.x)
    est = spherical_maximal(fs, args.x, grid, rule)
    doc = {"value": est.value, "argmax_t": est.argmax_t, "levels": est.levels}
    sys.stdout.write(_dump_json(doc))
    return 0


def cmd_region(cfg: RunConfig, args) -> int:
    if args.q is None and args.figure is None:
        raise argparse.ArgumentTypeError("region needs --q or --figure")
    if args.q is not None:
        if args.m is not None and len(args.q) != args.m:
            raise argparse.ArgumentTypeError(
                f"--q has {len(args.q)} entries but --m is {args.m}")
        doc = classify(ExponentPoint(args.q)).to_dict()
        sys.stdout.write(_dump_json(doc))
    if args.figure is not None:
        m = int(args.figure.removeprefix("m="))
        slice_value = Fraction(args.slice) if args.slice else None
        data = region_figure(m, slice_value=slice_value)
        out = cfg.ensure_out()
        doc = data.to_dict()
        _write(os.path.join(out, f"region_m{m}.json"), _dump_json(doc))
        save_region_figure(data, os.path.join(out, f"region_m{m}.svg"))
        sys.stdout.write(_dump_json(doc))
    return 0


def _cex_dispatch(args) -> tuple[str, object]:
    fam = args.family
    if fam == "a":
        m = args.m or 2
        return f"cex_a_m{m}", cex.cex_condition_a(m, args.deltas)
    if fam == "b":
        m = args.m or 2
        return f"cex_b_m{m}", cex.cex_condition_b(m, args.deltas)
    if fam == "l2":
        return "cex_l2", cex.cex_bilinear_L2(args.etas, x=args.x if args.x is not None else 0.25)
    if fam == "H":
        m = args.m or 2
        q = args.q if args.q is not None else (Fraction(1, 2),) * 2 if m == 2 \
            else (Fraction(1, 2), Fraction(1, 2), Fraction(1))
        return f"cex_H_m{m}", cex.cex_H(m, q, args.xs)
    if fam == "Hi":
        m = args.m or 2
        q = args.q if args.q is not None else (Fraction(1, 2), Fraction(1, 4)) if m == 2 \
            else (Fraction(3, 4), Fraction(3, 4), Fraction(1, 4))
        return f"cex_Hi_m{m}", cex.cex_Hi(m, q, args.xs)
    if fam == "corner":
        m = args.m or 3
        k = args.k if args.k is not None else m - 1
        return f"cex_corner_m{m}_k{k}", cex.cex_corner(m, k, args.xs)
    if fam == "lemma":
        return "lemma", cex.lemma_check(args.r1, args.r2, args.C,
                                        samples=args.samples, seed=args.seed_eff)
    raise argparse.ArgumentTypeError(f"unknown family {fam!r}")


def cmd_cex(cfg: RunConfig, args) -> int:
    args.seed_eff = cfg.seed
    stem, report = _cex_dispatch(args)
    out = cfg.ensure_out()
    doc = report.to_dict()
    _write(os.path.join(out, f"{stem}.json"), _dump_json(doc))
    if isinstance(report, cex.ScalingReport):
        _write(os.path.join(out, f"{stem}.csv"), report.csv_text())
        save_scaling_figure(report, os.path.join(out, f"{stem}.svg"))
        passed = report.ok()
        sys.stdout.write(
            f"{report.family}: fitted_slope={report.fitted_slope!r} "
            f"expected={report.expected_slope!r} tol={report.tolerance!r} "
            f"ok={passed}\n"
        )
    else:
        header = ",".join(doc)
        row = ",".join(repr(doc[k]) if isinstance(doc[k], float) else str(doc[k])
                       for k in doc)
        _write(os.path.join(out, f"{stem}.csv"), f"{header}\n{row}\n")
        save_lemma_figure(report.r1, report.r2, os.path.join(out, f"{stem}.svg"))
        passed = report.ok and report.monotone_violations == 0
        if report.C == 1.0:
            passed = passed and report.max_ratio <= 1.0 + 1e-9
        sys.stdout.write(
            f"lemma: max_ratio={report.max_ratio!r} C_prime={report.C_prime!r} "
            f"monotone_violations={report.monotone_violations} ok={passed}\n"
        )
    return 0 if passed else 1


def random_funcspec(rng: np.random.Generator) -> FunctionSpec:
    """One draw from the probe distribution: mostly indicators, some
    integrable-singular power-logs, some constants."""
    kind = int(rng.integers(0, 5))
    if kind <= 2:
        a = float(rng.uniform(-2.5, 2.0))
        w = float(rng.uniform(0.3, 3.0))
        return Indicator(a, a + w)
    if kind == 3:
        return PowerLog(float(rng.uniform(0.0, 0.2)), float(rng.uniform(0.0, 1.0)),
                        float(rng.uniform(0.3, 0.9)))
    return Constant(float(rng.uniform(0.3, 2.0)))


def run_domination_suite(m: int, count: int, seed: int) -> dict:
    """Seeded random probes of the pointwise domination inequalities.

    For m = 2 each probe checks the weighted-average bound with random
    (eps, q); for m = 3 the chain through the bilinear factor and the
    averaged third factor.  Returns a JSON-ready summary document.
    """
    if m not in (2, 3):
        raise ValueError("domination suites cover m in {2, 3}")
    rng = np.random.default_rng(seed)
    rows = []
    violations = 0
    min_margin = math.inf
    for i in range(count):
        if m == 2:
            f, g = random_funcspec(rng), random_funcspec(rng)
            x = float(rng.uniform(-2.0, 2.0))
            eps = float(rng.uniform(0.1, 0.9))
            q = float(rng.uniform(1.2, 3.0))
            while eps * q / (q - 1.0) >= 1.9:
                q = float(rng.uniform(1.2, 3.0))
            grid = TGrid(0.15, 5.0, ratio=1.05, local_refine_depth=0)
            rep = check_bilinear_domination(f, g, x, eps, q, grid)
            row = {"index": i, "x": x, "eps": eps, "q": q,
                   "fs": [f.to_dict(), g.to_dict()]}
        else:
            fs = [random_funcspec(rng) for _ in range(3)]
            x = float(rng.uniform(-2.0, 2.0))
            grid = TGrid(0.15, 5.0, ratio=1.05, local_refine_depth=8)
            rep = check_multilinear_domination(fs, x, grid)
            row = {"index": i, "x": x, "fs": [f.to_dict() for f in fs]}
        row.update(lhs=rep.lhs, rhs=rep.rhs, ok=rep.ok, argmax_t=rep.argmax_t,
                   constant=rep.constant)
        rows.append(row)
        if not rep.ok:
            violations += 1
        if rep.lhs > 0:
            min_margin = min(min_margin, rep.rhs / rep.lhs)
    return {
        "m": m, "count": count, "seed": seed, "violations": violations,
        "min_margin": min_margin if math.isfinite(min_margin) else -1.0,
        "rows": rows,
    }


def _domination_csv(doc: dict) -> str:
    cols = ["index", "x", "eps", "q", "lhs", "rhs", "argmax_t", "constant", "ok"]
    present = [c for c in cols if all(c in r for r in doc["rows"])]
    lines = [",".join(present)]
    for r in doc["rows"]:
        lines.append(",".join(
            repr(r[c]) if isinstance(r[c], float) else str(r[c]) for c in present
        ))
    return "\n".join(lines) + "\n"


def cmd_dominate(cfg: RunConfig, args) -> int:
    doc = run_domination_suite(args.m, args.count, cfg.seed)
    out = cfg.ensure_out()
    stem = f"dominate_m{args.m}"
    _write(os.path.join(out, f"{stem}.json"), _dump_json(doc))
    _write(os.path.join(out, f"{stem}.csv"), _domination_csv(doc))
    save_domination_figure([r["lhs"] for r in doc["rows"]],
                           [r["rhs"] for r in doc["rows"]],
                           os.path.join(out, f"{stem}.svg"),
                           title=f"m={args.m} domination")
    sys.stdout.write(
        f"m={args.m} probes={doc['count']} violations={doc['violations']} "
        f"min_margin={doc['min_margin']!r}\n"
    )
    return 0 if doc["violations"] == 0 else 1


def cmd_norms(cfg: RunConfig, args) -> int:
    p = math.inf if args.p.lower() in ("inf", "infinity") else float(args.p)
    value = args.f[0].lp_norm(p) if len(args.f) == 1 else None
    if value is None:
        raise argparse.ArgumentTypeError("norms takes exactly one --f")
    sys.stdout.write(_dump_json(value if math.isfinite(value) else "inf"))
    return 0


def _add_common(sp) -> None:
    sp.add_argument("--config", help="JSON file with seed/out/level defaults")
    sp.add_argument("--seed", type=int, help=f"rng seed (default {DEFAULT_SEED})")
    sp.add_argument("--out", help=f"output directory (or ${OUT_ENV})")
    sp.add_argument("--level", type=int, help="quadrature refinement level")
    sp.add_argument("--slice-level", dest="slice_level", type=int,
                    help="slice refinement level for m >= 3")


def _add_funcargs(sp) -> None:
    sp.add_argument("--m", type=int, help="number of factors")
    sp.add_argument("--f", action="append", type=parse_funcspec,
                    help="function spec (repeatable)")
    sp.add_argument("--g", action="append", type=parse_funcspec,
                    help="more function specs, appended after --f")


def _add_gridargs(sp) -> None:
    sp.add_argument("--t-min", dest="t_min", type=float)
    sp.add_argument("--t-max", dest="t_max", type=float)
    sp.add_argument("--ratio", type=float, default=1.02)
    sp.add_argument("--refine-depth", dest="refine_depth", type=int, default=20)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spheremax",
        description="Multilinear spherical averages, maximal values, the "
                    "exponent region, and its counterexample families.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("avg", help="one spherical average")
    _add_common(sp)
    _add_funcargs(sp)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--x", type=float, required=True)
    sp.set_defaults(handler=cmd_avg)

    sp = sub.add_parser("max", help="certified maximal value over a scale grid")
    _add_common(sp)
    _add_funcargs(sp)
    sp.add_argument("--x", type=float, required=True)
    _add_gridargs(sp)
    sp.set_defaults(handler=cmd_max)

    sp = sub.add_parser("region", help="classify exponents or emit region figures")
    _add_common(sp)
    sp.add_argument("--m", type=int, help="number of exponents (checked against --q)")
    sp.add_argument("--q", type=parse_q, help="exponents, e.g. 1/3,1/3")
    sp.add_argument("--figure", choices=["m=2", "m=3"], help="emit geometry + SVG")
    sp.add_argument("--slice", help="slice value for the m=3 figure inset")
    sp.set_defaults(handler=cmd_region)

    sp = sub.add_parser("cex", help="run one scaling family or the lemma check")
    _add_common(sp)
    sp.add_argument("--family", required=True,
                    choices=["a", "b", "l2", "H", "Hi", "corner", "lemma"])
    sp.add_argument("--m", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--q", type=parse_q)
    sp.add_argument("--x", type=float)
    sp.add_argument("--deltas", type=parse_floats)
    sp.add_argument("--etas", type=parse_floats)
    sp.add_argument("--xs", type=parse_floats)
    sp.add_argument("--r1", type=float, default=1.0)
    sp.add_argument("--r2", type=float, default=1.0)
    sp.add_argument("--C", type=float, default=1.0)
    sp.add_argument("--samples", type=int, default=2000)
    sp.set_defaults(handler=cmd_cex)

    sp = sub.add_parser("dominate", help="seeded domination probe suite")
    _add_common(sp)
    sp.add_argument("--m", type=int, choices=[2, 3], required=True)
    sp.add_argument("--count", type=int, default=200)
    sp.set_defaults(handler=cmd_dominate)

    sp = sub.add_parser("norms", help="Lp norm of one function spec")
    _add_common(sp)
    sp.add_argument("--f", action="append", type=parse_funcspec, required=True)
    sp.add_argument("--p", required=True)
    sp.set_defaults(handler=cmd_norms)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        cfg = RunConfig.resolve(args)
        return args.handler(cfg, args)
    except argparse.ArgumentTypeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
