"""Command-line entry point: every experiment as a subcommand.

Reports are JSON (stable key order, atomic write) and echo enough of the
configuration to re-run them; exact rationals are serialized as "p/q"
strings. Exit codes: 0 success, 1 a verification check failed, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from .density import minimal_constant, verify_constant
from .divisor import (
    DivisorInstance,
    kloosterman_sum,
    parse_instance_file,
    weil_check,
    weil_scan,
)
from .exppairs import ExactPair, InadmissiblePair, apply_word, search_optimal
from .experiments import (
    acceptance_divisor_instances,
    divisor_gap_report,
    mvt_matrix,
    variance_grid,
)
from .gaussian import GaussianInt
from .hecke import (
    HeckeCoefficientVector,
    hecke_spectrum,
    hecke_sum,
    prime_sum_decay_experiment,
    save_spectrum,
    smooth_sum_experiment,
)
from .sectors import sector_count_bound_check
from .sieve import (
    brute_force_gaussian_primes,
    gaussian_prime_norms,
    prime_ideal_count_estimate,
    write_prime_cache,
)
from .weights import AlmostPrimeConfig, almost_prime_weights

SUBCOMMANDS = (
    "sieve",
    "sectors",
    "variance",
    "hecke-sum",
    "spectrum",
    "mvt-check",
    "exppair",
    "density",
    "divisor-check",
    "kloosterman",
    "decay",
)


class ConfigError(ValueError):
    """Aggregated configuration validation failures."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


@dataclass
class RunConfig:
    subcommand: str
    params: dict[str, Any] = field(default_factory=dict)
    output: Optional[str] = None
    seed: int = 0
    threads: Optional[int] = None


def parse_rational(text: str) -> Fraction:
    """Exact rational from a "p/q" or integer string."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational {text!r}: {exc}") from None


_KNOWN_KEYS = {"subcommand", "params", "output", "seed", "threads"}


def load_config(path: str | Path) -> RunConfig:
    """Validated run configuration; every violation is reported at once."""
    problems: list[str] = []
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError([f"cannot parse {path}: {exc}"]) from None
    if not isinstance(raw, dict):
        raise ConfigError(["config root must be a JSON object"])
    for key in raw:
        if key not in _KNOWN_KEYS:
            problems.append(f"unknown key {key!r}")
    sub = raw.get("subcommand")
    if sub not in SUBCOMMANDS:
        problems.append(f"subcommand must be one of {SUBCOMMANDS}, got {sub!r}")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        problems.append("params must be an object")
        params = {}
    clean: dict[str, Any] = {}
    for key, val in params.items():
        if isinstance(val, str) and "/" in val:
            try:
                clean[key] = parse_rational(val)
            except ValueError as exc:
                problems.append(str(exc))
        else:
            clean[key] = val
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or not (0 <= seed < 1 << 64):
        problems.append("seed must be a 64-bit unsigned integer")
        seed = 0
    threads = raw.get("threads")
    if threads is not None and (not isinstance(threads, int) or threads < 1):
        problems.append("threads must be a positive integer")
        threads = None
    if problems:
        raise ConfigError(problems)
    return RunConfig(sub, clean, raw.get("output"), seed, threads)


def write_report(report: dict, path: str | Path) -> None:
    """Atomic JSON write (temp file + rename), stable key order."""
    path = Path(path)
    payload = json.dumps(report, sort_keys=True, indent=2, default=str) + "\n"
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _finish(args, results: dict, checks: list[dict], t0: float) -> int:
    report = {
        "config": {
            k: v
            for k, v in sorted(vars(args).items())
            if k not in ("func",) and v is not None
        },
        "tool_version": __version__,
        "results": results,
        "checks": checks,
        "wall_time_ms": (time.perf_counter() - t0) * 1000,
    }
    out = getattr(args, "report", None)
    if out:
        write_report(report, out)
    else:
        json.dump(report, sys.stdout, sort_keys=True, indent=2, default=str)
        sys.stdout.write("\n")
    return 0 if all(c.get("passed", True) for c in checks) else 1


def _default_threads(args) -> Optional[int]:
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get("SECTORLAB_THREADS")
    return int(env) if env else None


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_sieve(args) -> int:
    t0 = time.perf_counter()
    arr = gaussian_prime_norms(args.lo, args.hi)
    results: dict[str, Any] = {"count": int(len(arr)), "lo": args.lo, "hi": args.hi}
    checks = []
    if args.out:
        write_prime_cache(args.out, args.lo, args.hi, arr)
        results["cache"] = args.out
    if args.check_brute_force:
        oracle = brute_force_gaussian_primes(args.hi)
        oracle = oracle[oracle["norm"] >= args.lo]
        same = len(oracle) == len(arr) and bool(
            np.all(oracle["re"] == arr["re"]) and np.all(oracle["im"] == arr["im"])
        )
        checks.append({"name": "matches brute force", "passed": same})
        est = prime_ideal_count_estimate(args.hi)
        rel = abs(len(arr) - est) / est
        results["ideal_count_estimate"] = est
        results["ideal_count_relative_gap"] = rel
        checks.append({"name": "ideal count within 2%", "passed": rel <= 0.02})
    return _finish(args, results, checks, t0)


def _cmd_sectors(args) -> int:
    t0 = time.perf_counter()
    n = GaussianInt(args.re, args.im)
    rows = []
    vs = range(1, args.sweep + 1) if args.sweep else [args.v]
    for v in vs:
        count, ratio = sector_count_bound_check(n, args.norm_bound, float(v))
        rows.append({"v": v, "count": count, "ratio": ratio})
    worst = max((r["ratio"] for r in rows), default=0.0)
    checks = []
    if args.ratio_bound is not None:
        checks.append(
            {"name": f"max ratio <= {args.ratio_bound}", "passed": worst <= args.ratio_bound}
        )
    return _finish(args, {"rows": rows, "max_ratio": worst}, checks, t0)


def _cmd_variance(args) -> int:
    t0 = time.perf_counter()
    cells = variance_grid(args.x, expectation_target=args.expect)
    checks = []
    if len(cells) >= 2:
        cov = [c["covered_fraction"] for c in cells]
        ratio = [c["normalized_ratio"] for c in cells]
        checks.append(
            {"name": "covered fraction non-decreasing", "passed": all(a <= b + 1e-12 for a, b in zip(cov, cov[1:]))}
        )
        checks.append(
            {"name": "normalized ratio non-increasing", "passed": all(a >= b - 1e-12 for a, b in zip(ratio, ratio[1:]))}
        )
    if args.csv:
        import csv

        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(cells[0].keys()))
            writer.writeheader()
            writer.writerows(cells)
    return _finish(args, {"cells": cells}, checks, t0)


def _build_coeffs(args) -> HeckeCoefficientVector:
    cfg = AlmostPrimeConfig(k=2, x=args.x, factor_windows=((args.window_lo, args.window_hi),))
    pairs = almost_prime_weights(cfg)
    entries = {p.value: complex(float(w)) for p, w in pairs}
    return HeckeCoefficientVector(entries, (args.x, 2 * args.x))


def _cmd_hecke_sum(args) -> int:
    t0 = time.perf_counter()
    if args.experiment:
        pair = ExactPair(parse_rational(args.kappa), parse_rational(args.lam))
        rows = smooth_sum_experiment(
            args.x, 2 * args.x, args.m, pair.as_floats()
        )
        return _finish(args, {"rows": rows}, [], t0)
    coeffs = _build_coeffs(args)
    vals = {str(m): repr(hecke_sum(coeffs, m)) for m in args.m}
    return _finish(args, {"values": vals, "support": len(coeffs)}, [], t0)


def _cmd_spectrum(args) -> int:
    t0 = time.perf_counter()
    coeffs = _build_coeffs(args)
    spec = hecke_spectrum(
        coeffs, args.m_lo, args.m_hi, method=args.method, bins_log2=args.bins_log2
    )
    results = {
        "m_lo": spec.m_lo,
        "m_hi": spec.m_hi,
        "method": spec.method,
        "bin_error_bound": spec.bin_error_bound,
        "max_abs": float(np.max(np.abs(spec.values))),
    }
    if args.out:
        save_spectrum(args.out, spec)
        results["dump"] = args.out
    return _finish(args, results, [], t0)


def _cmd_mvt_check(args) -> int:
    t0 = time.perf_counter()
    rows = mvt_matrix(args.instances, args.seed, args.n_max, args.t_max)
    all_hold = all(r["chain_holds"] for r in rows)
    worst_r1 = max(r["ratio_r1"] for r in rows)
    checks = [{"name": "lhs <= r2 on every instance", "passed": all_hold}]
    results = {"instances": len(rows), "max_ratio_r1": worst_r1}
    if args.full:
        results["rows"] = rows
    return _finish(args, results, checks, t0)


def _cmd_exppair(args) -> int:
    t0 = time.perf_counter()
    if args.word is not None:
        try:
            pair = apply_word(args.word)
        except (InadmissiblePair, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(f"{pair.kappa} {pair.lam}")
        print(f"{float(pair.kappa):.10f} {float(pair.lam):.10f}")
        if args.report:
            return _finish(
                args,
                {
                    "word": args.word,
                    "kappa": str(pair.kappa),
                    "lambda": str(pair.lam),
                    "kappa_float": float(pair.kappa),
                    "lambda_float": float(pair.lam),
                },
                [],
                t0,
            )
        return 0
    if args.search:
        objectives = {
            "kappa": lambda p: p.kappa,
            "lambda": lambda p: p.lam,
            "kappa-plus-lambda": lambda p: p.kappa + p.lam,
            "neg-sigma-lower": lambda p: -(1 - 3 * p.kappa - p.lam) / 2,
        }
        if args.objective not in objectives:
            print(f"error: unknown objective {args.objective!r}; "
                  f"choose from {sorted(objectives)}", file=sys.stderr)
            return 2
        word, pair = search_optimal(objectives[args.objective], args.depth)
        print(f"{word or '(empty)'} -> {pair.kappa} {pair.lam}")
        return _finish(
            args,
            {"word": word, "kappa": str(pair.kappa), "lambda": str(pair.lam)},
            [],
            t0,
        ) if args.report else 0
    print("error: need --word or --search", file=sys.stderr)
    return 2


def _cmd_density(args) -> int:
    t0 = time.perf_counter()
    if args.action == "verify":
        modes = ["rounded", "exact"] if args.pairs == "both" else [args.pairs]
        reports = [verify_constant(parse_rational(args.C), args.mode, m) for m in modes]
        results = {"reports": [r.as_dict() for r in reports]}
        checks = [
            {"name": f"feasible ({r.pairs} pairs)", "passed": r.feasible} for r in reports
        ]
        if not args.json and not args.report:
            for r in reports:
                verdict = "feasible" if r.feasible else "infeasible"
                print(f"C = {r.C} mode={r.mode} pairs={r.pairs}: {verdict}")
                for c in r.checks:
                    mark = "ok" if c.passed else "FAIL"
                    print(f"  [{mark}] {c.name}: {c.lhs} {c.relation} {c.rhs}")
            return 0 if all(r.feasible for r in reports) else 1
        return _finish(args, results, checks, t0)
    if args.action == "minimal":
        c_star = minimal_constant(args.mode, parse_rational(args.tol))
        print(f"{c_star} ~= {float(c_star):.8f}")
        if args.report:
            return _finish(args, {"minimal_C": str(c_star), "float": float(c_star)}, [], t0)
        return 0
    print("error: density action must be verify or minimal", file=sys.stderr)
    return 2


def _cmd_divisor_check(args) -> int:
    t0 = time.perf_counter()
    if args.instance:
        instances = [parse_instance_file(args.instance)]
    elif args.bundled:
        instances = acceptance_divisor_instances(args.x)
    else:
        instances = [DivisorInstance.symmetric(args.x, args.k, args.T1, args.T2)]
    rows = [divisor_gap_report(inst, threads=_default_threads(args)) for inst in instances]
    checks = []
    for r in rows:
        if r["main_term"] != 0:
            checks.append(
                {
                    "name": f"gap <= {args.tol} at (T1,T2)=({r['T1']},{r['T2']})",
                    "passed": r["relative_gap"] <= args.tol,
                }
            )
    return _finish(args, {"rows": rows}, checks, t0)


def _cmd_kloosterman(args) -> int:
    t0 = time.perf_counter()
    if args.scan:
        ok, worst = weil_scan(args.c_max, args.ab_max)
        checks = [{"name": "Weil bound holds on scan", "passed": ok}]
        return _finish(args, {"worst_ratio": worst, "c_max": args.c_max, "ab_max": args.ab_max}, checks, t0)
    s = kloosterman_sum(args.a, args.b, args.c)
    ok = weil_check(args.a, args.b, args.c)
    results = {"sum_re": s.real, "sum_im": s.imag, "abs": abs(s)}
    checks = [{"name": "Weil bound", "passed": ok}]
    return _finish(args, results, checks, t0)


def _cmd_decay(args) -> int:
    t0 = time.perf_counter()
    rows = prime_sum_decay_experiment(args.n_grid, args.m)
    if args.csv:
        import csv

        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
    return _finish(args, {"rows": rows}, [], t0)


# ---------------------------------------------------------------------------
# parser


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sectorlab",
        description="Gaussian almost primes in narrow sectors: desk-scale experiments",
    )
    ap.add_argument("--config", help="JSON run configuration (overrides subcommand)")
    sub = ap.add_subparsers(dest="subcommand")

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=fn)
        p.add_argument("--report", help="write the JSON report here")
        p.add_argument("--threads", type=int, help="thread budget")
        return p

    p = add("sieve", _cmd_sieve, help="Gaussian primes by norm")
    p.add_argument("--lo", type=int, default=2)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--out", help="binary cache path")
    p.add_argument("--check-brute-force", action="store_true")

    p = add("sectors", _cmd_sectors, help="sector count bound check")
    p.add_argument("--re", type=int, required=True)
    p.add_argument("--im", type=int, required=True)
    p.add_argument("--norm-bound", type=int, required=True)
    p.add_argument("--v", type=float, default=10.0)
    p.add_argument("--sweep", type=int, help="sweep v = 1..SWEEP")
    p.add_argument("--ratio-bound", type=float)

    p = add("variance", _cmd_variance, help="sector variance grid")
    p.add_argument("--x", type=int, action="append", required=True)
    p.add_argument("--expect", type=float, default=6.0)
    p.add_argument("--csv")

    p = add("hecke-sum", _cmd_hecke_sum, help="character sums and bound tables")
    p.add_argument("--x", type=int, default=10_000)
    p.add_argument("--window-lo", type=int, default=5)
    p.add_argument("--window-hi", type=int, default=100)
    p.add_argument("--m", type=_int_list, default=[1])
    p.add_argument("--experiment", action="store_true", help="smooth-sum bound table")
    p.add_argument("--kappa", default="1/20")
    p.add_argument("--lam", default="33/40")

    p = add("spectrum", _cmd_spectrum, help="character-sum spectrum")
    p.add_argument("--x", type=int, default=10_000)
    p.add_argument("--window-lo", type=int, default=5)
    p.add_argument("--window-hi", type=int, default=100)
    p.add_argument("--m-lo", type=int, default=-1000)
    p.add_argument("--m-hi", type=int, default=1000)
    p.add_argument("--method", choices=("direct", "binned"), default="direct")
    p.add_argument("--bins-log2", type=int, default=22)
    p.add_argument("--out", help="spectrum dump path")

    p = add("mvt-check", _cmd_mvt_check, help="randomized mean-value chain checks")
    p.add_argument("--instances", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--n-max", type=int, default=500)
    p.add_argument("--t-max", type=int, default=200)
    p.add_argument("--full", action="store_true", help="include per-instance rows")

    p = add("exppair", _cmd_exppair, help="exponent-pair calculus")
    p.add_argument("--word")
    p.add_argument("--search", action="store_true")
    p.add_argument("--objective", default="kappa")
    p.add_argument("--depth", type=int, default=12)

    p = add("density", _cmd_density, help="feasibility of order constants")
    p.add_argument("action", choices=("verify", "minimal"))
    p.add_argument("--C", default="15.1")
    p.add_argument("--mode", choices=("e2", "e3"), required=True)
    p.add_argument("--pairs", choices=("rounded", "exact", "both"), default="rounded")
    p.add_argument("--tol", default="1/1000000")
    p.add_argument("--json", action="store_true")

    p = add("divisor-check", _cmd_divisor_check, help="divisor correlation vs main term")
    p.add_argument("--x", type=int, default=3000)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--T1", type=int, default=1)
    p.add_argument("--T2", type=int, default=1)
    p.add_argument("--instance", help="instance file path")
    p.add_argument("--bundled", action="store_true", help="run the bundled set")
    p.add_argument("--tol", type=float, default=0.15)

    p = add("kloosterman", _cmd_kloosterman, help="Kloosterman sums and the Weil bound")
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--c", type=int, default=5)
    p.add_argument("--scan", action="store_true")
    p.add_argument("--c-max", type=int, default=2000)
    p.add_argument("--ab-max", type=int, default=20)

    p = add("decay", _cmd_decay, help="prime sum decay tables")
    p.add_argument("--n-grid", type=_int_list, default=[1000, 10_000, 100_000])
    p.add_argument("--m", type=_int_list, default=[1000])
    p.add_argument("--csv")

    return ap


def _args_from_config(cfg: RunConfig, ap: argparse.ArgumentParser):
    argv = [cfg.subcommand]
    for key, val in cfg.params.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(val, bool):
            if val:
                argv.append(flag)
        elif isinstance(val, list):
            argv.extend([flag, ",".join(str(v) for v in val)])
        else:
            argv.extend([flag, str(val)])
    if cfg.output:
        argv.extend(["--report", cfg.output])
    if cfg.threads:
        argv.extend(["--threads", str(cfg.threads)])
    return ap.parse_args(argv)


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        try:
            cfg = load_config(args.config)
        except ConfigError as exc:
            for p in exc.problems:
                print(f"config error: {p}", file=sys.stderr)
            return 2
        args = _args_from_config(cfg, ap)
    if not getattr(args, "subcommand", None):
        ap.print_help()
        return 2
    try:
        return args.func(args)
    except (ValueError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
