"""Command-line front end: file-in/file-out runs with reproducible outputs.

Every command is a pure function of its input files, flags and seed; a
manifest JSON (input hashes, flag hash, tool version, wall-clock runtime)
is written alongside the outputs.  Exit codes: 0 success, 2 input error,
3 certification failure, 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._fmt import fmt6, round6
from .concavize import concavize_all
from .errors import IncentivesError, ResourceCapError
from .generator import GeneratorConfig, synthesize_population
from .greedy import (solve, write_allocation_csv, write_curve_csv,
                     write_result_json)
from .imperfect import (StochasticInstance, simulate_sequential,
                        write_log_csv, write_report_json)
from .model import load_instance, save_instance
from .oracle import OracleConfig, exact_dp, exact_enumerate

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CERT_FAIL = 3
EXIT_CAP = 4

_ENUM_PREFERRED = 100_000  # below this assignment count, enumerate; else DP


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(path: Path, command: str, flags: dict,
                    input_paths: list[Path], output_paths: list[Path],
                    runtime: float) -> None:
    inputs = {p.name: _sha256(p) for p in input_paths}
    blob = json.dumps({"command": command, "flags": flags, "inputs": inputs},
                      sort_keys=True)
    manifest = {
        "command": command,
        "version": __version__,
        "flags": flags,
        "inputs": inputs,
        "config_hash": hashlib.sha256(blob.encode()).hexdigest(),
        "runtime_seconds": round(runtime, 3),
        "outputs": [p.name for p in output_paths],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")


def _cmd_generate(args) -> int:
    started = time.perf_counter()
    config = GeneratorConfig.from_json(args.config)
    instance = synthesize_population(config, args.seed)
    out = Path(args.out)
    save_instance(instance, out, args.format)
    _write_manifest(out.with_name(out.name + ".manifest.json"), "generate",
                    {"seed": args.seed, "out": out.name, "format": args.format},
                    [Path(args.config)], [out], time.perf_counter() - started)
    print(f"generated {instance.n_individuals} individuals, "
          f"{instance.n_alternatives} alternatives -> {out}")
    return EXIT_OK


def _cmd_solve(args) -> int:
    started = time.perf_counter()
    instance = load_instance(args.instance)
    profiles = concavize_all(instance)
    result = solve(profiles, args.budget)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [out_dir / "result.json", out_dir / "allocation.csv",
             out_dir / "curve.csv"]
    write_result_json(result, paths[0])
    write_allocation_csv(result, paths[1])
    write_curve_csv(result.curve, paths[2])
    _write_manifest(out_dir / "manifest.json", "solve",
                    {"budget": args.budget, "out": out_dir.name},
                    [Path(args.instance)], paths, time.perf_counter() - started)
    split_eff = "none" if result.split_eff is None else fmt6(result.split_eff)
    print(f"welfare_kg={fmt6(result.welfare)} "
          f"budget_used={fmt6(result.budget_used)} "
          f"gap_bound={fmt6(result.gap_bound)} split_eff={split_eff}")
    return EXIT_OK


def _cmd_curve(args) -> int:
    started = time.perf_counter()
    instance = load_instance(args.instance)
    profiles = concavize_all(instance)
    result = solve(profiles, args.max_budget)
    out = Path(args.out)
    write_curve_csv(result.curve, out)
    _write_manifest(out.with_name(out.name + ".manifest.json"), "curve",
                    {"max_budget": args.max_budget, "out": out.name},
                    [Path(args.instance)], [out], time.perf_counter() - started)
    print(f"{len(result.curve.spends)} breakpoints -> {out}")
    return EXIT_OK


def _cmd_certify(args) -> int:
    instance = load_instance(args.instance)
    profiles = concavize_all(instance)
    result = solve(profiles, args.budget)

    assignments = 1
    for ind in instance.individuals:
        assignments *= len(ind.alternatives)
        if assignments > _ENUM_PREFERRED:
            break
    if assignments <= _ENUM_PREFERRED:
        exact, _ = exact_enumerate(instance, args.budget)
    else:
        exact, _ = exact_dp(instance, args.budget, OracleConfig())

    gap = exact - result.welfare
    ok = gap <= result.gap_bound + 1e-9
    print(f"exact_welfare={fmt6(exact)} greedy_welfare={fmt6(result.welfare)} "
          f"gap={fmt6(gap)} bound={fmt6(result.gap_bound)} "
          f"{'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_CERT_FAIL


def _cmd_simulate(args) -> int:
    started = time.perf_counter()
    if args.mu <= 0:
        raise ValueError("mu must be positive")
    instance = load_instance(args.instance)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    paths = []
    reports = []
    perfect_welfare = []
    perfect_used = []
    for r in range(args.reps):
        stoch = StochasticInstance.draw(instance, args.mu, args.seed + r)
        report = simulate_sequential(stoch, args.budget)
        reports.append(report)
        report_path = out_dir / f"report_{r:03d}.json"
        log_path = out_dir / f"proposals_{r:03d}.csv"
        write_report_json(report, report_path)
        write_log_csv(report, log_path)
        paths += [report_path, log_path]
        reference = solve(concavize_all(stoch.realized_instance), args.budget)
        perfect_welfare.append(reference.welfare)
        perfect_used.append(reference.budget_used)

    def stats(values):
        arr = np.asarray(values, dtype=np.float64)
        return {"mean": round6(float(arr.mean())),
                "std": round6(float(arr.std()))}

    summary = {
        "budget": round6(args.budget),
        "mu": round6(args.mu),
        "seed": args.seed,
        "repetitions": args.reps,
        "imperfect": {
            "acceptance_rate": stats([r.acceptance_rate for r in reports]),
            "proposals": stats([r.proposals for r in reports]),
            "accepted": stats([r.acceptances for r in reports]),
            "budget_spent": stats([r.budget_spent for r in reports]),
            "welfare_kg": stats([r.welfare for r in reports]),
        },
        "perfect": {
            "welfare_kg": stats(perfect_welfare),
            "budget_used": stats(perfect_used),
        },
    }
    summary_path = out_dir / "summary.json"
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=1)
        fh.write("\n")
    paths.append(summary_path)
    _write_manifest(out_dir / "manifest.json", "simulate",
                    {"mu": args.mu, "seed": args.seed, "budget": args.budget,
                     "reps": args.reps, "out": out_dir.name},
                    [Path(args.instance)], paths, time.perf_counter() - started)
    print(f"acceptance_rate_mean={summary['imperfect']['acceptance_rate']['mean']} "
          f"welfare_mean={summary['imperfect']['welfare_kg']['mean']} "
          f"perfect_welfare_mean={summary['perfect']['welfare_kg']['mean']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="incentives",
        description="Personalized-incentive policies under a budget: "
                    "generate, solve, certify, simulate.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="synthesize a population instance")
    p.add_argument("--config", required=True, help="generator config JSON")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="instance file (.csv/.json)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("solve", help="greedy allocation with certificate")
    p.add_argument("instance")
    p.add_argument("--budget", type=float, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("curve", help="welfare curve breakpoints CSV")
    p.add_argument("instance")
    p.add_argument("--max-budget", type=float, required=True)
    p.add_argument("--out", required=True, help="curve CSV path")
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("certify", help="check the greedy bound against an exact solver")
    p.add_argument("instance")
    p.add_argument("--budget", type=float, required=True)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("simulate", help="sequential proposals under noisy utilities")
    p.add_argument("instance")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--budget", type=float, required=True)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (IncentivesError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
