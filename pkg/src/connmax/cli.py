"""Command line front end: run scenarios, validate configs, benchmark."""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .sim import (
    Scenario,
    benchmark_scenario,
    check_scenario,
    load_scenario,
    run,
)


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    fields = dict(scenario.__dict__)
    if args.mode is not None:
        fields["mode"] = args.mode
    if getattr(args, "seed", None) is not None:
        fields["seed"] = args.seed
    if getattr(args, "steps", None) is not None:
        fields["steps"] = args.steps
    return Scenario(**fields)


def _cmd_run(args) -> int:
    scenario = load_scenario(args.config)
    scenario = _apply_overrides(scenario, args)
    result = run(scenario, out_dir=args.out, paired_centralized=args.paired_centralized)
    s = result.summary
    print(
        f"{scenario.mode}: lambda2 {s['lambda2_initial']:.6g} -> "
        f"{s['lambda2_final']:.6g} (x{s['growth_ratio']:.3g}) in {s['steps']} steps, "
        f"{s['wall_time_s']:.1f}s"
    )
    if "final_ratio_vs_centralized" in s:
        print(
            f"paired centralized final {s['centralized_lambda2_final']:.6g}, "
            f"ratio {s['final_ratio_vs_centralized']:.4g}"
        )
    if args.out:
        print(f"artifacts in {args.out}")
    return 0


def _cmd_check(args) -> int:
    scenario = load_scenario(args.config)
    if args.mode is not None:
        scenario = _apply_overrides(scenario, args)
    report = check_scenario(scenario)
    for line in report.messages:
        print(line)
    print("ok" if report.ok else "rejected")
    return 0 if report.ok else 2


def _histogram(values, edges) -> list[str]:
    lines = []
    counts, _ = np.histogram(values, bins=edges)
    width = max(counts.max(), 1)
    for lo, hi, count in zip(edges[:-1], edges[1:], counts):
        bar = "#" * int(round(30 * count / width))
        lines.append(f"  [{lo:4.2f}, {hi:4.2f}) {count:3d} {bar}")
    return lines


def _cmd_bench(args) -> int:
    if args.config:
        base = load_scenario(args.config)
    else:
        base = benchmark_scenario(mode="distributed", steps=args.steps, n_init=3)
    ratios = []
    t0 = time.perf_counter()
    for r in range(args.runs):
        fields = dict(base.__dict__)
        fields["seed"] = base.seed + r
        fields["mode"] = "distributed"
        scenario = Scenario(**fields)
        result = run(scenario, paired_centralized=True)
        ratio = result.summary["final_ratio_vs_centralized"]
        ratios.append(ratio)
        print(
            f"seed {scenario.seed}: distributed {result.summary['lambda2_final']:.6g} "
            f"centralized {result.summary['centralized_lambda2_final']:.6g} "
            f"ratio {ratio:.4g}"
        )
    print(f"\n{args.runs} paired runs in {time.perf_counter() - t0:.1f}s")
    print("final-connectivity ratio (distributed / centralized):")
    for line in _histogram(np.array(ratios), np.linspace(0.0, 1.2, 13)):
        print(line)
    if args.out:
        from pathlib import Path

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "ratios.json", "w") as fh:
            json.dump({"ratios": ratios}, fh, indent=2)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="connmax",
        description="Connectivity-maximizing motion planning for agent fleets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario and write artifacts")
    p_run.add_argument("--config", required=True, help="scenario file (YAML)")
    p_run.add_argument("--mode", default=None, help="override the scenario mode")
    p_run.add_argument("--out", default=None, help="artifact directory")
    p_run.add_argument("--seed", type=int, default=None, help="override the seed")
    p_run.add_argument("--steps", type=int, default=None, help="override step count")
    p_run.add_argument(
        "--paired-centralized",
        action="store_true",
        help="also run the centralized planner from the same start and report the ratio",
    )
    p_run.set_defaults(func=_cmd_run)

    p_check = sub.add_parser("check", help="validate a scenario without running it")
    p_check.add_argument("--config", required=True)
    p_check.add_argument("--mode", default=None)
    p_check.set_defaults(func=_cmd_check)

    p_bench = sub.add_parser(
        "bench", help="paired distributed vs centralized runs over consecutive seeds"
    )
    p_bench.add_argument("--runs", type=int, required=True)
    p_bench.add_argument("--config", default=None)
    p_bench.add_argument("--steps", type=int, default=100)
    p_bench.add_argument("--out", default=None)
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
