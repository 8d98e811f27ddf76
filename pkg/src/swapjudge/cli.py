"""Command-line surface: run, calibrate, replay, oracle, report, simulate-dataset.

Flags override config-file values; the config file is optional for
everything but keeps long experiments reproducible.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from .datasets import MixtureComponent, simulate_dataset, write_dataset
from .oracle import exact_consensus_distribution, exact_early_stopping_stats
from .report import ExperimentReport
from .runner import (
    ALL_POLICIES,
    RunConfig,
    calibrate_experiment,
    config_from_file,
    replay_experiment,
    run_experiment,
)


def _parse_policies(raw: str) -> tuple[str, ...]:
    names = tuple(p.strip().replace("-", "_") for p in raw.split(",") if p.strip())
    unknown = [p for p in names if p not in ALL_POLICIES]
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown policies {unknown}; choose from {', '.join(ALL_POLICIES)}"
        )
    return names


def _parse_triple(raw: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated numbers")
    return tuple(float(p) for p in parts)  # type: ignore[return-value]


def _parse_component(raw: str) -> MixtureComponent:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("component must be 'q1,q2,weight'")
    try:
        return MixtureComponent(q1=float(parts[0]), q2=float(parts[1]), weight=float(parts[2]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", help="JSONL dataset file")
    parser.add_argument("--config", help="JSON config file; flags win over it")
    parser.add_argument("--judge", choices=["sim", "http"], help="judge backend")
    parser.add_argument(
        "--policies",
        type=_parse_policies,
        help=f"comma-separated subset of: {', '.join(ALL_POLICIES)}",
    )
    parser.add_argument("--max-pairs", type=int, dest="n_max_pairs",
                        help="maximum paired repetitions per instance (default 12)")
    parser.add_argument("--temperature", type=float, help="judge temperature (default 0.1)")
    parser.add_argument("--calibration-fraction", type=float, dest="calibration_fraction",
                        help="fraction of instances used to fit the gap model (default 0.10)")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--tie-policy", choices=["zero", "half"], dest="tie_policy",
                        help="score a tie as 0 or 0.5 (default zero)")
    parser.add_argument("--concurrency", type=int, help="max instances processed in parallel")
    parser.add_argument("--out", dest="out_dir", help="output directory")
    parser.add_argument("--include-calibration", action="store_true", default=None,
                        dest="include_calibration",
                        help="include calibration instances in accuracy aggregates")
    parser.add_argument("--sim-confidence", type=_parse_triple, dest="sim_confidence",
                        metavar="K0,K1,SIGMA",
                        help="simulated confidence model: intercept,slope,noise")
    parser.add_argument("--http-url", dest="http_url", help="chat-completion endpoint URL")
    parser.add_argument("--http-model", dest="http_model", help="model name for the endpoint")
    parser.add_argument("--http-template", dest="http_template",
                        help="prompt template file with {context}/{candidate_1}/{candidate_2}")
    parser.add_argument("--auth-env", dest="auth_env",
                        help="environment variable holding the bearer token")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--resume", action="store_true", default=None,
                       help="continue from an existing transcript log")
    group.add_argument("--restart", action="store_true", default=None,
                       help="discard any existing transcript log")


def _build_config(args: argparse.Namespace) -> RunConfig:
    overrides = {
        key: getattr(args, key, None)
        for key in (
            "dataset", "out_dir", "judge", "policies", "n_max_pairs", "temperature",
            "calibration_fraction", "seed", "tie_policy", "concurrency",
            "include_calibration", "resume", "restart", "sim_confidence",
            "http_url", "http_model", "http_template", "auth_env",
        )
    }
    if args.config:
        return config_from_file(args.config, **overrides)
    present = {k: v for k, v in overrides.items() if v is not None}
    if "dataset" not in present or "out_dir" not in present:
        raise SystemExit("--dataset and --out are required (or provide --config)")
    return RunConfig(**present)


def _print_summary(report: ExperimentReport) -> None:
    print(f"instances: {report.n_instances} "
          f"(evaluation {report.n_evaluation}, calibration {report.n_calibration})")
    print(f"bias ratios: pc={report.pc_ratio:.3f} primacy={report.primacy_ratio:.3f} "
          f"recency={report.recency_ratio:.3f} ambiguous={report.ambiguous_ratio:.3f} "
          f"violation_rate={report.violation_rate:.4f}")
    for name in sorted(report.policies):
        m = report.policies[name]
        accuracy = "n/a" if m.accuracy is None else f"{m.accuracy:.4f}"
        normalized = "n/a" if m.normalized_accuracy is None else f"{m.normalized_accuracy:.4f}"
        print(f"{name:>18}: accuracy={accuracy} normalized={normalized} "
              f"avg_calls={m.avg_calls:.3f} (raw {m.avg_calls_raw:.3f}) "
              f"tie_rate={m.tie_rate:.3f}")


def _cmd_run(args: argparse.Namespace) -> int:
    report = run_experiment(_build_config(args))
    _print_summary(report)
    return 0


def _cmd_calibrate(args: argparse.Namespace) -> int:
    model = calibrate_experiment(_build_config(args))
    print(json.dumps(dataclasses.asdict(model), sort_keys=True, indent=2))
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    report = replay_experiment(_build_config(args))
    _print_summary(report)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    # Aggregation is replay plus persistence, with no new judge calls.
    report = replay_experiment(_build_config(args))
    _print_summary(report)
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    early = exact_early_stopping_stats(args.q1, args.q2, args.n_max_pairs)
    static = exact_consensus_distribution(args.q1, args.q2, args.n_max_pairs)
    document = {
        "q1": args.q1,
        "q2": args.q2,
        "n_max_pairs": args.n_max_pairs,
        "early_stopping": dataclasses.asdict(early),
        "static_consensus": dataclasses.asdict(static),
    }
    print(json.dumps(document, sort_keys=True, indent=2))
    return 0


def _cmd_simulate_dataset(args: argparse.Namespace) -> int:
    records = simulate_dataset(args.component, size=args.size, seed=args.seed)
    write_dataset(records, args.out)
    with_gold = sum(1 for r in records if r.instance.gold is not None)
    print(f"wrote {len(records)} records ({with_gold} with gold labels) to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swapjudge",
        description="Order-swapped repeated pairwise judging with adaptive stopping.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="collect transcripts and build the report")
    _add_run_flags(run)
    run.set_defaults(handler=_cmd_run)

    calibrate = commands.add_parser(
        "calibrate", help="collect only the calibration subset and fit the gap model"
    )
    _add_run_flags(calibrate)
    calibrate.set_defaults(handler=_cmd_calibrate)

    replay = commands.add_parser(
        "replay", help="re-run policies over recorded transcripts (no judge calls)"
    )
    _add_run_flags(replay)
    replay.set_defaults(handler=_cmd_replay)

    report = commands.add_parser(
        "report", help="rebuild the report and CSV tables from recorded artifacts"
    )
    _add_run_flags(report)
    report.set_defaults(handler=_cmd_report)

    oracle = commands.add_parser(
        "oracle", help="print exact policy statistics for a Bernoulli judge"
    )
    oracle.add_argument("--q1", type=float, required=True,
                        help="P(verdict = A | ordering AB)")
    oracle.add_argument("--q2", type=float, required=True,
                        help="P(verdict = A | ordering BA)")
    oracle.add_argument("--max-pairs", type=int, default=12, dest="n_max_pairs")
    oracle.set_defaults(handler=_cmd_oracle)

    simulate = commands.add_parser(
        "simulate-dataset", help="write a synthetic dataset from a (q1,q2) mixture"
    )
    simulate.add_argument("--component", type=_parse_component, action="append",
                          required=True, metavar="Q1,Q2,WEIGHT",
                          help="mixture component; repeat for more (weights sum to 1)")
    simulate.add_argument("--size", type=int, required=True)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--out", required=True, help="output JSONL path")
    simulate.set_defaults(handler=_cmd_simulate_dataset)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
