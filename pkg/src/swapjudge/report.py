"""Aggregation of per-instance policy results into an experiment report.

All policies are compared in replay mode over one shared set of full
transcripts, so differences between them reflect the policies alone, not
sampling noise. Accuracy is normalized by the full-budget consensus over
the same transcripts, which is the accuracy ceiling by construction.
"""

from __future__ import annotations

import csv
import hashlib
import json
from collections.abc import Mapping, Set
from dataclasses import dataclass
from pathlib import Path

from .calibration import GapModel
from .model import (
    BiasLabel,
    ConsensusOutcome,
    PairedTranscript,
    Winner,
    classify_bias,
    consensus_outcome,
    empirical_gap,
    observation_violated,
)
from .strategies import PolicyResult

GAP_BIN_EDGES = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
TIE_POLICIES = ("zero", "half")


def score_outcome(outcome: ConsensusOutcome, gold: Winner, tie_policy: str = "zero") -> float:
    """Accuracy contribution of one decided instance against its gold label."""
    if gold not in (Winner.A, Winner.B):
        raise ValueError("gold must be A or B")
    if tie_policy not in TIE_POLICIES:
        raise ValueError(f"tie_policy must be one of {TIE_POLICIES}")
    if outcome.winner is Winner.TIE:
        return 0.5 if tie_policy == "half" else 0.0
    return 1.0 if outcome.winner is gold else 0.0


@dataclass(frozen=True)
class PolicyMetrics:
    """Headline numbers for one policy over the evaluation set.

    avg_calls includes the amortized calibration cost where applicable;
    avg_calls_raw is the plain per-instance mean of issued calls.
    """

    policy: str
    accuracy: float | None
    normalized_accuracy: float | None
    avg_calls: float
    avg_calls_raw: float
    tie_rate: float


@dataclass(frozen=True)
class ExperimentReport:
    policies: dict[str, PolicyMetrics]
    consensus_accuracy: float | None
    pc_ratio: float
    primacy_ratio: float
    recency_ratio: float
    ambiguous_ratio: float
    violation_rate: float
    gap_histogram: dict[str, tuple[int, ...]]
    n_instances: int
    n_evaluation: int
    n_calibration: int
    n_scored: int
    tie_policy: str
    provenance: dict

    def to_dict(self) -> dict:
        return {
            "policies": {
                name: {
                    "accuracy": m.accuracy,
                    "normalized_accuracy": m.normalized_accuracy,
                    "avg_calls": m.avg_calls,
                    "avg_calls_raw": m.avg_calls_raw,
                    "tie_rate": m.tie_rate,
                }
                for name, m in self.policies.items()
            },
            "consensus_accuracy": self.consensus_accuracy,
            "bias": {
                "pc_ratio": self.pc_ratio,
                "primacy_ratio": self.primacy_ratio,
                "recency_ratio": self.recency_ratio,
                "ambiguous_ratio": self.ambiguous_ratio,
                "violation_rate": self.violation_rate,
            },
            "gap_histogram": {
                "bin_edges": list(GAP_BIN_EDGES),
                "counts": {label: list(counts) for label, counts in self.gap_histogram.items()},
            },
            "counts": {
                "instances": self.n_instances,
                "evaluation": self.n_evaluation,
                "calibration": self.n_calibration,
                "scored": self.n_scored,
            },
            "tie_policy": self.tie_policy,
            "provenance": dict(self.provenance),
        }


def report_json(report: ExperimentReport) -> str:
    """Canonical JSON serialization; equal reports serialize identically."""
    return json.dumps(report.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"


def report_digest(report: ExperimentReport) -> str:
    return hashlib.sha256(report_json(report).encode()).hexdigest()


def _gap_bin(gap: float) -> int:
    return min(len(GAP_BIN_EDGES) - 2, int(gap / 0.2))


def build_report(
    policy_results: Mapping[str, Mapping[str, PolicyResult]],
    transcripts: Mapping[str, PairedTranscript],
    gold: Mapping[str, Winner],
    *,
    calibration_ids: Set[str] = frozenset(),
    gap_model: GapModel | None = None,
    tie_policy: str = "zero",
    include_calibration: bool = False,
    provenance: Mapping[str, object] | None = None,
) -> ExperimentReport:
    """Fold per-instance results into the aggregate report.

    Every policy must cover exactly the instances that have transcripts.
    Calibration instances are excluded from per-policy aggregates unless
    ``include_calibration`` is set; their collection cost enters through
    the amortized term on the confidence-based policy. Dataset-level bias
    metrics always cover all instances.
    """
    if tie_policy not in TIE_POLICIES:
        raise ValueError(f"tie_policy must be one of {TIE_POLICIES}")
    all_ids = set(transcripts)
    for name, results in policy_results.items():
        if set(results) != all_ids:
            raise ValueError(
                f"policy {name!r} covers {len(results)} instances, "
                f"transcripts cover {len(all_ids)}: instance sets must match"
            )
    ordered_ids = sorted(all_ids)
    if include_calibration:
        eval_ids = ordered_ids
    else:
        eval_ids = [i for i in ordered_ids if i not in calibration_ids]
    if not eval_ids:
        raise ValueError("evaluation set is empty; nothing to aggregate")

    consensus = {i: consensus_outcome(transcripts[i]) for i in ordered_ids}
    scored_ids = [i for i in eval_ids if i in gold]

    def mean_score(outcomes: Mapping[str, ConsensusOutcome]) -> float | None:
        if not scored_ids:
            return None
        return sum(score_outcome(outcomes[i], gold[i], tie_policy) for i in scored_ids) / len(
            scored_ids
        )

    consensus_accuracy = mean_score(consensus)

    policies: dict[str, PolicyMetrics] = {}
    for name, results in policy_results.items():
        outcomes = {i: results[i].outcome for i in eval_ids}
        accuracy = mean_score(outcomes)
        if accuracy is None or consensus_accuracy in (None, 0.0):
            normalized = None
        else:
            normalized = accuracy / consensus_accuracy
        raw_calls = sum(outcomes[i].total_calls for i in eval_ids) / len(eval_ids)
        avg_calls = raw_calls
        if name == "confidence_based" and gap_model is not None:
            avg_calls = raw_calls + gap_model.training_call_cost / len(eval_ids)
        tie_rate = sum(1 for i in eval_ids if outcomes[i].winner is Winner.TIE) / len(eval_ids)
        policies[name] = PolicyMetrics(
            policy=name,
            accuracy=accuracy,
            normalized_accuracy=normalized,
            avg_calls=avg_calls,
            avg_calls_raw=raw_calls,
            tie_rate=tie_rate,
        )

    label_counts = {label: 0 for label in BiasLabel}
    histogram = {label.value: [0] * (len(GAP_BIN_EDGES) - 1) for label in BiasLabel}
    violations = 0
    for instance_id in ordered_ids:
        transcript = transcripts[instance_id]
        label = classify_bias(transcript)
        label_counts[label] += 1
        if observation_violated(transcript):
            violations += 1
        profile = empirical_gap(transcript)
        if profile.gap is not None:
            histogram[label.value][_gap_bin(profile.gap)] += 1

    total = len(ordered_ids)
    return ExperimentReport(
        policies=policies,
        consensus_accuracy=consensus_accuracy,
        pc_ratio=label_counts[BiasLabel.PC] / total,
        primacy_ratio=label_counts[BiasLabel.PRIMACY] / total,
        recency_ratio=label_counts[BiasLabel.RECENCY] / total,
        ambiguous_ratio=label_counts[BiasLabel.AMBIGUOUS] / total,
        violation_rate=violations / total,
        gap_histogram={label: tuple(counts) for label, counts in histogram.items()},
        n_instances=total,
        n_evaluation=len(eval_ids),
        n_calibration=len(calibration_ids & all_ids),
        n_scored=len(scored_ids),
        tie_policy=tie_policy,
        provenance=dict(provenance or {}),
    )


def write_report_files(report: ExperimentReport, out_dir: str | Path) -> None:
    """Persist the report as JSON plus flat CSV tables for plotting."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report_json(report))

    with open(out / "policies.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["policy", "accuracy", "normalized_accuracy", "avg_calls", "avg_calls_raw", "tie_rate"]
        )
        for name in sorted(report.policies):
            m = report.policies[name]
            writer.writerow(
                [name, m.accuracy, m.normalized_accuracy, m.avg_calls, m.avg_calls_raw, m.tie_rate]
            )

    with open(out / "bias.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["pc_ratio", "primacy_ratio", "recency_ratio", "ambiguous_ratio", "violation_rate"]
        )
        writer.writerow(
            [
                report.pc_ratio,
                report.primacy_ratio,
                report.recency_ratio,
                report.ambiguous_ratio,
                report.violation_rate,
            ]
        )

    with open(out / "gap_histogram.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["bias_label", "bin_low", "bin_high", "count"])
        for label in sorted(report.gap_histogram):
            counts = report.gap_histogram[label]
            for bin_index, count in enumerate(counts):
                writer.writerow(
                    [label, GAP_BIN_EDGES[bin_index], GAP_BIN_EDGES[bin_index + 1], count]
                )
