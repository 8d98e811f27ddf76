"""Repetition policies over paired judge calls.

Four policies share one execution engine that pulls calls from an abstract
source, so a live judge and a recorded transcript drive byte-identical
decision paths. Rounds are sequential: round n+1 is never requested before
round n's pair is recorded.
"""

from __future__ import annotations

import enum
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

from .calibration import GapModel, confidence_gap
from .model import (
    ConsensusOutcome,
    JudgmentCall,
    JudgmentInstance,
    Ordering,
    PairedTranscript,
    StopReason,
    Verdict,
    Winner,
)

logger = logging.getLogger(__name__)


class PolicyKind(enum.Enum):
    SWAP_ONCE = "swap_once"
    STATIC_CONSENSUS = "static_consensus"
    EARLY_STOPPING = "early_stopping"
    CONFIDENCE_BASED = "confidence_based"


@dataclass(frozen=True)
class PolicySpec:
    """A policy choice plus its repetition cap and optional gap model."""

    kind: PolicyKind
    n_max_pairs: int = 12
    gap_model: GapModel | None = None

    def __post_init__(self) -> None:
        if self.n_max_pairs < 1:
            raise ValueError("n_max_pairs must be >= 1")
        if self.kind is PolicyKind.CONFIDENCE_BASED and self.gap_model is None:
            raise ValueError("the confidence-based policy requires a fitted gap model")


@dataclass(frozen=True)
class PolicyResult:
    """Outcome of running one policy on one instance."""

    outcome: ConsensusOutcome
    transcript: PairedTranscript
    budget_pairs: int | None = None
    estimated_gap: float | None = None

    def __post_init__(self) -> None:
        if self.budget_pairs is not None and not (
            self.outcome.pairs_used <= self.budget_pairs
        ):
            raise ValueError("pairs_used exceeds the computed budget")


def budget_pairs(estimated_gap: float, n_max_pairs: int) -> int:
    """Paired-repetition budget for an estimated probability gap.

    floor((1 - g) * n_max_pairs) + 1, capped at n_max_pairs. A gap of 1
    trusts the first pair alone; a gap of 0 degenerates to the full cap.
    """
    if not 0.0 <= estimated_gap <= 1.0:
        raise ValueError("estimated_gap must lie in [0, 1]")
    if n_max_pairs < 1:
        raise ValueError("n_max_pairs must be >= 1")
    return min(n_max_pairs, math.floor((1.0 - estimated_gap) * n_max_pairs) + 1)


# A call source yields the judgment for (ordering, repetition_index).
CallSource = Callable[[Ordering, int], JudgmentCall]


class TranscriptExhausted(ValueError):
    """A replay demanded more repetitions than were recorded."""


def _live_source(judge, instance: JudgmentInstance) -> CallSource:
    def fetch(ordering: Ordering, repetition_index: int) -> JudgmentCall:
        return judge.judge(instance, ordering, repetition_index)

    return fetch


def _replay_source(transcript: PairedTranscript) -> CallSource:
    def fetch(ordering: Ordering, repetition_index: int) -> JudgmentCall:
        if repetition_index > transcript.n_pairs:
            raise TranscriptExhausted(
                f"transcript {transcript.instance_id!r} holds {transcript.n_pairs} "
                f"pairs but repetition {repetition_index} was requested"
            )
        vector = transcript.vec_ab if ordering is Ordering.AB else transcript.vec_ba
        confidences = transcript.conf_ab if ordering is Ordering.AB else transcript.conf_ba
        return JudgmentCall(
            instance_id=transcript.instance_id,
            ordering=ordering,
            repetition_index=repetition_index,
            verdict=vector.verdicts[repetition_index - 1],
            confidence=None if confidences is None else confidences[repetition_index - 1],
        )

    return fetch


class _Tally:
    """Running per-ordering call record with incremental majority counts."""

    def __init__(self, instance_id: str) -> None:
        self.instance_id = instance_id
        self.calls_ab: list[JudgmentCall] = []
        self.calls_ba: list[JudgmentCall] = []
        self.count_a = 0
        self.count_b = 0

    def add_round(self, source: CallSource, repetition_index: int) -> None:
        for ordering, bucket in ((Ordering.AB, self.calls_ab), (Ordering.BA, self.calls_ba)):
            call = source(ordering, repetition_index)
            bucket.append(call)
            if call.verdict is Verdict.A:
                self.count_a += 1
            elif call.verdict is Verdict.B:
                self.count_b += 1

    @property
    def leader(self) -> Winner:
        if self.count_a > self.count_b:
            return Winner.A
        if self.count_b > self.count_a:
            return Winner.B
        return Winner.TIE

    def transcript(self) -> PairedTranscript:
        return PairedTranscript.from_calls(self.instance_id, self.calls_ab + self.calls_ba)

    def outcome(self, stop_reason: StopReason) -> ConsensusOutcome:
        pairs = len(self.calls_ab)
        return ConsensusOutcome(
            winner=self.leader,
            pairs_used=pairs,
            total_calls=2 * pairs,
            stop_reason=stop_reason,
        )


def _run_swap_once(source: CallSource, instance_id: str) -> PolicyResult:
    tally = _Tally(instance_id)
    tally.add_round(source, 1)
    return PolicyResult(
        outcome=tally.outcome(StopReason.SINGLE_SHOT), transcript=tally.transcript()
    )


def _run_static(source: CallSource, instance_id: str, n_max_pairs: int) -> PolicyResult:
    tally = _Tally(instance_id)
    for n in range(1, n_max_pairs + 1):
        tally.add_round(source, n)
    return PolicyResult(
        outcome=tally.outcome(StopReason.BUDGET_EXHAUSTED), transcript=tally.transcript()
    )


def _stop_on_majority(tally: _Tally, source: CallSource, start: int, cap: int) -> ConsensusOutcome:
    """Add rounds start..cap, stopping at the first conclusive majority."""
    for n in range(start, cap + 1):
        tally.add_round(source, n)
        if tally.leader is not Winner.TIE:
            return tally.outcome(StopReason.CONCLUSIVE_MAJORITY)
    return tally.outcome(StopReason.BUDGET_EXHAUSTED)


def _run_early_stopping(source: CallSource, instance_id: str, n_max_pairs: int) -> PolicyResult:
    tally = _Tally(instance_id)
    outcome = _stop_on_majority(tally, source, start=1, cap=n_max_pairs)
    return PolicyResult(outcome=outcome, transcript=tally.transcript())


def _run_confidence_based(
    source: CallSource, instance_id: str, n_max_pairs: int, gap_model: GapModel
) -> PolicyResult:
    tally = _Tally(instance_id)
    tally.add_round(source, 1)
    gap = confidence_gap(tally.calls_ab[0], tally.calls_ba[0])
    if gap is None:
        logger.info(
            "instance %s: first pair lacks confidences, using the full budget",
            instance_id,
        )
        estimated = None
        budget = n_max_pairs
    else:
        estimated = gap_model.predict(gap)
        budget = budget_pairs(estimated, n_max_pairs)
    if tally.leader is not Winner.TIE:
        outcome = tally.outcome(StopReason.CONCLUSIVE_MAJORITY)
    else:
        outcome = _stop_on_majority(tally, source, start=2, cap=budget)
    return PolicyResult(
        outcome=outcome,
        transcript=tally.transcript(),
        budget_pairs=budget,
        estimated_gap=estimated,
    )


def _run_with_source(spec: PolicySpec, source: CallSource, instance_id: str) -> PolicyResult:
    if spec.kind is PolicyKind.SWAP_ONCE:
        return _run_swap_once(source, instance_id)
    if spec.kind is PolicyKind.STATIC_CONSENSUS:
        return _run_static(source, instance_id, spec.n_max_pairs)
    if spec.kind is PolicyKind.EARLY_STOPPING:
        return _run_early_stopping(source, instance_id, spec.n_max_pairs)
    assert spec.gap_model is not None
    return _run_confidence_based(source, instance_id, spec.n_max_pairs, spec.gap_model)


def run_policy(spec: PolicySpec, judge, instance: JudgmentInstance) -> PolicyResult:
    """Execute a policy live against a judge."""
    return _run_with_source(spec, _live_source(judge, instance), instance.id)


def run_swap_once(judge, instance: JudgmentInstance) -> PolicyResult:
    """One paired repetition; disagreement is a tie."""
    return run_policy(PolicySpec(PolicyKind.SWAP_ONCE), judge, instance)


def run_static_consensus(
    judge, instance: JudgmentInstance, n_max_pairs: int = 12
) -> PolicyResult:
    """Always the full budget: majority over 2 * n_max_pairs calls."""
    return run_policy(
        PolicySpec(PolicyKind.STATIC_CONSENSUS, n_max_pairs=n_max_pairs), judge, instance
    )


def run_early_stopping(
    judge, instance: JudgmentInstance, n_max_pairs: int = 12
) -> PolicyResult:
    """Repeat in pairs until the running majority is conclusive."""
    return run_policy(
        PolicySpec(PolicyKind.EARLY_STOPPING, n_max_pairs=n_max_pairs), judge, instance
    )


def run_confidence_based(
    judge, instance: JudgmentInstance, gap_model: GapModel, n_max_pairs: int = 12
) -> PolicyResult:
    """Early stopping under a budget derived from the first pair's confidences."""
    return run_policy(
        PolicySpec(PolicyKind.CONFIDENCE_BASED, n_max_pairs=n_max_pairs, gap_model=gap_model),
        judge,
        instance,
    )


def replay_policy(spec: PolicySpec, full: PairedTranscript) -> PolicyResult:
    """Re-run a policy over a recorded transcript without judge calls.

    Consumes recorded verdicts in (repetition, ordering) order through the
    same engine as live execution, so the result is identical to the live
    run that produced the transcript. Raises TranscriptExhausted if the
    recording is shorter than the policy demands.
    """
    return _run_with_source(spec, _replay_source(full), full.instance_id)
