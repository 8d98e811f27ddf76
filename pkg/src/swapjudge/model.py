"""Core domain types and the pure decision functions for paired judging.

Verdicts are always stored in candidate space (A/B), never prompt-position
space; which prompt slot a verdict favoured is derived from the ordering.
That makes consensus and bias metrics independent of presentation order by
construction. All types are immutable and every function here is pure.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Sequence
from dataclasses import dataclass


class Ordering(enum.Enum):
    """Which candidate occupies prompt position 1."""

    AB = "ab"
    BA = "ba"

    def swapped(self) -> "Ordering":
        return Ordering.BA if self is Ordering.AB else Ordering.AB


class Verdict(enum.Enum):
    """A single judge outcome, in candidate space.

    INDETERMINATE marks a response the parser could not map to either
    candidate; it never comes out of the simulated judge.
    """

    A = "a"
    B = "b"
    INDETERMINATE = "indeterminate"


class Winner(enum.Enum):
    """Aggregate decision for an instance."""

    A = "a"
    B = "b"
    TIE = "tie"


class StopReason(enum.Enum):
    CONCLUSIVE_MAJORITY = "conclusive_majority"
    BUDGET_EXHAUSTED = "budget_exhausted"
    SINGLE_SHOT = "single_shot"


class BiasLabel(enum.Enum):
    """Per-instance bias direction at the full repetition count."""

    PC = "pc"
    PRIMACY = "primacy"
    RECENCY = "recency"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class JudgmentInstance:
    """One comparison task: a context plus two candidates."""

    id: str
    context: str
    candidate_a: str
    candidate_b: str
    gold: Winner | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("instance id must be nonempty")
        if self.candidate_a == self.candidate_b:
            raise ValueError(f"instance {self.id!r}: candidates must differ")
        if self.gold is not None and self.gold not in (Winner.A, Winner.B):
            raise ValueError(f"instance {self.id!r}: gold must be A or B")


@dataclass(frozen=True, slots=True)
class JudgmentCall:
    """One judge invocation and its parsed outcome."""

    instance_id: str
    ordering: Ordering
    repetition_index: int
    verdict: Verdict
    confidence: float | None = None
    raw_response: str | None = None

    def __post_init__(self) -> None:
        if self.repetition_index < 1:
            raise ValueError("repetition_index must be >= 1")
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class OutcomeVector:
    """The verdicts of repeated calls under one fixed ordering."""

    ordering: Ordering
    verdicts: tuple[Verdict, ...]

    def __len__(self) -> int:
        return len(self.verdicts)


@dataclass(frozen=True)
class PairedTranscript:
    """Both per-ordering verdict vectors for one instance.

    Policies issue repetitions in pairs, so the two vectors always have
    equal length. ``conf_ab``/``conf_ba`` optionally carry the per-call
    confidences recorded alongside the verdicts; they are needed only to
    replay the confidence-budgeted policy with full fidelity.
    """

    instance_id: str
    vec_ab: OutcomeVector
    vec_ba: OutcomeVector
    conf_ab: tuple[float | None, ...] | None = None
    conf_ba: tuple[float | None, ...] | None = None

    def __post_init__(self) -> None:
        if self.vec_ab.ordering is not Ordering.AB or self.vec_ba.ordering is not Ordering.BA:
            raise ValueError("vectors assigned to the wrong orderings")
        if len(self.vec_ab) != len(self.vec_ba):
            raise ValueError(
                f"transcript {self.instance_id!r}: unpaired vectors "
                f"({len(self.vec_ab)} vs {len(self.vec_ba)})"
            )
        for conf, vec in ((self.conf_ab, self.vec_ab), (self.conf_ba, self.vec_ba)):
            if conf is not None and len(conf) != len(vec):
                raise ValueError("confidence vector length differs from verdict vector")

    @property
    def n_pairs(self) -> int:
        return len(self.vec_ab)

    @classmethod
    def from_calls(cls, instance_id: str, calls: Iterable[JudgmentCall]) -> "PairedTranscript":
        """Assemble a transcript from recorded calls, sorted by repetition."""
        by_ordering: dict[Ordering, list[JudgmentCall]] = {Ordering.AB: [], Ordering.BA: []}
        for call in calls:
            if call.instance_id != instance_id:
                raise ValueError(f"call for {call.instance_id!r} mixed into {instance_id!r}")
            by_ordering[call.ordering].append(call)
        vectors: dict[Ordering, tuple[Verdict, ...]] = {}
        confidences: dict[Ordering, tuple[float | None, ...]] = {}
        for ordering, group in by_ordering.items():
            group.sort(key=lambda c: c.repetition_index)
            indices = [c.repetition_index for c in group]
            if indices != list(range(1, len(group) + 1)):
                raise ValueError(
                    f"transcript {instance_id!r}: repetition indices for "
                    f"{ordering.value} are not contiguous from 1: {indices}"
                )
            vectors[ordering] = tuple(c.verdict for c in group)
            confidences[ordering] = tuple(c.confidence for c in group)
        return cls(
            instance_id=instance_id,
            vec_ab=OutcomeVector(Ordering.AB, vectors[Ordering.AB]),
            vec_ba=OutcomeVector(Ordering.BA, vectors[Ordering.BA]),
            conf_ab=confidences[Ordering.AB],
            conf_ba=confidences[Ordering.BA],
        )


@dataclass(frozen=True)
class ConsensusOutcome:
    """Majority decision over the concatenated paired verdicts."""

    winner: Winner
    pairs_used: int
    total_calls: int
    stop_reason: StopReason

    def __post_init__(self) -> None:
        if self.winner is Winner.TIE and self.stop_reason is StopReason.CONCLUSIVE_MAJORITY:
            raise ValueError("a tie cannot be a conclusive majority")


@dataclass(frozen=True)
class BiasProfile:
    """Per-ordering and marginal win rates for candidate A.

    A rate is None when its ordering produced no countable (non-
    indeterminate) verdicts; the profile is then incomplete.
    """

    p_a_given_ab: float | None
    p_a_given_ba: float | None
    p_a: float | None
    gap: float | None

    @property
    def complete(self) -> bool:
        return self.gap is not None


def _counts(verdicts: Iterable[Verdict]) -> tuple[int, int]:
    a = b = 0
    for v in verdicts:
        if v is Verdict.A:
            a += 1
        elif v is Verdict.B:
            b += 1
    return a, b


def majority_vote(verdicts: Sequence[Verdict]) -> Winner:
    """Strict-majority winner; indeterminate verdicts do not count.

    An equal count of A and B (including the all-indeterminate case) is a
    tie.
    """
    if not verdicts:
        raise ValueError("majority_vote needs at least one verdict")
    a, b = _counts(verdicts)
    if a > b:
        return Winner.A
    if b > a:
        return Winner.B
    return Winner.TIE


def consensus_outcome(
    transcript: PairedTranscript,
    stop_reason: StopReason = StopReason.BUDGET_EXHAUSTED,
) -> ConsensusOutcome:
    """Majority vote over the concatenation of both ordering vectors."""
    n = transcript.n_pairs
    if n < 1:
        raise ValueError("consensus needs at least one paired repetition")
    winner = majority_vote(transcript.vec_ab.verdicts + transcript.vec_ba.verdicts)
    return ConsensusOutcome(
        winner=winner, pairs_used=n, total_calls=2 * n, stop_reason=stop_reason
    )


def repetition_consistency(vector: OutcomeVector) -> Verdict | None:
    """The stable decision of a vector, or None if it has none.

    A vector is repetition consistent when every entry is the same A-or-B
    verdict; indeterminate entries break consistency.
    """
    if not vector.verdicts:
        raise ValueError("repetition_consistency needs a nonempty vector")
    first = vector.verdicts[0]
    if first is Verdict.INDETERMINATE:
        return None
    if all(v is first for v in vector.verdicts):
        return first
    return None


def permutation_consistency(transcript: PairedTranscript) -> bool:
    """True when both orderings are stable on the same decision."""
    stable_ab = repetition_consistency(transcript.vec_ab)
    stable_ba = repetition_consistency(transcript.vec_ba)
    return stable_ab is not None and stable_ab is stable_ba


def observation_violated(transcript: PairedTranscript) -> bool:
    """True when neither ordering has a stable decision."""
    return (
        repetition_consistency(transcript.vec_ab) is None
        and repetition_consistency(transcript.vec_ba) is None
    )


def classify_bias(transcript: PairedTranscript) -> BiasLabel:
    """Bias direction of one instance at the full repetition count.

    Position-consistent transcripts are PC. Otherwise the instance is
    labelled by how often verdicts select the position-1 candidate:
    more than half the countable verdicts is primacy, fewer is recency,
    and exactly half (or no countable verdicts at all) is ambiguous.
    """
    if permutation_consistency(transcript):
        return BiasLabel.PC
    a_ab, b_ab = _counts(transcript.vec_ab.verdicts)
    a_ba, b_ba = _counts(transcript.vec_ba.verdicts)
    # Position 1 holds candidate A under AB and candidate B under BA.
    position_one = a_ab + b_ba
    countable = a_ab + b_ab + a_ba + b_ba
    if 2 * position_one > countable:
        return BiasLabel.PRIMACY
    if 2 * position_one < countable:
        return BiasLabel.RECENCY
    return BiasLabel.AMBIGUOUS


def empirical_gap(transcript: PairedTranscript) -> BiasProfile:
    """Observed per-ordering A-rates and the implied probability gap."""

    def rate(vector: OutcomeVector) -> float | None:
        a, b = _counts(vector.verdicts)
        if a + b == 0:
            return None
        return a / (a + b)

    q1 = rate(transcript.vec_ab)
    q2 = rate(transcript.vec_ba)
    if q1 is None or q2 is None:
        return BiasProfile(p_a_given_ab=q1, p_a_given_ba=q2, p_a=None, gap=None)
    p_a = (q1 + q2) / 2.0
    return BiasProfile(p_a_given_ab=q1, p_a_given_ba=q2, p_a=p_a, gap=abs(2.0 * p_a - 1.0))
