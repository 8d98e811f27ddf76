"""Shared test helpers for building transcripts and instances."""

from __future__ import annotations

from swapjudge import (
    JudgmentCall,
    JudgmentInstance,
    Ordering,
    OutcomeVector,
    PairedTranscript,
    Verdict,
)

_CHAR_TO_VERDICT = {"a": Verdict.A, "b": Verdict.B, "?": Verdict.INDETERMINATE}


def verdicts(spec: str) -> tuple[Verdict, ...]:
    """Translate a string like 'aab?' into a verdict tuple."""
    return tuple(_CHAR_TO_VERDICT[ch] for ch in spec)


def transcript(
    ab: str,
    ba: str,
    instance_id: str = "t",
    conf_ab: tuple[float | None, ...] | None = None,
    conf_ba: tuple[float | None, ...] | None = None,
) -> PairedTranscript:
    return PairedTranscript(
        instance_id=instance_id,
        vec_ab=OutcomeVector(Ordering.AB, verdicts(ab)),
        vec_ba=OutcomeVector(Ordering.BA, verdicts(ba)),
        conf_ab=conf_ab,
        conf_ba=conf_ba,
    )


def instance(identifier: str = "inst-1", gold=None) -> JudgmentInstance:
    return JudgmentInstance(
        id=identifier,
        context=f"context of {identifier}",
        candidate_a=f"first answer for {identifier}",
        candidate_b=f"second answer for {identifier}",
        gold=gold,
    )


def call(
    verdict: Verdict,
    ordering: Ordering = Ordering.AB,
    confidence: float | None = None,
    repetition_index: int = 1,
    instance_id: str = "t",
) -> JudgmentCall:
    return JudgmentCall(
        instance_id=instance_id,
        ordering=ordering,
        repetition_index=repetition_index,
        verdict=verdict,
        confidence=confidence,
    )
