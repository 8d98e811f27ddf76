"""Tests for the repetition policies and the replay engine."""

from __future__ import annotations

import random

import pytest

from helpers import instance, transcript
from swapjudge import (
    BernoulliParams,
    ConfidenceModel,
    GapModel,
    PolicyKind,
    PolicySpec,
    SimulatedJudge,
    StopReason,
    TranscriptExhausted,
    Winner,
    budget_pairs,
    consensus_outcome,
    replay_policy,
    run_confidence_based,
    run_early_stopping,
    run_policy,
    run_static_consensus,
    run_swap_once,
)


def sim(q1, q2, seed=0, confidence=ConfidenceModel(noise_scale=0.0)):
    return SimulatedJudge(seed=seed, default=BernoulliParams(q1, q2), confidence_model=confidence)


def constant_model(prediction: float) -> GapModel:
    return GapModel(
        intercept=prediction, slope=0.0, training_size=0, training_call_cost=0, n_max_pairs=12
    )


def spec(kind: PolicyKind, n_max_pairs: int = 12, gap_model=None) -> PolicySpec:
    return PolicySpec(kind=kind, n_max_pairs=n_max_pairs, gap_model=gap_model)


def test_swap_once_unanimous_pair():
    result = run_swap_once(sim(1.0, 1.0), instance())
    assert result.outcome.winner is Winner.A
    assert result.outcome.total_calls == 2
    assert result.outcome.stop_reason is StopReason.SINGLE_SHOT


def test_swap_once_split_pair_is_tie():
    result = run_swap_once(sim(1.0, 0.0), instance())
    assert result.outcome.winner is Winner.TIE
    assert result.outcome.total_calls == 2


def test_swap_once_always_two_calls():
    rng = random.Random(4)
    for k in range(25):
        judge = sim(rng.random(), rng.random(), seed=k)
        assert run_swap_once(judge, instance(f"s{k}")).outcome.total_calls == 2


def test_static_consensus_uses_full_budget():
    result = run_static_consensus(sim(1.0, 1.0), instance(), 12)
    assert result.outcome.winner is Winner.A
    assert result.outcome.total_calls == 24
    assert result.outcome.stop_reason is StopReason.BUDGET_EXHAUSTED


def test_static_consensus_contradictory_orderings_tie():
    result = run_static_consensus(sim(1.0, 0.0), instance(), 12)
    assert result.outcome.winner is Winner.TIE
    assert result.outcome.total_calls == 24


def test_early_stopping_immediate_majority():
    result = run_early_stopping(sim(1.0, 1.0), instance(), 12)
    assert result.outcome.winner is Winner.A
    assert result.outcome.pairs_used == 1
    assert result.outcome.total_calls == 2
    assert result.outcome.stop_reason is StopReason.CONCLUSIVE_MAJORITY


def test_early_stopping_worst_case_alternating_tie():
    # One A and one B per round forever: ties out at the full budget.
    result = run_early_stopping(sim(1.0, 0.0), instance(), 12)
    assert result.outcome.winner is Winner.TIE
    assert result.outcome.total_calls == 24
    assert result.outcome.stop_reason is StopReason.BUDGET_EXHAUSTED


def test_early_stopping_never_ties_before_budget():
    rng = random.Random(12)
    for k in range(60):
        result = run_early_stopping(sim(rng.random(), rng.random(), seed=k), instance(f"e{k}"), 6)
        if result.outcome.winner is Winner.TIE:
            assert result.outcome.pairs_used == 6
        assert result.outcome.total_calls <= 12
        assert len(result.transcript.vec_ab) == len(result.transcript.vec_ba)


def test_early_stopping_replay_of_worked_example():
    # First ordering stays stable on A, second starts b,b then yields an a:
    # rounds 1-2 are tied and round 3 is conclusive.
    full = transcript("a" * 12, "bb" + "a" * 10)
    result = replay_policy(spec(PolicyKind.EARLY_STOPPING), full)
    assert result.outcome.winner is Winner.A
    assert result.outcome.pairs_used == 3
    assert result.outcome.total_calls == 6


def test_replay_matches_live_run_for_all_policies():
    rng = random.Random(99)
    model = GapModel(
        intercept=-1.0, slope=2.0, training_size=0, training_call_cost=0, n_max_pairs=12
    )
    for k in range(40):
        judge = sim(rng.random(), rng.random(), seed=1000 + k)
        inst = instance(f"r{k}")
        full = run_static_consensus(judge, inst, 12).transcript
        for kind in PolicyKind:
            policy = spec(kind, 12, model if kind is PolicyKind.CONFIDENCE_BASED else None)
            live = run_policy(policy, judge, inst)
            replayed = replay_policy(policy, full)
            assert replayed.outcome == live.outcome, kind
            assert replayed.transcript == live.transcript, kind
            assert replayed.budget_pairs == live.budget_pairs, kind
            assert replayed.estimated_gap == live.estimated_gap, kind


def test_swap_once_replay_consumes_only_first_pair():
    result = replay_policy(spec(PolicyKind.SWAP_ONCE), transcript("ab" * 6, "ba" * 6))
    assert result.transcript.n_pairs == 1


def test_static_replay_equals_full_consensus():
    full = transcript("aabbaabbaabb", "abababababab")
    result = replay_policy(spec(PolicyKind.STATIC_CONSENSUS), full)
    assert result.outcome.winner is consensus_outcome(full).winner
    assert result.outcome.total_calls == 24


def test_replay_rejects_short_transcripts():
    with pytest.raises(TranscriptExhausted):
        replay_policy(spec(PolicyKind.EARLY_STOPPING, n_max_pairs=4), transcript("ab", "ba"))


def test_budget_formula_endpoints():
    assert budget_pairs(1.0, 12) == 1
    assert budget_pairs(0.0, 12) == 12
    assert budget_pairs(0.5, 12) == 7


def test_budget_monotone_in_gap():
    previous = None
    for step in range(101):
        gap = step / 100
        budget = budget_pairs(gap, 12)
        assert 1 <= budget <= 12
        if previous is not None:
            assert budget <= previous
        previous = budget


def test_confidence_based_trusts_first_pair_when_gap_is_one():
    # Prediction 1 gives budget 1: conclusive or tie, the first pair decides.
    judge = sim(1.0, 0.0)
    result = run_confidence_based(judge, instance(), constant_model(1.0), 12)
    assert result.budget_pairs == 1
    assert result.outcome.winner is Winner.TIE
    assert result.outcome.total_calls == 2
    assert result.outcome.stop_reason is StopReason.BUDGET_EXHAUSTED


def test_confidence_based_degenerates_to_early_stopping_at_zero_gap():
    judge = sim(1.0, 0.0)
    result = run_confidence_based(judge, instance(), constant_model(0.0), 12)
    assert result.budget_pairs == 12
    assert result.outcome.total_calls == 24
    assert result.outcome.winner is Winner.TIE


def test_confidence_based_records_estimate():
    judge = sim(1.0, 1.0)
    result = run_confidence_based(judge, instance(), constant_model(0.5), 12)
    assert result.estimated_gap == pytest.approx(0.5)
    assert result.budget_pairs == 7
    assert result.outcome.pairs_used == 1  # conclusive round 1


def test_confidence_based_falls_back_without_confidences():
    judge = sim(1.0, 0.0, confidence=None)
    result = run_confidence_based(judge, instance(), constant_model(1.0), 12)
    assert result.estimated_gap is None
    assert result.budget_pairs == 12
    assert result.outcome.total_calls == 24


def test_confidence_based_never_costs_more_than_early_stopping():
    rng = random.Random(31)
    for k in range(60):
        judge = sim(rng.random(), rng.random(), seed=2000 + k)
        inst = instance(f"c{k}")
        full = run_static_consensus(judge, inst, 12).transcript
        early = replay_policy(spec(PolicyKind.EARLY_STOPPING), full)
        model = constant_model(rng.random())
        capped = replay_policy(spec(PolicyKind.CONFIDENCE_BASED, gap_model=model), full)
        assert capped.outcome.total_calls <= early.outcome.total_calls


def test_policy_spec_validation():
    with pytest.raises(ValueError):
        PolicySpec(PolicyKind.CONFIDENCE_BASED, n_max_pairs=12)
    with pytest.raises(ValueError):
        PolicySpec(PolicyKind.EARLY_STOPPING, n_max_pairs=0)
    with pytest.raises(ValueError):
        budget_pairs(1.5, 12)
