"""Tests for the core types and pure decision functions."""

from __future__ import annotations

import random

import pytest

from helpers import transcript, verdicts
from swapjudge import (
    BiasLabel,
    JudgmentInstance,
    Ordering,
    OutcomeVector,
    PairedTranscript,
    StopReason,
    Verdict,
    Winner,
    classify_bias,
    consensus_outcome,
    empirical_gap,
    majority_vote,
    observation_violated,
    permutation_consistency,
    repetition_consistency,
)


def test_majority_vote_strict_majority():
    assert majority_vote(verdicts("aaba")) is Winner.A


def test_majority_vote_even_split_is_tie():
    assert majority_vote(verdicts("ab")) is Winner.TIE


def test_majority_vote_excludes_indeterminate():
    assert majority_vote(verdicts("a?")) is Winner.A
    assert majority_vote(verdicts("??")) is Winner.TIE


def test_majority_vote_empty_input_rejected():
    with pytest.raises(ValueError):
        majority_vote(())


def test_majority_vote_permutation_invariant():
    rng = random.Random(17)
    for _ in range(50):
        vs = [rng.choice("ab?") for _ in range(rng.randint(1, 15))]
        baseline = majority_vote(verdicts("".join(vs)))
        rng.shuffle(vs)
        assert majority_vote(verdicts("".join(vs))) is baseline


def test_consensus_outcome_majority_across_orderings():
    outcome = consensus_outcome(transcript("aaa", "bba"))
    assert outcome.winner is Winner.A
    assert outcome.pairs_used == 3
    assert outcome.total_calls == 6


def test_consensus_outcome_tie():
    assert consensus_outcome(transcript("aa", "bb")).winner is Winner.TIE


def test_consensus_outcome_unanimous_pair():
    outcome = consensus_outcome(transcript("a", "a"))
    assert outcome.winner is Winner.A
    assert outcome.total_calls == 2


def test_unpaired_vectors_rejected():
    with pytest.raises(ValueError):
        PairedTranscript(
            instance_id="t",
            vec_ab=OutcomeVector(Ordering.AB, verdicts("aa")),
            vec_ba=OutcomeVector(Ordering.BA, verdicts("a")),
        )


def test_tie_cannot_be_conclusive():
    with pytest.raises(ValueError):
        consensus_outcome(transcript("a", "b"), StopReason.CONCLUSIVE_MAJORITY)


def test_repetition_consistency_unique_verdict():
    assert repetition_consistency(OutcomeVector(Ordering.AB, verdicts("aaa"))) is Verdict.A


def test_repetition_consistency_mixed_vector():
    assert repetition_consistency(OutcomeVector(Ordering.BA, verdicts("bba"))) is None


def test_repetition_consistency_needs_a_or_b():
    assert repetition_consistency(OutcomeVector(Ordering.AB, verdicts("??"))) is None


def test_repetition_consistency_empty_rejected():
    with pytest.raises(ValueError):
        repetition_consistency(OutcomeVector(Ordering.AB, ()))


def test_permutation_consistency_same_stable_decision():
    assert permutation_consistency(transcript("aa", "aa"))


def test_permutation_consistency_conflicting_decisions():
    assert not permutation_consistency(transcript("aaa", "bbb"))


def test_permutation_consistency_one_side_unstable():
    assert not permutation_consistency(transcript("aa", "ab"))


def test_observation_violated_neither_side_stable():
    assert observation_violated(transcript("abab", "baba"))


def test_observation_violated_one_stable_side():
    assert not observation_violated(transcript("aaaa", "abba"))
    assert not observation_violated(transcript("aaaa", "bbbb"))


def test_classify_bias_primacy():
    # Always picks whatever sits in prompt position 1.
    assert classify_bias(transcript("aaa", "bbb")) is BiasLabel.PRIMACY


def test_classify_bias_recency():
    assert classify_bias(transcript("bbb", "aaa")) is BiasLabel.RECENCY


def test_classify_bias_pc():
    assert classify_bias(transcript("aa", "aa")) is BiasLabel.PC


def test_classify_bias_ambiguous_on_even_split():
    # Position-1 rate exactly one half and not PC.
    assert classify_bias(transcript("ab", "ab")) is BiasLabel.AMBIGUOUS


def test_classify_bias_partitions_all_transcripts():
    rng = random.Random(5)
    for _ in range(300):
        n = rng.randint(1, 12)
        ab = "".join(rng.choice("ab?") for _ in range(n))
        ba = "".join(rng.choice("ab?") for _ in range(n))
        t = transcript(ab, ba)
        label = classify_bias(t)
        assert label in BiasLabel
        assert (label is BiasLabel.PC) == permutation_consistency(t)
        if observation_violated(t):
            assert label is not BiasLabel.PC


def test_single_rc_side_dominates_consensus():
    # One stable ordering with decision X; if the other side is not uniformly
    # the opposite verdict, the concatenated majority must be X.
    rng = random.Random(23)
    for _ in range(300):
        n = rng.randint(1, 10)
        ba = "".join(rng.choice("ab?") for _ in range(n))
        t = transcript("a" * n, ba)
        one_rc = repetition_consistency(t.vec_ba) is not Verdict.A
        has_non_opposite = any(v is not Verdict.B for v in t.vec_ba.verdicts)
        if one_rc and has_non_opposite:
            assert consensus_outcome(t).winner is Winner.A


def test_empirical_gap_from_worked_vectors():
    profile = empirical_gap(transcript("aaa", "bba"))
    assert profile.p_a_given_ab == pytest.approx(1.0)
    assert profile.p_a_given_ba == pytest.approx(1 / 3)
    assert profile.p_a == pytest.approx(2 / 3)
    assert profile.gap == pytest.approx(1 / 3)


def test_empirical_gap_unanimous_winner():
    assert empirical_gap(transcript("aa", "aa")).gap == pytest.approx(1.0)


def test_empirical_gap_pure_position_following():
    assert empirical_gap(transcript("aa", "bb")).gap == pytest.approx(0.0)


def test_empirical_gap_incomplete_when_one_side_indeterminate():
    profile = empirical_gap(transcript("a?", "??"))
    assert not profile.complete
    assert profile.gap is None
    assert profile.p_a_given_ab == pytest.approx(1.0)
    assert profile.p_a_given_ba is None


def test_empirical_gap_bounds_and_candidate_swap_symmetry():
    swap = str.maketrans("ab", "ba")
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(1, 12)
        ab = "".join(rng.choice("ab") for _ in range(n))
        ba = "".join(rng.choice("ab") for _ in range(n))
        gap = empirical_gap(transcript(ab, ba)).gap
        assert 0.0 <= gap <= 1.0
        unanimous = len(set(ab + ba)) == 1
        assert (gap == 1.0) == unanimous
        swapped = empirical_gap(transcript(ab.translate(swap), ba.translate(swap))).gap
        assert swapped == pytest.approx(gap)


def test_pc_implies_conclusive_consensus():
    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(1, 8)
        side = rng.choice("ab")
        t = transcript(side * n, side * n)
        assert permutation_consistency(t)
        outcome = consensus_outcome(t)
        assert outcome.winner is not Winner.TIE
        assert outcome.winner.value == side


def test_instance_validation():
    with pytest.raises(ValueError):
        JudgmentInstance(id="", context="c", candidate_a="x", candidate_b="y")
    with pytest.raises(ValueError):
        JudgmentInstance(id="i", context="c", candidate_a="same", candidate_b="same")
    with pytest.raises(ValueError):
        JudgmentInstance(id="i", context="c", candidate_a="x", candidate_b="y", gold=Winner.TIE)
