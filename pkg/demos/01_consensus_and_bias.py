"""Consensus, consistency, and bias metrics on hand-built transcripts.

Walks the core decision functions over a tiny worked example: an instance
whose first ordering stabilizes on candidate A while the swapped ordering
drifts, which is exactly the situation order-swapped repetition exists for.
"""

from swapjudge import (
    Ordering,
    OutcomeVector,
    PairedTranscript,
    Verdict,
    classify_bias,
    consensus_outcome,
    empirical_gap,
    majority_vote,
    observation_violated,
    permutation_consistency,
    repetition_consistency,
)

A, B = Verdict.A, Verdict.B


def show(title, transcript):
    print(f"--- {title} ---")
    print("vec_ab:", "".join(v.value[0] for v in transcript.vec_ab.verdicts))
    print("vec_ba:", "".join(v.value[0] for v in transcript.vec_ba.verdicts))
    print("stable decision (ab):", repetition_consistency(transcript.vec_ab))
    print("stable decision (ba):", repetition_consistency(transcript.vec_ba))
    print("permutation consistent:", permutation_consistency(transcript))
    print("neither side stable:", observation_violated(transcript))
    outcome = consensus_outcome(transcript)
    print(f"consensus: {outcome.winner.value} after {outcome.total_calls} calls")
    print("bias label:", classify_bias(transcript).value)
    profile = empirical_gap(transcript)
    print(f"per-ordering A-rates: q1={profile.p_a_given_ab:.3f} q2={profile.p_a_given_ba:.3f}")
    print(f"probability gap: {profile.gap:.3f}")
    print()


def t(ab, ba):
    return PairedTranscript(
        instance_id="demo",
        vec_ab=OutcomeVector(Ordering.AB, tuple(ab)),
        vec_ba=OutcomeVector(Ordering.BA, tuple(ba)),
    )


# Majority voting is the primitive everything builds on. Indeterminate
# verdicts (unparseable judge responses) never count for either side.
print("majority of A,A,B,A:", majority_vote((A, A, B, A)).value)
print("majority of A,B    :", majority_vote((A, B)).value)
print()

# After two paired repetitions this instance looks hopelessly contradictory:
# each ordering just repeats whatever sits in prompt position one.
show("two rounds, contradictory", t([A, A], [B, B]))

# One more round breaks the symmetry: the swapped ordering produced an A, so
# the concatenated majority tips to A and will stay there as long as the
# first ordering keeps repeating its stable decision.
show("three rounds, first ordering stable", t([A, A, A], [B, B, A]))

# A permutation-consistent instance: both orderings agree from the start.
# These are the instances where a single paired repetition already suffices.
show("permutation consistent", t([A, A, A], [A, A, A]))
