"""Adaptive early stopping versus the fixed-budget consensus.

Simulates judges with known per-ordering behaviour and compares what each
repetition policy pays on easy, contradictory, and noisy instances.
"""

from swapjudge import (
    BernoulliParams,
    JudgmentInstance,
    SimulatedJudge,
    run_early_stopping,
    run_static_consensus,
    run_swap_once,
)

CASES = [
    ("easy: both orderings favour A", BernoulliParams(q1=0.95, q2=0.95)),
    ("primacy-biased: each ordering favours position 1", BernoulliParams(q1=0.98, q2=0.02)),
    ("one stable side, one noisy side", BernoulliParams(q1=0.95, q2=0.30)),
    ("pure noise", BernoulliParams(q1=0.50, q2=0.50)),
]

N_TRIALS = 400

for title, params in CASES:
    judge = SimulatedJudge(seed=7, default=params)
    swap_calls = early_calls = static_calls = 0
    early_agree = 0
    for k in range(N_TRIALS):
        inst = JudgmentInstance(
            id=f"{title}-{k}", context="q", candidate_a="x", candidate_b="y"
        )
        swap_calls += run_swap_once(judge, inst).outcome.total_calls
        early = run_early_stopping(judge, inst, 12)
        early_calls += early.outcome.total_calls
        static = run_static_consensus(judge, inst, 12)
        static_calls += static.outcome.total_calls
        early_agree += early.outcome.winner is static.outcome.winner
    print(f"--- {title} (q1={params.q1}, q2={params.q2}) ---")
    print(f"swap once      : {swap_calls / N_TRIALS:5.2f} calls")
    print(f"early stopping : {early_calls / N_TRIALS:5.2f} calls")
    print(f"full consensus : {static_calls / N_TRIALS:5.2f} calls")
    print(f"early stop agrees with consensus on {100 * early_agree / N_TRIALS:.1f}% of runs")
    print()

print(
    "Easy instances stop after a single paired repetition; only genuinely\n"
    "contradictory ones burn the whole budget, which is where the average\n"
    "saving over the fixed 24-call consensus comes from."
)
