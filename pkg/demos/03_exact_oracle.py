"""The exact oracle against Monte Carlo simulation.

The dynamic program computes the stop-on-majority policy's outcome
distribution in closed form, so sampled policy runs can be checked against
exact numbers instead of against another simulation.
"""

import numpy as np

from swapjudge import (
    BernoulliParams,
    JudgmentInstance,
    SimulatedJudge,
    exact_consensus_distribution,
    exact_early_stopping_stats,
    run_early_stopping,
)

Q1, Q2 = 0.95, 0.30
N_MAX = 12

exact = exact_early_stopping_stats(Q1, Q2, N_MAX)
print(f"exact early-stopping distribution for q1={Q1}, q2={Q2}, cap {N_MAX} pairs:")
print(f"  P(win A) = {exact.p_win_a:.6f}")
print(f"  P(win B) = {exact.p_win_b:.6f}")
print(f"  P(tie)   = {exact.p_tie:.6f}")
print(f"  E[calls] = {exact.expected_calls:.4f}")
print()

judge = SimulatedJudge(seed=1, default=BernoulliParams(Q1, Q2), confidence_model=None)
for n in (100, 1_000, 10_000):
    wins = 0
    calls = np.empty(n)
    for k in range(n):
        inst = JudgmentInstance(id=f"mc{k}", context="q", candidate_a="x", candidate_b="y")
        outcome = run_early_stopping(judge, inst, N_MAX).outcome
        wins += outcome.winner.value == "a"
        calls[k] = outcome.total_calls
    print(
        f"monte carlo n={n:>6}: P(win A) ~ {wins / n:.4f} "
        f"(error {abs(wins / n - exact.p_win_a):.4f}), "
        f"E[calls] ~ {calls.mean():.3f} (error {abs(calls.mean() - exact.expected_calls):.3f})"
    )

print()
# The full-budget consensus has its own exact distribution (a convolution of
# two binomial counts); with one deterministic ordering both policies decide
# identically, the adaptive one just pays far fewer calls.
stopping = exact_early_stopping_stats(1.0, 0.3, N_MAX)
consensus = exact_consensus_distribution(1.0, 0.3, N_MAX)
print("with a fully stable first ordering (q1=1.0, q2=0.3):")
print(f"  early stopping: P(win A) = {stopping.p_win_a:.6f}, E[calls] = {stopping.expected_calls:.2f}")
print(f"  full consensus: P(win A) = {consensus.p_win_a:.6f}, E[calls] = {consensus.expected_calls:.2f}")
