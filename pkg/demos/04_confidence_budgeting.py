"""Confidence-gap calibration and per-instance repetition budgets.

The first paired repetition already carries a signal: the gap between the
judge's confidence when picking each candidate correlates with how lopsided
the instance really is. A linear model fitted on a small sample maps that
confidence gap to an estimated probability gap, which caps the number of
paired repetitions an instance may consume.
"""

from swapjudge import (
    BernoulliParams,
    ConfidenceModel,
    JudgmentCall,
    JudgmentInstance,
    Ordering,
    SimulatedJudge,
    budget_pairs,
    confidence_gap,
    empirical_gap,
    fit_gap_model,
    run_confidence_based,
    run_static_consensus,
)

N_MAX = 12

# The simulated judge reports confidence as 0.5 + 0.5 * |2q - 1| with no
# noise, so the confidence gap is exactly learnable.
conf_model = ConfidenceModel(intercept=0.5, slope=0.5, noise_scale=0.0)

# Calibration: full transcripts for a handful of instances with spread-out
# behaviour, then ordinary least squares of measured probability gap on the
# first pair's confidence gap.
calibration_params = [
    BernoulliParams(0.99, 0.99),
    BernoulliParams(0.95, 0.70),
    BernoulliParams(0.85, 0.55),
    BernoulliParams(0.70, 0.40),
    BernoulliParams(0.55, 0.35),
    BernoulliParams(0.01, 0.01),
]
samples = []
for idx, params in enumerate(calibration_params * 5):
    judge = SimulatedJudge(seed=100 + idx, default=params, confidence_model=conf_model)
    inst = JudgmentInstance(id=f"cal{idx}", context="q", candidate_a="x", candidate_b="y")
    full = run_static_consensus(judge, inst, N_MAX).transcript
    first_pair = (
        JudgmentCall(inst.id, Ordering.AB, 1, full.vec_ab.verdicts[0], full.conf_ab[0]),
        JudgmentCall(inst.id, Ordering.BA, 1, full.vec_ba.verdicts[0], full.conf_ba[0]),
    )
    c = confidence_gap(*first_pair)
    g = empirical_gap(full).gap
    if c is not None and g is not None:
        samples.append((c, g))

model = fit_gap_model(samples, N_MAX)
print(f"fitted gap model on {model.training_size} instances "
      f"({model.training_call_cost} judge calls): "
      f"g ~ {model.intercept:.3f} + {model.slope:.3f} * c")
print()

print("estimated gap -> paired-repetition budget (cap 12):")
for gap in (0.0, 0.25, 0.5, 0.75, 1.0):
    print(f"  g = {gap:4.2f} -> {budget_pairs(gap, N_MAX):2d} pairs")
print()

# The budget in action: a lopsided instance gets a short leash, a genuinely
# contested one keeps the full budget.
for label, params in (
    ("lopsided", BernoulliParams(0.99, 0.99)),
    ("contested", BernoulliParams(0.98, 0.02)),
):
    judge = SimulatedJudge(seed=5, default=params, confidence_model=conf_model)
    inst = JudgmentInstance(id=label, context="q", candidate_a="x", candidate_b="y")
    result = run_confidence_based(judge, inst, model, N_MAX)
    print(f"{label:>9}: estimated gap {result.estimated_gap:.3f}, "
          f"budget {result.budget_pairs} pairs, "
          f"outcome {result.outcome.winner.value} after {result.outcome.total_calls} calls")
