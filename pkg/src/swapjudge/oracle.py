"""Exact outcome distributions for Bernoulli judges.

Models an instance as two independent Bernoulli sources: the probability of
an A verdict is q1 under the AB ordering and q2 under BA. Under that model
the stopping policies become finite stochastic processes whose win/tie
probabilities and expected run lengths can be computed exactly. These
numbers are the ground truth the Monte Carlo paths are tested against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class OracleResult:
    """Exact win/tie probabilities and expected cost of a policy."""

    p_win_a: float
    p_win_b: float
    p_tie: float
    expected_pairs: float
    expected_calls: float

    def __post_init__(self) -> None:
        for name in ("p_win_a", "p_win_b", "p_tie"):
            p = getattr(self, name)
            if not -_SUM_TOL <= p <= 1.0 + _SUM_TOL:
                raise ValueError(f"{name}={p} outside [0, 1]")
        total = math.fsum((self.p_win_a, self.p_win_b, self.p_tie))
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {total}, expected 1")
        if abs(self.expected_calls - 2.0 * self.expected_pairs) > _SUM_TOL:
            raise ValueError("expected_calls must equal 2 * expected_pairs")


def _check_params(q1: float, q2: float, n_max_pairs: int) -> None:
    if not (0.0 <= q1 <= 1.0 and 0.0 <= q2 <= 1.0):
        raise ValueError(f"q1={q1}, q2={q2} must lie in [0, 1]")
    if n_max_pairs < 1:
        raise ValueError("n_max_pairs must be >= 1")


def exact_early_stopping_stats(q1: float, q2: float, n_max_pairs: int) -> OracleResult:
    """Exact distribution of the adaptive stop-on-majority policy.

    Dynamic program over the A-counts of the two ordering vectors. Each
    round issues one call per ordering; the process absorbs the first time
    the concatenated majority is conclusive, or ties out at n_max_pairs.
    """
    _check_params(q1, q2, n_max_pairs)
    # Per-round pair outcomes: (A-increment for AB vector, for BA vector).
    transitions = (
        ((1, 1), q1 * q2),
        ((1, 0), q1 * (1.0 - q2)),
        ((0, 1), (1.0 - q1) * q2),
        ((0, 0), (1.0 - q1) * (1.0 - q2)),
    )
    surviving: dict[tuple[int, int], float] = {(0, 0): 1.0}
    win_a_terms: list[float] = []
    win_b_terms: list[float] = []
    pairs_terms: list[float] = []
    for n in range(1, n_max_pairs + 1):
        following: dict[tuple[int, int], float] = {}
        for (a_ab, a_ba), mass in surviving.items():
            for (da, db), prob in transitions:
                if prob == 0.0:
                    continue
                state = (a_ab + da, a_ba + db)
                weight = mass * prob
                total_a = state[0] + state[1]
                # After n rounds there are 2n calls; A leads iff its count
                # exceeds n.
                if total_a > n:
                    win_a_terms.append(weight)
                    pairs_terms.append(n * weight)
                elif total_a < n:
                    win_b_terms.append(weight)
                    pairs_terms.append(n * weight)
                else:
                    following[state] = following.get(state, 0.0) + weight
        surviving = following
    p_tie = math.fsum(surviving.values())
    pairs_terms.append(n_max_pairs * p_tie)
    expected_pairs = math.fsum(pairs_terms)
    return OracleResult(
        p_win_a=math.fsum(win_a_terms),
        p_win_b=math.fsum(win_b_terms),
        p_tie=p_tie,
        expected_pairs=expected_pairs,
        expected_calls=2.0 * expected_pairs,
    )


def _binomial_pmf(n: int, q: float) -> list[float]:
    return [math.comb(n, k) * q**k * (1.0 - q) ** (n - k) for k in range(n + 1)]


def exact_consensus_distribution(q1: float, q2: float, n_max_pairs: int) -> OracleResult:
    """Exact distribution of the full fixed-budget consensus.

    Convolves the two per-ordering binomial A-counts and classifies the
    summed count against the tie point. Cost is always the full budget.
    """
    _check_params(q1, q2, n_max_pairs)
    pmf_ab = _binomial_pmf(n_max_pairs, q1)
    pmf_ba = _binomial_pmf(n_max_pairs, q2)
    win_a_terms: list[float] = []
    win_b_terms: list[float] = []
    tie_terms: list[float] = []
    for k_ab, p_ab in enumerate(pmf_ab):
        for k_ba, p_ba in enumerate(pmf_ba):
            weight = p_ab * p_ba
            total_a = k_ab + k_ba
            if total_a > n_max_pairs:
                win_a_terms.append(weight)
            elif total_a < n_max_pairs:
                win_b_terms.append(weight)
            else:
                tie_terms.append(weight)
    return OracleResult(
        p_win_a=math.fsum(win_a_terms),
        p_win_b=math.fsum(win_b_terms),
        p_tie=math.fsum(tie_terms),
        expected_pairs=float(n_max_pairs),
        expected_calls=2.0 * n_max_pairs,
    )


_BRUTE_FORCE_LIMIT = 8


def brute_force_early_stopping_stats(q1: float, q2: float, n_max_pairs: int) -> OracleResult:
    """Early-stopping stats by enumerating every weighted verdict sequence.

    Exponential in n_max_pairs; exists purely to validate the dynamic
    program on small budgets.
    """
    _check_params(q1, q2, n_max_pairs)
    if n_max_pairs > _BRUTE_FORCE_LIMIT:
        raise ValueError(f"enumeration limited to n_max_pairs <= {_BRUTE_FORCE_LIMIT}")
    round_outcomes = (
        ((1, 1), q1 * q2),
        ((1, 0), q1 * (1.0 - q2)),
        ((0, 1), (1.0 - q1) * q2),
        ((0, 0), (1.0 - q1) * (1.0 - q2)),
    )
    win_a_terms: list[float] = []
    win_b_terms: list[float] = []
    tie_terms: list[float] = []
    pairs_terms: list[float] = []
    for sequence in itertools.product(round_outcomes, repeat=n_max_pairs):
        weight = 1.0
        for _, prob in sequence:
            weight *= prob
        if weight == 0.0:
            continue
        a_total = 0
        stopped_at = n_max_pairs
        winner = "tie"
        for n, ((da, db), _) in enumerate(sequence, start=1):
            a_total += da + db
            if a_total > n:
                stopped_at, winner = n, "a"
                break
            if a_total < n:
                stopped_at, winner = n, "b"
                break
        pairs_terms.append(stopped_at * weight)
        {"a": win_a_terms, "b": win_b_terms, "tie": tie_terms}[winner].append(weight)
    expected_pairs = math.fsum(pairs_terms)
    return OracleResult(
        p_win_a=math.fsum(win_a_terms),
        p_win_b=math.fsum(win_b_terms),
        p_tie=math.fsum(tie_terms),
        expected_pairs=expected_pairs,
        expected_calls=2.0 * expected_pairs,
    )


def brute_force_consensus_distribution(q1: float, q2: float, n_max_pairs: int) -> OracleResult:
    """Full-budget consensus stats by the same exhaustive enumeration."""
    _check_params(q1, q2, n_max_pairs)
    if n_max_pairs > _BRUTE_FORCE_LIMIT:
        raise ValueError(f"enumeration limited to n_max_pairs <= {_BRUTE_FORCE_LIMIT}")
    round_outcomes = (
        ((1, 1), q1 * q2),
        ((1, 0), q1 * (1.0 - q2)),
        ((0, 1), (1.0 - q1) * q2),
        ((0, 0), (1.0 - q1) * (1.0 - q2)),
    )
    win_a_terms: list[float] = []
    win_b_terms: list[float] = []
    tie_terms: list[float] = []
    for sequence in itertools.product(round_outcomes, repeat=n_max_pairs):
        weight = 1.0
        for _, prob in sequence:
            weight *= prob
        if weight == 0.0:
            continue
        a_total = sum(da + db for (da, db), _ in sequence)
        if a_total > n_max_pairs:
            win_a_terms.append(weight)
        elif a_total < n_max_pairs:
            win_b_terms.append(weight)
        else:
            tie_terms.append(weight)
    return OracleResult(
        p_win_a=math.fsum(win_a_terms),
        p_win_b=math.fsum(win_b_terms),
        p_tie=math.fsum(tie_terms),
        expected_pairs=float(n_max_pairs),
        expected_calls=2.0 * n_max_pairs,
    )
