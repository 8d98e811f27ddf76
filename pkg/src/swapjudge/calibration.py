"""Confidence-gap estimation of the probability gap.

The first paired repetition yields a confidence gap: the difference between
the judge's average self-reported confidence when it picked each candidate.
A linear model fitted on a small sample of fully-repeated instances maps
that gap to an estimated probability gap, which in turn bounds how many
paired repetitions a contested instance deserves.
"""

from __future__ import annotations

import json
import logging
import math
import random
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import JudgmentCall, JudgmentInstance, Verdict

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GapModel:
    """Affine map from confidence gap to estimated probability gap."""

    intercept: float
    slope: float
    training_size: int
    training_call_cost: int
    n_max_pairs: int

    def __post_init__(self) -> None:
        if self.training_call_cost != self.training_size * 2 * self.n_max_pairs:
            raise ValueError(
                "training_call_cost must equal training_size * 2 * n_max_pairs"
            )

    def predict(self, confidence_gap: float) -> float:
        """Estimated probability gap, clamped to [0, 1]."""
        return min(1.0, max(0.0, self.intercept + self.slope * confidence_gap))


def confidence_gap(call_one: JudgmentCall, call_two: JudgmentCall) -> float | None:
    """Confidence gap of one paired repetition, or None if unavailable.

    Unavailable means a missing confidence or an indeterminate verdict;
    callers fall back to the full repetition budget. When both calls picked
    the same candidate, the unchosen side contributes confidence 0, so the
    gap equals the chosen side's mean confidence.
    """
    pair = (call_one, call_two)
    if any(c.confidence is None or c.verdict is Verdict.INDETERMINATE for c in pair):
        return None
    sides: dict[Verdict, list[float]] = {Verdict.A: [], Verdict.B: []}
    for call in pair:
        sides[call.verdict].append(call.confidence)  # type: ignore[arg-type]
    mean_a = sum(sides[Verdict.A]) / len(sides[Verdict.A]) if sides[Verdict.A] else 0.0
    mean_b = sum(sides[Verdict.B]) / len(sides[Verdict.B]) if sides[Verdict.B] else 0.0
    return abs(mean_a - mean_b)


def select_calibration_set(
    instances: Sequence[JudgmentInstance], fraction: float = 0.10, seed: int = 0
) -> list[JudgmentInstance]:
    """Seeded uniform sample of ceil(fraction * N) instances.

    Returned in dataset order so downstream iteration is deterministic;
    callers key exclusion off the selected ids.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    if not instances:
        raise ValueError("cannot select a calibration set from an empty dataset")
    size = math.ceil(fraction * len(instances))
    rng = random.Random(seed)
    chosen = sorted(rng.sample(range(len(instances)), size))
    return [instances[i] for i in chosen]


def fit_gap_model(
    samples: Sequence[tuple[float, float]], n_max_pairs: int
) -> GapModel:
    """Ordinary least squares of probability gap on confidence gap.

    Each sample is (confidence gap from the first pair, probability gap
    measured on the instance's full transcript). Degenerate inputs (fewer
    than two samples, or no variation in the confidence gaps) yield the
    fallback model that always predicts gap 0, i.e. the full budget.
    """
    if n_max_pairs < 1:
        raise ValueError("n_max_pairs must be >= 1")
    cost = len(samples) * 2 * n_max_pairs
    c_values = np.array([c for c, _ in samples], dtype=float)
    g_values = np.array([g for _, g in samples], dtype=float)
    if len(samples) < 2 or np.ptp(c_values) == 0.0:
        logger.warning(
            "gap-model fit degenerate (%d samples); falling back to zero-gap model",
            len(samples),
        )
        return GapModel(
            intercept=0.0,
            slope=0.0,
            training_size=len(samples),
            training_call_cost=cost,
            n_max_pairs=n_max_pairs,
        )
    slope, intercept = np.polyfit(c_values, g_values, 1)
    return GapModel(
        intercept=float(intercept),
        slope=float(slope),
        training_size=len(samples),
        training_call_cost=cost,
        n_max_pairs=n_max_pairs,
    )


def save_gap_model(
    model: GapModel, path: str | Path, training_ids: Sequence[str] = ()
) -> None:
    """Persist the fitted model as a small JSON document."""
    document = {
        "intercept": model.intercept,
        "slope": model.slope,
        "training_size": model.training_size,
        "training_call_cost": model.training_call_cost,
        "n_max_pairs": model.n_max_pairs,
        "training_ids": list(training_ids),
    }
    Path(path).write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")


def load_gap_model(path: str | Path) -> GapModel:
    document = json.loads(Path(path).read_text())
    return GapModel(
        intercept=float(document["intercept"]),
        slope=float(document["slope"]),
        training_size=int(document["training_size"]),
        training_call_cost=int(document["training_call_cost"]),
        n_max_pairs=int(document["n_max_pairs"]),
    )
