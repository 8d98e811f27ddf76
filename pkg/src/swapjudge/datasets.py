"""Line-delimited dataset ingestion and synthetic dataset generation.

A dataset is a JSONL file, one record per line, with fields id, context,
candidate_a, candidate_b and optional gold ("a" or "b"). Synthetic records
additionally carry q1/q2, the per-ordering A-verdict probabilities the
simulated judge should use for that instance.
"""

from __future__ import annotations

import json
import random
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from .judges import BernoulliParams
from .model import JudgmentInstance, Winner


class DatasetError(ValueError):
    """A malformed dataset file; the message names the offending line."""


@dataclass(frozen=True)
class DatasetRecord:
    """One dataset line: the instance plus optional simulator parameters."""

    instance: JudgmentInstance
    params: BernoulliParams | None = None


_GOLD_VALUES = {"a": Winner.A, "b": Winner.B}


def _parse_record(payload: dict, line_number: int) -> DatasetRecord:
    def fail(message: str) -> DatasetError:
        return DatasetError(f"line {line_number}: {message}")

    for field in ("id", "context", "candidate_a", "candidate_b"):
        if field not in payload:
            raise fail(f"missing field {field!r}")
        if not isinstance(payload[field], str):
            raise fail(f"field {field!r} must be a string")
    gold = None
    if payload.get("gold") is not None:
        raw_gold = payload["gold"]
        if raw_gold not in _GOLD_VALUES:
            raise fail(f"field 'gold' must be 'a' or 'b', got {raw_gold!r}")
        gold = _GOLD_VALUES[raw_gold]
    has_q1 = payload.get("q1") is not None
    has_q2 = payload.get("q2") is not None
    if has_q1 != has_q2:
        raise fail("fields 'q1' and 'q2' must be given together")
    params = None
    if has_q1:
        try:
            params = BernoulliParams(q1=float(payload["q1"]), q2=float(payload["q2"]))
        except (TypeError, ValueError) as exc:
            raise fail(f"invalid q1/q2: {exc}") from exc
    try:
        instance = JudgmentInstance(
            id=payload["id"],
            context=payload["context"],
            candidate_a=payload["candidate_a"],
            candidate_b=payload["candidate_b"],
            gold=gold,
        )
    except ValueError as exc:
        raise fail(str(exc)) from exc
    return DatasetRecord(instance=instance, params=params)


def load_dataset(path: str | Path) -> list[DatasetRecord]:
    """Read and validate a JSONL dataset, rejecting duplicates by line."""
    records: list[DatasetRecord] = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                payload = json.loads(text)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"line {line_number}: invalid JSON ({exc})") from exc
            if not isinstance(payload, dict):
                raise DatasetError(f"line {line_number}: record must be a JSON object")
            record = _parse_record(payload, line_number)
            previous = seen.get(record.instance.id)
            if previous is not None:
                raise DatasetError(
                    f"line {line_number}: duplicate id {record.instance.id!r} "
                    f"(first seen on line {previous})"
                )
            seen[record.instance.id] = line_number
            records.append(record)
    return records


def record_to_json(record: DatasetRecord) -> dict:
    payload: dict = {
        "id": record.instance.id,
        "context": record.instance.context,
        "candidate_a": record.instance.candidate_a,
        "candidate_b": record.instance.candidate_b,
    }
    if record.instance.gold is not None:
        payload["gold"] = record.instance.gold.value
    if record.params is not None:
        payload["q1"] = record.params.q1
        payload["q2"] = record.params.q2
    return payload


def write_dataset(records: Sequence[DatasetRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record_to_json(record), sort_keys=True) + "\n")


@dataclass(frozen=True)
class MixtureComponent:
    """One (q1, q2) population with its sampling weight."""

    q1: float
    q2: float
    weight: float

    def __post_init__(self) -> None:
        BernoulliParams(self.q1, self.q2)  # range check
        if self.weight < 0:
            raise ValueError("component weight must be >= 0")


_WEIGHT_TOL = 1e-9


def simulate_dataset(
    components: Sequence[MixtureComponent], size: int, seed: int
) -> list[DatasetRecord]:
    """Draw per-instance (q1, q2) from a mixture and label the gold winner.

    Gold is the candidate with marginal win probability above one half,
    and absent when the marginal is exactly one half.
    """
    if not components:
        raise ValueError("at least one mixture component is required")
    if size < 1:
        raise ValueError("size must be >= 1")
    total_weight = sum(c.weight for c in components)
    if abs(total_weight - 1.0) > _WEIGHT_TOL:
        raise ValueError(f"component weights sum to {total_weight}, expected 1")
    rng = random.Random(seed)
    weights = [c.weight for c in components]
    records = []
    width = len(str(size))
    for i in range(1, size + 1):
        component = rng.choices(components, weights=weights, k=1)[0]
        p_a = (component.q1 + component.q2) / 2.0
        if abs(p_a - 0.5) <= _WEIGHT_TOL:
            gold = None
        else:
            gold = Winner.A if p_a > 0.5 else Winner.B
        identifier = f"syn-{i:0{width}d}"
        instance = JudgmentInstance(
            id=identifier,
            context=f"synthetic comparison {i}",
            candidate_a=f"candidate A of {identifier}",
            candidate_b=f"candidate B of {identifier}",
            gold=gold,
        )
        records.append(
            DatasetRecord(
                instance=instance, params=BernoulliParams(component.q1, component.q2)
            )
        )
    return records


def params_by_id(records: Sequence[DatasetRecord]) -> dict[str, BernoulliParams]:
    """Simulator parameters keyed by instance id, for records that have them."""
    return {r.instance.id: r.params for r in records if r.params is not None}
