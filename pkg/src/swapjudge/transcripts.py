"""Append-only transcript logging and resumable collection.

Every judge call is appended to a JSONL log before its result is used, so
a killed run can resume without re-querying: collection skips any
(instance, ordering, repetition) triple already on disk. The log writer is
the only shared sink; a lock serialises appends from worker threads.
"""

from __future__ import annotations

import json
import logging
import threading
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .model import JudgmentCall, JudgmentInstance, Ordering, PairedTranscript, Verdict

logger = logging.getLogger(__name__)

CallKey = tuple[str, Ordering, int]


class TranscriptError(RuntimeError):
    """An unreadable or inconsistent transcript log."""


def _call_to_json(call: JudgmentCall) -> dict:
    payload: dict = {
        "instance_id": call.instance_id,
        "ordering": call.ordering.value,
        "repetition_index": call.repetition_index,
        "verdict": call.verdict.value,
    }
    if call.confidence is not None:
        payload["confidence"] = call.confidence
    if call.raw_response is not None:
        payload["raw_response"] = call.raw_response
    return payload


def _call_from_json(payload: dict) -> JudgmentCall:
    return JudgmentCall(
        instance_id=payload["instance_id"],
        ordering=Ordering(payload["ordering"]),
        repetition_index=int(payload["repetition_index"]),
        verdict=Verdict(payload["verdict"]),
        confidence=payload.get("confidence"),
        raw_response=payload.get("raw_response"),
    )


class TranscriptLog:
    """Append-only JSONL sink of judge calls, safe for many writer threads."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        self._handle = None

    def append(self, call: JudgmentCall) -> None:
        line = json.dumps(_call_to_json(call), sort_keys=True)
        with self._lock:
            if self._handle is None:
                self._handle = open(self.path, "a", encoding="utf-8")
            self._handle.write(line + "\n")
            self._handle.flush()

    def close(self) -> None:
        with self._lock:
            if self._handle is not None:
                self._handle.close()
                self._handle = None

    def __enter__(self) -> "TranscriptLog":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def read_log(path: str | Path) -> dict[CallKey, JudgmentCall]:
    """Load recorded calls keyed by (instance, ordering, repetition).

    Raises TranscriptError on any malformed line; resuming from a log we
    cannot fully parse would silently drop paid-for calls.
    """
    calls: dict[CallKey, JudgmentCall] = {}
    log_path = Path(path)
    if not log_path.exists():
        return calls
    with open(log_path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                call = _call_from_json(json.loads(text))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise TranscriptError(
                    f"{log_path}: malformed record on line {line_number}: {exc}"
                ) from exc
            key = (call.instance_id, call.ordering, call.repetition_index)
            if key in calls:
                raise TranscriptError(
                    f"{log_path}: duplicate call on line {line_number} for {key}"
                )
            calls[key] = call
    return calls


def transcripts_from_calls(
    calls: Mapping[CallKey, JudgmentCall] | Iterable[JudgmentCall],
) -> dict[str, PairedTranscript]:
    """Group recorded calls into per-instance paired transcripts."""
    if isinstance(calls, Mapping):
        calls = calls.values()
    by_instance: dict[str, list[JudgmentCall]] = {}
    for call in calls:
        by_instance.setdefault(call.instance_id, []).append(call)
    return {
        instance_id: PairedTranscript.from_calls(instance_id, group)
        for instance_id, group in by_instance.items()
    }


def collect_transcripts(
    judge,
    instances: Sequence[JudgmentInstance],
    n_max_pairs: int,
    log: TranscriptLog,
    existing: Mapping[CallKey, JudgmentCall] | None = None,
    concurrency: int = 1,
) -> dict[str, PairedTranscript]:
    """Ensure every instance has a full n_max_pairs transcript on disk.

    Calls already present in ``existing`` (a parsed prior log) are reused
    verbatim and never re-issued. Instances are processed in parallel up to
    ``concurrency``; within an instance, rounds stay sequential.
    """
    recorded: dict[CallKey, JudgmentCall] = dict(existing) if existing else {}

    def collect_one(instance: JudgmentInstance) -> list[JudgmentCall]:
        completed: list[JudgmentCall] = []
        for repetition in range(1, n_max_pairs + 1):
            for ordering in (Ordering.AB, Ordering.BA):
                key = (instance.id, ordering, repetition)
                call = recorded.get(key)
                if call is None:
                    call = judge.judge(instance, ordering, repetition)
                    log.append(call)
                completed.append(call)
        return completed

    results: dict[str, PairedTranscript] = {}
    if concurrency <= 1:
        for instance in instances:
            results[instance.id] = PairedTranscript.from_calls(
                instance.id, collect_one(instance)
            )
        return results
    with ThreadPoolExecutor(max_workers=concurrency) as pool:
        for instance, calls in zip(instances, pool.map(collect_one, instances)):
            results[instance.id] = PairedTranscript.from_calls(instance.id, calls)
    return results
