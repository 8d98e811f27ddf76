"""Experiment orchestration: collect once, replay every policy.

A run collects one full transcript (n_max_pairs paired repetitions) per
instance, fits the confidence-gap calibration on a seeded subset, then
replays all configured policies over the shared transcripts. Policies
therefore compare on identical judgments, and the whole run is resumable
and, for the simulated judge, a pure function of (dataset, config).
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .calibration import (
    GapModel,
    confidence_gap,
    fit_gap_model,
    save_gap_model,
    select_calibration_set,
)
from .datasets import DatasetRecord, load_dataset, params_by_id
from .judges import (
    DEFAULT_AUTH_ENV,
    ConfidenceModel,
    HttpJudge,
    PromptTemplate,
    SimulatedJudge,
)
from .model import JudgmentCall, Ordering, OutcomeVector, PairedTranscript, empirical_gap
from .report import ExperimentReport, build_report, write_report_files
from .seeding import derive_seed
from .strategies import PolicyKind, PolicyResult, PolicySpec, replay_policy
from .transcripts import TranscriptLog, collect_transcripts, read_log, transcripts_from_calls

logger = logging.getLogger(__name__)

ALL_POLICIES = tuple(kind.value for kind in PolicyKind)


class RunError(RuntimeError):
    """A run cannot proceed as configured."""


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs; defaults follow the library's standard setup
    of at most 12 paired repetitions (24 calls) at temperature 0.1."""

    dataset: str
    out_dir: str
    judge: str = "sim"  # "sim" or "http"
    policies: tuple[str, ...] = ALL_POLICIES
    n_max_pairs: int = 12
    temperature: float = 0.1
    calibration_fraction: float = 0.10
    seed: int = 0
    tie_policy: str = "zero"
    concurrency: int = 1
    include_calibration: bool = False
    resume: bool = False
    restart: bool = False
    # Simulated-judge confidence model (intercept, slope, noise scale).
    sim_confidence: tuple[float, float, float] | None = (0.5, 0.5, 0.05)
    http_url: str | None = None
    http_model: str | None = None
    http_template: str | None = None
    http_retries: int = 2
    http_timeout: float = 60.0
    auth_env: str = DEFAULT_AUTH_ENV

    def __post_init__(self) -> None:
        if self.judge not in ("sim", "http"):
            raise ValueError("judge must be 'sim' or 'http'")
        unknown = [p for p in self.policies if p not in ALL_POLICIES]
        if unknown:
            raise ValueError(f"unknown policies {unknown}; choose from {ALL_POLICIES}")
        if not self.policies:
            raise ValueError("at least one policy is required")
        if self.n_max_pairs < 1:
            raise ValueError("n_max_pairs must be >= 1")
        if self.judge == "http" and (not self.http_url or not self.http_model):
            raise ValueError("http judge requires http_url and http_model")

    def digest(self) -> str:
        """Digest of the fields that determine results (not where they go)."""
        material = {
            "dataset_sha256": _file_sha256(self.dataset),
            "judge": self.judge,
            "policies": list(self.policies),
            "n_max_pairs": self.n_max_pairs,
            "temperature": self.temperature,
            "calibration_fraction": self.calibration_fraction,
            "seed": self.seed,
            "tie_policy": self.tie_policy,
            "include_calibration": self.include_calibration,
            "sim_confidence": list(self.sim_confidence) if self.sim_confidence else None,
            "http_model": self.http_model,
        }
        canonical = json.dumps(material, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def _file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def config_from_file(path: str | Path, **overrides) -> RunConfig:
    """Load a JSON config; keyword overrides (CLI flags) win."""
    payload = json.loads(Path(path).read_text())
    if not isinstance(payload, dict):
        raise RunError(f"{path}: config must be a JSON object")
    payload.update({k: v for k, v in overrides.items() if v is not None})
    if "policies" in payload and not isinstance(payload["policies"], tuple):
        payload["policies"] = tuple(payload["policies"])
    if "sim_confidence" in payload and payload["sim_confidence"] is not None:
        payload["sim_confidence"] = tuple(payload["sim_confidence"])
    try:
        return RunConfig(**payload)
    except TypeError as exc:
        raise RunError(f"{path}: {exc}") from exc


def build_judge(config: RunConfig, records: list[DatasetRecord]):
    if config.judge == "sim":
        confidence_model = None
        if config.sim_confidence is not None:
            intercept, slope, noise = config.sim_confidence
            confidence_model = ConfidenceModel(intercept, slope, noise)
        return SimulatedJudge(
            seed=derive_seed(config.seed, "judge"),
            params=params_by_id(records),
            confidence_model=confidence_model,
        )
    template = (
        PromptTemplate(Path(config.http_template).read_text())
        if config.http_template
        else None
    )
    kwargs = {"template": template} if template else {}
    return HttpJudge(
        url=config.http_url,
        model=config.http_model,
        temperature=config.temperature,
        max_retries=config.http_retries,
        timeout=config.http_timeout,
        auth_env=config.auth_env,
        max_in_flight=max(1, config.concurrency),
        **kwargs,
    )


def _log_path(config: RunConfig) -> Path:
    return Path(config.out_dir) / "transcripts.jsonl"


def _prepare_log(config: RunConfig):
    """Apply the resume/restart contract to an existing transcript log."""
    log_path = _log_path(config)
    if log_path.exists():
        if config.restart:
            log_path.unlink()
            return {}
        if not config.resume:
            raise RunError(
                f"{log_path} already exists; pass resume to continue it or "
                "restart to discard it"
            )
        return read_log(log_path)  # TranscriptError propagates: refuse to resume
    return {}


def _first_pair_calls(transcript: PairedTranscript) -> tuple[JudgmentCall, JudgmentCall] | None:
    if transcript.n_pairs < 1:
        return None
    conf_ab = transcript.conf_ab[0] if transcript.conf_ab else None
    conf_ba = transcript.conf_ba[0] if transcript.conf_ba else None
    return (
        JudgmentCall(transcript.instance_id, Ordering.AB, 1, transcript.vec_ab.verdicts[0], conf_ab),
        JudgmentCall(transcript.instance_id, Ordering.BA, 1, transcript.vec_ba.verdicts[0], conf_ba),
    )


def fit_calibration(
    config: RunConfig,
    records: list[DatasetRecord],
    transcripts: dict[str, PairedTranscript],
) -> tuple[GapModel, frozenset[str]]:
    """Select the seeded calibration subset and fit the gap model on it."""
    instances = [r.instance for r in records]
    subset = select_calibration_set(
        instances, config.calibration_fraction, derive_seed(config.seed, "calibration")
    )
    calibration_ids = frozenset(i.id for i in subset)
    samples: list[tuple[float, float]] = []
    for instance in subset:
        transcript = transcripts[instance.id]
        pair = _first_pair_calls(transcript)
        gap = empirical_gap(transcript).gap
        if pair is None or gap is None:
            continue
        c = confidence_gap(*pair)
        if c is None:
            logger.info("calibration instance %s has no usable confidence gap", instance.id)
            continue
        samples.append((c, gap))
    model = fit_gap_model(samples, config.n_max_pairs)
    return model, calibration_ids


def _policy_specs(config: RunConfig, gap_model: GapModel) -> dict[str, PolicySpec]:
    specs = {}
    for name in config.policies:
        kind = PolicyKind(name)
        specs[name] = PolicySpec(
            kind=kind,
            n_max_pairs=config.n_max_pairs,
            gap_model=gap_model if kind is PolicyKind.CONFIDENCE_BASED else None,
        )
    return specs


def _write_results(
    path: Path, policy_results: dict[str, dict[str, PolicyResult]]
) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for name in sorted(policy_results):
            results = policy_results[name]
            for instance_id in sorted(results):
                result = results[instance_id]
                row = {
                    "policy": name,
                    "instance_id": instance_id,
                    "winner": result.outcome.winner.value,
                    "pairs_used": result.outcome.pairs_used,
                    "total_calls": result.outcome.total_calls,
                    "stop_reason": result.outcome.stop_reason.value,
                    "budget_pairs": result.budget_pairs,
                    "estimated_gap": result.estimated_gap,
                }
                handle.write(json.dumps(row, sort_keys=True) + "\n")


def evaluate_transcripts(
    config: RunConfig,
    records: list[DatasetRecord],
    transcripts: dict[str, PairedTranscript],
) -> ExperimentReport:
    """Calibrate, replay every policy, aggregate, and persist artifacts."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model, calibration_ids = fit_calibration(config, records, transcripts)
    save_gap_model(model, out / "gap_model.json", training_ids=sorted(calibration_ids))
    specs = _policy_specs(config, model)
    policy_results = {
        name: {i: replay_policy(spec, transcripts[i]) for i in transcripts}
        for name, spec in specs.items()
    }
    gold = {
        r.instance.id: r.instance.gold for r in records if r.instance.gold is not None
    }
    report = build_report(
        policy_results,
        transcripts,
        gold,
        calibration_ids=calibration_ids,
        gap_model=model,
        tie_policy=config.tie_policy,
        include_calibration=config.include_calibration,
        provenance={"seed": config.seed, "config_digest": config.digest()},
    )
    _write_results(out / "results.jsonl", policy_results)
    write_report_files(report, out)
    return report


def run_experiment(config: RunConfig) -> ExperimentReport:
    """Collect transcripts (resuming any prior log) and produce the report."""
    records = load_dataset(config.dataset)
    instances = [r.instance for r in records]
    Path(config.out_dir).mkdir(parents=True, exist_ok=True)
    existing = _prepare_log(config)
    judge = build_judge(config, records)
    with TranscriptLog(_log_path(config)) as log:
        transcripts = collect_transcripts(
            judge,
            instances,
            config.n_max_pairs,
            log,
            existing=existing,
            concurrency=config.concurrency,
        )
    return evaluate_transcripts(config, records, transcripts)


def _truncate(transcript: PairedTranscript, n_pairs: int) -> PairedTranscript:
    if transcript.n_pairs <= n_pairs:
        return transcript
    return PairedTranscript(
        instance_id=transcript.instance_id,
        vec_ab=OutcomeVector(Ordering.AB, transcript.vec_ab.verdicts[:n_pairs]),
        vec_ba=OutcomeVector(Ordering.BA, transcript.vec_ba.verdicts[:n_pairs]),
        conf_ab=None if transcript.conf_ab is None else transcript.conf_ab[:n_pairs],
        conf_ba=None if transcript.conf_ba is None else transcript.conf_ba[:n_pairs],
    )


def _load_recorded_transcripts(config: RunConfig, records) -> dict[str, PairedTranscript]:
    log_path = _log_path(config)
    if not log_path.exists():
        raise RunError(f"no transcript log at {log_path}; run collection first")
    transcripts = transcripts_from_calls(read_log(log_path))
    missing = [r.instance.id for r in records if r.instance.id not in transcripts]
    if missing:
        raise RunError(
            f"transcript log lacks {len(missing)} instances (first: {missing[0]!r})"
        )
    short = [
        r.instance.id
        for r in records
        if transcripts[r.instance.id].n_pairs < config.n_max_pairs
    ]
    if short:
        raise RunError(
            f"{len(short)} transcripts are shorter than {config.n_max_pairs} pairs "
            f"(first: {short[0]!r}); resume collection first"
        )
    # A log may hold more pairs than this run's budget (n_max_pairs lowered
    # between runs); the whole evaluation sees exactly the budgeted prefix.
    return {
        r.instance.id: _truncate(transcripts[r.instance.id], config.n_max_pairs)
        for r in records
    }


def replay_experiment(config: RunConfig) -> ExperimentReport:
    """Rebuild the report purely from recorded transcripts; no judge calls."""
    records = load_dataset(config.dataset)
    transcripts = _load_recorded_transcripts(config, records)
    return evaluate_transcripts(config, records, transcripts)


def calibrate_experiment(config: RunConfig) -> GapModel:
    """Collect transcripts for the calibration subset only and fit the model."""
    records = load_dataset(config.dataset)
    instances = [r.instance for r in records]
    subset = select_calibration_set(
        instances, config.calibration_fraction, derive_seed(config.seed, "calibration")
    )
    Path(config.out_dir).mkdir(parents=True, exist_ok=True)
    existing = _prepare_log(config)
    judge = build_judge(config, records)
    with TranscriptLog(_log_path(config)) as log:
        transcripts = collect_transcripts(
            judge,
            subset,
            config.n_max_pairs,
            log,
            existing=existing,
            concurrency=config.concurrency,
        )
    model, calibration_ids = fit_calibration(config, records, transcripts)
    save_gap_model(
        model, Path(config.out_dir) / "gap_model.json", training_ids=sorted(calibration_ids)
    )
    return model


__all__ = [
    "ALL_POLICIES",
    "RunConfig",
    "RunError",
    "build_judge",
    "calibrate_experiment",
    "config_from_file",
    "evaluate_transcripts",
    "fit_calibration",
    "replay_experiment",
    "run_experiment",
]
