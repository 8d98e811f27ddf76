"""Order-swapped repeated pairwise judging with adaptive early stopping.

The library mitigates position bias in LLM-as-a-judge comparisons by
repeating each judgment under both candidate orderings and aggregating by
majority vote, with policies that adaptively decide how many paired
repetitions each instance needs. An exact Bernoulli oracle provides ground
truth for verifying the stochastic policies.
"""

from .calibration import (
    GapModel,
    confidence_gap,
    fit_gap_model,
    load_gap_model,
    save_gap_model,
    select_calibration_set,
)
from .datasets import (
    DatasetRecord,
    MixtureComponent,
    load_dataset,
    params_by_id,
    simulate_dataset,
    write_dataset,
)
from .judges import (
    BernoulliParams,
    ConfidenceModel,
    HttpJudge,
    Judge,
    JudgeError,
    PromptTemplate,
    SimulatedJudge,
    parse_response,
    render_prompt,
)
from .model import (
    BiasLabel,
    BiasProfile,
    ConsensusOutcome,
    JudgmentCall,
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
from .oracle import (
    OracleResult,
    brute_force_consensus_distribution,
    brute_force_early_stopping_stats,
    exact_consensus_distribution,
    exact_early_stopping_stats,
)
from .report import (
    ExperimentReport,
    PolicyMetrics,
    build_report,
    report_digest,
    score_outcome,
    write_report_files,
)
from .runner import (
    RunConfig,
    RunError,
    calibrate_experiment,
    replay_experiment,
    run_experiment,
)
from .strategies import (
    PolicyKind,
    PolicyResult,
    PolicySpec,
    TranscriptExhausted,
    budget_pairs,
    replay_policy,
    run_confidence_based,
    run_early_stopping,
    run_policy,
    run_static_consensus,
    run_swap_once,
)
from .transcripts import TranscriptLog, collect_transcripts, read_log, transcripts_from_calls

__version__ = "0.1.0"
