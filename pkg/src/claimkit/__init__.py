"""claimkit: claim-verification data curation and trace-reward scoring.

Two halves share one corpus model: a multi-stage curation funnel (rule
gates, difficulty banding, dedup, decontamination, silver decomposition,
stratified facility-location selection, long-evidence augmentation) and a
seven-signal reward ensemble over question-decomposition verification
traces, with pseudo-labels and group-normalized advantages for training.
"""

from . import backends, funnel, metrics, mock, synthetic
from .corpus import (
    ClaimRecord,
    DEFAULT_LABEL_MAP,
    IngestError,
    Label,
    count_tokens,
    entity_count,
    ingest_claims,
    lexical_overlap,
    tokenize,
    write_claims,
)
from .rewards import (
    Labeled,
    RewardBackends,
    RewardBreakdown,
    Unlabeled,
    coverage_reward,
    diversity_reward,
    format_reward,
    group_advantages,
    joint_quality_reward,
    necessity_reward,
    necessity_reward_relative,
    partition_supervision,
    pseudo_label,
    question_count_reward,
    total_reward,
    verification_reward,
)
from .trace import (
    Cycle,
    ParseReport,
    Trace,
    is_abstention,
    parse_trace,
    render_trace,
)

__version__ = "0.1.0"

__all__ = [
    "ClaimRecord",
    "Cycle",
    "DEFAULT_LABEL_MAP",
    "IngestError",
    "Label",
    "Labeled",
    "ParseReport",
    "RewardBackends",
    "RewardBreakdown",
    "Trace",
    "Unlabeled",
    "backends",
    "count_tokens",
    "coverage_reward",
    "diversity_reward",
    "entity_count",
    "format_reward",
    "funnel",
    "group_advantages",
    "ingest_claims",
    "is_abstention",
    "joint_quality_reward",
    "lexical_overlap",
    "metrics",
    "mock",
    "necessity_reward",
    "necessity_reward_relative",
    "parse_trace",
    "partition_supervision",
    "pseudo_label",
    "question_count_reward",
    "render_trace",
    "synthetic",
    "tokenize",
    "total_reward",
    "verification_reward",
    "write_claims",
]
