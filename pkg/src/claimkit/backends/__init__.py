"""External-evaluator handles: judges, embeddings, difficulty verifier, cache."""

from .cache import DecodingParams, DiskCache, MemoryCache, cache_key, prompt_digest
from .difficulty import (
    FixtureVerifierBackend,
    HttpVerifierBackend,
    VerifierBackend,
    difficulty_score,
)
from .embeddings import (
    EmbeddingBackend,
    FixtureEmbeddingBackend,
    HttpEmbeddingBackend,
    cosine,
    embed,
)
from .judges import (
    FixtureJudgeBackend,
    HttpJudgeBackend,
    JudgeBackend,
    JudgeParseError,
    ProtocolError,
    TransportError,
    judge_generate,
)
from .parsers import (
    ATOMICITY_KEYS,
    AtomicityChecklist,
    ThreeWayVerdict,
    parse_atomicity,
    parse_binary_answer,
    parse_question_list,
    parse_verdict,
)
from .templates import TemplateId, TEMPLATES, render_prompt, template_slots

__all__ = [
    "ATOMICITY_KEYS",
    "AtomicityChecklist",
    "DecodingParams",
    "DiskCache",
    "EmbeddingBackend",
    "FixtureEmbeddingBackend",
    "FixtureJudgeBackend",
    "FixtureVerifierBackend",
    "HttpEmbeddingBackend",
    "HttpJudgeBackend",
    "HttpVerifierBackend",
    "JudgeBackend",
    "JudgeParseError",
    "MemoryCache",
    "ProtocolError",
    "TEMPLATES",
    "TemplateId",
    "ThreeWayVerdict",
    "TransportError",
    "VerifierBackend",
    "cache_key",
    "cosine",
    "difficulty_score",
    "embed",
    "judge_generate",
    "parse_atomicity",
    "parse_binary_answer",
    "parse_question_list",
    "parse_verdict",
    "prompt_digest",
    "render_prompt",
    "template_slots",
]
