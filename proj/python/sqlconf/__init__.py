"""Text-to-SQL confidence scoring: bank generation, retrieval, and AUROC."""

from sqlconf._core import (
    ContractError,
    QuestionIndex,
    UndefinedMetricError,
    compute_auroc,
    cosine,
    embed,
    embedding_confidence,
    execute_sql,
    generate_bank,
    load_bank_questions,
    results_match,
    run_simulated_evaluation,
)

__all__ = [
    "ContractError",
    "QuestionIndex",
    "UndefinedMetricError",
    "compute_auroc",
    "cosine",
    "embed",
    "embedding_confidence",
    "execute_sql",
    "generate_bank",
    "load_bank_questions",
    "results_match",
    "run_simulated_evaluation",
]
