"""Task, adversary, classifier and learner abstractions plus the evaluation engine."""
from __future__ import annotations

from .evaluate import evaluate, perturbed_batch, worker_count
from .learners import (
    BASELINES,
    InsufficientData,
    LearnedSpanModel,
    Unsaturated,
    baseline_battery,
    evaluator_pdf,
    generator_sample,
    rank_trajectory,
    span_learner,
    train_baseline,
)
from .report import (
    CSV_COLUMNS,
    ExperimentReport,
    hoeffding_radius,
    reports_to_csv,
    reports_to_json,
)
from .task import (
    ABSTAIN,
    Adversary,
    BudgetViolation,
    Classifier,
    Identity,
    RandomFlips,
    SecretUnavailable,
    TaskFamily,
    TaskInstance,
    coin_classifier,
    constant_classifier,
    distance,
    first_bit_classifier,
)

__all__ = [
    "ABSTAIN", "Adversary", "BASELINES", "BudgetViolation", "CSV_COLUMNS", "Classifier",
    "ExperimentReport", "Identity", "InsufficientData", "LearnedSpanModel", "RandomFlips",
    "SecretUnavailable", "TaskFamily", "TaskInstance", "Unsaturated", "baseline_battery",
    "coin_classifier", "constant_classifier", "distance", "evaluate", "evaluator_pdf",
    "first_bit_classifier", "generator_sample", "hoeffding_radius", "perturbed_batch",
    "rank_trajectory", "reports_to_csv", "reports_to_json", "span_learner",
    "train_baseline", "worker_count",
]
