"""Holdout split, incremental sequential evaluation, and ranking metrics.

The protocol walks every test sequence position by position: at step i the
recommender sees the first i elements and is scored against the single true
next element. Per-step scores are averaged within each sequence first, then
mean and population standard deviation are taken across sequences, so every
test sequence carries the same weight regardless of its length.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .markov import (
    ContextModelStore,
    MarkovModel,
    RankedRecommendation,
    recommend_top_k,
    select_model,
    train_markov,
    build_context_store,
    DEFAULT_MIN_SUPPORT,
)
from .events import ElementVocabulary
from .sequences import InteractionSequence

REPORT_FORMAT = "hmi-adapt-report"
FORMAT_VERSION = 1

Recommender = Union[MarkovModel, ContextModelStore]


@dataclass(frozen=True)
class StepResult:
    """Outcome of predicting one position of one test sequence."""

    position: int
    returned_count: int
    rank_of_truth: Optional[int] = None

    def __post_init__(self) -> None:
        if self.rank_of_truth is not None and self.rank_of_truth > self.returned_count:
            raise ValueError("rank of the true element exceeds the returned list length")


def step_recall(step: StepResult) -> float:
    return 1.0 if step.rank_of_truth is not None else 0.0


def step_precision(step: StepResult) -> float:
    if step.rank_of_truth is None:
        return 0.0
    return 1.0 / step.returned_count


def step_reciprocal_rank(step: StepResult) -> float:
    if step.rank_of_truth is None:
        return 0.0
    return 1.0 / step.rank_of_truth


@dataclass(frozen=True)
class SplitResult:
    train: list[InteractionSequence]
    test: list[InteractionSequence]
    single_sequence_users: int


def split_train_test(corpus: Sequence[InteractionSequence]) -> SplitResult:
    """Hold out each user's chronologically last sequence for testing.

    Users with a single sequence contribute only to the test side and are
    counted in ``single_sequence_users``.
    """
    if not corpus:
        raise ValueError("empty corpus")
    by_user: dict[str, list[InteractionSequence]] = {}
    for seq in corpus:
        by_user.setdefault(seq.user_id, []).append(seq)

    train: list[InteractionSequence] = []
    test: list[InteractionSequence] = []
    single = 0
    for sequences in by_user.values():
        ordered = sorted(sequences, key=lambda seq: seq.start_ms)
        train.extend(ordered[:-1])
        test.append(ordered[-1])
        if len(ordered) == 1:
            single += 1
    return SplitResult(train=train, test=test, single_sequence_users=single)


def _resolve(recommender: Recommender, sequence: InteractionSequence) -> MarkovModel:
    if isinstance(recommender, ContextModelStore):
        return select_model(recommender, sequence.context).model
    return recommender


def incremental_eval(
    recommender: Recommender,
    test: Sequence[InteractionSequence],
    k: int,
    backoff: bool = True,
) -> list[list[StepResult]]:
    """Score every position of every test sequence.

    A sequence of total length L (markers included) yields exactly L-1 steps;
    at step i the history is the first i elements and the ground truth is
    element i. A store resolves to the model for each sequence's context.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    grouped: list[list[StepResult]] = []
    for seq in test:
        model = _resolve(recommender, seq)
        steps: list[StepResult] = []
        for i in range(1, len(seq.events)):
            recommendation: RankedRecommendation = recommend_top_k(
                model, seq.events[:i], k, backoff=backoff
            )
            steps.append(
                StepResult(
                    position=i,
                    returned_count=len(recommendation),
                    rank_of_truth=recommendation.rank_of(seq.events[i]),
                )
            )
        grouped.append(steps)
    return grouped


@dataclass(frozen=True)
class EvaluationReport:
    """Cross-sequence means and population standard deviations at one order."""

    k: int
    precision_mean: float
    precision_std: float
    recall_mean: float
    recall_std: float
    mrr_mean: float
    mrr_std: float
    f1: float
    sequence_count: int
    step_count: int

    def to_doc(self) -> dict:
        return {
            "k": self.k,
            "precision_mean": self.precision_mean,
            "precision_std": self.precision_std,
            "recall_mean": self.recall_mean,
            "recall_std": self.recall_std,
            "mrr_mean": self.mrr_mean,
            "mrr_std": self.mrr_std,
            "f1": self.f1,
            "sequence_count": self.sequence_count,
            "step_count": self.step_count,
        }


def f1_from_means(precision_mean: float, recall_mean: float) -> float:
    """Harmonic mean of the cross-sequence precision and recall means."""
    if precision_mean + recall_mean == 0:
        return 0.0
    return 2 * precision_mean * recall_mean / (precision_mean + recall_mean)


def compute_metrics(grouped: Sequence[Sequence[StepResult]], k: int) -> EvaluationReport:
    """Aggregate grouped step results into one report."""
    if not grouped:
        raise ValueError("no evaluated sequences")
    precisions: list[float] = []
    recalls: list[float] = []
    mrrs: list[float] = []
    steps_total = 0
    for steps in grouped:
        if not steps:
            raise ValueError("a sequence group holds no steps")
        steps_total += len(steps)
        precisions.append(statistics.fmean(step_precision(s) for s in steps))
        recalls.append(statistics.fmean(step_recall(s) for s in steps))
        mrrs.append(statistics.fmean(step_reciprocal_rank(s) for s in steps))

    precision_mean = statistics.fmean(precisions)
    recall_mean = statistics.fmean(recalls)
    return EvaluationReport(
        k=k,
        precision_mean=precision_mean,
        precision_std=statistics.pstdev(precisions),
        recall_mean=recall_mean,
        recall_std=statistics.pstdev(recalls),
        mrr_mean=statistics.fmean(mrrs),
        mrr_std=statistics.pstdev(mrrs),
        f1=f1_from_means(precision_mean, recall_mean),
        sequence_count=len(grouped),
        step_count=steps_total,
    )


@dataclass(frozen=True)
class OrderComparison:
    """One split, one test set, one report per chain order."""

    k: int
    context_mode: bool
    backoff: bool
    min_support: int
    train_count: int
    test_count: int
    single_sequence_users: int
    reports: Mapping[int, EvaluationReport]

    def to_doc(self) -> dict:
        return {
            "format": REPORT_FORMAT,
            "format_version": FORMAT_VERSION,
            "k": self.k,
            "context_mode": self.context_mode,
            "backoff": self.backoff,
            "min_support": self.min_support,
            "train_sequences": self.train_count,
            "test_sequences": self.test_count,
            "single_sequence_users": self.single_sequence_users,
            "orders": {str(order): report.to_doc() for order, report in sorted(self.reports.items())},
        }


def compare_orders(
    corpus: Sequence[InteractionSequence],
    orders: Sequence[int],
    k: int = 3,
    context_mode: bool = False,
    min_support: int = DEFAULT_MIN_SUPPORT,
    backoff: bool = True,
    vocabulary: Optional[ElementVocabulary] = None,
) -> OrderComparison:
    """Evaluate several chain orders on one identical split.

    Every order trains on the same train set and is scored on the same test
    set, so the rows are directly comparable.
    """
    if not orders:
        raise ValueError("no orders given")
    split = split_train_test(corpus)
    reports: dict[int, EvaluationReport] = {}
    for order in orders:
        recommender: Recommender
        if context_mode:
            recommender = build_context_store(
                split.train, order, min_support=min_support, vocabulary=vocabulary
            )
        else:
            recommender = train_markov(split.train, order, vocabulary=vocabulary)
        grouped = incremental_eval(recommender, split.test, k, backoff=backoff)
        reports[order] = compute_metrics(grouped, k)
    return OrderComparison(
        k=k,
        context_mode=context_mode,
        backoff=backoff,
        min_support=min_support,
        train_count=len(split.train),
        test_count=len(split.test),
        single_sequence_users=split.single_sequence_users,
        reports=reports,
    )


def render_report_table(comparison: OrderComparison) -> str:
    """Plain-text table: metric rows by order columns, std in brackets."""
    orders = sorted(comparison.reports)
    header = ["Metric"] + [f"order={order}" for order in orders]

    def fmt(mean: float, std: Optional[float] = None) -> str:
        if std is None:
            return f"{mean:.6f}"
        return f"{mean:.6f} ({std:.6f})"

    rows = [
        ["Precision"] + [
            fmt(comparison.reports[o].precision_mean, comparison.reports[o].precision_std)
            for o in orders
        ],
        ["Recall"] + [
            fmt(comparison.reports[o].recall_mean, comparison.reports[o].recall_std)
            for o in orders
        ],
        ["MRR"] + [
            fmt(comparison.reports[o].mrr_mean, comparison.reports[o].mrr_std) for o in orders
        ],
        ["F1"] + [fmt(comparison.reports[o].f1) for o in orders],
        ["Sequences"] + [str(comparison.reports[o].sequence_count) for o in orders],
        ["Steps"] + [str(comparison.reports[o].step_count) for o in orders],
    ]

    widths = [max(len(row[col]) for row in [header] + rows) for col in range(len(header))]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
             for row in [header] + rows]
    return "\n".join(lines) + "\n"


def save_report(comparison: OrderComparison, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fp:
        json.dump(comparison.to_doc(), fp, indent=2, sort_keys=True)
        fp.write("\n")
