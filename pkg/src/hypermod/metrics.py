"""Confusion matrices and the evaluation report (per-class P/R/F1, macro, weighted).

All metrics are computed and kept at full precision; display rounding is
2 decimals, half-up, applied only in the rounded views used for golden-file
comparison. Zero denominators yield 0 by convention (a class with support
but no correct or predicted instances reports 0/0/0).
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .labels import Task, labels_for, validate_label


def round2(value: float) -> float:
    """2-decimal half-up display rounding."""
    return float(Decimal(repr(float(value))).quantize(Decimal("0.01"), ROUND_HALF_UP))


class EmptyMatrixError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    """Square count matrix: rows are gold labels, columns predicted."""

    task: Task
    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        k = len(self.labels)
        if len(self.counts) != k or any(len(row) != k for row in self.counts):
            raise ValueError("counts must be square over the label set")
        if any(c < 0 or c != int(c) for row in self.counts for c in row):
            raise ValueError("counts must be non-negative integers")

    @property
    def n(self) -> int:
        return sum(sum(row) for row in self.counts)

    def row_sum(self, i: int) -> int:
        return sum(self.counts[i])

    def col_sum(self, j: int) -> int:
        return sum(row[j] for row in self.counts)

    def to_record(self) -> dict:
        return {
            "task": self.task.value,
            "labels": list(self.labels),
            "counts": [list(row) for row in self.counts],
        }


def confusion(pairs: list[tuple[str, str]], task: Task) -> ConfusionMatrix:
    """Count (gold, predicted) pairs; any label outside the task set is rejected."""
    task = Task(task)
    labels = labels_for(task)
    index = {label: i for i, label in enumerate(labels)}
    grid = [[0] * len(labels) for _ in labels]
    for gold, predicted in pairs:
        validate_label(task, gold)
        validate_label(task, predicted)
        grid[index[gold]][index[predicted]] += 1
    return ConfusionMatrix(task=task, labels=labels, counts=tuple(tuple(r) for r in grid))


def matrix_from_counts(task: Task, counts: list[list[int]]) -> ConfusionMatrix:
    return ConfusionMatrix(
        task=Task(task),
        labels=labels_for(Task(task)),
        counts=tuple(tuple(int(c) for c in row) for row in counts),
    )


@dataclass(frozen=True)
class ClassMetrics:
    label: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvaluationReport:
    task: Task
    per_class: tuple[ClassMetrics, ...]
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    n: int

    def rounded(self) -> dict:
        """The display view: every figure 2-decimal half-up, rows in label order."""
        return {
            "per_class": {
                m.label: {
                    "precision": round2(m.precision),
                    "recall": round2(m.recall),
                    "f1": round2(m.f1),
                    "support": m.support,
                }
                for m in self.per_class
            },
            "accuracy": round2(self.accuracy),
            "macro": {
                "precision": round2(self.macro_precision),
                "recall": round2(self.macro_recall),
                "f1": round2(self.macro_f1),
            },
            "weighted": {
                "precision": round2(self.weighted_precision),
                "recall": round2(self.weighted_recall),
                "f1": round2(self.weighted_f1),
            },
            "n": self.n,
        }

    def to_record(self) -> dict:
        return {
            "task": self.task.value,
            "per_class": [
                {
                    "label": m.label,
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for m in self.per_class
            ],
            "accuracy": self.accuracy,
            "macro": [self.macro_precision, self.macro_recall, self.macro_f1],
            "weighted": [self.weighted_precision, self.weighted_recall, self.weighted_f1],
            "n": self.n,
            "rounded": self.rounded(),
        }


def evaluate(matrix: ConfusionMatrix) -> EvaluationReport:
    if matrix.n == 0:
        raise EmptyMatrixError("cannot evaluate an empty matrix")
    k = len(matrix.labels)
    per_class = []
    ps, rs, fs, supports = [], [], [], []
    for i, label in enumerate(matrix.labels):
        tp = matrix.counts[i][i]
        predicted = matrix.col_sum(i)
        support = matrix.row_sum(i)
        p = tp / predicted if predicted else 0.0
        r = tp / support if support else 0.0
        f = 2 * p * r / (p + r) if (p + r) else 0.0
        per_class.append(ClassMetrics(label=label, precision=p, recall=r, f1=f, support=support))
        ps.append(p)
        rs.append(r)
        fs.append(f)
        supports.append(support)
    n = matrix.n
    accuracy = sum(matrix.counts[i][i] for i in range(k)) / n
    return EvaluationReport(
        task=matrix.task,
        per_class=tuple(per_class),
        accuracy=accuracy,
        macro_precision=sum(ps) / k,
        macro_recall=sum(rs) / k,
        macro_f1=sum(fs) / k,
        weighted_precision=sum(p * s for p, s in zip(ps, supports)) / n,
        weighted_recall=sum(r * s for r, s in zip(rs, supports)) / n,
        weighted_f1=sum(f * s for f, s in zip(fs, supports)) / n,
        n=n,
    )


def format_report(report: EvaluationReport) -> str:
    """Plain-text table mirroring the export layout."""
    rounded = report.rounded()
    width = max(len(m.label) for m in report.per_class) + 2
    lines = [f"{'':<{width}}precision  recall  f1-score  support"]
    for m in report.per_class:
        row = rounded["per_class"][m.label]
        lines.append(
            f"{m.label:<{width}}{row['precision']:>9.2f}{row['recall']:>8.2f}"
            f"{row['f1']:>10.2f}{m.support:>9d}"
        )
    lines.append(f"{'accuracy':<{width}}{'':>9}{'':>8}{rounded['accuracy']:>10.2f}{report.n:>9d}")
    for name, key in (("macro avg", "macro"), ("weighted avg", "weighted")):
        block = rounded[key]
        lines.append(
            f"{name:<{width}}{block['precision']:>9.2f}{block['recall']:>8.2f}"
            f"{block['f1']:>10.2f}{report.n:>9d}"
        )
    return "\n".join(lines)
