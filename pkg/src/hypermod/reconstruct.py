"""Reverse-engineer confusion matrices from published rounded metrics.

Given per-class precision/recall/support and accuracy (all as printed, i.e.
rounded), exhaustively enumerate every integer matrix whose recomputed
metrics round back to the inputs. Recall bounds pin each diagonal cell to a
narrow range, precision bounds pin the column sums, and the off-diagonal
cells reduce to a small transportation enumeration, so the search stays tiny
even when a class prints 0/0/0.

Optional per-class F1 targets act as an extra filter; when they eliminate
every candidate that the P/R-only search admits, the result carries an
inconsistency report naming the impossible cells instead of candidates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .labels import Task
from .metrics import ConfusionMatrix, EvaluationReport, evaluate, round2


@dataclass(frozen=True)
class TableTargets:
    """Published figures to match: everything compared after 2-decimal rounding."""

    task: Task
    labels: tuple[str, ...]
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    support: tuple[int, ...]
    accuracy: float
    f1: tuple[float, ...] | None = None
    macro: tuple[float, float, float] | None = None
    weighted: tuple[float, float, float] | None = None

    def __post_init__(self) -> None:
        k = len(self.labels)
        for name, seq in (
            ("precision", self.precision),
            ("recall", self.recall),
            ("support", self.support),
        ):
            if len(seq) != k:
                raise ValueError(f"{name} must have one entry per label")
        if self.f1 is not None and len(self.f1) != k:
            raise ValueError("f1 must have one entry per label")


@dataclass
class ReconstructionResult:
    targets: TableTargets
    candidates: list[ConfusionMatrix] = field(default_factory=list)
    inconsistencies: list[dict] = field(default_factory=list)
    complete: bool = True

    @property
    def consistent(self) -> bool:
        return bool(self.candidates)


def _values_matching(numerators_limit: int, target: float, denom: int) -> list[int]:
    """Integers t in [0, limit] with round2(t/denom) == round2(target)."""
    if denom == 0:
        return [0]
    want = round2(target)
    return [t for t in range(numerators_limit + 1) if round2(t / denom) == want]


def _column_candidates(tp: int, target_precision: float, max_col: int) -> list[int]:
    want = round2(target_precision)
    out = []
    for c in range(tp, max_col + 1):
        p = tp / c if c else 0.0
        if round2(p) == want:
            out.append(c)
    return out


def _off_diagonal_fills(
    row_margins: list[int], col_margins: list[int], max_solutions: int
) -> list[list[list[int]]]:
    """All non-negative integer fills of the off-diagonal cells with the given margins."""
    k = len(row_margins)
    cells = [(i, j) for i in range(k) for j in range(k) if i != j]
    solutions: list[list[list[int]]] = []
    grid = [[0] * k for _ in range(k)]
    col_left = list(col_margins)

    def later_capacity(idx: int, row: int) -> int:
        # capacity still reachable for `row` from cells at position >= idx
        return sum(col_left[j] for (i, j) in cells[idx:] if i == row)

    def rec(idx: int, row_left: list[int]) -> None:
        if len(solutions) >= max_solutions:
            return
        if idx == len(cells):
            if all(r == 0 for r in row_left) and all(c == 0 for c in col_left):
                solutions.append([row[:] for row in grid])
            return
        i, j = cells[idx]
        hi = min(row_left[i], col_left[j])
        lo = max(0, row_left[i] - (later_capacity(idx, i) - col_left[j]))
        for v in range(lo, hi + 1):
            grid[i][j] = v
            row_left[i] -= v
            col_left[j] -= v
            rec(idx + 1, row_left)
            grid[i][j] = 0
            row_left[i] += v
            col_left[j] += v

    rec(0, list(row_margins))
    return solutions


def _matches_targets(report: EvaluationReport, targets: TableTargets, check_f1: bool) -> bool:
    for m, p, r, s in zip(report.per_class, targets.precision, targets.recall, targets.support):
        if m.support != s:
            return False
        if round2(m.precision) != round2(p) or round2(m.recall) != round2(r):
            return False
    if round2(report.accuracy) != round2(targets.accuracy):
        return False
    if check_f1 and targets.f1 is not None:
        for m, f in zip(report.per_class, targets.f1):
            if round2(m.f1) != round2(f):
                return False
    if targets.macro is not None:
        got = (report.macro_precision, report.macro_recall, report.macro_f1)
        if any(round2(g) != round2(w) for g, w in zip(got, targets.macro)):
            return False
    if targets.weighted is not None:
        got = (report.weighted_precision, report.weighted_recall, report.weighted_f1)
        if any(round2(g) != round2(w) for g, w in zip(got, targets.weighted)):
            return False
    return True


def reconstruct_from_table(targets: TableTargets, max_candidates: int = 10_000) -> ReconstructionResult:
    """Enumerate all matrices consistent with the printed table.

    When per-class F1 figures are supplied and rule out every matrix the
    precision/recall/accuracy search admits, the result has no candidates
    and an inconsistency entry per impossible F1 cell.
    """
    k = len(targets.labels)
    n = sum(targets.support)
    result = ReconstructionResult(targets=targets)

    diag_options = [
        _values_matching(s, r, s) for r, s in zip(targets.recall, targets.support)
    ]
    lenient: list[ConfusionMatrix] = []
    for diag in itertools.product(*diag_options):
        if round2(sum(diag) / n) != round2(targets.accuracy):
            continue
        off_budget = n - sum(diag)
        col_options = [
            _column_candidates(tp, p, min(n, tp + off_budget))
            for tp, p in zip(diag, targets.precision)
        ]
        for cols in itertools.product(*col_options):
            if sum(cols) != n:
                continue
            row_margins = [s - t for s, t in zip(targets.support, diag)]
            col_margins = [c - t for c, t in zip(cols, diag)]
            if any(m < 0 for m in row_margins + col_margins):
                continue
            for fill in _off_diagonal_fills(row_margins, col_margins, max_candidates):
                counts = [
                    [diag[i] if i == j else fill[i][j] for j in range(k)] for i in range(k)
                ]
                matrix = ConfusionMatrix(
                    task=targets.task,
                    labels=targets.labels,
                    counts=tuple(tuple(row) for row in counts),
                )
                report = evaluate(matrix)
                if _matches_targets(report, targets, check_f1=False):
                    lenient.append(matrix)
                if len(lenient) >= max_candidates:
                    result.complete = False
                    break
            if not result.complete:
                break
        if not result.complete:
            break

    if targets.f1 is None:
        result.candidates = lenient
        return result

    strict = [
        m for m in lenient if _matches_targets(evaluate(m), targets, check_f1=True)
    ]
    if strict:
        result.candidates = strict
        return result

    # No matrix satisfies the printed F1s: report which cells are impossible.
    for i, label in enumerate(targets.labels):
        stated = round2(targets.f1[i])
        achievable = sorted({round2(evaluate(m).per_class[i].f1) for m in lenient})
        if stated not in achievable:
            result.inconsistencies.append(
                {
                    "label": label,
                    "stated_f1": targets.f1[i],
                    "achievable_f1": achievable,
                    "derived_from": "precision/recall-consistent candidates",
                }
            )
    return result
