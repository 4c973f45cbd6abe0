"""Model lifecycle gates: ship, keep iterating, check the humans, or abandon.

A task whose held-out macro F1 clears the gate is accepted. Below the gate,
the first lever is more curated examples and a retrain; once that lever is
exhausted the question becomes whether humans even agree on the labels, and
an agreement score under the alpha gate means the problem is not a
classification problem.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .agreement import AgreementReport
from .metrics import EvaluationReport


class Verdict(str, Enum):
    ACCEPT = "accept"
    ITERATE = "iterate"
    CHECK_AGREEMENT = "check_agreement"
    ABANDON = "abandon"


@dataclass(frozen=True)
class LifecycleGate:
    f1_threshold: float = 0.75
    alpha_threshold: float = 0.667


def lifecycle_decide(
    report: EvaluationReport,
    agreement: AgreementReport | None = None,
    gate: LifecycleGate = LifecycleGate(),
    exhausted_retraining: bool = False,
) -> Verdict:
    """Gate a held-out evaluation report.

    Macro F1 at or above the gate accepts. Otherwise, without agreement data
    the verdict is iterate (add curated examples, retrain) or, when the
    caller signals retraining is exhausted, check_agreement (put the dataset
    in front of multiple annotators). With agreement data, alpha at or above
    the gate means the task is classifiable and worth another iteration;
    below it the task is abandoned.
    """
    if report.macro_f1 >= gate.f1_threshold:
        return Verdict.ACCEPT
    if agreement is None:
        return Verdict.CHECK_AGREEMENT if exhausted_retraining else Verdict.ITERATE
    if agreement.alpha >= gate.alpha_threshold:
        return Verdict.ITERATE
    return Verdict.ABANDON
