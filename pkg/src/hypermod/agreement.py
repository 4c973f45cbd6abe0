"""Krippendorff's alpha for nominal data, the gate on whether a labeling task
is classifiable at all.

Computed via the coincidence matrix: units with m >= 2 ratings contribute
each ordered rating pair with weight 1/(m-1). Observed disagreement is the
off-diagonal mass; expected disagreement comes from the label marginals with
the small-sample (n-1) correction. alpha = 1 - D_o/D_e: 1 is perfect
agreement, 0 chance-level, below 0 systematic disagreement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence


class NoPairableValuesError(ValueError):
    pass


@dataclass(frozen=True)
class AgreementReport:
    n: int  # pairable values
    labels: tuple[str, ...]
    coincidences: tuple[tuple[float, ...], ...]
    observed_disagreement: float
    expected_disagreement: float
    alpha: float
    degenerate: bool = False  # all ratings one category: alpha defined as 1

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "labels": list(self.labels),
            "coincidences": [list(row) for row in self.coincidences],
            "observed_disagreement": self.observed_disagreement,
            "expected_disagreement": self.expected_disagreement,
            "alpha": self.alpha,
            "degenerate": self.degenerate,
        }


def krippendorff_alpha(grid: Sequence[Sequence[Hashable | None]]) -> AgreementReport:
    """Alpha over a units x annotators grid of nominal labels; None marks missing.

    Units with fewer than two ratings cannot pair and are skipped. Raises
    NoPairableValuesError when nothing pairs. A grid where every rating is
    the same single category has no expected disagreement; alpha is defined
    as 1 and the report is marked degenerate.
    """
    units = [[v for v in row if v is not None] for row in grid]
    units = [u for u in units if len(u) >= 2]
    if not units:
        raise NoPairableValuesError("no unit carries two or more ratings")

    labels = tuple(sorted({str(v) for u in units for v in u}))
    index = {label: i for i, label in enumerate(labels)}
    k = len(labels)

    o = [[0.0] * k for _ in range(k)]
    for u in units:
        m = len(u)
        for a in range(m):
            for b in range(m):
                if a != b:
                    o[index[str(u[a])]][index[str(u[b])]] += 1.0 / (m - 1)

    n_c = [sum(o[c]) for c in range(k)]
    n = sum(n_c)
    d_o = sum(o[c][d] for c in range(k) for d in range(k) if c != d)
    d_e = sum(n_c[c] * n_c[d] for c in range(k) for d in range(k) if c != d) / (n - 1)

    if d_e == 0:
        return AgreementReport(
            n=round(n),
            labels=labels,
            coincidences=tuple(tuple(row) for row in o),
            observed_disagreement=d_o,
            expected_disagreement=d_e,
            alpha=1.0,
            degenerate=True,
        )
    return AgreementReport(
        n=round(n),
        labels=labels,
        coincidences=tuple(tuple(row) for row in o),
        observed_disagreement=d_o,
        expected_disagreement=d_e,
        alpha=1.0 - d_o / d_e,
    )
