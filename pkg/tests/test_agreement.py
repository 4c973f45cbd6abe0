"""Krippendorff's alpha against a from-first-principles pairwise oracle."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from hypermod.agreement import NoPairableValuesError, krippendorff_alpha


def oracle_alpha(grid) -> float:
    """Brute-force nominal alpha: explicit ordered-pair disagreement rates,
    no coincidence matrix."""
    units = [[v for v in row if v is not None] for row in grid]
    units = [u for u in units if len(u) >= 2]
    n = sum(len(u) for u in units)
    if n == 0:
        raise ValueError("nothing pairable")
    d_o = Fraction(0)
    for u in units:
        m = len(u)
        disagreements = sum(1 for i in range(m) for j in range(m) if i != j and u[i] != u[j])
        d_o += Fraction(disagreements, m - 1)
    d_o = d_o / n
    values = [v for u in units for v in u]
    d_e = Fraction(
        sum(1 for i in range(n) for j in range(n) if i != j and values[i] != values[j]),
        n * (n - 1),
    )
    if d_e == 0:
        return 1.0
    return float(1 - d_o / d_e)


def test_perfect_agreement_is_exactly_one():
    grid = [["a", "a"], ["b", "b"], ["a", "a"], ["c", "c"]]
    report = krippendorff_alpha(grid)
    assert report.alpha == 1.0
    assert report.observed_disagreement == 0.0


def test_four_unit_worked_example():
    # (a,a),(a,b),(b,b),(b,b): oracle gives 8/15
    grid = [["a", "a"], ["a", "b"], ["b", "b"], ["b", "b"]]
    report = krippendorff_alpha(grid)
    assert report.alpha == pytest.approx(8 / 15, abs=1e-12)
    assert report.alpha == pytest.approx(oracle_alpha(grid), abs=1e-12)
    assert report.n == 8


def test_single_unit_two_disagreeing_ratings():
    # With the small-sample corrected expected disagreement this is exactly
    # chance level, not below it: D_o = D_e = 2.
    grid = [["a", "b"]]
    report = krippendorff_alpha(grid)
    assert report.alpha == pytest.approx(oracle_alpha(grid), abs=1e-12)
    assert report.alpha == 0.0


def test_systematic_disagreement_goes_negative():
    grid = [["a", "b"], ["b", "a"]]
    report = krippendorff_alpha(grid)
    assert report.alpha == pytest.approx(-0.5, abs=1e-12)
    assert report.alpha == pytest.approx(oracle_alpha(grid), abs=1e-12)
    assert report.alpha < 0


def test_missing_values_are_skipped():
    grid = [["a", None, "a"], [None, "b", "b"], ["c", None, None]]  # third unit unpairable
    report = krippendorff_alpha(grid)
    assert report.n == 4
    assert report.alpha == 1.0


def test_no_pairable_values_raises():
    with pytest.raises(NoPairableValuesError):
        krippendorff_alpha([["a", None], [None, "b"]])
    with pytest.raises(NoPairableValuesError):
        krippendorff_alpha([])


def test_degenerate_single_category_grid():
    report = krippendorff_alpha([["a", "a"], ["a", "a"]])
    assert report.alpha == 1.0
    assert report.degenerate


def test_oracle_equivalence_on_random_grids():
    rng = random.Random(123)
    labels = ["w", "x", "y", "z"]
    for trial in range(100):
        units = rng.randrange(1, 11)
        annotators = rng.randrange(2, 5)
        n_labels = rng.randrange(2, 5)
        grid = [
            [
                rng.choice(labels[:n_labels]) if rng.random() > 0.2 else None
                for _ in range(annotators)
            ]
            for _ in range(units)
        ]
        try:
            expected = oracle_alpha(grid)
        except ValueError:
            with pytest.raises(NoPairableValuesError):
                krippendorff_alpha(grid)
            continue
        report = krippendorff_alpha(grid)
        assert report.alpha == pytest.approx(expected, abs=1e-9), f"trial {trial}"


def test_random_label_grids_average_to_chance():
    alphas = []
    for seed in range(200):
        rng = random.Random(seed)
        grid = [[rng.choice(["a", "b", "c"]) for _ in range(3)] for _ in range(200)]
        alphas.append(krippendorff_alpha(grid).alpha)
    assert abs(sum(alphas) / len(alphas)) < 0.05


def test_invariance_under_label_renaming_and_column_permutation():
    rng = random.Random(31)
    for _ in range(30):
        grid = [[rng.choice(["a", "b", "c"]) for _ in range(4)] for _ in range(12)]
        base = krippendorff_alpha(grid).alpha
        renamed = [[{"a": "zz", "b": "qq", "c": "mm"}[v] for v in row] for row in grid]
        assert krippendorff_alpha(renamed).alpha == pytest.approx(base, abs=1e-12)
        order = [3, 0, 2, 1]
        permuted = [[row[i] for i in order] for row in grid]
        assert krippendorff_alpha(permuted).alpha == pytest.approx(base, abs=1e-12)


def test_published_low_agreement_value_falls_in_abandon_band():
    # The abandonment case the alpha gate exists for: a 4-human panel around
    # 0.25 is far below the customary 0.667 minimum.
    rng = random.Random(202)
    grid = []
    for _ in range(60):
        base = rng.choice(["meaning", "habit", "social"])
        row = [base if rng.random() < 0.55 else rng.choice(["meaning", "habit", "social"])
               for _ in range(4)]
        grid.append(row)
    report = krippendorff_alpha(grid)
    assert report.alpha < 0.667
    assert report.alpha == pytest.approx(oracle_alpha(grid), abs=1e-9)
