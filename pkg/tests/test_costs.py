"""Agency-cost arithmetic: the published scenario and its invariances."""

from __future__ import annotations

import math
from dataclasses import replace

import pytest

from hypermod.costs import CostScenario, UnknownPresetError, compute, preset

PAPER = preset("paper")


def test_paper_preset_reproduces_published_figures():
    report = compute(PAPER)
    assert report.baseline_daily == 6000.0
    assert report.baseline_per_wallet == 0.024
    assert report.amortized_dev_daily == pytest.approx(41.10, abs=0.005)
    assert report.system_daily == pytest.approx(66.10, abs=0.005)
    assert report.system_per_wallet == pytest.approx(0.00001322, abs=5e-9)
    assert report.reduction_ratio == pytest.approx(1815, abs=1)
    assert report.counterfactual_daily_at_target == 120_000.0


def test_paper_report_carries_overhead_rationale():
    report = compute(PAPER)
    assert any("overhead_daily=20.00" in note for note in report.notes)
    assert any("95%" in note for note in report.notes)  # headline reported as a claim
    assert "overhead" in report.format()


def test_zero_cost_system_reports_infinite_ratio():
    scenario = replace(PAPER, api_daily=0.0, dev_total=0.0, overhead_daily=0.0)
    report = compute(scenario)
    assert report.system_daily == 0.0
    assert math.isinf(report.reduction_ratio)
    assert report.to_record()["reduction_ratio"] == "inf"


def test_unit_case():
    scenario = CostScenario(
        moderators=1,
        hours_per_day=1,
        hourly_rate=1.0,
        fte_fraction=1.0,
        wallets_baseline=1,
        api_daily=0.0,
        dev_total=0.0,
        amortization_days=1,
        overhead_daily=0.0,
        wallets_target=1,
    )
    report = compute(scenario)
    assert report.baseline_daily == 1.0
    assert report.baseline_per_wallet == 1.0


def test_linearity_in_hourly_rate():
    doubled = compute(replace(PAPER, hourly_rate=PAPER.hourly_rate * 2))
    base = compute(PAPER)
    assert doubled.baseline_daily == 2 * base.baseline_daily
    assert doubled.baseline_per_wallet == 2 * base.baseline_per_wallet
    assert doubled.system_daily == base.system_daily
    assert doubled.system_per_wallet == base.system_per_wallet


def test_ratio_invariant_under_currency_rescaling():
    base = compute(PAPER)
    for scale in (0.5, 3.0, 117.0):
        rescaled = compute(
            replace(
                PAPER,
                hourly_rate=PAPER.hourly_rate * scale,
                api_daily=PAPER.api_daily * scale,
                dev_total=PAPER.dev_total * scale,
                overhead_daily=PAPER.overhead_daily * scale,
            )
        )
        assert rescaled.reduction_ratio == pytest.approx(base.reduction_ratio)


def test_counterfactual_identity():
    report = compute(PAPER)
    assert report.counterfactual_daily_at_target / PAPER.wallets_target == pytest.approx(
        report.baseline_per_wallet
    )


def test_scenario_validation():
    with pytest.raises(ValueError):
        replace(PAPER, wallets_target=0)
    with pytest.raises(ValueError):
        replace(PAPER, fte_fraction=0.0)
    with pytest.raises(ValueError):
        replace(PAPER, amortization_days=0)
    with pytest.raises(UnknownPresetError):
        preset("enterprise")


def test_scenario_record_round_trip():
    assert CostScenario.from_record(PAPER.to_record()) == PAPER
