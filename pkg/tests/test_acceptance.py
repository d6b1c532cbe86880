"""Acceptance gate: the ten validation criteria at their stated tolerances.

Each test runs one criterion through the packaged suite, prints its
pass/fail line, and asserts the verdict. Criteria 6 and 10 are long
Monte Carlo runs (about 15 and 25 minutes respectively on one core).
"""

import pytest

from ndcgi.acceptance import run_criterion


def check(number):
    result = run_criterion(number)
    print(result.line())
    assert result.passed, result.line()
    return result


def test_criterion_01_matched_distance_minimum():
    result = check(1)
    assert result.runtime_s <= 5.0


def test_criterion_02_minima_equal_across_reference_colors():
    result = check(2)
    assert result.runtime_s <= 5.0


def test_criterion_03_signal_wavelength_dominance():
    result = check(3)
    assert result.runtime_s <= 5.0


def test_criterion_04_turbulence_crossover():
    result = check(4)
    assert result.runtime_s <= 5.0


def test_criterion_05_vacuum_reduction():
    result = check(5)
    assert result.runtime_s <= 1.0


def test_criterion_06_analytic_vs_monte_carlo_width():
    result = check(6)
    assert result.runtime_s <= 25 * 60


def test_criterion_07_speckle_correlation_statistics():
    result = check(7)
    assert result.runtime_s <= 2 * 60


def test_criterion_08_propagation_oracle():
    result = check(8)
    assert result.runtime_s <= 30.0


def test_criterion_09_reference_arm_turbulence_independence():
    result = check(9)
    assert result.runtime_s <= 60.0


def test_criterion_10_strong_turbulence_favors_red_reconstruction():
    result = check(10)
    assert result.runtime_s <= 30 * 60
