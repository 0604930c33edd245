"""Disorder ensembles: determinism, statistics, grid policy."""

import numpy as np
import pytest

from xxchains.dynamics import TimeGrid
from xxchains.ensemble import (
    clean_peak,
    disorder_curve,
    ensemble_grid,
    realization_peak,
    run_ensemble,
)
from xxchains.hamiltonians import DisorderConfig, p1_chain, p2_chain


def test_ensemble_grid_is_odd_and_centered():
    grid = ensemble_grid(10.0, n_points=241)
    times = grid.times
    assert len(times) == 241
    assert times[0] == 0.0
    assert times[-1] == pytest.approx(20.0)
    assert times[(len(times) - 1) // 2] == pytest.approx(10.0)
    with pytest.raises(ValueError):
        ensemble_grid(10.0, n_points=240)


def test_clean_peak_matches_calibration():
    chain = p1_chain()
    t_pk, v_pk = clean_peak(chain, TimeGrid(0.0, 45.0, 901))
    assert v_pk == pytest.approx(1.0, abs=0.02)
    assert t_pk == pytest.approx(22.5, rel=0.05)


def test_zero_strength_has_exactly_zero_std():
    chain = p1_chain()
    grid = ensemble_grid(22.51, n_points=41)
    cfg = DisorderConfig(kind="offdiagonal", strength=0.0, n_realizations=8, seed=3)
    stats = run_ensemble(chain, cfg, grid)
    assert stats.std == 0.0
    assert len(set(stats.peaks)) == 1


def test_identical_seeds_identical_statistics():
    chain = p2_chain(boundary_field=3.7)
    grid = ensemble_grid(13.0757, n_points=41)
    cfg = DisorderConfig(kind="both", strength=0.5, n_realizations=16, seed=11)
    a = run_ensemble(chain, cfg, grid)
    b = run_ensemble(chain, cfg, grid)
    assert np.array_equal(a.peaks, b.peaks)
    assert (a.mean, a.std) == (b.mean, b.std)


def test_thread_count_does_not_change_results():
    chain = p1_chain()
    grid = ensemble_grid(22.51, n_points=41)
    cfg = DisorderConfig(kind="diagonal", strength=0.8, n_realizations=12, seed=7)
    serial = run_ensemble(chain, cfg, grid, n_workers=1)
    threaded = run_ensemble(chain, cfg, grid, n_workers=4)
    assert np.array_equal(serial.peaks, threaded.peaks)


def test_statistics_peak_dominates_at_clean_peak():
    """The windowed maximum can only exceed the value at the clean peak time."""
    chain = p2_chain(boundary_field=3.7)
    grid = ensemble_grid(13.0757, n_points=41)
    cfg = DisorderConfig(kind="offdiagonal", strength=0.8, n_realizations=1, seed=0)
    peak = realization_peak(chain, cfg, 0, grid, statistic="peak")
    at_clean = realization_peak(chain, cfg, 0, grid, statistic="at-clean-peak")
    assert peak >= at_clean - 1e-12
    with pytest.raises(ValueError):
        realization_peak(chain, cfg, 0, grid, statistic="bogus")


def test_disorder_curve_monotone_strengths():
    chain = p2_chain(boundary_field=3.7)
    grid = ensemble_grid(13.0757, n_points=41)
    stats = disorder_curve(chain, "offdiagonal", (0.0, 0.5, 1.0), 40, 2024, grid)
    means = [s.mean for s in stats]
    assert means[0] == pytest.approx(0.9807, abs=0.01)
    assert means[0] > means[1] > means[2]
    assert stats[0].std == 0.0
