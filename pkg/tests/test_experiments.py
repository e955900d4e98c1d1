"""Experiment harness tests: sweeps, the low-rate study, CSV artifacts."""

import numpy as np
import pytest

from ehrenfest.experiments import (
    DEFAULT_NS,
    LOWRATE_MODEL,
    SCENARIOS,
    ConvergenceRow,
    run_convergence,
    run_lowrate_study,
    simulate_vasicek_paths,
    write_convergence_csv,
    write_curve_csv,
    write_path_csv,
)
from ehrenfest.pricing import Truncation


def test_scenario_parameter_sets():
    fav, T_fav = SCENARIOS["favourable"]
    assert (fav.k, fav.sigma, fav.theta, fav.r0, T_fav) == (0.2, 0.05, 0.08, 0.05, 1.0)
    unf, T_unf = SCENARIOS["unfavourable"]
    assert (unf.k, unf.sigma, unf.theta, unf.r0, T_unf) == (0.2, 0.2, 0.08, 0.05, 10.0)
    assert DEFAULT_NS == (4, 8, 16, 32, 64, 128, 200)


def test_run_convergence_rejects_bad_inputs():
    with pytest.raises(ValueError):
        run_convergence("nonsense")
    with pytest.raises(ValueError):
        run_convergence("favourable", [])


def test_run_convergence_rows():
    from ehrenfest.pricing import vasicek_to_ehrenfest
    from ehrenfest.shortrate import rate_to_state

    vp, T = SCENARIOS["favourable"]
    rows = run_convergence("favourable", [8, 4], Truncation(10, 30))
    assert [r.N for r in rows] == [4, 8]  # sorted by N
    for row in rows:
        assert isinstance(row, ConvergenceRow)
        assert np.isfinite(row.rel_error) and row.rel_error >= 0
        assert row.price_ehrenfest > 0 and row.price_vasicek > 0
        assert row.wall_time_s < 1.0
        assert row.rel_error == pytest.approx(
            abs(row.price_ehrenfest - row.price_vasicek) / row.price_vasicek
        )
        # snapped rate sits on the mapped grid, and the price respects the
        # mapped model's discount bounds
        model = vasicek_to_ehrenfest(vp, row.N)
        rate_to_state(row.r0_snapped, model)  # must not raise
        assert np.exp(-model.r_max * T) - 1e-12 <= row.price_ehrenfest
        assert row.price_ehrenfest <= np.exp(-model.r_min * T) + 1e-9


def test_run_convergence_improves_with_N():
    rows = run_convergence("favourable", [8, 128], Truncation(10, 30))
    assert rows[1].rel_error < rows[0].rel_error


def test_vasicek_path_shapes():
    params = SCENARIOS["favourable"][0]
    paths = simulate_vasicek_paths(params, 2.0, 3, seed=9, steps=100)
    assert len(paths) == 3
    for times, rates in paths:
        assert times.shape == (101,)
        assert rates.shape == (101,)
        assert rates[0] == params.r0
    again = simulate_vasicek_paths(params, 2.0, 3, seed=9, steps=100)
    for (t1, r1), (t2, r2) in zip(paths, again):
        np.testing.assert_array_equal(r1, r2)


@pytest.fixture(scope="module")
def study():
    return run_lowrate_study()


def test_lowrate_curve_shapes(study):
    assert study.vasicek_curve.model == "vasicek"
    assert study.ehrenfest_curve.model == "ehrenfest"
    np.testing.assert_array_equal(study.vasicek_curve.maturities, np.arange(1.0, 31.0))
    np.testing.assert_array_equal(study.ehrenfest_curve.maturities, np.arange(1.0, 31.0))
    assert np.all(study.vasicek_curve.prices > 0)
    assert np.all(study.ehrenfest_curve.prices > 0)


def test_lowrate_vasicek_pathology(study):
    prices = study.vasicek_curve.prices
    assert np.any(prices > 1.0)
    assert np.any(np.diff(prices) > 0)  # not monotone falling


def test_lowrate_ehrenfest_curve_well_behaved(study):
    prices = study.ehrenfest_curve.prices
    assert np.all(np.diff(prices) < 0)  # strictly decreasing in maturity
    assert np.all((prices > 0) & (prices <= 1.0))


def test_lowrate_path_stays_in_bounds(study):
    rates = study.ehrenfest_rates
    assert rates.min() >= LOWRATE_MODEL.r_min
    assert rates.max() <= LOWRATE_MODEL.r_max
    assert len(study.vasicek_paths) == 3


def test_lowrate_deterministic(study):
    again = run_lowrate_study()
    np.testing.assert_array_equal(study.ehrenfest_curve.prices, again.ehrenfest_curve.prices)
    np.testing.assert_array_equal(study.ehrenfest_path.times, again.ehrenfest_path.times)
    np.testing.assert_array_equal(study.vasicek_paths[0][1], again.vasicek_paths[0][1])


# ------------------------------------------------------------------ csv files


def test_convergence_csv_format(tmp_path):
    rows = run_convergence("favourable", [4, 8], Truncation(6, 20))
    out = tmp_path / "convergence_favourable.csv"
    write_convergence_csv(rows, out)
    text = out.read_text(encoding="utf-8")
    lines = text.splitlines()
    assert lines[0] == "N,price_ehrenfest,price_vasicek,rel_error,wall_time_s"
    assert len(lines) == 3
    assert "\r" not in text
    # shortest round-trip floats: parsing back reproduces the values exactly
    cells = lines[1].split(",")
    assert int(cells[0]) == 4
    assert float(cells[1]) == rows[0].price_ehrenfest
    assert float(cells[3]) == rows[0].rel_error


def test_curve_and_path_csv_deterministic_bytes(tmp_path, study):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_curve_csv(study.ehrenfest_curve, a)
    write_curve_csv(run_lowrate_study().ehrenfest_curve, b)
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == "T_years,price"

    pa, pb = tmp_path / "pa.csv", tmp_path / "pb.csv"
    write_path_csv(study.ehrenfest_path.times, study.ehrenfest_rates, pa)
    write_path_csv(study.ehrenfest_path.times, study.ehrenfest_rates, pb)
    assert pa.read_bytes() == pb.read_bytes()
    assert pa.read_text().splitlines()[0] == "time,rate"


def test_atomic_write_leaves_no_temp(tmp_path):
    out = tmp_path / "rows.csv"
    write_convergence_csv(run_convergence("favourable", [4], Truncation(4, 10)), out)
    assert out.exists()
    assert list(tmp_path.glob("*.tmp")) == []
