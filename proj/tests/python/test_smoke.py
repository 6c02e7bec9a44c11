import math

import pytest

import auctiondyn as ad


def test_grid_roundtrip():
    grid = ad.BidGrid(10)
    assert grid.delta == 10
    assert grid.value_of(3) == pytest.approx(0.3)
    assert grid.nearest_index(0.31) == 3
    with pytest.raises(Exception):
        grid.value_of(11)


def test_mechanisms_and_verification():
    grid = ad.BidGrid(10)
    spa = ad.make_spa(grid, 2, reserve=0)
    assert spa.pay(1, [4, 7]) == pytest.approx(0.4)
    report = ad.verify_ic(spa)
    assert report["status"] == "IC_WEAK"
    assert report["gamma"] == 0.0

    stair = ad.make_staircase(grid, 2)
    strict = ad.verify_ic(stair)
    assert strict["status"] == "IC_STRICT"
    assert strict["gamma"] == pytest.approx(0.0025, abs=1e-12)

    blended = ad.mix(0.5, spa, stair)
    assert ad.verify_ic(blended)["gamma"] == pytest.approx(0.00125, abs=1e-12)

    det = ad.make_spa(grid, 2, reserve=0, tie="favor_lower_index")
    assert det.deterministic()
    assert ad.characterize_deterministic(det)["pass"]


def test_payment_from_allocation():
    grid = ad.BidGrid(10)
    row = [b / 20.0 for b in range(11)]
    payments = ad.payment_from_allocation(grid, row, "linear")
    for b in range(11):
        assert payments[b] == pytest.approx((b / 10.0) ** 2 / 4.0, abs=1e-12)


def test_myerson_reserve():
    grid = ad.BidGrid(10)
    pmf = ad.uniform_pmf(grid)
    assert ad.is_regular(grid, pmf)
    assert ad.myerson_reserve(grid, pmf) == 5
    phi = ad.virtual_values(grid, pmf)
    assert phi[10] == pytest.approx(1.0)


def _config(horizon=2000, seed=11):
    return {
        "delta": 10,
        "horizon": horizon,
        "master_seed": seed,
        "bidders": [{"value": 3}, {"value": 6}],
        "schedule": {
            "kind": "constant",
            "mechanism": {"kind": "staircase", "delta": 10, "n": 2},
        },
        "mean_based_delta": 0.05,
    }


def test_simulation_summary_and_determinism():
    first = ad.simulate(_config(), trials=2, jobs=2)
    second = ad.simulate(_config(), trials=2, jobs=1)
    assert first == second
    assert first["horizon"] == 2000
    assert first["mean_based"]["pass"] == [True, True]
    assert first["regret"]["regret"] > 0.0
    assert len(first["final_tv"]) == 2

    shifted = ad.simulate(_config(seed=12), trials=2)
    assert shifted["mean_total_revenue"] != first["mean_total_revenue"]


def test_fit_scaling_exponent():
    points = [(float(t), float(t) ** 0.75) for t in (10**3, 10**4, 10**5, 10**6)]
    fit = ad.fit_scaling_exponent(points)
    assert fit["valid"]
    assert fit["exponent"] == pytest.approx(0.75, abs=1e-9)


def test_metagame_gain_zero_at_truth():
    gains = ad.metagame_gain(_config(horizon=200), bidder=0, jobs=2)
    assert gains[3] == 0.0
    assert len(gains) == 11


def test_preset_ids_exposed():
    ids = ad.preset_ids()
    assert "strict-ic-convergence" in ids
    assert "regret-constant-vs-twophase" in ids
