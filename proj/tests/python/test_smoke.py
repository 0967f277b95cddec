import numpy as np
import pytest

import pylfc


def test_dispatch_balances_and_equalizes_marginal_cost():
    q = np.array([0.95, 0.85, 1.2, 0.92])
    pd = np.array([-0.2, -0.25, -0.15, -0.2])
    p = pylfc.optimal_dispatch(pd, q)
    assert abs((p + pd).sum()) < 1e-12
    assert np.ptp(2 * q * p) < 1e-12


def test_dispatch_rejects_mismatched_lengths():
    with pytest.raises(ValueError):
        pylfc.optimal_dispatch(np.zeros(3), np.ones(4))


def test_short_scenario_one_run():
    out = pylfc.simulate(scenario=1, horizon=5.0)
    assert not out["aborted"]
    assert out["omega"].shape == (len(out["t"]), 4)
    assert out["theta"].shape[1] == 4
    assert out["metrics"]["max_abs_omega"] < 1e-3
    assert out["t"][-1] == pytest.approx(5.0)


def test_seeded_noise_is_reproducible():
    a = pylfc.simulate(scenario=2, horizon=3.0, seed=5)
    b = pylfc.simulate(scenario=2, horizon=3.0, seed=5)
    assert np.array_equal(a["omega"], b["omega"])


def test_solvability_report():
    r = pylfc.check_solvability()
    assert r["passes"] is False
    assert r["hyperbolic_modulo_family"] is True
    assert r["near_zero"] == 4
    assert r["jacobian"].shape == (12, 12)


def test_bad_config_path():
    with pytest.raises(ValueError):
        pylfc.simulate(config="/nonexistent.ini", horizon=1.0)


def test_config_text_round_trips_scenario():
    assert "[network]" in pylfc.format_config()
