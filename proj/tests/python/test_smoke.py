import math

import pytest

import degpar


def test_beta_map_inverse_round_trip():
    beta = 0.7
    img = degpar.beta_map(beta, 0.3, 0.5, 1.2, 0.4, 2.5)
    back = degpar.beta_map(degpar.inverse_beta(beta), img["alpha1"], img["alpha2"], img["c"], img["m"], 2.5)
    assert back["alpha1"] == pytest.approx(0.3, abs=1e-12)
    assert back["alpha2"] == pytest.approx(0.5, abs=1e-12)
    assert back["c"] == pytest.approx(1.2, abs=1e-12)
    assert back["m"] == pytest.approx(0.4, abs=1e-12)


def test_compose_with_inverse_is_identity():
    assert degpar.compose_beta(0.4, degpar.inverse_beta(0.4)) == pytest.approx(0.0, abs=1e-15)


def test_default_window_and_reduction():
    w = degpar.validate_window()
    assert w["pass"]
    assert w["ratio"] == pytest.approx(0.5)
    model, chain = degpar.reduce({"drift_b": [0.4], "drift_c": 1.3, "alpha1": 0.3, "alpha2": 0.3})
    assert math.isfinite(model["alpha"])
    assert isinstance(chain, (list, dict))


def test_config_error_names_key():
    with pytest.raises(ValueError, match="colour"):
        degpar.validate_window({"colour": 1})


def test_suites_and_check():
    assert "param_calculus" in degpar.suite_checks("calculus")
    r = degpar.run_check("param_calculus")
    assert r["pass"]
    assert r["constant"] <= 1e-12


def test_solve_elliptic_manufactured():
    out = degpar.solve_elliptic({"grid_j": 128, "nx": 8})
    assert out["residual"] < 1e-8
    assert out["relative_error"] < 1e-2
