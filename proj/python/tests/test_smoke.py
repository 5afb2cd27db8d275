import json
import math

import pytest

import carnot


def test_builtin_groups_and_dimensions():
    names = carnot.builtin_groups()
    assert "h1" in names and "quaternionic-h1" in names
    h1 = carnot.Group("h1")
    assert h1.dim == 3
    assert h1.homogeneous_dimension == 4
    assert carnot.Group("quaternionic-h1").homogeneous_dimension == 10


def test_group_law_and_norm_homogeneity():
    g = carnot.Group("h1")
    x = [0.3, -0.7, 0.2]
    y = [1.1, 0.4, -0.5]
    xy = g.multiply(x, y)
    # t + t' + 2(y x' - x y')
    assert xy[2] == pytest.approx(0.2 - 0.5 + 2 * (-0.7 * 1.1 - 0.3 * 0.4))
    assert g.norm(g.dilate(2.5, x)) == pytest.approx(2.5 * g.norm(x), rel=1e-14)


def test_constants():
    assert carnot.sharp_constant(4, 0.0) == pytest.approx(1.0)
    assert carnot.optimal_beta(4, 0.0) == pytest.approx(-1.0)
    assert carnot.folland_constant(4) == pytest.approx(2 / math.pi, rel=1e-14)
    with pytest.raises(ValueError):
        carnot.sharp_constant(2, 0.0)


def test_radial_quotient_matches_closed_form():
    L = math.log(100.0)
    rep = carnot.radial_quotient(carnot.Group("h1"), 0.0, L)
    assert rep["quotient"] == pytest.approx(1 + math.pi**2 / L**2, rel=1e-9)


def test_sweep_slope():
    sweep = carnot.sharpness_sweep(carnot.Group("h1"), 0.0, carnot.decade_grid(6))
    assert len(sweep["rows"]) == 6
    assert sweep["gap_slope"] == pytest.approx(-2.0, abs=0.1)


def test_identity_battery_passes():
    checks = carnot.identity_battery(carnot.Group("h2"), samples=50, seed=3)
    assert checks and all(c["passed"] for c in checks)


def test_cli_round_trip():
    code, out, err = carnot.run_cli(["sweep", "--group", "h1"])
    assert code == 0, err
    doc = json.loads(out)
    assert doc["config"]["group"] == "h1"
    code, _, _ = carnot.run_cli(["quotient", "--group", "no-such-group"])
    assert code == 2
