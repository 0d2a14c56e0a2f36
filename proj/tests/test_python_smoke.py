import math

import pytest

import cofrag


def test_daughter_partial_moment_full_mass():
    # The mass integral of the daughter distribution over (0, y) is exactly y.
    for nu in (-1.0, -1.2, -1.8):
        for y in (0.5, 1.0, 7.0):
            assert cofrag.daughter_partial_moment(nu, 1.0, 0.0, y, y) == pytest.approx(
                y, rel=1e-14
            )


def test_daughter_partial_moment_closed_form():
    nu, y = -1.2, 2.0
    got = cofrag.daughter_partial_moment(nu, 1.5, 0.5, 1.5, y)
    p = 1.5 + nu + 1.0
    want = (nu + 2.0) * y ** (-nu - 1.0) * (1.5**p - 0.5**p) / p
    assert got == pytest.approx(want, rel=1e-13)


def test_weight_values():
    assert cofrag.weight_value(0.0) == 0.0
    assert cofrag.weight_deriv(0.0) == 0.0
    assert cofrag.weight_second(0.0) == pytest.approx(2.0 / (5.0 * math.log(5.0)))
    assert cofrag.weight_gap(5.0) == pytest.approx(25.0 / (10.0 * math.log(10.0)))
    x = 3.0
    want = x * math.log(math.log(x + 5.0)) - x * math.log(math.log(5.0))
    assert cofrag.weight_value(x) == pytest.approx(want, rel=1e-14)


def test_eval_kernel_and_frag_rate():
    cfg = "kernel = constant\nc = 2\nfrag = zero\n"
    assert cofrag.eval_kernel(cfg, 1.0, 9.0) == 2.0
    assert cofrag.eval_frag_rate(cfg, 3.0) == 0.0
    assert cofrag.eval_frag_rate("", 4.0) == pytest.approx(4.0)


def test_run_small():
    cfg = "x_min = 1e-2\nj = 1e2\ncells_per_decade = 8\nt_end = 0.1\noutputs = 4\n"
    out = cofrag.run(cfg)
    series = out["series"]
    assert len(series["t"]) == 5
    assert series["t"][-1] == pytest.approx(0.1)
    assert out["mass_drift"] <= 1e-10
    assert out["subgrid_ok"]
    assert out["steps"] > 0
    assert out["rho"] > 0.0


def test_two_run_distance():
    cfg = (
        "x_min = 1e-2\nj = 1e2\ncells_per_decade = 8\nt_end = 0.05\n"
        "outputs = 2\nepsilon = 1e-3\n"
    )
    out = cofrag.two_run(cfg)
    assert out["initial_distance"] > 0.0
    assert out["distance"][0] == out["initial_distance"]
    assert all(d > 0.0 for d in out["distance"])


def test_verify_hypotheses_reference():
    rep = cofrag.verify_hypotheses("")
    assert rep["all_core"]
    assert rep["linear_growth"]["holds"]
    assert rep["small_size_ratio"]["exact"]
    assert rep["mixed_regime"]["holds"]


def test_compute_kappa():
    out = cofrag.compute_kappa("")
    assert out["kappa"] == pytest.approx(148.50481697932199, rel=1e-12)
    assert out["Y"] == pytest.approx(9.708559382189387, rel=1e-12)
    assert out["attained_by"] == "threshold_fragmentation"


def test_admissible_interval():
    iv = cofrag.admissible_m0_interval(0.3, 0.5, 1.0, -1.2)
    assert not iv["empty"]
    assert iv["lo"] == pytest.approx(0.2)
    assert iv["hi"] == pytest.approx(0.3)


def test_serialize_round_trip():
    text = "t_end = 2.5\noutputs = 10\nkernel = additive\n"
    once = cofrag.serialize_config(text)
    twice = cofrag.serialize_config(once)
    assert once == twice
    assert "t_end" in once


def test_bad_config_raises():
    with pytest.raises(ValueError):
        cofrag.run("nu = -2.5\n")
