import json

import pytest

import ptim


def test_grid_shape_and_symmetry():
    net = ptim.build_grid(10, 10, seed=3)
    assert net.cell_count == 100
    assert net.edge_count == 180
    assert net.travel_time(0, 99) == net.travel_time(99, 0)
    assert net.travel_time(5, 5) == 0.0
    assert len(json.loads(net.to_json())["edges"]) == 180


def test_worked_delay_value():
    p = ptim.TrafficParams(s=1800, s1_mean=1100, s1_sd=200, q=1500, r_var=0.04, clearance=0.3)
    assert ptim.stochastic_delay(p, 0.8) == pytest.approx(1088.0 / 3.0, rel=1e-12)
    assert ptim.expected_delay(p, 0.5) == pytest.approx(1088.0 / 3.0, rel=1e-12)
    assert ptim.delay_variance(p, 0.5) >= 0.0


def test_errors_map_to_python_exceptions():
    p = ptim.TrafficParams(s=1000, s1_mean=800, s1_sd=100, q=1200, r_var=0.1, clearance=0.3)
    with pytest.raises(ptim.ModelDomainError):
        ptim.stochastic_delay(p, 1.0)
    with pytest.raises(ptim.InputError):
        ptim.hazard_reduction(6)
    with pytest.raises(ValueError):
        ptim.run_policy_json("{not json", "proactive")


def test_uav_helpers():
    assert ptim.priority_benefit(1, 1, 1) == 2.0
    assert ptim.priority_benefit(4, 5, 5) == 40.0
    assert ptim.hazard_reduction(5) == pytest.approx(0.11)
    mean, var = ptim.assimilate(100.0, 3.0, 80.0, 1.0)
    assert mean == pytest.approx(85.0)
    assert var == pytest.approx(0.75)


def test_sampled_params_are_deterministic():
    a = ptim.sample_params(2, 17)
    b = ptim.sample_params(2, 17)
    assert (a.s, a.q, a.clearance) == (b.s, b.q, b.clearance)
    assert 1130 <= a.s <= 1500


def test_run_policy_round_trip():
    scenario = {
        "seed": 7,
        "network": {"rows": 5, "cols": 5},
        "schedule": [[0, 2], [1, 1]],
        "fleet": {"ervs": 2, "uavs": 1},
        "solver": {"iterations": 10},
    }
    conv = ptim.run_policy(scenario, "conventional")
    opt = ptim.run_policy(scenario, "opt")
    again = ptim.run_policy(scenario, "opt")
    assert len(conv["incidents"]) == 3
    assert opt["total_delay_veh_h"] <= conv["total_delay_veh_h"] + 1e-6
    assert opt == again
    with pytest.raises(ptim.InputError):
        ptim.run_policy({"seed": 1, "colour": "red"})
    with pytest.raises(ptim.CapExceededError):
        ptim.run_policy({"seed": 1, "schedule": [[0, 10]], "opt": {"cap": 5}}, "opt")
