import math
import os
import pathlib

import numpy as np
import pytest

import etaik

ROOT = pathlib.Path(os.environ.get("ETAIK_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))
SCENES = ROOT / "scenes"


@pytest.fixture(scope="module")
def toy():
    return etaik.Scene.load(str(SCENES / "toy_2dof.json"))


@pytest.fixture(scope="module")
def desk():
    return etaik.Scene.load(str(SCENES / "desk_planar.json"))


def test_joint_move_time_closed_forms():
    assert etaik.joint_move_time(1.0, 1.0, 1.0) == pytest.approx(2.0, abs=1e-12)
    assert etaik.joint_move_time(4.0, 1.0, 1.0) == pytest.approx(5.0, abs=1e-12)


def test_scene_round_trip(desk):
    again = etaik.Scene.parse(desk.to_json())
    assert again.to_json() == desk.to_json()
    assert desk.dof == len(desk.q_min) == len(desk.q_max)


def test_relative_pose_is_unit_quaternion(desk):
    rng = np.random.default_rng(0)
    q = rng.uniform(desk.q_min, desk.q_max)
    position, quat = desk.relative_pose(q)
    assert position.shape == (3,)
    assert np.linalg.norm(quat) == pytest.approx(1.0, abs=1e-12)


def test_planned_time_not_below_blind_time(toy):
    rng = np.random.default_rng(1)
    checked = 0
    while checked < 3:
        a = rng.uniform(toy.q_min, toy.q_max)
        b = rng.uniform(toy.q_min, toy.q_max)
        if toy.in_collision(a) or toy.in_collision(b):
            continue
        assert toy.planned_time(a, b, seed=3) >= toy.blind_time(a, b) - 1e-12
        checked += 1


def test_solve_reaches_a_reachable_target(desk):
    rng = np.random.default_rng(2)
    while True:
        q0 = rng.uniform(desk.q_min, desk.q_max)
        qt = rng.uniform(desk.q_min, desk.q_max)
        if not desk.in_collision(q0) and not desk.in_collision(qt):
            break
    position, quat = desk.relative_pose(qt)
    result = etaik.solve(desk, q0, position, list(quat), batch_size=32, iterations=300,
                         time_term="none", seed=4)
    assert result["feasible"]
    assert result["position_error"] < 5e-3
    reached, _ = desk.relative_pose(result["q"])
    assert np.linalg.norm(reached - position) == pytest.approx(result["position_error"], abs=1e-9)


def test_errors_map_to_python_exceptions(desk):
    with pytest.raises(etaik.ContractViolation):
        desk.in_collision(np.zeros(desk.dof + 1))
    with pytest.raises(ValueError):
        etaik.Scene.parse("{}")
    with pytest.raises(etaik.NoSolution):
        etaik.solve(desk, np.zeros(desk.dof), [100.0, 0.0, 0.0], batch_size=4, iterations=5)
    assert not math.isnan(etaik.joint_move_time(0.0, 1.0, 1.0))
