#!/usr/bin/env python3
"""Regenerates the scene files under scenes/."""

import json
import math
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "scenes"


def quat_rpy(roll, pitch, yaw):
    cr, sr = math.cos(roll / 2), math.sin(roll / 2)
    cp, sp = math.cos(pitch / 2), math.sin(pitch / 2)
    cy, sy = math.cos(yaw / 2), math.sin(yaw / 2)
    return [
        cr * cp * cy + sr * sp * sy,
        sr * cp * cy - cr * sp * sy,
        cr * sp * cy + sr * cp * sy,
        cr * cp * sy - sr * sp * cy,
    ]


def r(x):
    return round(x, 12)


def planar_arm(name, lengths, q_limits, vel, acc, base_xy, base_yaw, sphere_r=0.05):
    joints = []
    links = [[{"center": [0.0, 0.0, 0.0], "radius": 0.08}]]
    prev = 0.0
    for i, length in enumerate(lengths):
        joints.append({
            "type": "revolute",
            "axis": [0.0, 0.0, 1.0],
            "origin_position": [prev, 0.0, 0.0],
            "origin_quaternion": [1.0, 0.0, 0.0, 0.0],
            "q_min": -q_limits[i],
            "q_max": q_limits[i],
            "vel_max": vel[i],
            "acc_max": acc[i],
        })
        count = max(1, round(length / (1.5 * sphere_r)))
        links.append([{"center": [r(length * (k + 1) / count), 0.0, 0.0], "radius": sphere_r}
                      for k in range(count)])
        prev = length
    return {
        "name": name,
        "base": {"position": [base_xy[0], base_xy[1], 0.0], "quaternion": [r(v) for v in quat_rpy(0, 0, base_yaw)]},
        "joints": joints,
        "tcp": {"position": [lengths[-1], 0.0, 0.0], "quaternion": [1.0, 0.0, 0.0, 0.0]},
        "link_spheres": links,
    }


def scene(robot_a, robot_b, obstacles, motion_step=0.05, exclusions=()):
    return {
        "format": "etaik-scene",
        "version": 1,
        "robot_a": robot_a,
        "robot_b": robot_b,
        "scene": {"obstacles": obstacles, "exclusions": list(exclusions), "motion_step": motion_step},
    }


def no_self_contact(dof):
    # Every non-adjacent link pair within each arm.
    return [[[arm, i], [arm, j]] for arm in ("a", "b") for i in range(dof + 1) for j in range(i + 2, dof + 1)]


LENGTHS = [0.4, 0.35, 0.25]
LIMITS = [2.9, 2.6, 2.6]


def desk_arms(separation):
    a = planar_arm("planar_a", LENGTHS, LIMITS, [2.0, 2.5, 3.0], [3.0, 4.0, 5.0], (0.0, 0.0), 0.0)
    b = planar_arm("planar_b", LENGTHS, LIMITS, [1.5, 2.0, 3.0], [2.5, 3.5, 5.0], (separation, 0.0), math.pi)
    return a, b


def ur5():
    # Link frames follow the ur_description URDF.
    vel = [3.15, 3.15, 3.15, 3.2, 3.2, 3.2]
    acc = [5.0, 5.0, 3.0, 2.0, 2.0, 2.0]
    origins = [
        ([0, 0, 0.089159], (0, 0, 0), [0, 0, 1]),
        ([0, 0.13585, 0], (0, math.pi / 2, 0), [0, 1, 0]),
        ([0, -0.1197, 0.425], (0, 0, 0), [0, 1, 0]),
        ([0, 0, 0.39225], (0, math.pi / 2, 0), [0, 1, 0]),
        ([0, 0.093, 0], (0, 0, 0), [0, 0, 1]),
        ([0, 0, 0.09465], (0, 0, 0), [0, 1, 0]),
    ]
    spheres = [
        [{"center": [0, 0, 0.05], "radius": 0.08}],
        [{"center": [0, 0, 0], "radius": 0.07}],
        [{"center": [0, 0, z], "radius": 0.06} for z in (0.0, 0.14, 0.28, 0.425)],
        [{"center": [0, 0, z], "radius": 0.05} for z in (0.0, 0.13, 0.26, 0.39)],
        [{"center": [0, 0.093, 0], "radius": 0.045}],
        [{"center": [0, 0, 0.09465], "radius": 0.045}],
        [{"center": [0, 0.0823, 0], "radius": 0.04}],
    ]
    joints = []
    for i, (pos, rpy, axis) in enumerate(origins):
        joints.append({"type": "revolute", "axis": [float(a) for a in axis], "origin_position": [float(p) for p in pos],
                       "origin_quaternion": [r(v) for v in quat_rpy(*rpy)], "q_min": -math.pi, "q_max": math.pi,
                       "vel_max": vel[i], "acc_max": acc[i]})
    return {"name": "ur5", "base": {"position": [0.0, 0.0, 0.0], "quaternion": [1.0, 0.0, 0.0, 0.0]},
            "joints": joints,
            "tcp": {"position": [0.0, 0.0823, 0.0], "quaternion": [r(v) for v in quat_rpy(0, 0, math.pi / 2)]},
            "link_spheres": spheres}


def iiwa14(base_x):
    # Link frames follow the iiwa_description URDF (LBR iiwa 14 R820).
    vel = [10.0] * 7
    acc = [5.0, 5.0, 3.0, 2.0, 2.0, 2.0, 2.0]
    limits = [2.967, 2.094, 2.967, 2.094, 2.967, 2.094, 3.054]
    origins = [
        ([0, 0, 0.1575], (0, 0, 0)),
        ([0, 0, 0.2025], (math.pi / 2, 0, math.pi)),
        ([0, 0.2045, 0], (math.pi / 2, 0, math.pi)),
        ([0, 0, 0.2155], (math.pi / 2, 0, 0)),
        ([0, 0.1845, 0], (-math.pi / 2, math.pi, 0)),
        ([0, 0, 0.2155], (math.pi / 2, 0, 0)),
        ([0, 0.081, 0], (-math.pi / 2, math.pi, 0)),
    ]
    spheres = [[{"center": [0, 0, 0.08], "radius": 0.1}]]
    spheres += [[{"center": [0, 0, 0.0], "radius": 0.08}, {"center": [0, 0.1, 0.0], "radius": 0.07}]
                for _ in range(6)]
    spheres.append([{"center": [0, 0, 0.045], "radius": 0.05}])
    joints = []
    for i, (pos, rpy) in enumerate(origins):
        joints.append({"type": "revolute", "axis": [0.0, 0.0, 1.0], "origin_position": [float(p) for p in pos],
                       "origin_quaternion": [r(v) for v in quat_rpy(*rpy)], "q_min": -limits[i],
                       "q_max": limits[i], "vel_max": vel[i], "acc_max": acc[i]})
    return {"name": "iiwa14", "base": {"position": [base_x, 0.0, 0.0], "quaternion": [r(v) for v in quat_rpy(0, 0, math.pi)]},
            "joints": joints, "tcp": {"position": [0.0, 0.0, 0.126], "quaternion": [1.0, 0.0, 0.0, 0.0]},
            "link_spheres": spheres}


def toy_2dof():
    arm = planar_arm("toy2", [0.6, 0.5], [3.1, 3.1], [2.0, 3.0], [3.0, 5.0], (0.0, 0.0), 0.0)
    stub = {"name": "stub", "base": {"position": [50.0, 0.0, 0.0], "quaternion": [1.0, 0.0, 0.0, 0.0]},
            "joints": [], "tcp": {"position": [0.0, 0.0, 0.0], "quaternion": [1.0, 0.0, 0.0, 0.0]},
            "link_spheres": [[]]}
    return scene(arm, stub, [{"center": [0.75, 0.45, 0.0], "radius": 0.2}], motion_step=0.02)


def write(name, doc):
    OUT.mkdir(exist_ok=True)
    (OUT / name).write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    a, b = desk_arms(1.2)
    write("desk_planar.json", scene(a, b, [{"center": [0.6, 0.75, 0.0], "radius": 0.12}]))
    a, b = desk_arms(10.0)
    # Wide-open reference scene: nothing can touch, not even an arm itself.
    write("desk_open.json", scene(a, b, [], exclusions=no_self_contact(len(LENGTHS))))
    write("toy_2dof.json", toy_2dof())
    write("ur5_iiwa.json", scene(ur5(), iiwa14(1.3), [{"center": [0.65, 0.0, 0.35], "radius": 0.1}]))
