#pragma once

#include <string>

#include "etaik/collision.hpp"

namespace etaik {

// Robot model / scene files are JSON documents:
//
//   {
//     "format": "etaik-scene", "version": 1,
//     "robot_a": <chain>, "robot_b": <chain>,
//     "scene": {
//       "obstacles": [{"center": [x, y, z], "radius": r}, ...],
//       "exclusions": [[["a", 0], ["b", 0]], ...],
//       "motion_step": 0.05
//     }
//   }
//
//   <chain> = {
//     "name": "...",
//     "base": {"position": [..], "quaternion": [w, x, y, z]},
//     "joints": [{"type": "revolute", "axis": [..], "origin_position": [..],
//                 "origin_quaternion": [w, x, y, z], "q_min": .., "q_max": ..,
//                 "vel_max": .., "acc_max": ..}, ...],
//     "tcp": {"position": [..], "quaternion": [w, x, y, z]},
//     "link_spheres": [[{"center": [..], "radius": ..}, ...], ...]   // dof + 1 lists
//   }
//
// Angles are radians, lengths meters. Unknown keys are rejected.
CollisionWorld parse_scene(const std::string& text);
CollisionWorld load_scene(const std::string& path);
std::string scene_to_string(const CollisionWorld& world);

}  // namespace etaik
