#pragma once

#include <string>

#include "etaik/chain_model.hpp"
#include "etaik/collision.hpp"
#include "etaik/scene_io.hpp"

#ifndef ETAIK_SOURCE_DIR
#error "ETAIK_SOURCE_DIR must be defined by the build"
#endif

namespace etaik::fixture {

inline std::string scene_path(const std::string& name) { return std::string(ETAIK_SOURCE_DIR) + "/scenes/" + name; }

inline CollisionWorld desk() { return load_scene(scene_path("desk_planar.json")); }
inline CollisionWorld desk_open() { return load_scene(scene_path("desk_open.json")); }
inline CollisionWorld toy() { return load_scene(scene_path("toy_2dof.json")); }

// Relative error used throughout: ||a - b|| / max(||b||, floor).
template <typename A, typename B>
double rel_err(const A& a, const B& b, double floor = 1e-12) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

}  // namespace etaik::fixture
