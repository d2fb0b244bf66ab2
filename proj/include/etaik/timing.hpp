#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "etaik/collision.hpp"

namespace etaik {

// Rest-to-rest minimum time for one joint under velocity and acceleration
// limits: triangular 2*sqrt(|d|/a) when |d| <= v^2/a, else |d|/v + v/a.
double joint_move_time(double distance, double vel_max, double acc_max);

// One joint of a synchronized rest-to-rest trapezoid. The joint accelerates
// at `accel` for t_acc, cruises at v_peak for t_cruise, then decelerates.
struct JointProfile {
  double distance = 0.0;  // signed
  double t_acc = 0.0;
  double t_cruise = 0.0;
  double v_peak = 0.0;  // magnitude
  double accel = 0.0;   // magnitude

  double duration() const { return 2.0 * t_acc + t_cruise; }
  // Signed displacement and velocity at time t (clamped to [0, duration]).
  double position(double t) const;
  double velocity(double t) const;
};

struct TrapezoidProfile {
  double duration = 0.0;
  std::vector<JointProfile> joints;

  VecX displacement(double t) const;
};

// All joints start and stop together; duration is the slowest joint's
// minimum time, the others lower their peak velocity to match.
TrapezoidProfile synchronized_profile(const DualArmSystem& sys, const VecX& q_from, const VecX& q_to);
double synchronized_duration(const DualArmSystem& sys, const VecX& q_from, const VecX& q_to);

// Sum of synchronized segment durations, stopping at every waypoint.
double path_duration(const DualArmSystem& sys, const std::vector<VecX>& path);

struct TimeEstimate {
  double duration = 0.0;
  bool collision_free = true;
  std::optional<std::vector<VecX>> path;
};

// Collision-blind straight-line timing. The collision flag reports whether
// the straight line happens to be free.
TimeEstimate synchronized_move_time(const CollisionWorld& world, const VecX& q_from, const VecX& q_to);

struct PlannerConfig {
  double extend_step = 0.2;  // rad, max-norm
  int budget = 5000;         // tree extensions
  int shortcut_iterations = 200;
  int refine_iterations = 0;  // random waypoint nudges after shortcutting
  int restarts = 3;           // independent plans; the fastest is kept
};

// Collision-aware timing. Falls back to synchronized_move_time when the
// straight line is free; otherwise plans with bidirectional RRT-Connect,
// shortcuts the path and times it segment by segment. With restarts > 1 the
// fastest of several independently seeded plans is returned. Deterministic
// in `seed`. Throws PlanningFailure when every attempt runs out of budget.
TimeEstimate plan_collision_free(const CollisionWorld& world, const VecX& q_from, const VecX& q_to,
                                 std::uint64_t seed, const PlannerConfig& config = {});

}  // namespace etaik
