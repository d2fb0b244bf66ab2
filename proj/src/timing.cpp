#include "etaik/timing.hpp"

#include <algorithm>
#include <cmath>

#include "etaik/errors.hpp"

namespace etaik {

double joint_move_time(double distance, double vel_max, double acc_max) {
  require(vel_max > 0.0 && acc_max > 0.0, "joint_move_time: limits must be > 0");
  require(std::isfinite(distance), "joint_move_time: distance must be finite");
  const double d = std::abs(distance);
  if (d <= vel_max * vel_max / acc_max) return 2.0 * std::sqrt(d / acc_max);
  return d / vel_max + vel_max / acc_max;
}

double JointProfile::position(double t) const {
  const double sign = distance < 0.0 ? -1.0 : 1.0;
  t = std::clamp(t, 0.0, duration());
  double s;
  if (t <= t_acc) {
    s = 0.5 * accel * t * t;
  } else if (t <= t_acc + t_cruise) {
    s = 0.5 * accel * t_acc * t_acc + v_peak * (t - t_acc);
  } else {
    const double r = duration() - t;
    s = std::abs(distance) - 0.5 * accel * r * r;
  }
  return sign * s;
}

double JointProfile::velocity(double t) const {
  const double sign = distance < 0.0 ? -1.0 : 1.0;
  if (t <= 0.0 || t >= duration()) return 0.0;
  if (t <= t_acc) return sign * accel * t;
  if (t <= t_acc + t_cruise) return sign * v_peak;
  return sign * accel * (duration() - t);
}

VecX TrapezoidProfile::displacement(double t) const {
  VecX d(joints.size());
  for (std::size_t i = 0; i < joints.size(); ++i) d[i] = joints[i].position(t);
  return d;
}

TrapezoidProfile synchronized_profile(const DualArmSystem& sys, const VecX& q_from, const VecX& q_to) {
  sys.check_config(q_from);
  sys.check_config(q_to);
  const VecX v = sys.vel_max();
  const VecX a = sys.acc_max();
  const int n = sys.dof();

  TrapezoidProfile p;
  p.joints.resize(n);
  for (int i = 0; i < n; ++i) p.duration = std::max(p.duration, joint_move_time(q_to[i] - q_from[i], v[i], a[i]));

  for (int i = 0; i < n; ++i) {
    JointProfile& j = p.joints[i];
    j.distance = q_to[i] - q_from[i];
    const double d = std::abs(j.distance);
    if (d == 0.0) continue;
    // Peak velocity that makes a max-acceleration trapezoid last exactly T:
    // d = v (T - v / a).
    const double T = p.duration;
    const double disc = std::max(0.0, a[i] * a[i] * T * T - 4.0 * a[i] * d);
    const double vp = std::min(v[i], 0.5 * (a[i] * T - std::sqrt(disc)));
    j.v_peak = vp;
    j.accel = a[i];
    j.t_acc = vp / a[i];
    // Written in terms of d rather than T so the displacement is exact.
    j.t_cruise = std::max(0.0, (d - vp * j.t_acc) / vp);
  }
  return p;
}

double synchronized_duration(const DualArmSystem& sys, const VecX& q_from, const VecX& q_to) {
  sys.check_config(q_from);
  sys.check_config(q_to);
  const VecX v = sys.vel_max();
  const VecX a = sys.acc_max();
  double t = 0.0;
  for (int i = 0; i < sys.dof(); ++i) t = std::max(t, joint_move_time(q_to[i] - q_from[i], v[i], a[i]));
  return t;
}

double path_duration(const DualArmSystem& sys, const std::vector<VecX>& path) {
  double t = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) t += synchronized_duration(sys, path[i - 1], path[i]);
  return t;
}

TimeEstimate synchronized_move_time(const CollisionWorld& world, const VecX& q_from, const VecX& q_to) {
  const auto& sys = world.system();
  sys.check_config(q_from);
  sys.check_config(q_to);
  require(sys.within_limits(q_from, 1e-9) && sys.within_limits(q_to, 1e-9),
          "synchronized_move_time: configuration outside joint limits");
  TimeEstimate e;
  e.duration = synchronized_duration(sys, q_from, q_to);
  e.collision_free = !motion_in_collision(world, q_from, q_to);
  e.path = std::vector<VecX>{q_from, q_to};
  return e;
}

}  // namespace etaik
