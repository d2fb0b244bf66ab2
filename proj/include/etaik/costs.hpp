#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "etaik/kinematics.hpp"
#include "etaik/mlp.hpp"

namespace etaik {

// What the pose terms pull towards: the tool TCP relative to the reference
// TCP, or (baseline variant) each arm's own world-frame TCP pose.
struct PoseTarget {
  enum class Kind { Relative, Absolute };
  Kind kind = Kind::Relative;
  Pose relative;
  Pose world_a;
  Pose world_b;

  static PoseTarget relative_to(const Pose& p) { return PoseTarget{Kind::Relative, p, {}, {}}; }
  static PoseTarget absolute(const Pose& a, const Pose& b) { return PoseTarget{Kind::Absolute, {}, a, b}; }
};

enum class TimeTerm { None, WeightedDistance, Approximator };

// Squared norm of the relative position residual.
double position_cost(const DualArmSystem& sys, const VecX& q, const Pose& target_relative);
// Squared rotation angle of d(target, current) for the relative orientation.
double orientation_cost(const DualArmSystem& sys, const VecX& q, const Pose& target_relative);
// sum_i (q_i - q0_i)^2 / vel_max_i^2
double weighted_distance_cost(const VecX& q, const VecX& q_0, const VecX& vel_max);
// Quadratic penetration into the `margin`-wide bands inside each limit.
double limit_cost(const VecX& q, const VecX& q_min, const VecX& q_max, double margin);

struct ObjectiveWeights {
  double position = 2000.0;
  double orientation = 2500.0;
  double time = 250.0;
  double limit = 500.0;
  double limit_margin = 0.05;
};

struct ObjectiveBreakdown {
  double position = 0.0;     // chi_p
  double orientation = 0.0;  // chi_o
  double time = 0.0;         // chi_mt (weighted distance or predicted seconds)
  double limit = 0.0;        // chi_b
  double total = 0.0;
};

// Batched evaluation of
//   f(q) = w_p chi_p + w_o chi_o + w_mt chi_mt + w_b chi_b
// and its analytic gradient.
class Objective {
 public:
  Objective(const DualArmSystem& sys, const VecX& q_0, const PoseTarget& target, const ObjectiveWeights& weights,
            TimeTerm time_term, std::shared_ptr<const MlpModel> model = nullptr);

  const DualArmSystem& system() const { return sys_; }
  const ObjectiveWeights& weights() const { return weights_; }
  TimeTerm time_term() const { return time_term_; }

  // qs is n_T x m. `grads` (n_T x m) and `parts` are filled when non-null.
  void evaluate(const MatX& qs, VecX& totals, MatX* grads = nullptr,
                std::vector<ObjectiveBreakdown>* parts = nullptr) const;

  ObjectiveBreakdown breakdown(const VecX& q) const;
  VecX gradient(const VecX& q) const;

  // Position residual norm (m) and rotation residual angle (rad) of the pose
  // target, summed in quadrature over arms for absolute targets.
  std::pair<double, double> pose_errors(const VecX& q) const;

 private:
  const DualArmSystem& sys_;
  VecX q_0_;
  PoseTarget target_;
  ObjectiveWeights weights_;
  TimeTerm time_term_;
  std::shared_ptr<const MlpModel> model_;
  VecX inv_vel_sq_;
  VecX q_min_, q_max_;
};

ObjectiveBreakdown total_cost(const DualArmSystem& sys, const VecX& q, const VecX& q_0, const PoseTarget& target,
                              const ObjectiveWeights& weights, TimeTerm time_term,
                              std::shared_ptr<const MlpModel> model = nullptr);

}  // namespace etaik
