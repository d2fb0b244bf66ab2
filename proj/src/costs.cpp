#include "etaik/costs.hpp"

#include "etaik/errors.hpp"

namespace etaik {

namespace {

struct PoseTerms {
  double position = 0.0;
  double orientation = 0.0;
  VecX grad_position;
  VecX grad_orientation;
};

// Residual of `current` against `goal`; gradients use the given 6 x k
// Jacobian block whose angular rows are spatial angular velocity.
void accumulate(const Pose& current, const Pose& goal, const Jacobian* jac, Eigen::Index col, PoseTerms& t) {
  const Vec3 e = current.position - goal.position;
  const Vec3 phi = rotation_log(quaternion_displacement(goal.orientation, current.orientation));
  t.position += e.squaredNorm();
  t.orientation += phi.squaredNorm();
  if (jac) {
    const Eigen::Index k = jac->cols();
    t.grad_position.segment(col, k) += 2.0 * jac->topRows<3>().transpose() * e;
    t.grad_orientation.segment(col, k) += 2.0 * jac->bottomRows<3>().transpose() * (goal.orientation * phi);
  }
}

PoseTerms pose_terms(const DualArmSystem& sys, const VecX& q, const PoseTarget& target, bool with_grad) {
  PoseTerms t;
  if (with_grad) {
    t.grad_position = VecX::Zero(sys.dof());
    t.grad_orientation = VecX::Zero(sys.dof());
  }
  const DualArmKinematics k = dual_arm_kinematics(sys, q, with_grad);
  if (target.kind == PoseTarget::Kind::Relative) {
    accumulate(k.relative, target.relative, with_grad ? &k.relative_jacobian : nullptr, 0, t);
  } else {
    accumulate(k.tcp_a, target.world_a, with_grad ? &k.jacobian_a : nullptr, 0, t);
    accumulate(k.tcp_b, target.world_b, with_grad ? &k.jacobian_b : nullptr, sys.dof_a(), t);
  }
  return t;
}

}  // namespace

double position_cost(const DualArmSystem& sys, const VecX& q, const Pose& target_relative) {
  return pose_terms(sys, q, PoseTarget::relative_to(target_relative), false).position;
}

double orientation_cost(const DualArmSystem& sys, const VecX& q, const Pose& target_relative) {
  return pose_terms(sys, q, PoseTarget::relative_to(target_relative), false).orientation;
}

double weighted_distance_cost(const VecX& q, const VecX& q_0, const VecX& vel_max) {
  require(q.size() == q_0.size() && q.size() == vel_max.size(), "weighted_distance_cost: size mismatch");
  return ((q - q_0).array() / vel_max.array()).square().sum();
}

double limit_cost(const VecX& q, const VecX& q_min, const VecX& q_max, double margin) {
  require(margin > 0.0, "limit_cost: margin must be > 0");
  require(q.size() == q_min.size() && q.size() == q_max.size(), "limit_cost: size mismatch");
  double c = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double lo = q_min[i] + margin;
    const double hi = q_max[i] - margin;
    if (q[i] < lo) c += (lo - q[i]) * (lo - q[i]);
    if (q[i] > hi) c += (q[i] - hi) * (q[i] - hi);
  }
  return c;
}

Objective::Objective(const DualArmSystem& sys, const VecX& q_0, const PoseTarget& target,
                     const ObjectiveWeights& weights, TimeTerm time_term, std::shared_ptr<const MlpModel> model)
    : sys_(sys),
      q_0_(q_0),
      target_(target),
      weights_(weights),
      time_term_(time_term),
      model_(std::move(model)),
      inv_vel_sq_(sys.vel_max().array().square().inverse().matrix()),
      q_min_(sys.q_min()),
      q_max_(sys.q_max()) {
  sys.check_config(q_0);
  require(weights.limit_margin > 0.0, "objective: limit margin must be > 0");
  if (time_term_ == TimeTerm::Approximator) {
    require(model_ != nullptr, "objective: approximator time term requires a model");
    require(model_->dof == sys.dof() && model_->input_size() == 6 * sys.dof(),
            "objective: approximator was trained for " + std::to_string(model_->dof) + " DoF, system has " +
                std::to_string(sys.dof()));
  }
}

void Objective::evaluate(const MatX& qs, VecX& totals, MatX* grads, std::vector<ObjectiveBreakdown>* parts) const {
  require(qs.rows() == sys_.dof(), "objective: configuration size mismatch");
  const Eigen::Index m = qs.cols();
  totals.resize(m);
  if (grads) grads->resize(sys_.dof(), m);
  if (parts) parts->assign(static_cast<std::size_t>(m), ObjectiveBreakdown{});

  VecX predicted;
  MatX time_grads;
  if (time_term_ == TimeTerm::Approximator) {
    const MatX enc = encode_batch(q_0_, qs);
    if (grads) {
      predict_with_target_gradient(*model_, enc, predicted, time_grads);
    } else {
      predicted = predict_batch(*model_, enc);
    }
  }

  for (Eigen::Index c = 0; c < m; ++c) {
    const VecX q = qs.col(c);
    const PoseTerms pose = pose_terms(sys_, q, target_, grads != nullptr);
    ObjectiveBreakdown b;
    b.position = pose.position;
    b.orientation = pose.orientation;
    const VecX dq = q - q_0_;
    switch (time_term_) {
      case TimeTerm::None:
        break;
      case TimeTerm::WeightedDistance:
        b.time = dq.cwiseProduct(dq).dot(inv_vel_sq_);
        break;
      case TimeTerm::Approximator:
        b.time = predicted[c];
        break;
    }
    b.limit = limit_cost(q, q_min_, q_max_, weights_.limit_margin);
    const double w_time = time_term_ == TimeTerm::None ? 0.0 : weights_.time;
    b.total = weights_.position * b.position + weights_.orientation * b.orientation + w_time * b.time +
              weights_.limit * b.limit;
    totals[c] = b.total;
    if (parts) (*parts)[static_cast<std::size_t>(c)] = b;

    if (grads) {
      VecX g = weights_.position * pose.grad_position + weights_.orientation * pose.grad_orientation;
      if (time_term_ == TimeTerm::WeightedDistance) g += w_time * 2.0 * dq.cwiseProduct(inv_vel_sq_);
      if (time_term_ == TimeTerm::Approximator) g += w_time * time_grads.col(c);
      for (Eigen::Index i = 0; i < q.size(); ++i) {
        const double lo = q_min_[i] + weights_.limit_margin;
        const double hi = q_max_[i] - weights_.limit_margin;
        if (q[i] < lo) g[i] -= weights_.limit * 2.0 * (lo - q[i]);
        if (q[i] > hi) g[i] += weights_.limit * 2.0 * (q[i] - hi);
      }
      grads->col(c) = g;
    }
  }
}

ObjectiveBreakdown Objective::breakdown(const VecX& q) const {
  VecX totals;
  std::vector<ObjectiveBreakdown> parts;
  evaluate(q, totals, nullptr, &parts);
  return parts.front();
}

VecX Objective::gradient(const VecX& q) const {
  VecX totals;
  MatX g;
  evaluate(q, totals, &g);
  return g.col(0);
}

std::pair<double, double> Objective::pose_errors(const VecX& q) const {
  const PoseTerms t = pose_terms(sys_, q, target_, false);
  return {std::sqrt(t.position), std::sqrt(t.orientation)};
}

ObjectiveBreakdown total_cost(const DualArmSystem& sys, const VecX& q, const VecX& q_0, const PoseTarget& target,
                              const ObjectiveWeights& weights, TimeTerm time_term,
                              std::shared_ptr<const MlpModel> model) {
  return Objective(sys, q_0, target, weights, time_term, std::move(model)).breakdown(q);
}

}  // namespace etaik
