#include "etaik/chain_model.hpp"

#include <cmath>
#include <string>

#include "etaik/errors.hpp"

namespace etaik {

ChainModel::ChainModel(std::string name, std::vector<RevoluteJoint> joints, Pose tcp_offset,
                       std::vector<std::vector<Sphere>> link_spheres)
    : name_(std::move(name)),
      joints_(std::move(joints)),
      tcp_offset_(tcp_offset),
      link_spheres_(std::move(link_spheres)) {
  if (link_spheres_.empty()) link_spheres_.resize(joints_.size() + 1);
  require(link_spheres_.size() == joints_.size() + 1,
          "chain '" + name_ + "': link_spheres must have dof + 1 entries");
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    auto& j = joints_[i];
    const std::string where = "chain '" + name_ + "' joint " + std::to_string(i);
    require(j.axis.norm() > 1e-9, where + ": zero axis");
    // Renormalizing a unit vector can move its last bits; leave those alone
    // so that files round-trip exactly.
    if (std::abs(j.axis.norm() - 1.0) > 1e-14) j.axis.normalize();
    require(j.limits.q_min < j.limits.q_max, where + ": q_min must be < q_max");
    require(j.limits.vel_max > 0.0, where + ": vel_max must be > 0");
    require(j.limits.acc_max > 0.0, where + ": acc_max must be > 0");
  }
  for (const auto& link : link_spheres_) {
    for (const auto& s : link) require(s.radius > 0.0, "chain '" + name_ + "': sphere radius must be > 0");
  }
}

VecX ChainModel::q_min() const {
  VecX v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joints_[i].limits.q_min;
  return v;
}

VecX ChainModel::q_max() const {
  VecX v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joints_[i].limits.q_max;
  return v;
}

VecX ChainModel::vel_max() const {
  VecX v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joints_[i].limits.vel_max;
  return v;
}

VecX ChainModel::acc_max() const {
  VecX v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joints_[i].limits.acc_max;
  return v;
}

bool ChainModel::within_limits(const VecX& q, double tol) const {
  if (q.size() != dof()) return false;
  for (int i = 0; i < dof(); ++i) {
    if (!(q[i] >= joints_[i].limits.q_min - tol && q[i] <= joints_[i].limits.q_max + tol)) return false;
  }
  return true;
}

DualArmSystem::DualArmSystem(ChainModel robot_a, ChainModel robot_b, Pose base_a, Pose base_b)
    : robot_a_(std::move(robot_a)), robot_b_(std::move(robot_b)), base_a_(base_a), base_b_(base_b) {}

VecX DualArmSystem::q_a(const VecX& q) const { return q.head(dof_a()); }
VecX DualArmSystem::q_b(const VecX& q) const { return q.segment(dof_a(), dof_b()); }

namespace {
VecX concat(const VecX& a, const VecX& b) {
  VecX v(a.size() + b.size());
  v << a, b;
  return v;
}
}  // namespace

VecX DualArmSystem::q_min() const { return concat(robot_a_.q_min(), robot_b_.q_min()); }
VecX DualArmSystem::q_max() const { return concat(robot_a_.q_max(), robot_b_.q_max()); }
VecX DualArmSystem::vel_max() const { return concat(robot_a_.vel_max(), robot_b_.vel_max()); }
VecX DualArmSystem::acc_max() const { return concat(robot_a_.acc_max(), robot_b_.acc_max()); }

bool DualArmSystem::within_limits(const VecX& q, double tol) const {
  return q.size() == dof() && robot_a_.within_limits(q_a(q), tol) && robot_b_.within_limits(q_b(q), tol);
}

VecX DualArmSystem::clamp(const VecX& q) const {
  return q.cwiseMax(q_min()).cwiseMin(q_max());
}

void DualArmSystem::check_config(const VecX& q) const {
  if (q.size() != dof()) {
    throw ContractViolation("configuration has " + std::to_string(q.size()) + " entries, system has " +
                            std::to_string(dof()) + " DoF");
  }
  if (!q.allFinite()) throw ContractViolation("configuration has non-finite entries");
}

}  // namespace etaik
