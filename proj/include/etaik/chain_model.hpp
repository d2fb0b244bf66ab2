#pragma once

#include <string>
#include <vector>

#include "etaik/pose.hpp"

namespace etaik {

using VecX = Eigen::VectorXd;
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

struct JointLimits {
  double q_min = 0.0;
  double q_max = 0.0;
  double vel_max = 0.0;
  double acc_max = 0.0;
};

// A revolute joint: `origin` places the joint frame in its parent link frame,
// and the joint rotates about `axis` expressed in that joint frame.
struct RevoluteJoint {
  Vec3 axis = Vec3::UnitZ();
  Pose origin;
  JointLimits limits;
};

// Serial chain of revolute joints. Link 0 is the base link; link i (i >= 1)
// is the body moved by joint i. `link_spheres` therefore has dof() + 1
// entries.
class ChainModel {
 public:
  ChainModel() = default;
  ChainModel(std::string name, std::vector<RevoluteJoint> joints, Pose tcp_offset,
             std::vector<std::vector<Sphere>> link_spheres);

  const std::string& name() const { return name_; }
  int dof() const { return static_cast<int>(joints_.size()); }
  const std::vector<RevoluteJoint>& joints() const { return joints_; }
  const Pose& tcp_offset() const { return tcp_offset_; }
  const std::vector<std::vector<Sphere>>& link_spheres() const { return link_spheres_; }

  VecX q_min() const;
  VecX q_max() const;
  VecX vel_max() const;
  VecX acc_max() const;

  bool within_limits(const VecX& q, double tol = 0.0) const;

 private:
  std::string name_;
  std::vector<RevoluteJoint> joints_;
  Pose tcp_offset_;
  std::vector<std::vector<Sphere>> link_spheres_;
};

// Reference robot `a` holds the object, tool robot `b` the tool. Combined
// configurations are [q_a; q_b].
class DualArmSystem {
 public:
  DualArmSystem() = default;
  DualArmSystem(ChainModel robot_a, ChainModel robot_b, Pose base_a, Pose base_b);

  const ChainModel& robot_a() const { return robot_a_; }
  const ChainModel& robot_b() const { return robot_b_; }
  const Pose& base_a() const { return base_a_; }
  const Pose& base_b() const { return base_b_; }

  int dof_a() const { return robot_a_.dof(); }
  int dof_b() const { return robot_b_.dof(); }
  int dof() const { return dof_a() + dof_b(); }

  VecX q_a(const VecX& q) const;
  VecX q_b(const VecX& q) const;

  VecX q_min() const;
  VecX q_max() const;
  VecX vel_max() const;
  VecX acc_max() const;

  bool within_limits(const VecX& q, double tol = 0.0) const;
  VecX clamp(const VecX& q) const;

  // Throws ContractViolation unless q has dof() finite entries.
  void check_config(const VecX& q) const;

 private:
  ChainModel robot_a_;
  ChainModel robot_b_;
  Pose base_a_;
  Pose base_b_;
};

}  // namespace etaik
