#pragma once

#include <vector>

#include "etaik/chain_model.hpp"

namespace etaik {

// World-frame link frames for one chain. `link_rotation[0]`/`link_position[0]`
// is the base; entries 1..n follow each joint. `axis[i]`/`origin[i]` are
// joint i's world axis and pivot.
struct ChainFrames {
  std::vector<Mat3> link_rotation;
  std::vector<Vec3> link_position;
  std::vector<Vec3> axis;
  std::vector<Vec3> origin;
  Mat3 tcp_rotation;
  Vec3 tcp_position;

  Pose tcp() const { return Pose(tcp_position, tcp_rotation); }
};

ChainFrames chain_frames(const ChainModel& chain, const VecX& q,
                         const Pose& base = Pose::identity());

Pose forward_kinematics(const ChainModel& chain, const VecX& q,
                        const Pose& base = Pose::identity());

// Rows are [linear; angular] TCP velocity per unit joint rate, world frame.
Jacobian geometric_jacobian(const ChainModel& chain, const VecX& q,
                            const Pose& base = Pose::identity());
Jacobian geometric_jacobian(const ChainFrames& frames);

// Pose of the tool TCP (robot b) expressed in the reference TCP frame
// (robot a).
Pose relative_pose(const DualArmSystem& sys, const VecX& q);

// Maps [qdot_a; qdot_b] to the relative TCP twist expressed in the
// reference TCP frame: linear rows give d/dt of relative_pose().position,
// angular rows give the relative angular velocity.
Jacobian relative_jacobian(const DualArmSystem& sys, const VecX& q);

// Everything the optimizer needs from one configuration, computed with a
// single pass over both chains. Jacobians are left empty unless requested.
struct DualArmKinematics {
  Pose tcp_a;
  Pose tcp_b;
  Jacobian jacobian_a;  // world frame
  Jacobian jacobian_b;  // world frame
  Pose relative;
  Jacobian relative_jacobian;
};

DualArmKinematics dual_arm_kinematics(const DualArmSystem& sys, const VecX& q,
                                      bool with_jacobians = true);

}  // namespace etaik
