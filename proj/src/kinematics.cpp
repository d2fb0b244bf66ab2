#include "etaik/kinematics.hpp"

#include <string>

#include "etaik/errors.hpp"

namespace etaik {

namespace {

void check_dims(const ChainModel& chain, const VecX& q) {
  if (q.size() != chain.dof()) {
    throw ContractViolation("chain '" + chain.name() + "' expects " + std::to_string(chain.dof()) +
                            " joint values, got " + std::to_string(q.size()));
  }
  if (!q.allFinite()) throw ContractViolation("joint vector has non-finite entries");
}

}  // namespace

ChainFrames chain_frames(const ChainModel& chain, const VecX& q, const Pose& base) {
  check_dims(chain, q);
  const int n = chain.dof();
  ChainFrames f;
  f.link_rotation.resize(n + 1);
  f.link_position.resize(n + 1);
  f.axis.resize(n);
  f.origin.resize(n);

  Mat3 r = base.rotation();
  Vec3 p = base.position;
  f.link_rotation[0] = r;
  f.link_position[0] = p;
  for (int i = 0; i < n; ++i) {
    const auto& joint = chain.joints()[i];
    p = p + r * joint.origin.position;
    r = r * joint.origin.rotation();
    f.origin[i] = p;
    f.axis[i] = r * joint.axis;
    r = r * Eigen::AngleAxisd(q[i], joint.axis).toRotationMatrix();
    f.link_rotation[i + 1] = r;
    f.link_position[i + 1] = p;
  }
  f.tcp_position = p + r * chain.tcp_offset().position;
  f.tcp_rotation = r * chain.tcp_offset().rotation();
  return f;
}

Pose forward_kinematics(const ChainModel& chain, const VecX& q, const Pose& base) {
  return chain_frames(chain, q, base).tcp();
}

Jacobian geometric_jacobian(const ChainFrames& f) {
  const int n = static_cast<int>(f.axis.size());
  Jacobian j(6, n);
  for (int i = 0; i < n; ++i) {
    j.block<3, 1>(0, i) = f.axis[i].cross(f.tcp_position - f.origin[i]);
    j.block<3, 1>(3, i) = f.axis[i];
  }
  return j;
}

Jacobian geometric_jacobian(const ChainModel& chain, const VecX& q, const Pose& base) {
  return geometric_jacobian(chain_frames(chain, q, base));
}

DualArmKinematics dual_arm_kinematics(const DualArmSystem& sys, const VecX& q,
                                      bool with_jacobians) {
  sys.check_config(q);
  const ChainFrames fa = chain_frames(sys.robot_a(), sys.q_a(q), sys.base_a());
  const ChainFrames fb = chain_frames(sys.robot_b(), sys.q_b(q), sys.base_b());

  DualArmKinematics k;
  k.tcp_a = fa.tcp();
  k.tcp_b = fb.tcp();
  const Mat3 ra_t = fa.tcp_rotation.transpose();
  const Vec3 delta = fb.tcp_position - fa.tcp_position;
  k.relative = Pose(ra_t * delta, Mat3(ra_t * fb.tcp_rotation));

  if (with_jacobians) {
    k.jacobian_a = geometric_jacobian(fa);
    k.jacobian_b = geometric_jacobian(fb);
    const int na = sys.dof_a();
    const int nb = sys.dof_b();
    Jacobian jr(6, na + nb);
    // Reference block: -R_a^T (J_v,a - [delta]x J_w,a) and -R_a^T J_w,a.
    // Tool block: R_a^T J_b. Column loops keep everything fixed-size.
    for (int i = 0; i < na; ++i) {
      const Vec3 w = k.jacobian_a.block<3, 1>(3, i);
      const Vec3 v = k.jacobian_a.block<3, 1>(0, i);
      jr.block<3, 1>(0, i) = -(ra_t * (v - delta.cross(w)));
      jr.block<3, 1>(3, i) = -(ra_t * w);
    }
    for (int i = 0; i < nb; ++i) {
      jr.block<3, 1>(0, na + i) = ra_t * Vec3(k.jacobian_b.block<3, 1>(0, i));
      jr.block<3, 1>(3, na + i) = ra_t * Vec3(k.jacobian_b.block<3, 1>(3, i));
    }
    k.relative_jacobian = std::move(jr);
  }
  return k;
}

Pose relative_pose(const DualArmSystem& sys, const VecX& q) {
  return dual_arm_kinematics(sys, q, false).relative;
}

Jacobian relative_jacobian(const DualArmSystem& sys, const VecX& q) {
  return dual_arm_kinematics(sys, q, true).relative_jacobian;
}

}  // namespace etaik
