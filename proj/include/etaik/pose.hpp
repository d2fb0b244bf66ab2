#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace etaik {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Rigid transform. Orientation is a unit quaternion; every producing
// operation renormalizes it.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Pose() = default;
  Pose(const Vec3& p, const Quat& q) : position(p), orientation(q.normalized()) {}
  Pose(const Vec3& p, const Mat3& r) : position(p), orientation(Quat(r).normalized()) {}

  static Pose identity() { return Pose(); }

  Mat3 rotation() const { return orientation.toRotationMatrix(); }

  Pose operator*(const Pose& rhs) const {
    return Pose(position + orientation * rhs.position, orientation * rhs.orientation);
  }

  Vec3 operator*(const Vec3& point) const { return position + orientation * point; }

  Pose inverse() const {
    const Quat inv = orientation.conjugate();
    return Pose(-(inv * position), inv);
  }
};

// Quaternion from (w, x, y, z) components, normalized.
inline Quat quat_wxyz(double w, double x, double y, double z) {
  return Quat(w, x, y, z).normalized();
}

inline Quat axis_angle(const Vec3& axis, double angle) {
  return Quat(Eigen::AngleAxisd(angle, axis.normalized()));
}

// Returns q1^-1 * q2 with the scalar part made nonnegative. Both inputs
// must be unit quaternions to within 1e-6.
Quat quaternion_displacement(const Quat& q1, const Quat& q2);

// 2 * atan2(|v|, |w|), in [0, pi].
double rotation_angle(const Quat& q);

// Rotation vector (axis * angle) of the canonical (w >= 0) form of q.
Vec3 rotation_log(const Quat& q);

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

}  // namespace etaik
