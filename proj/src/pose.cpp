#include "etaik/pose.hpp"

#include <cmath>

#include "etaik/errors.hpp"

namespace etaik {

namespace {

void require_unit(const Quat& q, const char* name) {
  if (std::abs(q.norm() - 1.0) > 1e-6) {
    throw ContractViolation(std::string("quaternion_displacement: ") + name +
                            " is not a unit quaternion");
  }
}

}  // namespace

Quat quaternion_displacement(const Quat& q1, const Quat& q2) {
  require_unit(q1, "q1");
  require_unit(q2, "q2");
  Quat d = (q1.conjugate() * q2).normalized();
  if (d.w() < 0.0) d.coeffs() = -d.coeffs();
  return d;
}

double rotation_angle(const Quat& q) {
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

Vec3 rotation_log(const Quat& q) {
  Quat c = q;
  if (c.w() < 0.0) c.coeffs() = -c.coeffs();
  const double s = c.vec().norm();
  if (s < 1e-12) return 2.0 * c.vec();
  return (2.0 * std::atan2(s, c.w()) / s) * c.vec();
}

}  // namespace etaik
