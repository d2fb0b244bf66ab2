#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "etaik/chain_model.hpp"

namespace etaik {

enum class Arm : std::uint8_t { A = 0, B = 1 };

struct LinkId {
  Arm arm = Arm::A;
  int link = 0;
  friend bool operator==(const LinkId&, const LinkId&) = default;
};

inline constexpr double kDefaultMotionStep = 0.05;

// Sphere geometry for both arms plus static world-frame obstacle spheres.
// Consecutive links of the same arm are always excluded from testing; extra
// exclusions may be supplied. The exclusion relation is symmetric.
class CollisionWorld {
 public:
  CollisionWorld() = default;
  CollisionWorld(DualArmSystem sys, std::vector<Sphere> obstacles,
                 std::vector<std::pair<LinkId, LinkId>> extra_exclusions = {},
                 double motion_step = kDefaultMotionStep);

  const DualArmSystem& system() const { return sys_; }
  const std::vector<Sphere>& obstacles() const { return obstacles_; }
  const std::vector<std::pair<LinkId, LinkId>>& exclusions() const { return exclusions_; }
  double motion_step() const { return motion_step_; }

  bool excluded(const LinkId& x, const LinkId& y) const;

  // A placed robot sphere.
  struct PlacedSphere {
    LinkId link;
    Sphere sphere;  // world frame
  };
  std::vector<PlacedSphere> robot_spheres(const VecX& q) const;

  bool in_collision(const VecX& q) const;

 private:
  struct BodySphere {
    LinkId link;
    Vec3 local_center;
    double radius;
  };

  DualArmSystem sys_;
  std::vector<Sphere> obstacles_;
  std::vector<std::pair<LinkId, LinkId>> exclusions_;
  double motion_step_ = kDefaultMotionStep;
  std::vector<BodySphere> bodies_;
  std::vector<std::pair<int, int>> pairs_;  // indices into bodies_
};

bool config_in_collision(const CollisionWorld& world, const VecX& q);

// Checks the joint-space straight line from q_from to q_to, sampled so that no
// joint moves more than `step` radians between samples. Endpoints included.
bool motion_in_collision(const CollisionWorld& world, const VecX& q_from, const VecX& q_to,
                         double step);
inline bool motion_in_collision(const CollisionWorld& world, const VecX& q_from, const VecX& q_to) {
  return motion_in_collision(world, q_from, q_to, world.motion_step());
}

}  // namespace etaik
