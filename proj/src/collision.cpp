#include "etaik/collision.hpp"

#include <algorithm>
#include <cmath>

#include "etaik/errors.hpp"
#include "etaik/kinematics.hpp"

namespace etaik {

namespace {

const ChainModel& chain_of(const DualArmSystem& sys, Arm arm) {
  return arm == Arm::A ? sys.robot_a() : sys.robot_b();
}

bool same_pair(const std::pair<LinkId, LinkId>& e, const LinkId& x, const LinkId& y) {
  return (e.first == x && e.second == y) || (e.first == y && e.second == x);
}

}  // namespace

CollisionWorld::CollisionWorld(DualArmSystem sys, std::vector<Sphere> obstacles,
                               std::vector<std::pair<LinkId, LinkId>> extra_exclusions,
                               double motion_step)
    : sys_(std::move(sys)), obstacles_(std::move(obstacles)), motion_step_(motion_step) {
  require(motion_step_ > 0.0, "collision world: motion step must be > 0");
  for (const auto& o : obstacles_) require(o.radius > 0.0, "collision world: obstacle radius must be > 0");

  for (Arm arm : {Arm::A, Arm::B}) {
    const int n = chain_of(sys_, arm).dof();
    for (int i = 0; i < n; ++i) exclusions_.push_back({LinkId{arm, i}, LinkId{arm, i + 1}});
  }
  for (const auto& e : extra_exclusions) {
    for (const auto& id : {e.first, e.second}) {
      require(id.link >= 0 && id.link <= chain_of(sys_, id.arm).dof(),
              "collision world: exclusion refers to an unknown link");
    }
    if (!excluded(e.first, e.second)) exclusions_.push_back(e);
  }

  for (Arm arm : {Arm::A, Arm::B}) {
    const auto& links = chain_of(sys_, arm).link_spheres();
    for (int l = 0; l < static_cast<int>(links.size()); ++l) {
      for (const auto& s : links[l]) bodies_.push_back({LinkId{arm, l}, s.center, s.radius});
    }
  }
  for (int i = 0; i < static_cast<int>(bodies_.size()); ++i) {
    for (int j = i + 1; j < static_cast<int>(bodies_.size()); ++j) {
      const auto& x = bodies_[i].link;
      const auto& y = bodies_[j].link;
      if (x == y || excluded(x, y)) continue;
      pairs_.push_back({i, j});
    }
  }
}

bool CollisionWorld::excluded(const LinkId& x, const LinkId& y) const {
  return std::any_of(exclusions_.begin(), exclusions_.end(),
                     [&](const auto& e) { return same_pair(e, x, y); });
}

std::vector<CollisionWorld::PlacedSphere> CollisionWorld::robot_spheres(const VecX& q) const {
  sys_.check_config(q);
  const ChainFrames fa = chain_frames(sys_.robot_a(), sys_.q_a(q), sys_.base_a());
  const ChainFrames fb = chain_frames(sys_.robot_b(), sys_.q_b(q), sys_.base_b());
  std::vector<PlacedSphere> out;
  out.reserve(bodies_.size());
  for (const auto& b : bodies_) {
    const ChainFrames& f = b.link.arm == Arm::A ? fa : fb;
    const Vec3 c = f.link_position[b.link.link] + f.link_rotation[b.link.link] * b.local_center;
    out.push_back({b.link, Sphere{c, b.radius}});
  }
  return out;
}

bool CollisionWorld::in_collision(const VecX& q) const {
  const auto placed = robot_spheres(q);
  for (const auto& p : placed) {
    for (const auto& o : obstacles_) {
      const double r = p.sphere.radius + o.radius;
      if ((p.sphere.center - o.center).squaredNorm() < r * r) return true;
    }
  }
  for (const auto& [i, j] : pairs_) {
    const double r = placed[i].sphere.radius + placed[j].sphere.radius;
    if ((placed[i].sphere.center - placed[j].sphere.center).squaredNorm() < r * r) return true;
  }
  return false;
}

bool config_in_collision(const CollisionWorld& world, const VecX& q) { return world.in_collision(q); }

bool motion_in_collision(const CollisionWorld& world, const VecX& q_from, const VecX& q_to, double step) {
  require(step > 0.0, "motion_in_collision: step must be > 0");
  world.system().check_config(q_from);
  world.system().check_config(q_to);
  const VecX delta = q_to - q_from;
  const double span = delta.cwiseAbs().maxCoeff();
  const int segments = std::max(1, static_cast<int>(std::ceil(span / step)));
  // Endpoints first; they are the likeliest to be in contact.
  if (world.in_collision(q_to) || world.in_collision(q_from)) return true;
  for (int i = 1; i < segments; ++i) {
    const double t = static_cast<double>(i) / segments;
    if (world.in_collision(q_from + t * delta)) return true;
  }
  return false;
}

}  // namespace etaik
