#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "etaik/errors.hpp"
#include "etaik/parallel.hpp"
#include "etaik/timing.hpp"

namespace etaik {

namespace {

struct Tree {
  std::vector<VecX> nodes;
  std::vector<int> parent;

  int nearest(const VecX& q) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
      const double d = (nodes[i] - q).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  std::vector<VecX> branch(int i) const {
    std::vector<VecX> out;
    for (; i >= 0; i = parent[i]) out.push_back(nodes[i]);
    return out;  // node i first, root last
  }
};

enum class Extend { Trapped, Advanced, Reached };

class RrtConnect {
 public:
  RrtConnect(const CollisionWorld& world, const PlannerConfig& config, std::uint64_t seed)
      : world_(world), config_(config), rng_(seed), lo_(world.system().q_min()), hi_(world.system().q_max()) {}

  std::vector<VecX> plan(const VecX& from, const VecX& to) {
    Tree start{{from}, {-1}};
    Tree goal{{to}, {-1}};
    Tree* ta = &start;
    Tree* tb = &goal;
    while (extensions_ < config_.budget) {
      const VecX target = random_config();
      if (extend(*ta, target) != Extend::Trapped) {
        const VecX& q_new = ta->nodes.back();
        Extend r;
        do {
          r = extend(*tb, q_new);
        } while (r == Extend::Advanced && extensions_ < config_.budget);
        if (r == Extend::Reached) return join(start, goal);
      }
      std::swap(ta, tb);
    }
    throw PlanningFailure("RRT-Connect: no connection within " + std::to_string(config_.budget) + " extensions");
  }

 private:
  VecX random_config() {
    VecX q(lo_.size());
    for (int i = 0; i < q.size(); ++i) q[i] = std::uniform_real_distribution<double>(lo_[i], hi_[i])(rng_);
    return q;
  }

  Extend extend(Tree& tree, const VecX& target) {
    ++extensions_;
    const int near = tree.nearest(target);
    const VecX& q_near = tree.nodes[near];
    const VecX delta = target - q_near;
    const double span = delta.cwiseAbs().maxCoeff();
    const bool reaches = span <= config_.extend_step;
    const VecX q_new = reaches ? target : VecX(q_near + delta * (config_.extend_step / span));
    if (motion_in_collision(world_, q_near, q_new)) return Extend::Trapped;
    tree.nodes.push_back(q_new);
    tree.parent.push_back(near);
    return reaches ? Extend::Reached : Extend::Advanced;
  }

  // The last node of the tree that grew most recently coincides with the
  // last node of the other tree.
  std::vector<VecX> join(const Tree& start, const Tree& goal) {
    std::vector<VecX> head = start.branch(static_cast<int>(start.nodes.size()) - 1);
    std::reverse(head.begin(), head.end());
    std::vector<VecX> tail = goal.branch(static_cast<int>(goal.nodes.size()) - 1);
    head.insert(head.end(), tail.begin() + 1, tail.end());
    return head;
  }

  const CollisionWorld& world_;
  const PlannerConfig& config_;
  std::mt19937_64 rng_;
  VecX lo_, hi_;
  int extensions_ = 0;
};

// Time-aware shortcutting; every accepted change strictly lowers the
// stop-at-waypoint duration.
class Shortcutter {
 public:
  Shortcutter(const CollisionWorld& world, std::uint64_t seed) : world_(world), rng_(seed ^ 0x9e3779b97f4a7c15ULL) {}

  void run(std::vector<VecX>& path, int iterations, int refine_iterations) {
    remove_waypoints(path);
    for (int it = 0; it < iterations && path.size() > 2; ++it) random_shortcut(path);
    remove_waypoints(path);
    double scale = 0.2;
    for (int it = 0; it < refine_iterations && path.size() > 2; ++it) {
      if (!nudge(path, scale)) scale = std::max(0.5 * scale, 1e-3);
      else scale = std::min(2.0 * scale, 0.4);
    }
    if (refine_iterations > 0) remove_waypoints(path);
  }

 private:
  double seg_time(const VecX& a, const VecX& b) const { return synchronized_duration(world_.system(), a, b); }

  bool free(const VecX& a, const VecX& b) const { return !motion_in_collision(world_, a, b); }

  void remove_waypoints(std::vector<VecX>& path) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const double before = seg_time(path[i - 1], path[i]) + seg_time(path[i], path[i + 1]);
        if (seg_time(path[i - 1], path[i + 1]) < before && free(path[i - 1], path[i + 1])) {
          path.erase(path.begin() + static_cast<long>(i));
          changed = true;
          --i;
        }
      }
    }
  }

  void random_shortcut(std::vector<VecX>& path) {
    const int segments = static_cast<int>(path.size()) - 1;
    std::uniform_int_distribution<int> pick(0, segments - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int i = pick(rng_);
    int j = pick(rng_);
    if (i == j) return;
    if (i > j) std::swap(i, j);
    const double s = unit(rng_);
    const double u = unit(rng_);
    const VecX a = path[i] + s * (path[i + 1] - path[i]);
    const VecX b = path[j] + u * (path[j + 1] - path[j]);

    double old_cost = 0.0;
    for (int k = i; k <= j; ++k) old_cost += seg_time(path[k], path[k + 1]);
    // The cut points become stops of their own.
    const double after = seg_time(path[i], a) + seg_time(a, b) + seg_time(b, path[j + 1]);
    if (after >= old_cost || !free(a, b)) return;

    std::vector<VecX> next(path.begin(), path.begin() + i + 1);
    if (s > 0.0) next.push_back(a);
    if (u < 1.0) next.push_back(b);
    next.insert(next.end(), path.begin() + j + 1, path.end());
    path = std::move(next);
  }

  // Moves one interior waypoint by a random offset, kept only when the two
  // adjacent segments stay free and the duration drops.
  bool nudge(std::vector<VecX>& path, double scale) {
    std::uniform_int_distribution<int> pick(1, static_cast<int>(path.size()) - 2);
    std::normal_distribution<double> normal(0.0, scale);
    const int i = pick(rng_);
    VecX q = path[i];
    for (int k = 0; k < q.size(); ++k) q[k] += normal(rng_);
    q = world_.system().clamp(q);
    const double before = seg_time(path[i - 1], path[i]) + seg_time(path[i], path[i + 1]);
    const double after = seg_time(path[i - 1], q) + seg_time(q, path[i + 1]);
    if (after >= before || !free(path[i - 1], q) || !free(q, path[i + 1])) return false;
    path[i] = q;
    return true;
  }

  const CollisionWorld& world_;
  std::mt19937_64 rng_;
};

}  // namespace

TimeEstimate plan_collision_free(const CollisionWorld& world, const VecX& q_from, const VecX& q_to,
                                 std::uint64_t seed, const PlannerConfig& config) {
  const auto& sys = world.system();
  sys.check_config(q_from);
  sys.check_config(q_to);
  require(sys.within_limits(q_from, 1e-9) && sys.within_limits(q_to, 1e-9),
          "plan_collision_free: configuration outside joint limits");
  require(!world.in_collision(q_from), "plan_collision_free: start configuration in collision");
  require(!world.in_collision(q_to), "plan_collision_free: goal configuration in collision");
  require(config.extend_step > 0.0 && config.budget >= 1 && config.shortcut_iterations >= 0 &&
              config.refine_iterations >= 0 && config.restarts >= 1,
          "plan_collision_free: invalid planner config");

  TimeEstimate straight = synchronized_move_time(world, q_from, q_to);
  if (straight.collision_free) return straight;

  TimeEstimate best;
  best.duration = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < config.restarts; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(attempt));
    std::vector<VecX> path;
    try {
      path = RrtConnect(world, config, s).plan(q_from, q_to);
    } catch (const PlanningFailure&) {
      if (attempt + 1 == config.restarts && !best.path) throw;
      continue;
    }
    Shortcutter(world, s).run(path, config.shortcut_iterations, config.refine_iterations);
    const double duration = path_duration(sys, path);
    if (duration < best.duration) {
      best.duration = duration;
      best.collision_free = true;
      best.path = std::move(path);
    }
  }
  return best;
}

}  // namespace etaik
