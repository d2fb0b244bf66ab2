#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "etaik/costs.hpp"
#include "etaik/errors.hpp"
#include "etaik/kinematics.hpp"
#include "etaik/solver.hpp"
#include "etaik/training.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace etaik;

namespace {

VecX free_sample(const CollisionWorld& world, std::mt19937_64& rng) {
  for (;;) {
    const VecX q = oracle::random_config(rng, world.system().q_min(), world.system().q_max());
    if (!oracle::brute_force_collision(world, q)) return q;
  }
}

// Small blind-time model trained on the fly for tests that need a learned
// time term.
std::shared_ptr<const MlpModel> quick_model(const CollisionWorld& world) {
  const auto& sys = world.system();
  std::mt19937_64 rng(99);
  Dataset d;
  d.dof = sys.dof();
  for (int i = 0; i < 1500; ++i) {
    DatasetRecord r;
    r.q_0 = oracle::random_config(rng, sys.q_min(), sys.q_max());
    r.q_t = oracle::random_config(rng, sys.q_min(), sys.q_max());
    r.t_blind = r.t_cf = synchronized_duration(sys, r.q_0, r.q_t);
    d.records.push_back(r);
  }
  TrainingConfig cfg;
  cfg.hidden = {32, 32};
  cfg.epochs = 15;
  cfg.batch_size = 64;
  return std::make_shared<const MlpModel>(train(d, cfg, 3).model);
}

SolverConfig small_config() {
  SolverConfig c;
  c.batch_size = 32;
  c.iterations = 300;
  c.w_distance = 5.0;
  c.w_approximator = 5.0;
  return c;
}

// Central-difference gradient of the objective's total.
VecX fd_gradient(const Objective& obj, const VecX& q, double h) {
  VecX g(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    VecX up = q, down = q;
    up[i] += h;
    down[i] -= h;
    g[i] = (obj.breakdown(up).total - obj.breakdown(down).total) / (2 * h);
  }
  return g;
}

// Relative TCP position from matrix products, independent of the kinematics code.
Vec3 oracle_relative_position(const DualArmSystem& sys, const VecX& q) {
  const Eigen::Matrix4d a = oracle::fk_matrix_chain(sys.robot_a(), sys.q_a(q), sys.base_a());
  const Eigen::Matrix4d b = oracle::fk_matrix_chain(sys.robot_b(), sys.q_b(q), sys.base_b());
  return (a.inverse() * b).block<3, 1>(0, 3);
}

}  // namespace

TEST_CASE("pose cost closed forms") {
  const CollisionWorld world = fixture::desk();
  const auto& sys = world.system();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const VecX q = oracle::random_config(rng, sys.q_min(), sys.q_max());
    const Pose here = relative_pose(sys, q);
    CHECK(position_cost(sys, q, here) <= 1e-24);
    CHECK(orientation_cost(sys, q, here) <= 1e-20);

    Pose shifted = here;
    shifted.position += Vec3(0.1, 0, 0);
    CHECK(position_cost(sys, q, shifted) == doctest::Approx(0.01).epsilon(1e-10));

    const Vec3 axis = oracle::random_unit(rng);
    Pose turned = here;
    turned.orientation = here.orientation * axis_angle(axis, std::numbers::pi / 2);
    CHECK(orientation_cost(sys, q, turned) == doctest::Approx(std::pow(std::numbers::pi / 2, 2)).epsilon(1e-10));
  }
}

TEST_CASE("orientation cost is continuous across the double cover") {
  const CollisionWorld world = fixture::desk();
  const auto& sys = world.system();
  const VecX q = VecX::Constant(sys.dof(), 0.3);
  const Pose here = relative_pose(sys, q);
  const Vec3 axis = Vec3(0.3, -0.5, 0.8).normalized();
  double prev = -1.0, worst = 0.0;
  for (int k = -100; k <= 100; ++k) {
    Pose t = here;
    t.orientation = here.orientation * axis_angle(axis, std::numbers::pi + k * 1e-7);
    const double c = orientation_cost(sys, q, t);
    if (prev >= 0.0) worst = std::max(worst, std::abs(c - prev));
    prev = c;
    Pose flipped = t;
    flipped.orientation.coeffs() *= -1.0;
    CHECK(orientation_cost(sys, q, flipped) == doctest::Approx(c).epsilon(1e-12));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("weighted distance and limit cost closed forms") {
  VecX q0 = VecX::Zero(3), v = VecX::Constant(3, 2.0);
  CHECK(weighted_distance_cost(q0, q0, v) == 0.0);
  VecX q = q0;
  q[1] = 1.0;
  CHECK(weighted_distance_cost(q, q0, v) == doctest::Approx(0.25).epsilon(1e-15));
  const VecX r = VecX::Random(3);
  CHECK(weighted_distance_cost(r, q0, 2 * v) == doctest::Approx(weighted_distance_cost(r, q0, v) / 4).epsilon(1e-14));

  const VecX lo = VecX::Constant(3, -1.0), hi = VecX::Constant(3, 1.0);
  const double m = 0.05;
  CHECK(limit_cost(VecX::Zero(3), lo, hi, m) == 0.0);
  CHECK(limit_cost(VecX::Constant(3, 1.0 - m), lo, hi, m) == 0.0);
  VecX at_max = VecX::Zero(3);
  at_max[0] = 1.0;
  CHECK(limit_cost(at_max, lo, hi, m) == doctest::Approx(m * m).epsilon(1e-12));
  at_max[2] = -1.0;
  CHECK(limit_cost(at_max, lo, hi, m) == doctest::Approx(2 * m * m).epsilon(1e-12));
}

TEST_CASE("total cost assembles the weighted terms") {
  const CollisionWorld world = fixture::desk();
  const auto& sys = world.system();
  const auto model = quick_model(world);
  std::mt19937_64 rng(2);
  const VecX q0 = oracle::random_config(rng, sys.q_min(), sys.q_max());
  const PoseTarget target = PoseTarget::relative_to(relative_pose(sys, oracle::random_config(rng, sys.q_min(), sys.q_max())));
  for (int i = 0; i < 20; ++i) {
    const VecX q = oracle::random_config(rng, sys.q_min(), sys.q_max());
    ObjectiveWeights zero{0, 0, 0, 0, 0.05};
    CHECK(total_cost(sys, q, q0, target, zero, TimeTerm::Approximator, model).total == 0.0);

    ObjectiveWeights only_p{1, 0, 0, 0, 0.05};
    CHECK(total_cost(sys, q, q0, target, only_p, TimeTerm::WeightedDistance).total ==
          doctest::Approx(position_cost(sys, q, target.relative)).epsilon(1e-14));

    ObjectiveWeights w{2000, 2500, 5, 500, 0.05};
    for (TimeTerm tt : {TimeTerm::None, TimeTerm::WeightedDistance, TimeTerm::Approximator}) {
      const ObjectiveBreakdown b = total_cost(sys, q, q0, target, w, tt, model);
      CHECK(std::abs(b.total - (w.position * b.position + w.orientation * b.orientation + w.time * b.time +
                                w.limit * b.limit)) <= 1e-12 * std::max(1.0, b.total));
      CHECK(b.position >= 0.0);
      CHECK(b.orientation >= 0.0);
      CHECK(b.limit >= 0.0);
      if (tt == TimeTerm::None) CHECK(b.time == 0.0);
      if (tt == TimeTerm::WeightedDistance) CHECK(b.time == doctest::Approx(weighted_distance_cost(q, q0, sys.vel_max())));
      if (tt == TimeTerm::Approximator) CHECK(b.time == doctest::Approx(predict(*model, encode(q0, q))).epsilon(1e-12));
    }
  }
}

TEST_CASE("objective gradients match finite differences") {
  const CollisionWorld world = fixture::desk();
  const auto& sys = world.system();
  const auto model = quick_model(world);
  std::mt19937_64 rng(3);
  double worst_p = 0.0, worst_total = 0.0;
  for (int i = 0; i < 100; ++i) {
    const VecX q0 = oracle::random_config(rng, sys.q_min(), sys.q_max());
    const VecX q = oracle::random_config(rng, sys.q_min(), sys.q_max());
    const PoseTarget target =
        i % 2 ? PoseTarget::relative_to(relative_pose(sys, oracle::random_config(rng, sys.q_min(), sys.q_max())))
              : PoseTarget::absolute(Pose(Vec3(0.3, 0.2, 0), oracle::random_quat(rng)),
                                     Pose(Vec3(0.8, 0.1, 0), oracle::random_quat(rng)));
    const Objective pos_only(sys, q0, target, ObjectiveWeights{1, 0, 0, 0, 0.05}, TimeTerm::None);
    worst_p = std::max(worst_p, fixture::rel_err(pos_only.gradient(q), fd_gradient(pos_only, q, 1e-6), 1e-8));

    const Objective full(sys, q0, target, ObjectiveWeights{2000, 2500, 500, 500, 0.05}, TimeTerm::Approximator, model);
    worst_total = std::max(worst_total, fixture::rel_err(full.gradient(q), fd_gradient(full, q, 1e-6), 1e-6));
  }
  CHECK(worst_p <= 1e-5);
  CHECK(worst_total <= 1e-4);
}

TEST_CASE("the current pose is a fixed point") {
  const CollisionWorld world = fixture::desk();
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5; ++i) {
    VecX q0;
    do {
      q0 = free_sample(world, rng);
    } while (!world.system().within_limits(q0) ||
             limit_cost(q0, world.system().q_min(), world.system().q_max(), 0.05) > 0.0);
    SolverConfig c = small_config();
    c.selection = Selection::BestTime;
    c.seed = static_cast<std::uint64_t>(i);
    const SolveReport r = solve(world, q0, PoseTarget::relative_to(relative_pose(world.system(), q0)), c);
    CHECK((r.best - q0).norm() == 0.0);
    CHECK(r.best_candidate().predicted_time == 0.0);
    CHECK(r.best_candidate().feasible);
  }
}

TEST_CASE("reachable targets are solved to sub-millimetre accuracy") {
  const CollisionWorld world = fixture::desk();
  std::mt19937_64 rng(5);
  SolverConfig c = small_config();
  c.iterations = 500;
  c.time_term = TimeTerm::None;
  c.selection = Selection::BestPose;
  int ok = 0;
  for (int t = 0; t < 100; ++t) {
    const VecX q0 = free_sample(world, rng), q_ref = free_sample(world, rng);
    c.seed = static_cast<std::uint64_t>(t);
    try {
      const SolveReport r = solve(world, q0, PoseTarget::relative_to(relative_pose(world.system(), q_ref)), c);
      const Candidate& b = r.best_candidate();
      if (b.feasible && b.position_error < 1e-3) ++ok;
    } catch (const NoSolution&) {
    }
  }
  CHECK(ok >= 95);
}

TEST_CASE("selection modes pick the minimum of their metric") {
  const CollisionWorld world = fixture::desk();
  const auto& sys = world.system();
  const auto model = quick_model(world);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 4; ++t) {
    const VecX q0 = free_sample(world, rng), q_ref = free_sample(world, rng);
    const PoseTarget target = PoseTarget::relative_to(relative_pose(sys, q_ref));
    SolverConfig c = small_config();
    c.time_term = TimeTerm::Approximator;
    c.model = model;
    c.seed = 40 + static_cast<std::uint64_t>(t);
    c.selection = Selection::BestTime;
    const SolveReport by_time = solve(world, q0, target, c);
    c.selection = Selection::BestPose;
    const SolveReport by_pose = solve(world, q0, target, c);
    c.selection = Selection::BestCost;
    const SolveReport by_cost = solve(world, q0, target, c);

    // Selection only changes the pick, not the candidates.
    REQUIRE(by_time.candidates.size() == by_pose.candidates.size());
    for (std::size_t k = 0; k < by_time.candidates.size(); ++k) {
      CHECK((by_time.candidates[k].q - by_pose.candidates[k].q).norm() == 0.0);
    }
    if (by_time.best_candidate().feasible && by_pose.best_candidate().feasible) {
      CHECK(by_time.best_candidate().predicted_time <= by_pose.best_candidate().predicted_time);
    }

    for (const SolveReport* r : {&by_time, &by_pose, &by_cost}) {
      const Candidate& best = r->best_candidate();
      bool any_feasible = false;
      for (const auto& cand : r->candidates) {
        any_feasible = any_feasible || cand.feasible;
        if (cand.feasible) CHECK_FALSE(cand.selection_metric < best.selection_metric);
      }
      if (any_feasible) CHECK(best.feasible);
      double metric = 0.0;
      if (r->selection == Selection::BestTime) metric = best.predicted_time;
      if (r->selection == Selection::BestPose) metric = c.w_position * best.cost.position + c.w_orientation * best.cost.orientation;
      if (r->selection == Selection::BestCost) metric = best.cost.total;
      CHECK(best.selection_metric == doctest::Approx(best.feasible ? metric : metric + c.infeasible_offset));
    }
  }
}

TEST_CASE("reported candidates respect limits and feasibility re-checks") {
  const CollisionWorld world = fixture::desk();
  const auto& sys = world.system();
  std::mt19937_64 rng(7);
  for (int t = 0; t < 5; ++t) {
    const VecX q0 = free_sample(world, rng), q_ref = free_sample(world, rng);
    const Pose target = relative_pose(sys, q_ref);
    SolverConfig c = small_config();
    c.seed = static_cast<std::uint64_t>(t);
    const SolveReport r = solve(world, q0, PoseTarget::relative_to(target), c);
    int feasible = 0;
    for (const auto& cand : r.candidates) {
      CHECK(sys.within_limits(cand.q));
      if (!cand.feasible) continue;
      ++feasible;
      CHECK((oracle_relative_position(sys, cand.q) - target.position).norm() < c.position_threshold);
      CHECK_FALSE(oracle::brute_force_collision(world, cand.q));
      const Eigen::Matrix4d a = oracle::fk_matrix_chain(sys.robot_a(), sys.q_a(cand.q), sys.base_a());
      const Eigen::Matrix4d b = oracle::fk_matrix_chain(sys.robot_b(), sys.q_b(cand.q), sys.base_b());
      const Eigen::Matrix3d rel = (a.inverse() * b).block<3, 3>(0, 0);
      const Eigen::Matrix3d want = oracle::homogeneous(target).block<3, 3>(0, 0);
      CHECK(oracle::rotation_matrix_angle(want.transpose() * rel) < c.orientation_threshold + 1e-7);
    }
    CHECK(feasible > 0);
  }
}

TEST_CASE("without time and limit terms converged costs sit below the thresholds") {
  const CollisionWorld world = fixture::desk();
  std::mt19937_64 rng(8);
  SolverConfig c = small_config();
  c.time_term = TimeTerm::None;
  c.w_limit = 0.0;
  for (int t = 0; t < 5; ++t) {
    const VecX q0 = free_sample(world, rng), q_ref = free_sample(world, rng);
    c.seed = static_cast<std::uint64_t>(t);
    const SolveReport r = solve(world, q0, PoseTarget::relative_to(relative_pose(world.system(), q_ref)), c);
    for (const auto& cand : r.candidates) {
      if (!cand.converged) continue;
      CHECK(cand.cost.position < c.position_threshold * c.position_threshold);
      CHECK(cand.cost.orientation < c.orientation_threshold * c.orientation_threshold);
    }
  }
}

TEST_CASE("one more iteration never raises a candidate's cost") {
  const CollisionWorld world = fixture::desk();
  std::mt19937_64 rng(9);
  const VecX q0 = free_sample(world, rng), q_ref = free_sample(world, rng);
  const PoseTarget target = PoseTarget::relative_to(relative_pose(world.system(), q_ref));
  SolverConfig c = small_config();
  c.batch_size = 16;
  for (int k : {0, 1, 2, 5, 17, 60}) {
    c.iterations = k;
    SolveReport a, b;
    try {
      a = solve(world, q0, target, c);
    } catch (const NoSolution&) {
      continue;
    }
    c.iterations = k + 1;
    try {
      b = solve(world, q0, target, c);
    } catch (const NoSolution&) {
      FAIL("a later iterate lost convergence everywhere");
    }
    for (std::size_t i = 0; i < a.candidates.size(); ++i) {
      CHECK(b.candidates[i].cost.total <= a.candidates[i].cost.total);
    }
  }
  // The first iterations usually leave nothing converged; compare raw costs
  // through the objective instead.
  const Objective obj(world.system(), q0, target, c.weights(), c.time_term);
  VecX prev;
  for (int k = 0; k <= 40; ++k) {
    c.iterations = k;
    VecX totals(c.batch_size);
    SolveReport r;
    try {
      r = solve(world, q0, target, c);
    } catch (const NoSolution&) {
      continue;
    }
    for (int i = 0; i < c.batch_size; ++i) totals[i] = obj.breakdown(r.candidates[static_cast<std::size_t>(i)].q).total;
    if (prev.size() > 0) CHECK((totals.array() <= prev.array()).all());
    prev = totals;
  }
}

TEST_CASE("solves are deterministic") {
  const CollisionWorld world = fixture::desk();
  const auto model = quick_model(world);
  std::mt19937_64 rng(10);
  const VecX q0 = free_sample(world, rng), q_ref = free_sample(world, rng);
  SolverConfig c = small_config();
  c.time_term = TimeTerm::Approximator;
  c.model = model;
  c.selection = Selection::BestTime;
  c.seed = 123;
  const PoseTarget target = PoseTarget::relative_to(relative_pose(world.system(), q_ref));
  const SolveReport a = solve(world, q0, target, c);
  const SolveReport b = solve(world, q0, target, c);
  CHECK(a.best_index == b.best_index);
  CHECK(a.iterations == b.iterations);
  for (std::size_t i = 0; i < a.candidates.size(); ++i) {
    CHECK((a.candidates[i].q - b.candidates[i].q).norm() == 0.0);
    CHECK(a.candidates[i].cost.total == b.candidates[i].cost.total);
    CHECK(a.candidates[i].predicted_time == b.candidates[i].predicted_time);
  }
  c.seed = 124;
  const SolveReport other = solve(world, q0, target, c);
  bool differs = false;
  for (std::size_t i = 1; i < a.candidates.size(); ++i) differs = differs || (a.candidates[i].q - other.candidates[i].q).norm() > 0;
  CHECK(differs);
}

TEST_CASE("unreachable targets raise NoSolution") {
  const CollisionWorld world = fixture::desk();
  std::mt19937_64 rng(11);
  const VecX q0 = free_sample(world, rng);
  SolverConfig c = small_config();
  c.iterations = 50;
  const PoseTarget far = PoseTarget::relative_to(Pose(Vec3(10, 0, 0), Quat::Identity()));
  try {
    solve(world, q0, far, c);
    FAIL("expected NoSolution");
  } catch (const NoSolution& e) {
    CHECK(e.best_infeasible().position_error > 5.0);
    CHECK_FALSE(e.best_infeasible().feasible);
  }
}

TEST_CASE("batch_solve keeps order and captures errors") {
  const CollisionWorld world = fixture::desk();
  const auto& sys = world.system();
  std::mt19937_64 rng(12);
  SolverConfig c = small_config();
  c.iterations = 100;
  CHECK(batch_solve(world, {}, c).empty());

  const VecX q0 = free_sample(world, rng);
  const PoseTarget target = PoseTarget::relative_to(relative_pose(sys, free_sample(world, rng)));
  const SolveReport single = solve(world, q0, target, c);
  VecX bad = q0;
  bad[0] = sys.q_max()[0] + 1.0;
  const std::vector<Problem> problems{{q0, target}, {bad, target}, {q0, target}};
  for (int threads : {1, 3}) {
    const auto out = batch_solve(world, problems, c, threads);
    REQUIRE(out.size() == 3);
    REQUIRE(out[0].report.has_value());
    REQUIRE(out[2].report.has_value());
    CHECK_FALSE(out[1].report.has_value());
    CHECK_FALSE(out[1].error.empty());
    for (const auto* e : {&out[0], &out[2]}) {
      CHECK(e->report->best_index == single.best_index);
      for (std::size_t i = 0; i < single.candidates.size(); ++i) {
        CHECK((e->report->candidates[i].q - single.candidates[i].q).norm() == 0.0);
      }
    }
  }
}

TEST_CASE("solver config validation") {
  auto rejects = [](auto mutate) {
    SolverConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), ContractViolation);
  };
  SolverConfig ok;
  CHECK_NOTHROW(ok.validate());
  rejects([](SolverConfig& c) { c.batch_size = 0; });
  rejects([](SolverConfig& c) { c.w_position = -1; });
  rejects([](SolverConfig& c) { c.step_magnitudes = {0.1, 0.01}; });
  rejects([](SolverConfig& c) { c.step_magnitudes = {}; });
  rejects([](SolverConfig& c) { c.position_threshold = 0; });
  rejects([](SolverConfig& c) { c.orientation_threshold = -1; });
  rejects([](SolverConfig& c) { c.armijo = 0.95; });
  rejects([](SolverConfig& c) { c.time_term = TimeTerm::Approximator; });
  CHECK(selection_from_string("best-time") == Selection::BestTime);
  CHECK(time_term_from_string("approximator") == TimeTerm::Approximator);
  CHECK_THROWS_AS(selection_from_string("fastest"), ContractViolation);
}
