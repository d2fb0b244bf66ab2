#include "etaik/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "etaik/errors.hpp"
#include "etaik/halton.hpp"
#include "etaik/parallel.hpp"
#include "etaik/timing.hpp"

namespace etaik {

Selection selection_from_string(const std::string& name) {
  if (name == "best-pose") return Selection::BestPose;
  if (name == "best-time") return Selection::BestTime;
  if (name == "best-cost") return Selection::BestCost;
  throw ContractViolation("unknown selection '" + name + "'");
}

std::string to_string(Selection s) {
  switch (s) {
    case Selection::BestPose:
      return "best-pose";
    case Selection::BestTime:
      return "best-time";
    case Selection::BestCost:
      return "best-cost";
  }
  return "unknown";
}

TimeTerm time_term_from_string(const std::string& name) {
  if (name == "none") return TimeTerm::None;
  if (name == "weighted-distance") return TimeTerm::WeightedDistance;
  if (name == "approximator") return TimeTerm::Approximator;
  throw ContractViolation("unknown time term '" + name + "'");
}

std::string to_string(TimeTerm t) {
  switch (t) {
    case TimeTerm::None:
      return "none";
    case TimeTerm::WeightedDistance:
      return "weighted-distance";
    case TimeTerm::Approximator:
      return "approximator";
  }
  return "unknown";
}

double SolverConfig::time_weight() const {
  switch (time_term) {
    case TimeTerm::None:
      return 0.0;
    case TimeTerm::WeightedDistance:
      return w_distance;
    case TimeTerm::Approximator:
      return w_approximator;
  }
  return 0.0;
}

ObjectiveWeights SolverConfig::weights() const {
  return ObjectiveWeights{w_position, w_orientation, time_weight(), w_limit, limit_margin};
}

void SolverConfig::validate() const {
  require(batch_size >= 1, "solver config: batch_size must be >= 1");
  require(iterations >= 0, "solver config: iterations must be >= 0");
  require(w_position >= 0.0 && w_orientation >= 0.0 && w_distance >= 0.0 && w_approximator >= 0.0 &&
              w_limit >= 0.0,
          "solver config: weights must be nonnegative");
  require(limit_margin > 0.0, "solver config: limit_margin must be > 0");
  require(!step_magnitudes.empty(), "solver config: step_magnitudes must not be empty");
  for (std::size_t i = 0; i < step_magnitudes.size(); ++i) {
    require(step_magnitudes[i] > 0.0, "solver config: step magnitudes must be > 0");
    require(i == 0 || step_magnitudes[i] > step_magnitudes[i - 1], "solver config: step magnitudes must ascend");
  }
  require(armijo > 0.0 && armijo < curvature && curvature < 1.0,
          "solver config: need 0 < armijo < curvature < 1");
  require(position_threshold > 0.0 && orientation_threshold > 0.0, "solver config: thresholds must be > 0");
  require(time_term != TimeTerm::Approximator || model != nullptr,
          "solver config: approximator time term requires a model");
  require(seed_tries_per_candidate >= 1, "solver config: seed_tries_per_candidate must be >= 1");
}

namespace {

MatX seed_batch(const CollisionWorld& world, const VecX& q_0, const SolverConfig& config) {
  const int n = world.system().dof();
  MatX seeds(n, config.batch_size);
  seeds.col(0) = q_0;
  HaltonSampler sampler(n, 1 + (mix_seed(config.seed ^ 0x5eedULL) >> 28));
  const int tries = config.seed_tries_per_candidate * config.batch_size;
  for (int c = 1; c < config.batch_size; ++c) {
    try {
      seeds.col(c) = sample_collision_free(world, sampler, tries);
    } catch (const NoFreeSample&) {
      throw NoFreeSample("solve: could not draw " + std::to_string(config.batch_size) + " collision-free seeds");
    }
  }
  return seeds;
}

struct LineSearchState {
  MatX q;      // n x B
  VecX f;      // B
  MatX g;      // n x B
  std::vector<char> active;
};

// One descent iteration over all active candidates.
void iterate(const Objective& objective, const DualArmSystem& sys, const SolverConfig& config, LineSearchState& s) {
  const int n = sys.dof();
  const int K = static_cast<int>(config.step_magnitudes.size());
  std::vector<int> act;
  for (int c = 0; c < static_cast<int>(s.active.size()); ++c) {
    if (!s.active[c]) continue;
    if (s.g.col(c).cwiseAbs().maxCoeff() <= 0.0) {
      s.active[c] = 0;
      continue;
    }
    act.push_back(c);
  }
  if (act.empty()) return;

  const VecX lo = sys.q_min();
  const VecX hi = sys.q_max();
  const int A = static_cast<int>(act.size());
  MatX trials(n, A * K);
  for (int a = 0; a < A; ++a) {
    const int c = act[a];
    const VecX dir = -s.g.col(c) / s.g.col(c).cwiseAbs().maxCoeff();
    for (int k = 0; k < K; ++k) {
      trials.col(a * K + k) = (s.q.col(c) + config.step_magnitudes[k] * dir).cwiseMax(lo).cwiseMin(hi);
    }
  }
  VecX ft;
  objective.evaluate(trials, ft);

  // Per candidate: Armijo-satisfying trials ordered by cost.
  std::vector<std::vector<int>> order(A);
  std::vector<int> smallest(A, -1);
  for (int a = 0; a < A; ++a) {
    const int c = act[a];
    for (int k = 0; k < K; ++k) {
      const int t = a * K + k;
      const VecX step = trials.col(t) - s.q.col(c);
      const double slope = s.g.col(c).dot(step);
      if (slope >= 0.0) continue;  // clamping removed the descent component
      if (ft[t] <= s.f[c] + config.armijo * slope) {
        order[a].push_back(t);
        if (smallest[a] < 0) smallest[a] = t;
      }
    }
    std::stable_sort(order[a].begin(), order[a].end(), [&](int x, int y) { return ft[x] < ft[y]; });
  }

  // Curvature checks in rounds, computing gradients only where needed.
  std::vector<int> cursor(A, 0);
  std::vector<int> accepted(A, -1);
  MatX trial_grad(n, A * K);  // filled lazily
  std::vector<char> have_grad(static_cast<std::size_t>(A * K), 0);

  for (;;) {
    std::vector<int> pending_a, pending_t;
    for (int a = 0; a < A; ++a) {
      if (accepted[a] >= 0 || cursor[a] >= static_cast<int>(order[a].size())) continue;
      pending_a.push_back(a);
      pending_t.push_back(order[a][cursor[a]]);
    }
    if (pending_a.empty()) break;
    MatX pts(n, static_cast<Eigen::Index>(pending_t.size()));
    for (std::size_t i = 0; i < pending_t.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = trials.col(pending_t[i]);
    VecX fp;
    MatX gp;
    objective.evaluate(pts, fp, &gp);
    for (std::size_t i = 0; i < pending_a.size(); ++i) {
      const int a = pending_a[i];
      const int c = act[a];
      const int t = pending_t[i];
      trial_grad.col(t) = gp.col(static_cast<Eigen::Index>(i));
      have_grad[static_cast<std::size_t>(t)] = 1;
      const VecX step = trials.col(t) - s.q.col(c);
      if (gp.col(static_cast<Eigen::Index>(i)).dot(step) >= config.curvature * s.g.col(c).dot(step)) {
        accepted[a] = t;
      } else {
        ++cursor[a];
      }
    }
  }

  // Fallback: smallest Armijo magnitude.
  std::vector<int> need_a;
  for (int a = 0; a < A; ++a) {
    if (accepted[a] < 0 && smallest[a] >= 0) {
      accepted[a] = smallest[a];
      if (!have_grad[static_cast<std::size_t>(smallest[a])]) need_a.push_back(a);
    }
  }
  if (!need_a.empty()) {
    MatX pts(n, static_cast<Eigen::Index>(need_a.size()));
    for (std::size_t i = 0; i < need_a.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = trials.col(accepted[need_a[i]]);
    VecX fp;
    MatX gp;
    objective.evaluate(pts, fp, &gp);
    for (std::size_t i = 0; i < need_a.size(); ++i) trial_grad.col(accepted[need_a[i]]) = gp.col(static_cast<Eigen::Index>(i));
  }

  for (int a = 0; a < A; ++a) {
    const int c = act[a];
    const int t = accepted[a];
    if (t < 0) {
      s.active[c] = 0;  // no decrease available at any magnitude
      continue;
    }
    s.q.col(c) = trials.col(t);
    s.f[c] = ft[t];
    s.g.col(c) = trial_grad.col(t);
  }
}

double selection_metric(const Candidate& c, const SolverConfig& config) {
  double m = 0.0;
  switch (config.selection) {
    case Selection::BestPose:
      m = config.w_position * c.cost.position + config.w_orientation * c.cost.orientation;
      break;
    case Selection::BestTime:
      m = c.predicted_time;
      break;
    case Selection::BestCost:
      m = c.cost.total;
      break;
  }
  return c.feasible ? m : m + config.infeasible_offset;
}

}  // namespace

SolveReport solve(const CollisionWorld& world, const VecX& q_0, const PoseTarget& target, const SolverConfig& config) {
  const auto t_start = std::chrono::steady_clock::now();
  config.validate();
  const DualArmSystem& sys = world.system();
  sys.check_config(q_0);
  require(sys.within_limits(q_0, 1e-9), "solve: q_0 outside joint limits");

  const Objective objective(sys, q_0, target, config.weights(), config.time_term, config.model);

  LineSearchState s;
  s.q = seed_batch(world, q_0, config);
  objective.evaluate(s.q, s.f, &s.g);
  s.active.assign(static_cast<std::size_t>(config.batch_size), 1);

  int iterations = 0;
  for (; iterations < config.iterations; ++iterations) {
    if (std::none_of(s.active.begin(), s.active.end(), [](char a) { return a != 0; })) break;
    iterate(objective, sys, config, s);
  }

  SolveReport report;
  report.iterations = iterations;
  report.selection = config.selection;
  std::vector<ObjectiveBreakdown> parts;
  VecX totals;
  objective.evaluate(s.q, totals, nullptr, &parts);
  VecX predicted;
  if (config.time_term == TimeTerm::Approximator) predicted = predict_batch(*config.model, encode_batch(q_0, s.q));

  report.candidates.resize(static_cast<std::size_t>(config.batch_size));
  bool any_converged = false;
  for (int c = 0; c < config.batch_size; ++c) {
    Candidate& cand = report.candidates[static_cast<std::size_t>(c)];
    cand.q = s.q.col(c);
    cand.cost = parts[static_cast<std::size_t>(c)];
    std::tie(cand.position_error, cand.orientation_error) = objective.pose_errors(cand.q);
    cand.predicted_time = config.time_term == TimeTerm::Approximator ? predicted[c]
                                                                      : synchronized_duration(sys, q_0, cand.q);
    cand.converged =
        cand.position_error < config.position_threshold && cand.orientation_error < config.orientation_threshold;
    cand.collision_free = !world.in_collision(cand.q);
    cand.feasible = cand.converged && cand.collision_free;
    cand.selection_metric = selection_metric(cand, config);
    any_converged = any_converged || cand.converged;
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < report.candidates.size(); ++c) {
    if (report.candidates[c].selection_metric < report.candidates[best].selection_metric) best = c;
  }
  report.best_index = best;
  report.best = report.candidates[best].q;
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  if (!any_converged) {
    throw NoSolution("solve: no candidate met the pose thresholds", report.candidates[best]);
  }
  return report;
}

std::vector<BatchEntry> batch_solve(const CollisionWorld& world, const std::vector<Problem>& problems,
                                    const SolverConfig& config, int threads) {
  std::vector<BatchEntry> out(problems.size());
  parallel_for(problems.size(), threads, [&](std::size_t i) {
    try {
      out[i].report = solve(world, problems[i].q_0, problems[i].target, config);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

}  // namespace etaik
