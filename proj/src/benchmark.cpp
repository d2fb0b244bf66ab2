#include "etaik/benchmark.hpp"

#include <cstdio>
#include <random>

#include "etaik/errors.hpp"
#include "etaik/kinematics.hpp"
#include "etaik/parallel.hpp"

namespace etaik {

Method method_from_string(const std::string& name) {
  if (name == "reference" || name == "ref") return Method::Reference;
  if (name.size() == 1 && name[0] >= 'A' && name[0] <= 'G') return static_cast<Method>(1 + (name[0] - 'A'));
  throw ContractViolation("unknown benchmark method '" + name + "'");
}

std::string to_string(Method m) {
  if (m == Method::Reference) return "reference";
  return std::string(1, static_cast<char>('A' + static_cast<int>(m) - 1));
}

void BenchmarkConfig::validate() const {
  require(!methods.empty(), "benchmark: at least one method required");
  require(trials >= 1, "benchmark: trials must be >= 1");
  require(max_tries >= 1, "benchmark: max_tries must be >= 1");
  require(task_radius >= 0.0, "benchmark: task_radius must be >= 0");
  for (Method m : methods) {
    const bool blind = m == Method::B || m == Method::D || m == Method::E || m == Method::F;
    require(!blind || blind_model, "benchmark: method " + to_string(m) + " needs a collision-blind model");
    require(m != Method::G || cf_model, "benchmark: method G needs a collision-aware model");
  }
}

namespace {

VecX sample_free(const CollisionWorld& world, std::mt19937_64& rng, int max_tries) {
  const auto& sys = world.system();
  const VecX lo = sys.q_min();
  const VecX hi = sys.q_max();
  VecX q(sys.dof());
  for (int t = 0; t < max_tries; ++t) {
    for (int i = 0; i < q.size(); ++i) q[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
    if (!world.in_collision(q)) return q;
  }
  throw NoFreeSample("benchmark: no collision-free sample within " + std::to_string(max_tries) + " tries");
}

SolverConfig method_config(Method m, const BenchmarkConfig& config) {
  SolverConfig s = config.solver;
  switch (m) {
    case Method::A:
    case Method::C:
      s.time_term = TimeTerm::WeightedDistance;
      s.selection = Selection::BestCost;
      s.model = nullptr;
      break;
    case Method::B:
    case Method::D:
      s.time_term = TimeTerm::Approximator;
      s.selection = Selection::BestTime;
      s.model = config.blind_model;
      break;
    case Method::E:
      s.time_term = TimeTerm::Approximator;
      s.selection = Selection::BestCost;
      s.model = config.blind_model;
      break;
    case Method::F:
      s.time_term = TimeTerm::Approximator;
      s.selection = Selection::BestPose;
      s.model = config.blind_model;
      break;
    case Method::G:
      s.time_term = TimeTerm::Approximator;
      s.selection = Selection::BestTime;
      s.model = config.cf_model;
      break;
    case Method::Reference:
      break;
  }
  return s;
}

TrialOutcome time_outcome(const CollisionWorld& world, const VecX& q_0, const VecX& q, std::uint64_t seed,
                          const PlannerConfig& planner) {
  TrialOutcome o;
  o.q = q;
  o.t_blind = synchronized_duration(world.system(), q_0, q);
  try {
    o.t_cf = plan_collision_free(world, q_0, q, seed, planner).duration;
    o.success = true;
  } catch (const PlanningFailure& e) {
    o.error = e.what();
  }
  return o;
}

}  // namespace

BenchmarkResult run_benchmark(const CollisionWorld& world, const BenchmarkConfig& config) {
  config.validate();
  const auto& sys = world.system();
  const std::size_t M = config.methods.size();
  const std::size_t T = static_cast<std::size_t>(config.trials);

  BenchmarkResult result;
  result.trials = config.trials;
  result.seed = config.seed;
  result.problems.resize(T);
  std::vector<std::vector<TrialOutcome>> outcomes(T, std::vector<TrialOutcome>(M));

  parallel_for(T, config.threads, [&](std::size_t t) {
    const std::uint64_t trial_seed = derive_seed(config.seed, t);
    std::mt19937_64 rng(trial_seed);
    const VecX q_0 = sample_free(world, rng, config.max_tries);
    VecX q_ref = sample_free(world, rng, config.max_tries);
    for (int tries = 1; config.task_radius > 0.0; ++tries) {
      if (relative_pose(sys, q_ref).position.norm() <= config.task_radius) break;
      if (tries >= config.max_tries) throw NoFreeSample("benchmark: no task-related reference found");
      q_ref = sample_free(world, rng, config.max_tries);
    }
    result.problems[t] = {q_0, q_ref};
    const auto kin = dual_arm_kinematics(sys, q_ref, false);
    const PoseTarget relative = PoseTarget::relative_to(kin.relative);
    const PoseTarget absolute = PoseTarget::absolute(kin.tcp_a, kin.tcp_b);
    const std::uint64_t plan_seed = derive_seed(trial_seed, 0xc0ffee);

    for (std::size_t m = 0; m < M; ++m) {
      const Method method = config.methods[m];
      TrialOutcome& out = outcomes[t][m];
      if (method == Method::Reference) {
        out = time_outcome(world, q_0, q_ref, plan_seed, config.planner);
        continue;
      }
      SolverConfig sc = method_config(method, config);
      sc.seed = derive_seed(trial_seed, static_cast<std::uint64_t>(method));
      const bool is_absolute = method == Method::A || method == Method::B;
      try {
        const SolveReport report = solve(world, q_0, is_absolute ? absolute : relative, sc);
        const Candidate& best = report.best_candidate();
        if (!best.feasible) {
          out.q = best.q;
          out.error = "no feasible candidate";
          continue;
        }
        out = time_outcome(world, q_0, best.q, plan_seed, config.planner);
        // Report the relative-pose error for every method so rows compare.
        const Pose rel = relative_pose(sys, best.q);
        out.position_error = (rel.position - relative.relative.position).norm();
        out.orientation_error = rotation_angle(quaternion_displacement(relative.relative.orientation, rel.orientation));
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  });

  for (std::size_t m = 0; m < M; ++m) {
    MethodSummary row;
    row.method = config.methods[m];
    for (std::size_t t = 0; t < T; ++t) {
      const TrialOutcome& o = outcomes[t][m];
      row.trials.push_back(o);
      if (!o.success) continue;
      ++row.successes;
      row.mean_t_blind += o.t_blind;
      row.mean_t_cf += o.t_cf;
      row.mean_position_error += o.position_error;
    }
    if (row.successes > 0) {
      row.mean_t_blind /= row.successes;
      row.mean_t_cf /= row.successes;
      row.mean_position_error /= row.successes;
    }
    row.success_rate = 100.0 * row.successes / static_cast<double>(T);
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string format_table(const BenchmarkResult& result) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %10s %10s %12s %9s\n", "method", "t_blind", "t_cf", "pos_err", "success");
  out += line;
  for (const auto& row : result.rows) {
    std::snprintf(line, sizeof line, "%-10s %10.4f %10.4f %12.3e %8.1f%%\n", to_string(row.method).c_str(),
                  row.mean_t_blind, row.mean_t_cf, row.mean_position_error, row.success_rate);
    out += line;
  }
  return out;
}

}  // namespace etaik
