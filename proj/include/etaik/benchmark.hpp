#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "etaik/solver.hpp"
#include "etaik/timing.hpp"

namespace etaik {

// Comparison methods. A: absolute TCP targets + distance loss; B: absolute
// + approximator, best time; C: relative + distance loss; D: relative +
// approximator, best time; E: best cost; F: best pose; G: relative +
// approximator trained on collision-aware times, best time. Reference times
// the sampled reference configuration directly.
enum class Method { Reference, A, B, C, D, E, F, G };

Method method_from_string(const std::string& name);  // "reference" or "A".."G"
std::string to_string(Method m);

struct BenchmarkConfig {
  std::vector<Method> methods;
  int trials = 100;
  std::uint64_t seed = 0;
  SolverConfig solver;  // time term, selection and seed are set per method
  std::shared_ptr<const MlpModel> blind_model;  // B, D, E, F
  std::shared_ptr<const MlpModel> cf_model;     // G
  PlannerConfig planner;
  int threads = 1;
  int max_tries = 100000;  // rejection sampling of q_0 and the reference
  // When > 0, only references whose TCPs lie within this distance (m) of
  // each other are kept: task-related, object-centred relative poses.
  double task_radius = 0.0;

  void validate() const;
};

struct TrialOutcome {
  bool success = false;  // a feasible configuration was returned
  VecX q;
  double t_blind = 0.0;
  double t_cf = 0.0;
  double position_error = 0.0;
  double orientation_error = 0.0;
  std::string error;
};

struct MethodSummary {
  Method method = Method::Reference;
  int successes = 0;
  double success_rate = 0.0;  // percent
  // Means over successful trials.
  double mean_t_blind = 0.0;
  double mean_t_cf = 0.0;
  double mean_position_error = 0.0;
  std::vector<TrialOutcome> trials;
};

struct BenchmarkTrial {
  VecX q_0;
  VecX q_reference;
};

struct BenchmarkResult {
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<BenchmarkTrial> problems;
  std::vector<MethodSummary> rows;  // in config.methods order
};

// Per trial: sample collision-free q_0 and reference q_t, take the target
// from FK of q_t, run every method and time each returned configuration with
// both oracles. Trials run in parallel with seeds derived from config.seed;
// per-trial failures are recorded, never fatal.
BenchmarkResult run_benchmark(const CollisionWorld& world, const BenchmarkConfig& config);

std::string format_table(const BenchmarkResult& result);

}  // namespace etaik
