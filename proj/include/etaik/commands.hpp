#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "etaik/benchmark.hpp"
#include "etaik/dataset.hpp"
#include "etaik/training.hpp"

namespace etaik {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitNoSolution = 3 };

struct GenDataOptions {
  std::string scene;
  std::string out;
  std::string csv;  // optional CSV export
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  PlannerConfig planner;
};

struct TrainOptions {
  std::string dataset;
  std::string out;  // model file
  std::string log;  // per-epoch CSV; defaults to <out>.log.csv
  TrainingConfig training;
  std::uint64_t seed = 0;
};

struct SolveOptions {
  std::string scene;
  std::string model_file;   // approximator; overrides the config file's entry
  std::string config_file;  // solver config; defaults apply when empty
  std::string out;          // report file
  std::vector<double> q_0;
  // Target relative pose: either given directly or taken from FK of a config.
  std::vector<double> target_config;
  std::vector<double> target_position;
  std::vector<double> target_quaternion = {1.0, 0.0, 0.0, 0.0};
  std::optional<std::uint64_t> seed;
  std::optional<std::string> selection;
  std::optional<std::string> time_term;
  std::optional<int> batch_size;
  std::optional<int> iterations;
  PlannerConfig planner;
};

struct BenchOptions {
  std::string scene;
  std::string model_file;     // collision-blind approximator (B, D, E, F)
  std::string cf_model_file;  // collision-aware approximator (G)
  std::string config_file;
  std::string out;  // JSON results
  std::vector<std::string> methods = {"reference", "C", "D"};
  int trials = 100;
  std::uint64_t seed = 0;
  int threads = 1;
  double task_radius = 0.0;
  std::optional<int> batch_size;
  std::optional<int> iterations;
  PlannerConfig planner;
};

// Each command reports progress on `out`, diagnostics on `err` and returns
// an ExitCode. Library exceptions are mapped to exit codes here.
int cmd_gen_data(const GenDataOptions& options, std::ostream& out, std::ostream& err);
int cmd_train(const TrainOptions& options, std::ostream& out, std::ostream& err);
int cmd_solve(const SolveOptions& options, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err);

}  // namespace etaik
