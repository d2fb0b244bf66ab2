#pragma once

#include <string>

#include "etaik/benchmark.hpp"
#include "etaik/solver.hpp"

namespace etaik {

// Solver config files are JSON:
//   {"format": "etaik-solver-config", "version": 1, "batch_size": 128, ...}
// Every SolverConfig field may appear under its own name; time_term and
// selection use their string forms. "model_file" names the approximator.
// Missing fields keep their defaults; unknown keys are rejected.
struct SolverConfigFile {
  SolverConfig config;
  std::string model_file;  // empty when absent
};

SolverConfigFile parse_solver_config(const std::string& text);
SolverConfigFile load_solver_config(const std::string& path);
std::string solver_config_to_string(const SolverConfig& config, const std::string& model_file = "");

// Verified execution times of the selected configuration.
struct VerifiedTimes {
  double t_blind = 0.0;
  double t_cf = 0.0;
  bool straight_line_free = true;
};

// A solve as written by the CLI: the report (converged candidates only, one
// record each), the problem and the oracle-verified times. Wall time is not
// stored so that reruns produce identical files.
struct SolveRecord {
  VecX q_0;
  Pose target;
  SolveReport report;
  VerifiedTimes verified;
};

std::string solve_record_to_string(const SolveRecord& record);
SolveRecord parse_solve_record(const std::string& text);

std::string benchmark_to_string(const BenchmarkResult& result);
BenchmarkResult parse_benchmark(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace etaik
