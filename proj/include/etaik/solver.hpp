#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "etaik/collision.hpp"
#include "etaik/costs.hpp"

namespace etaik {

enum class Selection { BestPose, BestTime, BestCost };

Selection selection_from_string(const std::string& name);  // best-pose | best-time | best-cost
std::string to_string(Selection s);
TimeTerm time_term_from_string(const std::string& name);  // none | weighted-distance | approximator
std::string to_string(TimeTerm t);

struct SolverConfig {
  int batch_size = 4096;
  int iterations = 500;
  double w_position = 2000.0;
  double w_orientation = 2500.0;
  double w_distance = 250.0;      // time weight when time_term is weighted-distance
  double w_approximator = 500.0;  // time weight when time_term is approximator
  double w_limit = 500.0;
  double limit_margin = 0.05;
  std::vector<double> step_magnitudes = {1e-4, 3e-4, 1e-3, 3e-3, 0.01, 0.03, 0.1, 0.3, 1.0};
  double armijo = 1e-4;
  double curvature = 0.9;
  double position_threshold = 5e-3;
  double orientation_threshold = 5e-2;
  TimeTerm time_term = TimeTerm::WeightedDistance;
  std::shared_ptr<const MlpModel> model;
  Selection selection = Selection::BestCost;
  std::uint64_t seed = 0;
  double infeasible_offset = 1e6;
  int seed_tries_per_candidate = 100;

  double time_weight() const;
  ObjectiveWeights weights() const;
  // Throws ContractViolation on an invalid configuration.
  void validate() const;
};

struct Candidate {
  VecX q;
  double position_error = 0.0;     // m
  double orientation_error = 0.0;  // rad
  ObjectiveBreakdown cost;
  double predicted_time = 0.0;  // approximator output, else synchronized time from q_0
  bool converged = false;       // both pose thresholds met
  bool collision_free = false;
  bool feasible = false;        // converged && collision_free
  double selection_metric = 0.0;
};

struct SolveReport {
  VecX best;
  std::size_t best_index = 0;
  std::vector<Candidate> candidates;
  int iterations = 0;
  double wall_time = 0.0;  // seconds; not part of the reproducible output
  Selection selection = Selection::BestCost;

  const Candidate& best_candidate() const { return candidates.at(best_index); }
};

class NoSolution : public std::runtime_error {
 public:
  NoSolution(const std::string& what, Candidate best) : std::runtime_error(what), best_(std::move(best)) {}
  const Candidate& best_infeasible() const { return best_; }

 private:
  Candidate best_;
};

// Multi-start gradient descent on the objective from batch_size
// collision-free Halton seeds (q_0 always among them). Each iteration steps
// along the max-norm-normalized negative gradient; the step length is the
// lowest-cost magnitude meeting the Armijo and curvature conditions, else
// the smallest magnitude meeting Armijo, else the candidate stops. Steps are
// clamped to the joint limits. Throws NoSolution when no candidate meets the
// pose thresholds.
SolveReport solve(const CollisionWorld& world, const VecX& q_0, const PoseTarget& target, const SolverConfig& config);

struct Problem {
  VecX q_0;
  PoseTarget target;
};

struct BatchEntry {
  std::optional<SolveReport> report;
  std::string error;  // set when the solve threw
};

// Independent solves in input order; errors are captured per entry.
std::vector<BatchEntry> batch_solve(const CollisionWorld& world, const std::vector<Problem>& problems,
                                    const SolverConfig& config, int threads = 1);

}  // namespace etaik
