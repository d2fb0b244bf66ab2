#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "etaik/timing.hpp"

namespace etaik {

struct DatasetRecord {
  VecX q_0;
  VecX q_t;
  double t_blind = 0.0;  // synchronized straight-line time
  double t_cf = 0.0;     // collision-aware planned time
  bool straight_line_free = true;
  std::uint64_t seed = 0;  // planner seed used for t_cf
};

struct Dataset {
  int dof = 0;
  std::vector<DatasetRecord> records;
};

// Binary little-endian layout:
//   "ETAIKDAT" | u32 version | u32 n_T | u64 record_count |
//   records: q_0 (n_T f64) q_t (n_T f64) t_blind f64 t_cf f64 flag u8 seed u64
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);
void export_csv(const Dataset& dataset, const std::string& path);

struct GenerationConfig {
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  PlannerConfig planner;
  int threads = 1;
  int max_tries = 100000;  // per pair
};

struct GenerationResult {
  Dataset dataset;
  std::size_t straight_line_colliding = 0;
  std::size_t planning_failures = 0;  // pairs dropped and resampled

  double colliding_fraction() const {
    return dataset.records.empty() ? 0.0
                                   : static_cast<double>(straight_line_colliding) / dataset.records.size();
  }
};

// Samples collision-free start/target pairs with a 2 n_T-dimensional Halton
// sequence (rejection on either endpoint) and times each pair with both
// oracles. Deterministic in config.seed regardless of thread count.
GenerationResult generate_dataset(const CollisionWorld& world, const GenerationConfig& config);

}  // namespace etaik
