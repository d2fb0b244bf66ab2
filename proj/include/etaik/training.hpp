#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "etaik/dataset.hpp"
#include "etaik/mlp.hpp"

namespace etaik {

enum class TimeTarget { Blind, CollisionFree };

TimeTarget time_target_from_string(const std::string& name);  // "blind" | "cf"
std::string to_string(TimeTarget t);
double target_of(const DatasetRecord& r, TimeTarget t);

struct TrainingConfig {
  TimeTarget target = TimeTarget::Blind;
  std::vector<int> hidden = {256, 256, 128};
  Activation activation = Activation::Silu;
  int epochs = 60;
  int batch_size = 256;
  double learning_rate = 1e-3;
  double final_learning_rate = 1e-5;  // cosine schedule end point
  double weight_decay = 0.1;          // decoupled, weights only
  double validation_fraction = 0.1;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;       // mean normalized MSE over the epoch's batches
  double validation_loss = 0.0;  // normalized MSE
  double validation_mae = 0.0;   // seconds
};

struct TrainingResult {
  MlpModel model;
  std::vector<EpochLog> log;
  double validation_mae = 0.0;
  double validation_mean_target = 0.0;
  std::size_t train_count = 0;
  std::size_t validation_count = 0;
};

// Deterministic hash split; a record lands in validation when its hash
// (seeded) falls in the lowest `fraction` of the range.
bool in_validation_split(const DatasetRecord& record, std::uint64_t seed, double fraction);

// Mini-batch Adam on z-scored targets. Deterministic in `seed`. When the
// split leaves no validation record, validation metrics are computed on the
// training set. Throws DivergenceError on a non-finite loss.
TrainingResult train(const Dataset& dataset, const TrainingConfig& config, std::uint64_t seed);

// Largest relative error between analytic and central-difference weight
// gradients of the single-record loss, over `samples` randomly chosen
// parameters. Relative error is |a - f| / max(|a|, |f|, 1e-6).
double weight_gradient_check(const MlpModel& model, const DatasetRecord& record, TimeTarget target,
                             std::uint64_t seed, int samples = 64);

void save_training_log(const std::vector<EpochLog>& log, const std::string& path);

}  // namespace etaik
