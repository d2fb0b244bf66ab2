#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "etaik/chain_model.hpp"

namespace etaik {

using MatX = Eigen::MatrixXd;

// Positional encoding of a start/target pair:
//   [q_0, cos q_0, sin q_0, q_t, cos q_t, sin q_t]   (length 6 n)
VecX encode(const VecX& q_0, const VecX& q_t);
// Column-wise encoding of a fixed start against many targets (n x m).
MatX encode_batch(const VecX& q_0, const MatX& q_t);

enum class Activation : std::uint32_t { Tanh = 0, Silu = 1, Softplus = 2 };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);

// Fully connected network mapping an encoded pair to execution time.
// prediction = output_mean + output_std * net(input_scale .* x); the last
// layer is linear.
struct MlpModel {
  int dof = 0;                       // n_T of the system the model was trained for
  std::vector<int> layer_sizes;      // 6 n_T, hidden..., 1
  Activation activation = Activation::Silu;
  std::vector<MatX> weights;         // weights[l] is layer_sizes[l+1] x layer_sizes[l]
  std::vector<VecX> biases;
  VecX input_scale;                  // per encoded feature
  double output_mean = 0.0;
  double output_std = 1.0;

  int input_size() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
  int layers() const { return static_cast<int>(weights.size()); }
  std::size_t parameter_count() const;
};

// Zero weights and biases, unit scales. 1/pi on the raw-angle features.
MlpModel make_mlp(int dof, const std::vector<int>& hidden, Activation activation);
// Glorot-uniform weights, zero biases, deterministic in `seed`.
MlpModel make_random_mlp(int dof, const std::vector<int>& hidden, Activation activation, std::uint64_t seed);

double predict(const MlpModel& model, const VecX& encoded);
VecX predict_batch(const MlpModel& model, const MatX& encoded);

// d prediction / d q_t, chaining through the cos/sin encoding of the target
// block. q_0 is treated as constant.
VecX input_gradient(const MlpModel& model, const VecX& encoded);

// Batched prediction plus gradients w.r.t. each column's target block
// (gradients is n x m).
void predict_with_target_gradient(const MlpModel& model, const MatX& encoded, VecX& predictions,
                                  MatX& gradients);

// Mean squared error in normalized output units,
//   mean_k (net(x_k) - (y_k - output_mean) / output_std)^2,
// and its gradient w.r.t. every weight and bias.
struct MlpGradients {
  std::vector<MatX> weights;
  std::vector<VecX> biases;
};
double loss_and_gradients(const MlpModel& model, const MatX& encoded, const VecX& targets_seconds,
                          MlpGradients& grads);

void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace etaik
