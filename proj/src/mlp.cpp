#include "etaik/mlp.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "binary_io.hpp"
#include "etaik/errors.hpp"

namespace etaik {

namespace {

constexpr char kModelMagic[9] = "ETAIKMLP";
constexpr std::uint32_t kModelVersion = 1;

MatX activate(Activation a, const MatX& z) {
  switch (a) {
    case Activation::Tanh:
      return z.array().tanh().matrix();
    case Activation::Silu:
      return (z.array() / (1.0 + (-z.array()).exp())).matrix();
    case Activation::Softplus:
      return (z.array().max(0.0) + (-z.array().abs()).exp().log1p()).matrix();
  }
  return z;
}

MatX activate_derivative(Activation a, const MatX& z) {
  switch (a) {
    case Activation::Tanh: {
      const auto t = z.array().tanh();
      return (1.0 - t * t).matrix();
    }
    case Activation::Silu: {
      const Eigen::ArrayXXd s = 1.0 / (1.0 + (-z.array()).exp());
      return (s * (1.0 + z.array() * (1.0 - s))).matrix();
    }
    case Activation::Softplus:
      return (1.0 / (1.0 + (-z.array()).exp())).matrix();
  }
  return MatX::Ones(z.rows(), z.cols());
}

void check_input(const MlpModel& model, Eigen::Index rows) {
  if (model.layers() == 0) throw ContractViolation("MLP has no layers");
  if (rows != model.input_size()) {
    throw ContractViolation("MLP expects " + std::to_string(model.input_size()) + " encoded features, got " +
                            std::to_string(rows));
  }
}

// Pre-activations of every layer; the last entry is the raw network output.
struct ForwardPass {
  MatX input;
  std::vector<MatX> pre;
  std::vector<MatX> post;  // activations of hidden layers
};

ForwardPass forward(const MlpModel& model, const MatX& encoded) {
  check_input(model, encoded.rows());
  ForwardPass f;
  f.input = model.input_scale.asDiagonal() * encoded;
  const MatX* a = &f.input;
  const int L = model.layers();
  f.pre.reserve(L);
  f.post.reserve(L - 1);
  for (int l = 0; l < L; ++l) {
    MatX z = model.weights[l] * (*a);
    z.colwise() += model.biases[l];
    f.pre.push_back(std::move(z));
    if (l + 1 < L) {
      f.post.push_back(activate(model.activation, f.pre.back()));
      a = &f.post.back();
    }
  }
  return f;
}

// Backpropagates an output-layer error signal (1 x m) to the encoded inputs.
MatX backprop_to_input(const MlpModel& model, const ForwardPass& f, MatX delta) {
  for (int l = model.layers() - 1; l >= 1; --l) {
    delta = (model.weights[l].transpose() * delta).cwiseProduct(activate_derivative(model.activation, f.pre[l - 1]));
  }
  return model.input_scale.asDiagonal() * (model.weights[0].transpose() * delta);
}

}  // namespace

VecX encode(const VecX& q_0, const VecX& q_t) {
  require(q_0.size() == q_t.size(), "encode: start and target sizes differ");
  const Eigen::Index n = q_0.size();
  VecX e(6 * n);
  e << q_0, q_0.array().cos().matrix(), q_0.array().sin().matrix(), q_t, q_t.array().cos().matrix(),
      q_t.array().sin().matrix();
  return e;
}

MatX encode_batch(const VecX& q_0, const MatX& q_t) {
  require(q_0.size() == q_t.rows(), "encode_batch: start and target sizes differ");
  const Eigen::Index n = q_0.size();
  const Eigen::Index m = q_t.cols();
  MatX e(6 * n, m);
  e.block(0, 0, n, m) = q_0.replicate(1, m);
  e.block(n, 0, n, m) = q_0.array().cos().matrix().replicate(1, m);
  e.block(2 * n, 0, n, m) = q_0.array().sin().matrix().replicate(1, m);
  e.block(3 * n, 0, n, m) = q_t;
  e.block(4 * n, 0, n, m) = q_t.array().cos().matrix();
  e.block(5 * n, 0, n, m) = q_t.array().sin().matrix();
  return e;
}

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "silu") return Activation::Silu;
  if (name == "softplus") return Activation::Softplus;
  throw ContractViolation("unknown activation '" + name + "'");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Tanh:
      return "tanh";
    case Activation::Silu:
      return "silu";
    case Activation::Softplus:
      return "softplus";
  }
  return "unknown";
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l < layers(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

MlpModel make_mlp(int dof, const std::vector<int>& hidden, Activation activation) {
  require(dof >= 1, "make_mlp: dof must be >= 1");
  MlpModel m;
  m.dof = dof;
  m.activation = activation;
  m.layer_sizes.push_back(6 * dof);
  for (int h : hidden) {
    require(h >= 1, "make_mlp: hidden sizes must be >= 1");
    m.layer_sizes.push_back(h);
  }
  m.layer_sizes.push_back(1);
  for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    m.weights.push_back(MatX::Zero(m.layer_sizes[l + 1], m.layer_sizes[l]));
    m.biases.push_back(VecX::Zero(m.layer_sizes[l + 1]));
  }
  m.input_scale = VecX::Ones(6 * dof);
  m.input_scale.segment(0, dof).setConstant(1.0 / std::numbers::pi);
  m.input_scale.segment(3 * dof, dof).setConstant(1.0 / std::numbers::pi);
  return m;
}

MlpModel make_random_mlp(int dof, const std::vector<int>& hidden, Activation activation, std::uint64_t seed) {
  MlpModel m = make_mlp(dof, hidden, activation);
  std::mt19937_64 rng(seed);
  for (auto& w : m.weights) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = u(rng);
  }
  return m;
}

double predict(const MlpModel& model, const VecX& encoded) { return predict_batch(model, encoded)[0]; }

VecX predict_batch(const MlpModel& model, const MatX& encoded) {
  const ForwardPass f = forward(model, encoded);
  return (model.output_mean + model.output_std * f.pre.back().row(0).array()).matrix().transpose();
}

void predict_with_target_gradient(const MlpModel& model, const MatX& encoded, VecX& predictions, MatX& gradients) {
  const ForwardPass f = forward(model, encoded);
  predictions = (model.output_mean + model.output_std * f.pre.back().row(0).array()).matrix().transpose();
  const MatX dx = backprop_to_input(model, f, MatX::Constant(1, encoded.cols(), model.output_std));
  const Eigen::Index n = model.dof;
  // d/dq [q, cos q, sin q] = [1, -sin q, cos q] on the target block.
  gradients = dx.block(3 * n, 0, n, dx.cols()) -
              dx.block(4 * n, 0, n, dx.cols()).cwiseProduct(encoded.block(5 * n, 0, n, dx.cols())) +
              dx.block(5 * n, 0, n, dx.cols()).cwiseProduct(encoded.block(4 * n, 0, n, dx.cols()));
}

VecX input_gradient(const MlpModel& model, const VecX& encoded) {
  VecX p;
  MatX g;
  predict_with_target_gradient(model, encoded, p, g);
  return g.col(0);
}

double loss_and_gradients(const MlpModel& model, const MatX& encoded, const VecX& targets_seconds,
                          MlpGradients& grads) {
  require(targets_seconds.size() == encoded.cols(), "loss_and_gradients: one target per column required");
  const ForwardPass f = forward(model, encoded);
  const double m = static_cast<double>(encoded.cols());
  const Eigen::RowVectorXd err =
      f.pre.back().row(0) - ((targets_seconds.array() - model.output_mean) / model.output_std).matrix().transpose();
  const double loss = err.squaredNorm() / m;

  const int L = model.layers();
  grads.weights.resize(L);
  grads.biases.resize(L);
  MatX delta = (2.0 / m) * err;
  for (int l = L - 1; l >= 0; --l) {
    const MatX& a_prev = l == 0 ? f.input : f.post[l - 1];
    grads.weights[l].noalias() = delta * a_prev.transpose();
    grads.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = (model.weights[l].transpose() * delta).cwiseProduct(activate_derivative(model.activation, f.pre[l - 1]));
    }
  }
  return loss;
}

void save_model(const MlpModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write model file '" + path + "'");
  binary::put_magic(out, kModelMagic);
  binary::put_u32(out, kModelVersion);
  binary::put_u32(out, static_cast<std::uint32_t>(model.dof));
  binary::put_u32(out, static_cast<std::uint32_t>(model.layer_sizes.size()));
  for (int s : model.layer_sizes) binary::put_u32(out, static_cast<std::uint32_t>(s));
  binary::put_u32(out, static_cast<std::uint32_t>(model.activation));
  for (Eigen::Index i = 0; i < model.input_scale.size(); ++i) binary::put_f64(out, model.input_scale[i]);
  binary::put_f64(out, model.output_mean);
  binary::put_f64(out, model.output_std);
  for (int l = 0; l < model.layers(); ++l) {
    const MatX& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) binary::put_f64(out, w(r, c));
    for (Eigen::Index r = 0; r < model.biases[l].size(); ++r) binary::put_f64(out, model.biases[l][r]);
  }
  if (!out) throw FormatError("failed writing model file '" + path + "'");
}

MlpModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model file '" + path + "'");
  binary::expect_magic(in, kModelMagic, "model");
  const std::uint32_t version = binary::get_u32(in, "model version");
  if (version != kModelVersion) {
    throw FormatError("model file version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kModelVersion) + ")");
  }
  MlpModel m;
  m.dof = static_cast<int>(binary::get_u32(in, "model dof"));
  const std::uint32_t count = binary::get_u32(in, "layer count");
  if (count < 2 || count > 64) throw FormatError("model file: implausible layer count");
  for (std::uint32_t i = 0; i < count; ++i) m.layer_sizes.push_back(static_cast<int>(binary::get_u32(in, "layer size")));
  if (m.dof < 1 || m.layer_sizes.front() != 6 * m.dof || m.layer_sizes.back() != 1) {
    throw FormatError("model file: layer sizes inconsistent with dof");
  }
  const std::uint32_t act = binary::get_u32(in, "activation");
  if (act > static_cast<std::uint32_t>(Activation::Softplus)) throw FormatError("model file: unknown activation id");
  m.activation = static_cast<Activation>(act);
  m.input_scale.resize(m.layer_sizes.front());
  for (Eigen::Index i = 0; i < m.input_scale.size(); ++i) m.input_scale[i] = binary::get_f64(in, "input scale");
  m.output_mean = binary::get_f64(in, "output mean");
  m.output_std = binary::get_f64(in, "output std");
  for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    MatX w(m.layer_sizes[l + 1], m.layer_sizes[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = binary::get_f64(in, "weights");
    VecX b(m.layer_sizes[l + 1]);
    for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = binary::get_f64(in, "biases");
    m.weights.push_back(std::move(w));
    m.biases.push_back(std::move(b));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("model file: trailing bytes");
  return m;
}

}  // namespace etaik
