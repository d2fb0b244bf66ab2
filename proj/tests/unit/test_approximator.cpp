#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "etaik/dataset.hpp"
#include "etaik/errors.hpp"
#include "etaik/mlp.hpp"
#include "etaik/training.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace etaik;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("etaik_approx_" + name)).string();
}

// Random start/target pairs on the desk arms, timed with the blind oracle only.
Dataset blind_dataset(std::size_t count, std::uint64_t seed) {
  const CollisionWorld world = fixture::desk();
  const auto& sys = world.system();
  std::mt19937_64 rng(seed);
  Dataset d;
  d.dof = sys.dof();
  for (std::size_t i = 0; i < count; ++i) {
    DatasetRecord r;
    r.q_0 = oracle::random_config(rng, sys.q_min(), sys.q_max());
    r.q_t = oracle::random_config(rng, sys.q_min(), sys.q_max());
    r.t_blind = synchronized_duration(sys, r.q_0, r.q_t);
    r.t_cf = r.t_blind;
    r.seed = i;
    d.records.push_back(r);
  }
  return d;
}

std::vector<char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

double fd_relative_error(const MlpModel& model, const VecX& q0, const VecX& qt) {
  const VecX analytic = input_gradient(model, encode(q0, qt));
  VecX fd(qt.size());
  constexpr double h = 1e-5;
  for (Eigen::Index i = 0; i < qt.size(); ++i) {
    VecX up = qt, down = qt;
    up[i] += h;
    down[i] -= h;
    fd[i] = (predict(model, encode(q0, up)) - predict(model, encode(q0, down))) / (2 * h);
  }
  return fixture::rel_err(analytic, fd, 1e-8);
}

}  // namespace

TEST_CASE("positional encoding layout") {
  const VecX z = VecX::Zero(3);
  const VecX e = encode(z, z);
  REQUIRE(e.size() == 18);
  for (int b = 0; b < 6; ++b) {
    const double expected = (b == 1 || b == 4) ? 1.0 : 0.0;
    CHECK(e.segment(3 * b, 3).isConstant(expected));
  }

  VecX q(1);
  q << std::numbers::pi / 2;
  const VecX one = encode(VecX::Zero(1), q);
  CHECK(one[3] == q[0]);
  CHECK(std::abs(one[4]) <= 1e-15);
  CHECK(one[5] == 1.0);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 200; ++i) {
    VecX a(4), b(4);
    for (int k = 0; k < 4; ++k) a[k] = u(rng), b[k] = u(rng);
    const VecX x = encode(a, b);
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(x[4 + k] * x[4 + k] + x[8 + k] * x[8 + k] - 1.0) <= 1e-12);
      CHECK(std::abs(x[16 + k] * x[16 + k] + x[20 + k] * x[20 + k] - 1.0) <= 1e-12);
      CHECK(x[k] == a[k]);
      CHECK(x[12 + k] == b[k]);
    }
  }

  MatX targets(4, 3);
  targets.setRandom();
  const VecX start = VecX::Random(4);
  const MatX batch = encode_batch(start, targets);
  for (int c = 0; c < 3; ++c) CHECK((batch.col(c) - encode(start, targets.col(c))).norm() == 0.0);
}

TEST_CASE("zero-weight model predicts its output offset with zero gradient") {
  MlpModel m = make_mlp(3, {16, 8}, Activation::Silu);
  m.output_mean = 2.75;
  m.output_std = 0.5;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const VecX x = encode(VecX::Random(3), VecX::Random(3));
    CHECK(predict(m, x) == 2.75);
    CHECK(input_gradient(m, x).norm() == 0.0);
  }
  // A bias on the output layer shifts by output_std * bias.
  m.biases.back()[0] = 2.0;
  CHECK(predict(m, encode(VecX::Zero(3), VecX::Zero(3))) == doctest::Approx(2.75 + 1.0));
}

TEST_CASE("predict rejects mismatched input sizes") {
  const MlpModel m = make_random_mlp(3, {8}, Activation::Tanh, 1);
  CHECK_THROWS_AS(predict(m, VecX::Zero(17)), ContractViolation);
  CHECK_THROWS_AS(input_gradient(m, VecX::Zero(24)), ContractViolation);
}

TEST_CASE("encoding only wraps the cos/sin coordinates") {
  const MlpModel m = make_random_mlp(2, {16}, Activation::Silu, 3);
  const VecX q0 = VecX::Random(2), qt = VecX::Random(2);
  VecX e = encode(q0, qt);
  VecX wrapped = encode(q0, qt + VecX::Constant(2, 2 * std::numbers::pi));
  CHECK((wrapped.segment(8, 4) - e.segment(8, 4)).norm() <= 1e-12);
  CHECK((wrapped.segment(6, 2) - e.segment(6, 2)).norm() > 1.0);
  CHECK(predict(m, wrapped) != predict(m, e));
}

TEST_CASE("input gradients match finite differences") {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  int draws = 0;
  for (Activation act : {Activation::Tanh, Activation::Silu, Activation::Softplus}) {
    for (int i = 0; i < 34; ++i) {
      const int dof = 1 + static_cast<int>(rng() % 6);
      MlpModel m = make_random_mlp(dof, {24, 16}, act, rng());
      m.output_mean = 1.5;
      m.output_std = 0.7;
      for (auto& b : m.biases) b.setRandom();
      const VecX q0 = VecX::Random(dof) * 3.0, qt = VecX::Random(dof) * 3.0;
      worst = std::max(worst, fd_relative_error(m, q0, qt));
      ++draws;
    }
  }
  CHECK(draws >= 100);
  CHECK(worst <= 1e-4);
}

TEST_CASE("a joint cut off from the network has zero gradient") {
  MlpModel m = make_random_mlp(3, {16, 16}, Activation::Silu, 5);
  const int n = 3, joint = 1;
  for (int block : {3, 4, 5}) m.weights[0].col(block * n + joint).setZero();
  const VecX g = input_gradient(m, encode(VecX::Random(3), VecX::Random(3)));
  CHECK(g[joint] == 0.0);
  CHECK(g[0] != 0.0);
  CHECK(g[2] != 0.0);
}

TEST_CASE("batched gradients agree with single evaluations") {
  const MlpModel m = make_random_mlp(4, {32, 16}, Activation::Softplus, 6);
  const VecX q0 = VecX::Random(4);
  const MatX targets = MatX::Random(4, 7);
  VecX p;
  MatX g;
  predict_with_target_gradient(m, encode_batch(q0, targets), p, g);
  for (int c = 0; c < 7; ++c) {
    const VecX x = encode(q0, targets.col(c));
    CHECK(p[c] == doctest::Approx(predict(m, x)).epsilon(1e-13));
    CHECK((g.col(c) - input_gradient(m, x)).norm() <= 1e-12 * (1 + g.col(c).norm()));
  }
}

TEST_CASE("weight gradients match finite differences") {
  const Dataset d = blind_dataset(5, 7);
  for (Activation act : {Activation::Tanh, Activation::Silu, Activation::Softplus}) {
    MlpModel m = make_random_mlp(d.dof, {16, 8}, act, 8);
    m.output_mean = 2.0;
    for (const auto& r : d.records) CHECK(weight_gradient_check(m, r, TimeTarget::Blind, 9, 64) <= 1e-4);
  }
}

TEST_CASE("zero input gives bias gradients equal to the error signal") {
  MlpModel m = make_random_mlp(2, {8, 4}, Activation::Silu, 10);
  for (auto& b : m.biases) b.setRandom();
  m.output_mean = 1.0;
  m.output_std = 2.0;
  const MatX x = MatX::Zero(12, 1);
  VecX y(1);
  y << 3.0;
  MlpGradients g;
  loss_and_gradients(m, x, y, g);
  const double net = (predict(m, x.col(0)) - m.output_mean) / m.output_std;
  const double signal = 2.0 * (net - (y[0] - m.output_mean) / m.output_std);
  CHECK(g.biases.back()[0] == doctest::Approx(signal).epsilon(1e-12));
  CHECK(g.weights.front().norm() == 0.0);
}

TEST_CASE("duplicate records give identical gradients") {
  const Dataset d = blind_dataset(1, 11);
  const MlpModel m = make_random_mlp(d.dof, {16}, Activation::Tanh, 12);
  const auto& r = d.records[0];
  MatX one = encode(r.q_0, r.q_t);
  MatX two(one.rows(), 2);
  two << one, one;
  VecX y1(1), y2(2);
  y1 << r.t_blind;
  y2 << r.t_blind, r.t_blind;
  MlpGradients a, b, c;
  const double la = loss_and_gradients(m, one, y1, a);
  const double lb = loss_and_gradients(m, two, y2, b);
  loss_and_gradients(m, one, y1, c);
  CHECK(la == doctest::Approx(lb).epsilon(1e-14));
  for (int l = 0; l < m.layers(); ++l) {
    CHECK((a.weights[l] - b.weights[l]).norm() <= 1e-14 * (1 + a.weights[l].norm()));
    CHECK((a.weights[l] - c.weights[l]).norm() == 0.0);
    CHECK((a.biases[l] - c.biases[l]).norm() == 0.0);
  }
}

TEST_CASE("training overfits three samples") {
  Dataset d = blind_dataset(3, 13);
  TrainingConfig cfg;
  cfg.hidden = {32, 32};
  cfg.epochs = 1500;
  cfg.batch_size = 3;
  cfg.learning_rate = 1e-2;
  cfg.final_learning_rate = 1e-4;
  cfg.weight_decay = 0.0;
  cfg.validation_fraction = 0.0;
  const TrainingResult res = train(d, cfg, 14);
  double mse = 0.0;
  for (const auto& r : d.records) mse += std::pow(predict(res.model, encode(r.q_0, r.q_t)) - r.t_blind, 2) / 3.0;
  CHECK(mse <= 1e-3);
}

TEST_CASE("training learns a constant target") {
  Dataset d = blind_dataset(200, 15);
  for (auto& r : d.records) r.t_blind = 2.5;
  TrainingConfig cfg;
  cfg.hidden = {16, 16};
  cfg.epochs = 20;
  cfg.batch_size = 32;
  const TrainingResult res = train(d, cfg, 16);
  CHECK(res.validation_mae <= 1e-3);
  CHECK(res.validation_count > 0);
}

TEST_CASE("training loss decreases and runs are reproducible") {
  const Dataset d = blind_dataset(2000, 17);
  TrainingConfig cfg;
  cfg.hidden = {64, 64};
  cfg.epochs = 20;
  cfg.batch_size = 64;
  const TrainingResult a = train(d, cfg, 18);
  REQUIRE(a.log.size() == 20);
  auto median5 = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[2];
  };
  std::vector<double> first, last;
  for (int i = 0; i < 5; ++i) {
    first.push_back(a.log[static_cast<std::size_t>(i)].train_loss);
    last.push_back(a.log[a.log.size() - 5 + static_cast<std::size_t>(i)].train_loss);
  }
  CHECK(median5(last) < median5(first));
  CHECK(a.train_count + a.validation_count == d.records.size());
  CHECK(a.validation_count > 100);
  CHECK(a.validation_count < 300);

  const TrainingResult b = train(d, cfg, 18);
  for (int l = 0; l < a.model.layers(); ++l) {
    CHECK((a.model.weights[l] - b.model.weights[l]).norm() == 0.0);
    CHECK((a.model.biases[l] - b.model.biases[l]).norm() == 0.0);
  }
  CHECK(a.validation_mae == b.validation_mae);
}

TEST_CASE("training errors") {
  TrainingConfig cfg;
  CHECK_THROWS_AS(train(Dataset{}, cfg, 1), ContractViolation);

  Dataset d = blind_dataset(50, 19);
  cfg.hidden = {8};
  cfg.epochs = 5;
  cfg.learning_rate = 1e300;
  cfg.final_learning_rate = 1e300;
  cfg.weight_decay = 0.0;
  try {
    train(d, cfg, 2);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.epoch() < 5);
  }

  TrainingConfig neg;
  neg.weight_decay = -1.0;
  CHECK_THROWS_AS(train(d, neg, 1), ContractViolation);
}

TEST_CASE("model files round-trip bit-exactly") {
  MlpModel m = make_random_mlp(3, {16, 8}, Activation::Softplus, 20);
  m.output_mean = 1.25;
  m.output_std = 0.3;
  for (auto& b : m.biases) b.setRandom();
  const std::string path = temp_path("model.bin");
  save_model(m, path);
  const MlpModel back = load_model(path);
  CHECK(back.dof == 3);
  CHECK(back.layer_sizes == m.layer_sizes);
  CHECK(back.activation == m.activation);
  for (int i = 0; i < 20; ++i) {
    const VecX x = encode(VecX::Random(3), VecX::Random(3));
    CHECK(predict(back, x) == predict(m, x));
    CHECK((input_gradient(back, x) - input_gradient(m, x)).norm() == 0.0);
  }

  std::vector<char> bytes = read_bytes(path);
  std::vector<char> trailing = bytes;
  trailing.push_back('x');
  write_bytes(path, trailing);
  CHECK_THROWS_AS(load_model(path), FormatError);
  std::vector<char> version = bytes;
  version[8] = 9;
  write_bytes(path, version);
  CHECK_THROWS_AS(load_model(path), FormatError);
  std::vector<char> magic = bytes;
  magic[0] = 'Z';
  write_bytes(path, magic);
  CHECK_THROWS_AS(load_model(path), FormatError);
  bytes.resize(bytes.size() - 4);
  write_bytes(path, bytes);
  CHECK_THROWS_AS(load_model(path), FormatError);
  std::filesystem::remove(path);
}

TEST_CASE("dataset files round-trip bit-exactly") {
  Dataset d = blind_dataset(25, 21);
  d.records[3].straight_line_free = false;
  d.records[3].t_cf = d.records[3].t_blind + 0.5;
  const std::string path = temp_path("data.bin");
  save_dataset(d, path);
  const Dataset back = load_dataset(path);
  REQUIRE(back.records.size() == d.records.size());
  CHECK(back.dof == d.dof);
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const auto& a = d.records[i];
    const auto& b = back.records[i];
    CHECK((a.q_0 - b.q_0).norm() == 0.0);
    CHECK((a.q_t - b.q_t).norm() == 0.0);
    CHECK(a.t_blind == b.t_blind);
    CHECK(a.t_cf == b.t_cf);
    CHECK(a.straight_line_free == b.straight_line_free);
    CHECK(a.seed == b.seed);
  }

  std::vector<char> bytes = read_bytes(path);
  std::vector<char> trailing = bytes;
  trailing.push_back(0);
  write_bytes(path, trailing);
  CHECK_THROWS_AS(load_dataset(path), FormatError);
  std::vector<char> version = bytes;
  version[8] = 7;
  write_bytes(path, version);
  CHECK_THROWS_AS(load_dataset(path), FormatError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_dataset(path), FormatError);
}

TEST_CASE("validation split is a fixed hash of the record") {
  const Dataset d = blind_dataset(1000, 22);
  int inside = 0;
  for (const auto& r : d.records) {
    const bool v = in_validation_split(r, 5, 0.1);
    CHECK(v == in_validation_split(r, 5, 0.1));
    inside += v;
  }
  CHECK(inside > 60);
  CHECK(inside < 140);
}
