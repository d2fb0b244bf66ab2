#include "etaik/training.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <random>

#include "etaik/errors.hpp"
#include "etaik/parallel.hpp"

namespace etaik {

TimeTarget time_target_from_string(const std::string& name) {
  if (name == "blind") return TimeTarget::Blind;
  if (name == "cf") return TimeTarget::CollisionFree;
  throw ContractViolation("unknown time target '" + name + "' (expected blind or cf)");
}

std::string to_string(TimeTarget t) { return t == TimeTarget::Blind ? "blind" : "cf"; }

double target_of(const DatasetRecord& r, TimeTarget t) { return t == TimeTarget::Blind ? r.t_blind : r.t_cf; }

bool in_validation_split(const DatasetRecord& record, std::uint64_t seed, double fraction) {
  std::uint64_t h = mix_seed(seed);
  for (Eigen::Index i = 0; i < record.q_0.size(); ++i) h = mix_seed(h ^ std::bit_cast<std::uint64_t>(record.q_0[i]));
  for (Eigen::Index i = 0; i < record.q_t.size(); ++i) h = mix_seed(h ^ std::bit_cast<std::uint64_t>(record.q_t[i]));
  return static_cast<double>(h >> 11) * 0x1.0p-53 < fraction;
}

namespace {

struct Split {
  MatX x;
  VecX y;
};

Split gather(const Dataset& d, const std::vector<std::size_t>& idx, TimeTarget target) {
  Split s;
  s.x.resize(6 * d.dof, static_cast<Eigen::Index>(idx.size()));
  s.y.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& r = d.records[idx[k]];
    s.x.col(static_cast<Eigen::Index>(k)) = encode(r.q_0, r.q_t);
    s.y[static_cast<Eigen::Index>(k)] = target_of(r, target);
  }
  return s;
}

struct Adam {
  std::vector<MatX> mw, vw;
  std::vector<VecX> mb, vb;
  int t = 0;

  explicit Adam(const MlpModel& m) {
    for (int l = 0; l < m.layers(); ++l) {
      mw.push_back(MatX::Zero(m.weights[l].rows(), m.weights[l].cols()));
      vw.push_back(mw.back());
      mb.push_back(VecX::Zero(m.biases[l].size()));
      vb.push_back(mb.back());
    }
  }

  void step(MlpModel& m, const MlpGradients& g, double lr, double weight_decay) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t;
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    for (int l = 0; l < m.layers(); ++l) {
      mw[l] = b1 * mw[l] + (1.0 - b1) * g.weights[l];
      vw[l] = b2 * vw[l] + (1.0 - b2) * g.weights[l].cwiseAbs2();
      if (weight_decay > 0.0) m.weights[l] *= 1.0 - lr * weight_decay;
      m.weights[l].array() -= lr * (mw[l].array() / c1) / ((vw[l].array() / c2).sqrt() + eps);
      mb[l] = b1 * mb[l] + (1.0 - b1) * g.biases[l];
      vb[l] = b2 * vb[l] + (1.0 - b2) * g.biases[l].cwiseAbs2();
      m.biases[l].array() -= lr * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + eps);
    }
  }
};

}  // namespace

TrainingResult train(const Dataset& dataset, const TrainingConfig& config, std::uint64_t seed) {
  require(!dataset.records.empty(), "train: empty dataset");
  require(config.epochs >= 1 && config.batch_size >= 1, "train: epochs and batch size must be >= 1");
  require(config.weight_decay >= 0.0, "train: weight decay must be >= 0");
  for (const auto& r : dataset.records) {
    require(r.q_0.size() == dataset.dof && r.q_t.size() == dataset.dof, "train: record dimension mismatch");
  }

  std::vector<std::size_t> train_idx, val_idx;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    (in_validation_split(dataset.records[i], seed, config.validation_fraction) ? val_idx : train_idx).push_back(i);
  }
  if (train_idx.empty()) std::swap(train_idx, val_idx);
  const Split tr = gather(dataset, train_idx, config.target);
  const Split va = val_idx.empty() ? tr : gather(dataset, val_idx, config.target);

  TrainingResult result;
  result.train_count = train_idx.size();
  result.validation_count = val_idx.size();
  MlpModel model = make_random_mlp(dataset.dof, config.hidden, config.activation, seed);
  // Start from the mean predictor; hidden layers pick up gradient once the
  // output layer moves.
  model.weights.back().setZero();
  model.output_mean = tr.y.mean();
  const double var = (tr.y.array() - model.output_mean).square().mean();
  model.output_std = var > 1e-24 ? std::sqrt(var) : 1.0;

  Adam adam(model);
  std::mt19937_64 rng(mix_seed(seed + 1));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(tr.x.cols()));
  std::iota(order.begin(), order.end(), 0);
  const Eigen::Index bs = std::min<Eigen::Index>(config.batch_size, tr.x.cols());
  MlpGradients grads;
  MatX xb;
  VecX yb;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double progress = config.epochs > 1 ? static_cast<double>(epoch) / (config.epochs - 1) : 1.0;
    const double lr = config.final_learning_rate +
                      0.5 * (config.learning_rate - config.final_learning_rate) *
                          (1.0 + std::cos(std::numbers::pi * progress));
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    int batches = 0;
    for (Eigen::Index start = 0; start < tr.x.cols(); start += bs) {
      const Eigen::Index m = std::min(bs, tr.x.cols() - start);
      xb.resize(tr.x.rows(), m);
      yb.resize(m);
      for (Eigen::Index k = 0; k < m; ++k) {
        xb.col(k) = tr.x.col(order[static_cast<std::size_t>(start + k)]);
        yb[k] = tr.y[order[static_cast<std::size_t>(start + k)]];
      }
      const double loss = loss_and_gradients(model, xb, yb, grads);
      if (!std::isfinite(loss)) {
        throw DivergenceError(static_cast<std::size_t>(epoch), "training diverged at epoch " + std::to_string(epoch));
      }
      loss_sum += loss;
      ++batches;
      adam.step(model, grads, lr, config.weight_decay);
    }

    EpochLog e;
    e.epoch = epoch;
    e.train_loss = loss_sum / batches;
    const VecX pred = predict_batch(model, va.x);
    const VecX err = pred - va.y;
    e.validation_mae = err.cwiseAbs().mean();
    e.validation_loss = (err / model.output_std).squaredNorm() / static_cast<double>(err.size());
    if (!std::isfinite(e.validation_loss)) {
      throw DivergenceError(static_cast<std::size_t>(epoch), "validation loss non-finite at epoch " + std::to_string(epoch));
    }
    result.log.push_back(e);
  }

  result.validation_mae = result.log.back().validation_mae;
  result.validation_mean_target = va.y.mean();
  result.model = std::move(model);
  return result;
}

double weight_gradient_check(const MlpModel& model, const DatasetRecord& record, TimeTarget target,
                             std::uint64_t seed, int samples) {
  const MatX x = encode(record.q_0, record.q_t);
  VecX y(1);
  y[0] = target_of(record, target);
  MlpGradients analytic;
  loss_and_gradients(model, x, y, analytic);

  MlpModel probe = model;
  MlpGradients scratch;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_layer(0, model.layers() - 1);
  std::uniform_int_distribution<int> pick_kind(0, 3);  // 1 in 4 picks a bias
  constexpr double h = 1e-6;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int l = pick_layer(rng);
    double* p;
    double a;
    if (pick_kind(rng) == 0) {
      const int r = std::uniform_int_distribution<int>(0, static_cast<int>(model.biases[l].size()) - 1)(rng);
      p = &probe.biases[l][r];
      a = analytic.biases[l][r];
    } else {
      const int r = std::uniform_int_distribution<int>(0, static_cast<int>(model.weights[l].rows()) - 1)(rng);
      const int c = std::uniform_int_distribution<int>(0, static_cast<int>(model.weights[l].cols()) - 1)(rng);
      p = &probe.weights[l](r, c);
      a = analytic.weights[l](r, c);
    }
    const double saved = *p;
    *p = saved + h;
    const double up = loss_and_gradients(probe, x, y, scratch);
    *p = saved - h;
    const double down = loss_and_gradients(probe, x, y, scratch);
    *p = saved;
    const double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-6}));
  }
  return worst;
}

void save_training_log(const std::vector<EpochLog>& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write training log '" + path + "'");
  out << "epoch,train_loss,validation_loss,validation_mae\n" << std::setprecision(10);
  for (const auto& e : log) out << e.epoch << ',' << e.train_loss << ',' << e.validation_loss << ',' << e.validation_mae << '\n';
}

}  // namespace etaik
