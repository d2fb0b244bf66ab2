#include "etaik/dataset.hpp"

#include <fstream>
#include <iomanip>
#include <optional>

#include "binary_io.hpp"
#include "etaik/errors.hpp"
#include "etaik/halton.hpp"
#include "etaik/parallel.hpp"

namespace etaik {

namespace {

constexpr char kDatasetMagic[9] = "ETAIKDAT";
constexpr std::uint32_t kDatasetVersion = 1;

}  // namespace

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write dataset file '" + path + "'");
  binary::put_magic(out, kDatasetMagic);
  binary::put_u32(out, kDatasetVersion);
  binary::put_u32(out, static_cast<std::uint32_t>(dataset.dof));
  binary::put_u64(out, dataset.records.size());
  for (const auto& r : dataset.records) {
    require(r.q_0.size() == dataset.dof && r.q_t.size() == dataset.dof, "save_dataset: record size mismatch");
    for (Eigen::Index i = 0; i < r.q_0.size(); ++i) binary::put_f64(out, r.q_0[i]);
    for (Eigen::Index i = 0; i < r.q_t.size(); ++i) binary::put_f64(out, r.q_t[i]);
    binary::put_f64(out, r.t_blind);
    binary::put_f64(out, r.t_cf);
    binary::put_u8(out, r.straight_line_free ? 1 : 0);
    binary::put_u64(out, r.seed);
  }
  if (!out) throw FormatError("failed writing dataset file '" + path + "'");
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open dataset file '" + path + "'");
  binary::expect_magic(in, kDatasetMagic, "dataset");
  const std::uint32_t version = binary::get_u32(in, "dataset version");
  if (version != kDatasetVersion) {
    throw FormatError("dataset version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kDatasetVersion) + ")");
  }
  Dataset d;
  d.dof = static_cast<int>(binary::get_u32(in, "dataset dof"));
  if (d.dof < 1) throw FormatError("dataset: dof must be >= 1");
  const std::uint64_t count = binary::get_u64(in, "record count");
  d.records.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
  for (std::uint64_t k = 0; k < count; ++k) {
    DatasetRecord r;
    r.q_0.resize(d.dof);
    r.q_t.resize(d.dof);
    for (int i = 0; i < d.dof; ++i) r.q_0[i] = binary::get_f64(in, "record");
    for (int i = 0; i < d.dof; ++i) r.q_t[i] = binary::get_f64(in, "record");
    r.t_blind = binary::get_f64(in, "record");
    r.t_cf = binary::get_f64(in, "record");
    const std::uint8_t flag = binary::get_u8(in, "record");
    if (flag > 1) throw FormatError("dataset: invalid flag byte");
    r.straight_line_free = flag == 1;
    r.seed = binary::get_u64(in, "record");
    d.records.push_back(std::move(r));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("dataset: trailing bytes");
  return d;
}

void export_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  for (int i = 0; i < dataset.dof; ++i) out << "q0_" << i << ',';
  for (int i = 0; i < dataset.dof; ++i) out << "qt_" << i << ',';
  out << "t_blind,t_cf,straight_line_free,seed\n";
  out << std::setprecision(17);
  for (const auto& r : dataset.records) {
    for (Eigen::Index i = 0; i < r.q_0.size(); ++i) out << r.q_0[i] << ',';
    for (Eigen::Index i = 0; i < r.q_t.size(); ++i) out << r.q_t[i] << ',';
    out << r.t_blind << ',' << r.t_cf << ',' << (r.straight_line_free ? 1 : 0) << ',' << r.seed << '\n';
  }
}

GenerationResult generate_dataset(const CollisionWorld& world, const GenerationConfig& config) {
  require(config.count >= 1, "generate_dataset: count must be >= 1");
  const auto& sys = world.system();
  const int n = sys.dof();
  const VecX lo = sys.q_min();
  const VecX span = sys.q_max() - lo;

  HaltonSampler sampler(2 * n, 1 + (mix_seed(config.seed) >> 28));
  std::uint64_t pair_index = 0;

  GenerationResult result;
  result.dataset.dof = n;
  while (result.dataset.records.size() < config.count) {
    // Sample the missing pairs sequentially, then time them in parallel.
    const std::size_t want = config.count - result.dataset.records.size();
    std::vector<DatasetRecord> batch;
    batch.reserve(want);
    while (batch.size() < want) {
      int tries = 0;
      for (;;) {
        if (++tries > config.max_tries) throw NoFreeSample("generate_dataset: no collision-free pair found");
        const VecX x = sampler.next();
        const VecX q0 = lo + span.cwiseProduct(x.head(n));
        const VecX qt = lo + span.cwiseProduct(x.tail(n));
        if (world.in_collision(q0) || world.in_collision(qt)) continue;
        DatasetRecord r;
        r.q_0 = q0;
        r.q_t = qt;
        r.seed = derive_seed(config.seed, pair_index++);
        batch.push_back(std::move(r));
        break;
      }
    }

    std::vector<char> ok(batch.size(), 1);
    parallel_for(batch.size(), config.threads, [&](std::size_t i) {
      DatasetRecord& r = batch[i];
      const TimeEstimate blind = synchronized_move_time(world, r.q_0, r.q_t);
      r.t_blind = blind.duration;
      r.straight_line_free = blind.collision_free;
      if (blind.collision_free) {
        r.t_cf = blind.duration;
        return;
      }
      try {
        r.t_cf = plan_collision_free(world, r.q_0, r.q_t, r.seed, config.planner).duration;
      } catch (const PlanningFailure&) {
        ok[i] = 0;
      }
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!ok[i]) {
        ++result.planning_failures;
        continue;
      }
      if (!batch[i].straight_line_free) ++result.straight_line_colliding;
      result.dataset.records.push_back(std::move(batch[i]));
    }
  }
  return result;
}

}  // namespace etaik
