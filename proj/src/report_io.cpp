#include "etaik/report_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "etaik/errors.hpp"

namespace etaik {

using nlohmann::json;

namespace {

constexpr int kVersion = 1;

void check_header(const json& j, const std::string& format) {
  if (!j.is_object()) throw FormatError(format + ": expected an object");
  if (j.value("format", std::string()) != format) throw FormatError(format + ": wrong or missing format tag");
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != kVersion) {
    throw FormatError(format + ": unsupported version (expected " + std::to_string(kVersion) + ")");
  }
}

json parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(what + ": " + e.what());
  }
}

json vec(const VecX& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

VecX to_vec(const json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": expected an array");
  VecX v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw FormatError(where + ": expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json pose_json(const Pose& p) {
  const Quat& q = p.orientation;
  return {{"position", {p.position.x(), p.position.y(), p.position.z()}}, {"quaternion", {q.w(), q.x(), q.y(), q.z()}}};
}

Pose to_pose(const json& j, const std::string& where) {
  const VecX p = to_vec(j.at("position"), where + ".position");
  const VecX q = to_vec(j.at("quaternion"), where + ".quaternion");
  if (p.size() != 3 || q.size() != 4) throw FormatError(where + ": bad pose");
  return Pose(Vec3(p[0], p[1], p[2]), Quat(q[0], q[1], q[2], q[3]));
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(where + "." + key + ": " + e.what());
  }
}

}  // namespace

SolverConfigFile parse_solver_config(const std::string& text) {
  const std::string where = "etaik-solver-config";
  const json j = parse(text, where);
  check_header(j, where);
  static const std::set<std::string> allowed = {
      "format", "version", "batch_size", "iterations", "w_position", "w_orientation", "w_distance",
      "w_approximator", "w_limit", "limit_margin", "step_magnitudes", "armijo", "curvature", "position_threshold",
      "orientation_threshold", "time_term", "selection", "seed", "infeasible_offset", "seed_tries_per_candidate",
      "model_file"};
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw FormatError(where + ": unknown key '" + key + "'");
  }
  SolverConfigFile out;
  SolverConfig& c = out.config;
  auto num = [&](const char* key, double& field) {
    if (j.contains(key)) field = get<double>(j, key, where);
  };
  auto integer = [&](const char* key, int& field) {
    if (j.contains(key)) field = get<int>(j, key, where);
  };
  integer("batch_size", c.batch_size);
  integer("iterations", c.iterations);
  num("w_position", c.w_position);
  num("w_orientation", c.w_orientation);
  num("w_distance", c.w_distance);
  num("w_approximator", c.w_approximator);
  num("w_limit", c.w_limit);
  num("limit_margin", c.limit_margin);
  num("armijo", c.armijo);
  num("curvature", c.curvature);
  num("position_threshold", c.position_threshold);
  num("orientation_threshold", c.orientation_threshold);
  num("infeasible_offset", c.infeasible_offset);
  integer("seed_tries_per_candidate", c.seed_tries_per_candidate);
  if (j.contains("step_magnitudes")) c.step_magnitudes = get<std::vector<double>>(j, "step_magnitudes", where);
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", where);
  try {
    if (j.contains("time_term")) c.time_term = time_term_from_string(get<std::string>(j, "time_term", where));
    if (j.contains("selection")) c.selection = selection_from_string(get<std::string>(j, "selection", where));
  } catch (const ContractViolation& e) {
    throw FormatError(where + ": " + e.what());
  }
  if (j.contains("model_file")) out.model_file = get<std::string>(j, "model_file", where);
  return out;
}

SolverConfigFile load_solver_config(const std::string& path) { return parse_solver_config(read_text_file(path)); }

std::string solver_config_to_string(const SolverConfig& c, const std::string& model_file) {
  json j = {{"format", "etaik-solver-config"},
            {"version", kVersion},
            {"batch_size", c.batch_size},
            {"iterations", c.iterations},
            {"w_position", c.w_position},
            {"w_orientation", c.w_orientation},
            {"w_distance", c.w_distance},
            {"w_approximator", c.w_approximator},
            {"w_limit", c.w_limit},
            {"limit_margin", c.limit_margin},
            {"step_magnitudes", c.step_magnitudes},
            {"armijo", c.armijo},
            {"curvature", c.curvature},
            {"position_threshold", c.position_threshold},
            {"orientation_threshold", c.orientation_threshold},
            {"time_term", to_string(c.time_term)},
            {"selection", to_string(c.selection)},
            {"seed", c.seed},
            {"infeasible_offset", c.infeasible_offset},
            {"seed_tries_per_candidate", c.seed_tries_per_candidate}};
  if (!model_file.empty()) j["model_file"] = model_file;
  return j.dump(2) + "\n";
}

std::string solve_record_to_string(const SolveRecord& r) {
  const SolveReport& rep = r.report;
  json candidates = json::array();
  for (std::size_t i = 0; i < rep.candidates.size(); ++i) {
    const Candidate& c = rep.candidates[i];
    if (!c.converged) continue;
    candidates.push_back({{"index", i},
                          {"q", vec(c.q)},
                          {"position_error", c.position_error},
                          {"orientation_error", c.orientation_error},
                          {"cost",
                           {{"position", c.cost.position},
                            {"orientation", c.cost.orientation},
                            {"time", c.cost.time},
                            {"limit", c.cost.limit},
                            {"total", c.cost.total}}},
                          {"predicted_time", c.predicted_time},
                          {"collision_free", c.collision_free},
                          {"feasible", c.feasible},
                          {"selection_metric", c.selection_metric}});
  }
  const Candidate& best = rep.best_candidate();
  json j = {{"format", "etaik-solve-report"},
            {"version", kVersion},
            {"q_0", vec(r.q_0)},
            {"target", pose_json(r.target)},
            {"selection", to_string(rep.selection)},
            {"iterations", rep.iterations},
            {"batch_size", rep.candidates.size()},
            {"best_index", rep.best_index},
            {"best",
             {{"q", vec(rep.best)},
              {"position_error", best.position_error},
              {"orientation_error", best.orientation_error},
              {"predicted_time", best.predicted_time},
              {"feasible", best.feasible}}},
            {"verified",
             {{"t_blind", r.verified.t_blind},
              {"t_cf", r.verified.t_cf},
              {"straight_line_free", r.verified.straight_line_free}}},
            {"candidates", candidates}};
  return j.dump(2) + "\n";
}

SolveRecord parse_solve_record(const std::string& text) {
  const std::string where = "etaik-solve-report";
  const json j = parse(text, where);
  check_header(j, where);
  SolveRecord r;
  try {
    r.q_0 = to_vec(j.at("q_0"), where + ".q_0");
    r.target = to_pose(j.at("target"), where + ".target");
    r.report.selection = selection_from_string(j.at("selection").get<std::string>());
    r.report.iterations = j.at("iterations").get<int>();
    r.report.best = to_vec(j.at("best").at("q"), where + ".best.q");
    const auto& v = j.at("verified");
    r.verified = {v.at("t_blind").get<double>(), v.at("t_cf").get<double>(), v.at("straight_line_free").get<bool>()};
    // Unconverged candidates are not stored; they come back as placeholders
    // so that indices and the batch size survive the round trip.
    const std::size_t batch = j.at("batch_size").get<std::size_t>();
    const std::size_t best_index = j.at("best_index").get<std::size_t>();
    if (best_index >= batch) throw FormatError(where + ": best_index out of range");
    r.report.candidates.resize(batch);
    r.report.best_index = best_index;
    const auto& b = j.at("best");
    Candidate& best = r.report.candidates[best_index];
    best.q = r.report.best;
    best.position_error = b.at("position_error").get<double>();
    best.orientation_error = b.at("orientation_error").get<double>();
    best.predicted_time = b.at("predicted_time").get<double>();
    best.feasible = b.at("feasible").get<bool>();
    for (const auto& c : j.at("candidates")) {
      const std::size_t index = c.at("index").get<std::size_t>();
      if (index >= batch) throw FormatError(where + ": candidate index out of range");
      Candidate& cand = r.report.candidates[index];
      cand.q = to_vec(c.at("q"), where + ".candidates.q");
      cand.position_error = c.at("position_error").get<double>();
      cand.orientation_error = c.at("orientation_error").get<double>();
      const auto& cost = c.at("cost");
      cand.cost = {cost.at("position").get<double>(), cost.at("orientation").get<double>(),
                   cost.at("time").get<double>(), cost.at("limit").get<double>(), cost.at("total").get<double>()};
      cand.predicted_time = c.at("predicted_time").get<double>();
      cand.converged = true;
      cand.collision_free = c.at("collision_free").get<bool>();
      cand.feasible = c.at("feasible").get<bool>();
      cand.selection_metric = c.at("selection_metric").get<double>();
    }
  } catch (const json::exception& e) {
    throw FormatError(where + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw FormatError(where + ": " + e.what());
  }
  return r;
}

std::string benchmark_to_string(const BenchmarkResult& result) {
  json problems = json::array();
  for (const auto& p : result.problems) problems.push_back({{"q_0", vec(p.q_0)}, {"q_reference", vec(p.q_reference)}});
  json rows = json::array();
  for (const auto& row : result.rows) {
    json trials = json::array();
    for (const auto& t : row.trials) {
      json o = {{"success", t.success},
                {"t_blind", t.t_blind},
                {"t_cf", t.t_cf},
                {"position_error", t.position_error},
                {"orientation_error", t.orientation_error},
                {"q", vec(t.q)}};
      if (!t.error.empty()) o["error"] = t.error;
      trials.push_back(o);
    }
    rows.push_back({{"method", to_string(row.method)},
                    {"successes", row.successes},
                    {"success_rate", row.success_rate},
                    {"mean_t_blind", row.mean_t_blind},
                    {"mean_t_cf", row.mean_t_cf},
                    {"mean_position_error", row.mean_position_error},
                    {"trials", trials}});
  }
  json j = {{"format", "etaik-benchmark"},
            {"version", kVersion},
            {"seed", result.seed},
            {"trials", result.trials},
            {"problems", problems},
            {"methods", rows}};
  return j.dump(2) + "\n";
}

BenchmarkResult parse_benchmark(const std::string& text) {
  const std::string where = "etaik-benchmark";
  const json j = parse(text, where);
  check_header(j, where);
  BenchmarkResult r;
  try {
    r.seed = j.at("seed").get<std::uint64_t>();
    r.trials = j.at("trials").get<int>();
    for (const auto& p : j.at("problems")) {
      r.problems.push_back({to_vec(p.at("q_0"), where), to_vec(p.at("q_reference"), where)});
    }
    for (const auto& m : j.at("methods")) {
      MethodSummary row;
      row.method = method_from_string(m.at("method").get<std::string>());
      row.successes = m.at("successes").get<int>();
      row.success_rate = m.at("success_rate").get<double>();
      row.mean_t_blind = m.at("mean_t_blind").get<double>();
      row.mean_t_cf = m.at("mean_t_cf").get<double>();
      row.mean_position_error = m.at("mean_position_error").get<double>();
      for (const auto& t : m.at("trials")) {
        TrialOutcome o;
        o.success = t.at("success").get<bool>();
        o.t_blind = t.at("t_blind").get<double>();
        o.t_cf = t.at("t_cf").get<double>();
        o.position_error = t.at("position_error").get<double>();
        o.orientation_error = t.at("orientation_error").get<double>();
        o.q = to_vec(t.at("q"), where);
        o.error = t.value("error", std::string());
        row.trials.push_back(std::move(o));
      }
      r.rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw FormatError(where + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw FormatError(where + ": " + e.what());
  }
  return r;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << text;
  if (!out) throw FormatError("write failed for '" + path + "'");
}

}  // namespace etaik
