#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "etaik/commands.hpp"

using namespace etaik;

namespace {

void add_planner_flags(CLI::App* cmd, PlannerConfig& p) {
  cmd->add_option("--planner-budget", p.budget, "RRT-Connect extension budget");
  cmd->add_option("--planner-restarts", p.restarts, "independent plans per pair (fastest kept)");
  cmd->add_option("--shortcut-iterations", p.shortcut_iterations, "random shortcut attempts");
}

std::string hidden_to_string(const std::vector<int>& h) {
  std::string s;
  for (std::size_t i = 0; i < h.size(); ++i) s += (i ? "," : "") + std::to_string(h[i]);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Execution-time-aware inverse kinematics for dual-arm manipulators"};
  app.require_subcommand(1);
  const int default_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  GenDataOptions gen;
  gen.threads = default_threads;
  auto* g = app.add_subcommand("gen-data", "sample start/target pairs and time them with both oracles");
  g->add_option("--scene", gen.scene, "robot and scene file")->required()->check(CLI::ExistingFile);
  g->add_option("--out", gen.out, "dataset file to write")->required();
  g->add_option("--count", gen.count, "number of pairs")->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--threads", gen.threads)->capture_default_str();
  g->add_option("--csv", gen.csv, "also export the records as CSV");
  add_planner_flags(g, gen.planner);

  TrainOptions tr;
  std::string target = "blind";
  std::string activation = to_string(tr.training.activation);
  std::string hidden = hidden_to_string(tr.training.hidden);
  int train_threads = 1;
  auto* t = app.add_subcommand("train", "fit the execution-time approximator");
  t->add_option("--dataset", tr.dataset, "dataset file from gen-data")->required()->check(CLI::ExistingFile);
  t->add_option("--out", tr.out, "model file to write")->required();
  t->add_option("--log", tr.log, "per-epoch CSV log (default <out>.log.csv)");
  t->add_option("--target", target, "time target: blind | cf")->capture_default_str();
  t->add_option("--epochs", tr.training.epochs)->capture_default_str();
  t->add_option("--batch-size", tr.training.batch_size)->capture_default_str();
  t->add_option("--lr", tr.training.learning_rate)->capture_default_str();
  t->add_option("--final-lr", tr.training.final_learning_rate)->capture_default_str();
  t->add_option("--weight-decay", tr.training.weight_decay)->capture_default_str();
  t->add_option("--hidden", hidden, "hidden layer sizes, comma separated")->capture_default_str();
  t->add_option("--activation", activation, "tanh | silu | softplus")->capture_default_str();
  t->add_option("--validation-fraction", tr.training.validation_fraction)->capture_default_str();
  t->add_option("--seed", tr.seed)->capture_default_str();
  t->add_option("--threads", train_threads, "accepted for symmetry; training is single-threaded");

  SolveOptions so;
  std::uint64_t solve_seed = 0;
  std::string selection, time_term;
  int solve_batch = 0, solve_iterations = 0, solve_threads = 1;
  auto* s = app.add_subcommand("solve", "solve one relative-pose IK problem");
  s->add_option("--scene", so.scene, "robot and scene file")->required()->check(CLI::ExistingFile);
  s->add_option("--model-file", so.model_file, "approximator model file")->check(CLI::ExistingFile);
  s->add_option("--config", so.config_file, "solver config file")->check(CLI::ExistingFile);
  s->add_option("--out", so.out, "report file to write");
  s->add_option("--q0", so.q_0, "start configuration, comma separated")->required()->delimiter(',');
  s->add_option("--target-config", so.target_config, "take the target from FK of this configuration")
      ->delimiter(',');
  s->add_option("--target-position", so.target_position, "target relative position x,y,z")->delimiter(',');
  s->add_option("--target-quaternion", so.target_quaternion, "target relative orientation w,x,y,z")
      ->delimiter(',');
  auto* seed_opt = s->add_option("--seed", solve_seed);
  auto* sel_opt = s->add_option("--selection", selection, "best-pose | best-time | best-cost");
  auto* term_opt = s->add_option("--time-term", time_term, "none | weighted-distance | approximator");
  auto* batch_opt = s->add_option("--batch-size", solve_batch);
  auto* iter_opt = s->add_option("--iterations", solve_iterations);
  s->add_option("--threads", solve_threads, "accepted for symmetry; a single solve is single-threaded");
  add_planner_flags(s, so.planner);

  BenchOptions be;
  be.threads = default_threads;
  int bench_batch = 0, bench_iterations = 0;
  auto* b = app.add_subcommand("bench", "compare methods on random IK instances");
  b->add_option("--scene", be.scene, "robot and scene file")->required()->check(CLI::ExistingFile);
  b->add_option("--model-file", be.model_file, "collision-blind approximator (methods B, D, E, F)")
      ->check(CLI::ExistingFile);
  b->add_option("--cf-model-file", be.cf_model_file, "collision-aware approximator (method G)")
      ->check(CLI::ExistingFile);
  b->add_option("--config", be.config_file, "solver config file")->check(CLI::ExistingFile);
  b->add_option("--out", be.out, "JSON results file");
  b->add_option("--methods", be.methods, "reference and/or A..G, comma separated")->delimiter(',')->capture_default_str();
  b->add_option("--trials", be.trials)->capture_default_str();
  b->add_option("--seed", be.seed)->capture_default_str();
  b->add_option("--threads", be.threads)->capture_default_str();
  b->add_option("--task-radius", be.task_radius, "keep references whose TCPs are within this distance (m)");
  auto* bbatch_opt = b->add_option("--batch-size", bench_batch);
  auto* biter_opt = b->add_option("--iterations", bench_iterations);
  add_planner_flags(b, be.planner);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_gen_data(gen, std::cout, std::cerr);
    if (t->parsed()) {
      tr.training.target = time_target_from_string(target);
      tr.training.activation = activation_from_string(activation);
      tr.training.hidden.clear();
      std::size_t pos = 0;
      while (pos < hidden.size()) {
        const std::size_t comma = hidden.find(',', pos);
        tr.training.hidden.push_back(std::stoi(hidden.substr(pos, comma - pos)));
        pos = comma == std::string::npos ? hidden.size() : comma + 1;
      }
      return cmd_train(tr, std::cout, std::cerr);
    }
    if (s->parsed()) {
      if (*seed_opt) so.seed = solve_seed;
      if (*sel_opt) so.selection = selection;
      if (*term_opt) so.time_term = time_term;
      if (*batch_opt) so.batch_size = solve_batch;
      if (*iter_opt) so.iterations = solve_iterations;
      return cmd_solve(so, std::cout, std::cerr);
    }
    if (b->parsed()) {
      if (*bbatch_opt) be.batch_size = bench_batch;
      if (*biter_opt) be.iterations = bench_iterations;
      return cmd_bench(be, std::cout, std::cerr);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
