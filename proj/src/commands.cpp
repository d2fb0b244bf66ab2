#include "etaik/commands.hpp"

#include <cstdio>
#include <memory>
#include <ostream>

#include "etaik/errors.hpp"
#include "etaik/kinematics.hpp"
#include "etaik/report_io.hpp"
#include "etaik/scene_io.hpp"

namespace etaik {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string join(const VecX& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt("%.6f", v[i]);
  return s + "]";
}

VecX to_vec(const std::vector<double>& v) { return Eigen::Map<const VecX>(v.data(), static_cast<Eigen::Index>(v.size())); }

// Shared mapping from library errors to exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const NoSolution& e) {
    err << "error: " << e.what() << "\n";
    return kExitNoSolution;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << " (epoch " << e.epoch() << ")\n";
    return kExitNumerical;
  } catch (const NoFreeSample& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const PlanningFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

SolverConfig solver_config(const std::string& config_file, const std::string& model_file) {
  SolverConfigFile file;
  if (!config_file.empty()) file = load_solver_config(config_file);
  const std::string model = model_file.empty() ? file.model_file : model_file;
  if (!model.empty()) file.config.model = std::make_shared<MlpModel>(load_model(model));
  return file.config;
}

}  // namespace

int cmd_gen_data(const GenDataOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require(o.count >= 1, "gen-data: count must be >= 1");
    const CollisionWorld world = load_scene(o.scene);
    GenerationConfig cfg;
    cfg.count = o.count;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    cfg.planner = o.planner;
    const GenerationResult result = generate_dataset(world, cfg);
    save_dataset(result.dataset, o.out);
    if (!o.csv.empty()) export_csv(result.dataset, o.csv);
    double blind = 0.0, cf = 0.0;
    for (const auto& r : result.dataset.records) {
      blind += r.t_blind;
      cf += r.t_cf;
    }
    const double n = static_cast<double>(result.dataset.records.size());
    out << "records: " << result.dataset.records.size() << "\n"
        << "straight-line colliding: " << result.straight_line_colliding << "\n"
        << "colliding fraction: " << fmt("%.4f", result.colliding_fraction()) << "\n"
        << "planning failures resampled: " << result.planning_failures << "\n"
        << "mean t_blind: " << fmt("%.4f", blind / n) << " s\n"
        << "mean t_cf: " << fmt("%.4f", cf / n) << " s\n"
        << "wrote " << o.out << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Dataset ds = load_dataset(o.dataset);
    const TrainingResult r = train(ds, o.training, o.seed);
    save_model(r.model, o.out);
    const std::string log = o.log.empty() ? o.out + ".log.csv" : o.log;
    save_training_log(r.log, log);
    out << "target: " << to_string(o.training.target) << "\n"
        << "train/validation records: " << r.train_count << "/" << r.validation_count << "\n"
        << "final train loss: " << fmt("%.6g", r.log.back().train_loss) << "\n"
        << "validation MAE: " << fmt("%.6f", r.validation_mae) << " s\n"
        << "validation mean time: " << fmt("%.6f", r.validation_mean_target) << " s\n"
        << "MAE / mean: " << fmt("%.4f", r.validation_mae / r.validation_mean_target) << "\n"
        << "wrote " << o.out << " and " << log << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const CollisionWorld world = load_scene(o.scene);
    const DualArmSystem& sys = world.system();
    SolverConfig cfg = solver_config(o.config_file, o.model_file);
    if (o.seed) cfg.seed = *o.seed;
    if (o.selection) cfg.selection = selection_from_string(*o.selection);
    if (o.time_term) cfg.time_term = time_term_from_string(*o.time_term);
    if (o.batch_size) cfg.batch_size = *o.batch_size;
    if (o.iterations) cfg.iterations = *o.iterations;

    require(static_cast<int>(o.q_0.size()) == sys.dof(), "solve: --q0 needs " + std::to_string(sys.dof()) + " values");
    const VecX q_0 = to_vec(o.q_0);
    Pose target;
    if (!o.target_config.empty()) {
      require(o.target_position.empty(), "solve: give either --target-config or --target-position");
      require(static_cast<int>(o.target_config.size()) == sys.dof(), "solve: --target-config size mismatch");
      target = relative_pose(sys, to_vec(o.target_config));
    } else {
      require(o.target_position.size() == 3, "solve: --target-position needs 3 values");
      require(o.target_quaternion.size() == 4, "solve: --target-quaternion needs 4 values");
      const auto& p = o.target_position;
      const auto& q = o.target_quaternion;
      target = Pose(Vec3(p[0], p[1], p[2]), Quat(q[0], q[1], q[2], q[3]).normalized());
    }

    SolveRecord record;
    record.q_0 = q_0;
    record.target = target;
    try {
      record.report = solve(world, q_0, PoseTarget::relative_to(target), cfg);
    } catch (const NoSolution& e) {
      const Candidate& c = e.best_infeasible();
      err << "no solution; best infeasible candidate: q = " << join(c.q) << ", position error "
          << fmt("%.3e", c.position_error) << " m, orientation error " << fmt("%.3e", c.orientation_error)
          << " rad\n";
      throw;
    }
    const Candidate& best = record.report.best_candidate();
    if (!best.feasible) {
      err << "no feasible candidate; best converged one is " << (best.collision_free ? "" : "in collision ")
          << "q = " << join(best.q) << "\n";
      if (!o.out.empty()) write_text_file(o.out, solve_record_to_string(record));
      return static_cast<int>(kExitNoSolution);
    }
    const TimeEstimate blind = synchronized_move_time(world, q_0, best.q);
    record.verified.t_blind = blind.duration;
    record.verified.straight_line_free = blind.collision_free;
    record.verified.t_cf = plan_collision_free(world, q_0, best.q, cfg.seed, o.planner).duration;
    if (!o.out.empty()) write_text_file(o.out, solve_record_to_string(record));

    std::size_t converged = 0;
    for (const auto& c : record.report.candidates) converged += c.converged;
    out << "selection: " << to_string(cfg.selection) << ", time term: " << to_string(cfg.time_term) << "\n"
        << "iterations: " << record.report.iterations << ", converged candidates: " << converged << "/"
        << record.report.candidates.size() << "\n"
        << "best q: " << join(best.q) << "\n"
        << "position error: " << fmt("%.3e", best.position_error) << " m\n"
        << "orientation error: " << fmt("%.3e", best.orientation_error) << " rad\n"
        << "predicted time: " << fmt("%.4f", best.predicted_time) << " s\n"
        << "verified t_blind: " << fmt("%.4f", record.verified.t_blind) << " s"
        << (blind.collision_free ? "" : " (straight line collides)") << "\n"
        << "verified t_cf: " << fmt("%.4f", record.verified.t_cf) << " s\n";
    if (!o.out.empty()) out << "wrote " << o.out << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const CollisionWorld world = load_scene(o.scene);
    BenchmarkConfig cfg;
    cfg.solver = solver_config(o.config_file, "");
    if (o.batch_size) cfg.solver.batch_size = *o.batch_size;
    if (o.iterations) cfg.solver.iterations = *o.iterations;
    for (const auto& m : o.methods) cfg.methods.push_back(method_from_string(m));
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    cfg.task_radius = o.task_radius;
    cfg.planner = o.planner;
    if (!o.model_file.empty()) cfg.blind_model = std::make_shared<MlpModel>(load_model(o.model_file));
    if (!o.cf_model_file.empty()) cfg.cf_model = std::make_shared<MlpModel>(load_model(o.cf_model_file));
    const BenchmarkResult result = run_benchmark(world, cfg);
    out << format_table(result);
    if (!o.out.empty()) {
      write_text_file(o.out, benchmark_to_string(result));
      out << "wrote " << o.out << "\n";
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace etaik
