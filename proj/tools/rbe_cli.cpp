// Command-line front end: fixed-point solves, loss surfaces, prediction and
// control sweeps, environment listing and feature export.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "rbe/control_envs.hpp"
#include "rbe/environments.hpp"
#include "rbe/errors.hpp"
#include "rbe/fixed_point.hpp"
#include "rbe/harness.hpp"
#include "rbe/objectives.hpp"

namespace fs = std::filesystem;
using namespace rbe;

namespace {

struct Common {
  std::string out;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  bool strict = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "master seed (overrides the config)");
  cmd->add_option("--workers", c.workers, "worker threads, 0 = all cores");
  cmd->add_flag("--strict", c.strict, "exit with status 2 if any run diverged");
  cmd->add_flag("--quiet", c.quiet, "silence warnings");
}

int run_config(const std::string& path, const Common& c, std::optional<ExperimentKind> expected) {
  ExperimentConfig config = ExperimentConfig::from_file(path);
  if (expected && config.kind != *expected) throw Error("config kind does not match the command");
  if (c.seed) config.master_seed = *c.seed;
  if (!c.out.empty()) config.output = c.out;
  const SweepResult sweep = run_sweep(config, c.workers);
  write_sweep_outputs(config.output, config, sweep);

  int diverged = 0;
  int failed = 0;
  for (std::size_t i = 0; i < sweep.records.size(); ++i) {
    diverged += sweep.records[i].diverged ? 1 : 0;
    failed += sweep.errors[i].empty() ? 0 : 1;
  }
  const std::size_t n = config.kind == ExperimentKind::fixed_point ? sweep.fixed_points.size() : sweep.records.size();
  std::printf("%zu runs written to %s (%d diverged, %d failed)\n", n, config.output.c_str(), diverged, failed);
  if (config.kind != ExperimentKind::fixed_point) {
    const std::string stat = config.kind == ExperimentKind::control ? "final" : "auc";
    const std::string metric = config.kind == ExperimentKind::control ? "return" : "msve";
    for (const auto& row : select_best(aggregate(sweep), metric, stat)) {
      std::printf("  %-13s %-11s tau=%-5g refresh=%-4d best alpha=%-10g eta=%-8g %s %s = %.6g +- %.3g\n",
                  row.key.problem.c_str(), row.key.algorithm.c_str(), row.key.tau, row.key.refresh, row.key.alpha,
                  row.key.eta, metric.c_str(), stat.c_str(), row.mean, row.stderr_);
    }
  }
  return c.strict && diverged > 0 ? 2 : 0;
}

ObjectiveSpec objective_from(const std::string& problem, const std::string& objective, const std::string& h_class,
                             std::optional<double> tau, double beta) {
  ObjectiveSpec spec;
  spec.kind = parse_error_kind(objective);
  spec.h_class = parse_h_class(h_class);
  spec.tau = tau.value_or(default_fixed_point_tau(problem));
  spec.beta = beta;
  spec.validate();
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust Bellman-error workbench"};
  app.require_subcommand(1);

  Common common;
  std::string problem = "hard_alias_2";
  std::string objective = "huber";
  std::string h_class = "all_functions";
  std::optional<double> tau;
  double beta = 0.0;
  double stay = 0.99;
  std::uint64_t feature_seed = 0;
  double baird_lower_weight = 1.0;
  bool uniform_d = false;
  std::string config_path;
  std::string grid;

  auto add_problem = [&](CLI::App* cmd) {
    cmd->add_option("--problem", problem, "prediction problem")->required();
    cmd->add_option("--stay-probability", stay, "hard_alias_2 stay probability");
    cmd->add_option("--feature-seed", feature_seed, "frozen feature network seed");
    cmd->add_option("--baird-lower-weight", baird_lower_weight, "baird initial weight on the lower state feature");
    cmd->add_flag("--uniform-d", uniform_d, "weight states uniformly instead of by behavior visitation");
  };
  auto options = [&] {
    ProblemOptions o;
    o.stay_probability = stay;
    o.feature_seed = feature_seed;
    o.baird_lower_weight = baird_lower_weight;
    o.weighting = uniform_d ? Weighting::uniform : Weighting::behavior_stationary;
    return o;
  };

  auto* fp = app.add_subcommand("fixed-point", "minimize one objective with exact gradients");
  add_problem(fp);
  fp->add_option("--objective", objective, "square | abs | huber (or msbe | mabe | mhbe)");
  fp->add_option("--h-class", h_class, "all_functions | v_features | augmented_features");
  fp->add_option("--tau", tau, "huber threshold");
  add_common(fp, common);

  auto* surface = app.add_subcommand("surface", "sample an objective on a 1-D or 2-D grid of weights");
  add_problem(surface);
  surface->add_option("--objective", objective, "square | abs | huber");
  surface->add_option("--h-class", h_class, "all_functions | v_features | augmented_features");
  surface->add_option("--tau", tau, "huber threshold");
  surface->add_option("--beta", beta, "l2 regularizer on the h fit");
  surface->add_option("--grid", grid, "index:lo:hi:n[,index:lo:hi:n]")->required();
  add_common(surface, common);

  auto* predict = app.add_subcommand("predict", "run a prediction sweep from a config file");
  predict->add_option("--config", config_path)->required();
  add_common(predict, common);

  auto* control = app.add_subcommand("control", "run a control sweep from a config file");
  control->add_option("--config", config_path)->required();
  add_common(control, common);

  auto* sweep = app.add_subcommand("sweep", "run any sweep config (fixed_point, prediction, control)");
  sweep->add_option("--config", config_path)->required();
  add_common(sweep, common);

  auto* list = app.add_subcommand("list-envs", "list bundled problems and environments");

  auto* features = app.add_subcommand("features", "print a problem's feature matrix as CSV");
  add_problem(features);

  CLI11_PARSE(app, argc, argv);
  if (common.quiet) set_warnings_enabled(false);

  try {
    if (*fp) {
      const PredictionProblem p = make_prediction_problem(problem, options());
      const ObjectiveSpec spec = objective_from(problem, objective, h_class, tau, 0.0);
      const FixedPointResult r = solve_fixed_point(p, spec);
      std::printf("%s %s (tau=%g): converged=%d iterations=%ld grad_norm=%.3g\n", p.name.c_str(),
                  spec.name().c_str(), spec.tau, r.converged ? 1 : 0, r.iterations, r.grad_norm);
      std::printf("  objective=%.10g msve=%.10g (rel %.6g) mave=%.10g (rel %.6g)\n", r.objective, r.msve,
                  r.msve_rel, r.mave, r.mave_rel);
      std::printf("  theta =");
      for (double v : r.theta) std::printf(" %.10g", v);
      std::printf("\n");
      if (!common.out.empty()) {
        fs::create_directories(common.out);
        std::ofstream f(fs::path(common.out) / "fixed_points.csv", std::ios::binary);
        write_fixed_point_csv(f, {r});
      }
      return r.converged || !common.strict ? 0 : 2;
    }
    if (*surface) {
      const PredictionProblem p = make_prediction_problem(problem, options());
      const ObjectiveSpec spec = objective_from(problem, objective, h_class, tau, beta);
      const LossSurface s = sample_loss_surface(p, spec, SurfaceGrid::parse(grid, Vec::Zero(p.n_features())));
      if (common.out.empty()) {
        write_surface_csv(std::cout, s);
      } else {
        fs::create_directories(common.out);
        std::ofstream f(fs::path(common.out) / "surface.csv", std::ios::binary);
        write_surface_csv(f, s);
        const Vec& best = s.points[s.argmin()];
        std::printf("%s minimum %.10g at", s.objective.c_str(), s.values[s.argmin()]);
        for (int axis : s.axes) std::printf(" theta_%d=%.6g", axis, best[axis]);
        std::printf("\n");
      }
      return 0;
    }
    if (*predict) return run_config(config_path, common, ExperimentKind::prediction);
    if (*control) return run_config(config_path, common, ExperimentKind::control);
    if (*sweep) return run_config(config_path, common, std::nullopt);
    if (*list) {
      std::printf("prediction problems (name states actions features):\n");
      set_warnings_enabled(false);
      for (const auto& name : prediction_problem_names()) {
        const PredictionProblem p = make_prediction_problem(name);
        std::printf("  %-13s %3d %2d %2d\n", name.c_str(), p.n_states(), p.mdp.n_actions(), p.n_features());
      }
      std::printf("control environments (name observation_dim actions cutoff):\n");
      for (const auto& name : control_env_names()) {
        const auto env = make_control_env(name);
        std::printf("  %-13s %3d %2d %5ld\n", name.c_str(), env->observation_dim(), env->n_actions(), env->cutoff());
      }
      return 0;
    }
    if (*features) {
      const PredictionProblem p = make_prediction_problem(problem, options());
      write_features_csv(std::cout, p.features);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
