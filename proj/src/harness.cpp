#include "rbe/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rbe/control_agents.hpp"
#include "rbe/errors.hpp"
#include "rbe/linear_agents.hpp"
#include "rbe/rng.hpp"

namespace rbe {

using nlohmann::json;

namespace {

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::fixed_point: return "fixed_point";
    case ExperimentKind::prediction: return "prediction";
    case ExperimentKind::control: return "control";
  }
  return "?";
}

ExperimentKind parse_kind(const std::string& name) {
  if (name == "fixed_point") return ExperimentKind::fixed_point;
  if (name == "prediction") return ExperimentKind::prediction;
  if (name == "control") return ExperimentKind::control;
  throw Error("unknown experiment kind '" + name + "' (fixed_point, prediction, control)");
}

template <typename T>
std::vector<T> scalar_or_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.contains("schema_version")) throw Error("config needs a schema_version field");
  if (j.at("schema_version").get<int>() != kConfigSchemaVersion) {
    throw Error("unsupported config schema_version " + j.at("schema_version").dump());
  }
  static const std::vector<std::string> known = {
      "schema_version", "kind",   "problem",    "problems", "algorithm", "algorithms",
      "alpha",          "eta",    "tau",        "refresh",  "n_steps",   "n_seeds",
      "master_seed",    "output", "problem_options", "epsilon", "objectives", "tau_by_problem",
      "solver"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw Error("unknown config key '" + item.key() + "'");
    }
  }

  ExperimentConfig c;
  try {
    c.kind = parse_kind(j.at("kind").get<std::string>());
    if (j.contains("problem")) c.problems = scalar_or_list<std::string>(j["problem"]);
    if (j.contains("problems")) c.problems = scalar_or_list<std::string>(j["problems"]);
    if (j.contains("algorithm")) c.algorithms = scalar_or_list<std::string>(j["algorithm"]);
    if (j.contains("algorithms")) c.algorithms = scalar_or_list<std::string>(j["algorithms"]);
    if (j.contains("alpha")) c.alpha = scalar_or_list<double>(j["alpha"]);
    if (j.contains("eta")) c.eta = scalar_or_list<double>(j["eta"]);
    if (j.contains("tau")) {
      c.tau = scalar_or_list<double>(j["tau"]);
      if (c.tau.empty()) throw Error("tau grid must be non-empty when given");
    }
    if (j.contains("refresh")) c.refresh = scalar_or_list<int>(j["refresh"]);
    if (j.contains("n_steps")) c.n_steps = j["n_steps"].get<long>();
    if (j.contains("n_seeds")) c.n_seeds = j["n_seeds"].get<int>();
    if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("output")) c.output = j["output"].get<std::string>();
    if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
    if (j.contains("problem_options")) {
      const json& o = j["problem_options"];
      if (o.contains("weighting")) {
        const auto w = o["weighting"].get<std::string>();
        if (w == "uniform") {
          c.problem_options.weighting = Weighting::uniform;
        } else if (w == "behavior_stationary") {
          c.problem_options.weighting = Weighting::behavior_stationary;
        } else {
          throw Error("weighting must be uniform or behavior_stationary");
        }
      }
      if (o.contains("stay_probability")) c.problem_options.stay_probability = o["stay_probability"].get<double>();
      if (o.contains("feature_seed")) c.problem_options.feature_seed = o["feature_seed"].get<std::uint64_t>();
      if (o.contains("baird_lower_weight")) {
        c.problem_options.baird_lower_weight = o["baird_lower_weight"].get<double>();
      }
    }
    if (j.contains("objectives")) {
      for (const json& o : j["objectives"]) {
        ObjectiveEntry e;
        e.kind = parse_error_kind(o.at("kind").get<std::string>());
        if (o.contains("h_class")) e.h_class = parse_h_class(o["h_class"].get<std::string>());
        if (o.contains("tau")) e.tau = o["tau"].get<double>();
        c.objectives.push_back(e);
      }
    }
    if (j.contains("tau_by_problem")) c.tau_by_problem = j["tau_by_problem"].get<std::map<std::string, double>>();
    if (j.contains("solver")) {
      const json& s = j["solver"];
      if (s.contains("max_iters")) c.solver.max_iters = s["max_iters"].get<long>();
      if (s.contains("grad_norm_tol")) c.solver.grad_norm_tol = s["grad_norm_tol"].get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["kind"] = kind_name(kind);
  j["problems"] = problems;
  j["algorithms"] = algorithms;
  j["alpha"] = alpha;
  j["eta"] = eta;
  if (!tau.empty()) j["tau"] = tau;
  j["refresh"] = refresh;
  j["n_steps"] = n_steps;
  j["n_seeds"] = n_seeds;
  j["master_seed"] = master_seed;
  j["output"] = output;
  j["problem_options"] = {
      {"weighting", problem_options.weighting == Weighting::uniform ? "uniform" : "behavior_stationary"},
      {"stay_probability", problem_options.stay_probability},
      {"feature_seed", problem_options.feature_seed},
      {"baird_lower_weight", problem_options.baird_lower_weight}};
  if (epsilon) j["epsilon"] = *epsilon;
  if (!objectives.empty()) {
    json list = json::array();
    for (const auto& o : objectives) {
      json e = {{"kind", to_string(o.kind)}, {"h_class", to_string(o.h_class)}};
      if (o.tau) e["tau"] = *o.tau;
      list.push_back(e);
    }
    j["objectives"] = list;
  }
  if (!tau_by_problem.empty()) j["tau_by_problem"] = tau_by_problem;
  j["solver"] = {{"max_iters", solver.max_iters}, {"grad_norm_tol", solver.grad_norm_tol}};
  return j.dump(2) + "\n";
}

void ExperimentConfig::validate() const {
  if (problems.empty()) throw Error("config needs at least one problem");
  if (n_seeds < 1) throw Error("n_seeds must be >= 1");
  if (kind == ExperimentKind::fixed_point) {
    if (objectives.empty()) throw Error("fixed_point config needs objectives");
    for (const auto& p : problems) {
      const auto& names = prediction_problem_names();
      if (std::find(names.begin(), names.end(), p) == names.end()) throw Error("unknown problem '" + p + "'");
    }
    return;
  }
  if (algorithms.empty()) throw Error("config needs at least one algorithm");
  if (alpha.empty() || eta.empty() || refresh.empty()) throw Error("parameter grids must be non-empty");
  if (n_steps < 1) throw Error("n_steps must be positive");
  if (kind == ExperimentKind::prediction) {
    for (const auto& p : problems) {
      const auto& names = prediction_problem_names();
      if (std::find(names.begin(), names.end(), p) == names.end()) throw Error("unknown problem '" + p + "'");
    }
    for (const auto& a : algorithms) AgentConfig::from_name(a, alpha.front(), eta.front(), tau.empty() ? 1.0 : tau.front());
  } else {
    for (const auto& p : problems) {
      const auto& names = control_env_names();
      if (std::find(names.begin(), names.end(), p) == names.end()) throw Error("unknown environment '" + p + "'");
    }
    for (const auto& a : algorithms) parse_control_algorithm(a);
    for (int r : refresh) {
      if (r < 1) throw Error("refresh must be >= 1");
    }
  }
}

double default_fixed_point_tau(const std::string& problem) {
  return problem == "hard_alias_2" ? 0.03 : 1.0;
}

namespace {

constexpr std::uint64_t kAugmentSeeds = 5;

// Calls fn(i) for i in [0, n) on a pool of threads.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  std::size_t count = workers > 0 ? static_cast<std::size_t>(workers) : std::thread::hardware_concurrency();
  count = std::max<std::size_t>(1, std::min(count, n));
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  if (count == 1) {
    body();
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config, int workers) {
  config.validate();
  SweepResult out;

  if (config.kind == ExperimentKind::fixed_point) {
    std::vector<PredictionProblem> problems;
    for (const auto& name : config.problems) {
      problems.push_back(make_prediction_problem(name, config.problem_options));
    }
    std::vector<Baseline> baselines(problems.size());
    parallel_for(problems.size(), workers,
                 [&](std::size_t i) { baselines[i] = representable_baseline(problems[i], config.solver); });
    const std::size_t n_obj = config.objectives.size();
    out.fixed_points.resize(problems.size() * n_obj);
    parallel_for(out.fixed_points.size(), workers, [&](std::size_t i) {
      const std::size_t p = i / n_obj;
      const ObjectiveEntry& entry = config.objectives[i % n_obj];
      ObjectiveSpec spec;
      spec.kind = entry.kind;
      spec.h_class = entry.h_class;
      const auto it = config.tau_by_problem.find(problems[p].name);
      spec.tau = entry.tau ? *entry.tau
                           : (it != config.tau_by_problem.end() ? it->second
                                                                : default_fixed_point_tau(problems[p].name));
      if (spec.h_class != HClass::augmented_features) {
        out.fixed_points[i] = solve_fixed_point(problems[p], spec, config.solver, &baselines[p]);
        return;
      }
      // The extra h features are random: report the median over five seeds.
      std::vector<FixedPointResult> runs;
      for (std::uint64_t seed = 0; seed < kAugmentSeeds; ++seed) {
        spec.augment_seed = seed;
        runs.push_back(solve_fixed_point(problems[p], spec, config.solver, &baselines[p]));
      }
      std::sort(runs.begin(), runs.end(),
                [](const FixedPointResult& a, const FixedPointResult& b) { return a.msve_rel < b.msve_rel; });
      out.fixed_points[i] = runs[runs.size() / 2];
    });
    return out;
  }

  const bool control = config.kind == ExperimentKind::control;
  std::vector<RunKey> grid;
  for (const auto& problem : config.problems) {
    for (const auto& algorithm : config.algorithms) {
      for (double alpha : config.alpha) {
        for (double eta : control ? std::vector<double>{1.0} : config.eta) {
          const std::vector<double> taus =
              !config.tau.empty() ? config.tau
              : control ? std::vector<double>{ControlConfig::defaults_for(problem, ControlAlgorithm::qrc_huber, alpha).tau}
                        : std::vector<double>{1.0};
          for (double tau : taus) {
            for (int refresh : control ? config.refresh : std::vector<int>{1}) {
              grid.push_back({problem, algorithm, alpha, control ? 0.0 : eta, tau, refresh});
            }
          }
        }
      }
    }
  }

  std::map<std::string, PredictionProblem> problems;
  if (!control) {
    for (const auto& name : config.problems) {
      problems.emplace(name, make_prediction_problem(name, config.problem_options));
    }
  }

  const std::size_t n_runs = grid.size() * static_cast<std::size_t>(config.n_seeds);
  out.keys.resize(n_runs);
  out.records.resize(n_runs);
  out.errors.resize(n_runs);
  parallel_for(n_runs, workers, [&](std::size_t i) {
    const RunKey& key = grid[i / config.n_seeds];
    const int seed_index = static_cast<int>(i % config.n_seeds);
    const std::uint64_t seed = mix_seed(config.master_seed, static_cast<std::uint64_t>(seed_index));
    out.keys[i] = key;
    try {
      RunRecord record;
      if (control) {
        ControlConfig cc = ControlConfig::defaults_for(key.problem, parse_control_algorithm(key.algorithm), key.alpha);
        cc.tau = key.tau;
        cc.target_refresh = key.refresh;
        if (config.epsilon) cc.epsilon = *config.epsilon;
        record = run_control(key.problem, cc, config.n_steps, seed);
      } else {
        const AgentConfig ac = AgentConfig::from_name(key.algorithm, key.alpha, key.eta, key.tau);
        record = run_prediction(problems.at(key.problem), ac, config.n_steps, seed);
      }
      record.seed_index = seed_index;
      out.records[i] = std::move(record);
    } catch (const std::exception& e) {
      out.errors[i] = e.what();
      out.records[i].problem = key.problem;
      out.records[i].algorithm = key.algorithm;
      out.records[i].seed_index = seed_index;
      out.records[i].seed = seed;
      out.records[i].n_steps = config.n_steps;
    }
  });
  return out;
}

bool lower_is_better(const std::string& metric) { return metric != "return"; }

std::pair<double, double> mean_stderr(const std::vector<double>& values) {
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return {mean, sd / std::sqrt(static_cast<double>(values.size()))};
}

namespace {

bool same_point(const RunKey& a, const RunKey& b) {
  return a.problem == b.problem && a.algorithm == b.algorithm && a.alpha == b.alpha && a.eta == b.eta &&
         a.tau == b.tau && a.refresh == b.refresh;
}

std::vector<std::string> metrics_of(const SweepResult& sweep) {
  std::vector<std::string> metrics;
  for (const auto& r : sweep.records) {
    for (const auto& t : r.traces) {
      if (std::find(metrics.begin(), metrics.end(), t.metric) == metrics.end()) metrics.push_back(t.metric);
    }
  }
  return metrics;
}

bool usable(const SweepResult& sweep, std::size_t i) {
  return sweep.errors[i].empty() && !sweep.records[i].diverged;
}

}  // namespace

std::vector<AggregateRow> aggregate(const SweepResult& sweep) {
  const std::vector<std::string> metrics = metrics_of(sweep);
  static const char* kStats[] = {"final", "auc"};
  std::vector<AggregateRow> rows;

  // Worst finite value per (problem, metric, statistic), including values
  // seen in truncated traces of diverged runs.
  std::map<std::string, double> worst;
  auto worst_key = [](const std::string& p, const std::string& m, const std::string& s) { return p + "|" + m + "|" + s; };
  auto note = [&](const std::string& key, double v, bool lower) {
    if (!std::isfinite(v)) return;
    auto it = worst.find(key);
    if (it == worst.end()) {
      worst[key] = v;
    } else {
      it->second = lower ? std::max(it->second, v) : std::min(it->second, v);
    }
  };
  for (std::size_t i = 0; i < sweep.records.size(); ++i) {
    const RunRecord& r = sweep.records[i];
    for (const auto& t : r.traces) {
      const bool lower = lower_is_better(t.metric);
      const Summary s = summarize(t, r.n_steps);
      for (const char* stat : kStats) {
        const std::string key = worst_key(sweep.keys[i].problem, t.metric, stat);
        if (usable(sweep, i)) note(key, std::string(stat) == "final" ? s.final : s.auc, lower);
        for (const auto& p : t.points) note(key, p.value, lower);
      }
    }
  }

  std::size_t start = 0;
  while (start < sweep.keys.size()) {
    std::size_t end = start;
    while (end < sweep.keys.size() && same_point(sweep.keys[end], sweep.keys[start])) ++end;
    for (const auto& metric : metrics) {
      for (const char* stat : kStats) {
        AggregateRow row;
        row.key = sweep.keys[start];
        row.metric = metric;
        row.statistic = stat;
        const double fallback = [&] {
          auto it = worst.find(worst_key(row.key.problem, metric, stat));
          return it == worst.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
        }();
        for (std::size_t i = start; i < end; ++i) {
          double value = std::numeric_limits<double>::quiet_NaN();
          const RunRecord& r = sweep.records[i];
          if (usable(sweep, i) && r.has_trace(metric)) {
            const Summary s = summarize(r.trace(metric), r.n_steps);
            value = std::string(stat) == "final" ? s.final : s.auc;
          }
          if (!usable(sweep, i)) ++row.n_diverged;
          if (!std::isfinite(value)) value = fallback;
          row.values.push_back(value);
        }
        row.n = static_cast<int>(row.values.size());
        std::tie(row.mean, row.stderr_) = mean_stderr(row.values);
        rows.push_back(std::move(row));
      }
    }
    start = end;
  }
  return rows;
}

std::vector<AggregateRow> select_best(const std::vector<AggregateRow>& rows, const std::string& metric,
                                      const std::string& statistic) {
  std::vector<AggregateRow> best;
  const bool lower = lower_is_better(metric);
  for (const auto& row : rows) {
    if (row.metric != metric || row.statistic != statistic) continue;
    auto it = std::find_if(best.begin(), best.end(), [&](const AggregateRow& b) {
      return b.key.problem == row.key.problem && b.key.algorithm == row.key.algorithm && b.key.tau == row.key.tau &&
             b.key.refresh == row.key.refresh;
    });
    if (it == best.end()) {
      best.push_back(row);
    } else if (std::isfinite(row.mean) &&
               (!std::isfinite(it->mean) || (lower ? row.mean < it->mean : row.mean > it->mean))) {
      *it = row;
    }
  }
  return best;
}

std::vector<CurveRow> learning_curves(const SweepResult& sweep) {
  std::vector<CurveRow> out;
  const std::vector<std::string> metrics = metrics_of(sweep);
  std::size_t start = 0;
  while (start < sweep.keys.size()) {
    std::size_t end = start;
    while (end < sweep.keys.size() && same_point(sweep.keys[end], sweep.keys[start])) ++end;
    for (const auto& metric : metrics) {
      std::map<long, std::vector<double>> by_step;
      for (std::size_t i = start; i < end; ++i) {
        if (!usable(sweep, i) || !sweep.records[i].has_trace(metric)) continue;
        for (const auto& p : sweep.records[i].trace(metric).points) by_step[p.step].push_back(p.value);
      }
      for (const auto& [step, values] : by_step) {
        const auto [mean, se] = mean_stderr(values);
        out.push_back({sweep.keys[start], metric, step, mean, se, static_cast<int>(values.size())});
      }
    }
    start = end;
  }
  return out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

const char* kKeyHeader = "problem,algorithm,alpha,eta,tau,refresh";

std::string key_fields(const RunKey& k) {
  return k.problem + "," + k.algorithm + "," + format_double(k.alpha) + "," + format_double(k.eta) + "," +
         format_double(k.tau) + "," + std::to_string(k.refresh);
}

}  // namespace

void write_runs_csv(std::ostream& out, const SweepResult& sweep) {
  out << kKeyHeader << ",seed,metric,final,auc,diverged,diverged_at,error\n";
  for (std::size_t i = 0; i < sweep.records.size(); ++i) {
    const RunRecord& r = sweep.records[i];
    std::string error = sweep.errors[i];
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    const std::string prefix = key_fields(sweep.keys[i]) + "," + std::to_string(r.seed_index) + ",";
    const std::string suffix = "," + std::to_string(r.diverged ? 1 : 0) + "," + std::to_string(r.diverged_at) +
                               "," + error + "\n";
    if (r.traces.empty()) {
      out << prefix << "none,nan,nan" << suffix;
      continue;
    }
    for (const auto& t : r.traces) {
      const Summary s = summarize(t, r.n_steps);
      out << prefix << t.metric << "," << format_double(s.final) << "," << format_double(s.auc) << suffix;
    }
  }
}

void write_traces_csv(std::ostream& out, const SweepResult& sweep) {
  out << kKeyHeader << ",seed,metric,step,value\n";
  for (std::size_t i = 0; i < sweep.records.size(); ++i) {
    const RunRecord& r = sweep.records[i];
    const std::string prefix = key_fields(sweep.keys[i]) + "," + std::to_string(r.seed_index) + ",";
    for (const auto& t : r.traces) {
      for (const auto& p : t.points) {
        out << prefix << t.metric << "," << p.step << "," << format_double(p.value) << "\n";
      }
    }
  }
}

void write_episodes_csv(std::ostream& out, const SweepResult& sweep) {
  out << kKeyHeader << ",seed,episode,end_step,length,return,cutoff\n";
  for (std::size_t i = 0; i < sweep.records.size(); ++i) {
    const RunRecord& r = sweep.records[i];
    const std::string prefix = key_fields(sweep.keys[i]) + "," + std::to_string(r.seed_index) + ",";
    for (const auto& e : r.episodes) {
      out << prefix << e.index << "," << e.end_step << "," << e.length << "," << format_double(e.ret) << ","
          << (e.cutoff ? 1 : 0) << "\n";
    }
  }
}

void write_summary_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kKeyHeader << ",metric,statistic,mean,stderr,n,n_diverged\n";
  for (const auto& r : rows) {
    out << key_fields(r.key) << "," << r.metric << "," << r.statistic << "," << format_double(r.mean) << ","
        << format_double(r.stderr_) << "," << r.n << "," << r.n_diverged << "\n";
  }
}

void write_distribution_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kKeyHeader << ",metric,statistic,seed,value\n";
  for (const auto& r : rows) {
    for (std::size_t s = 0; s < r.values.size(); ++s) {
      out << key_fields(r.key) << "," << r.metric << "," << r.statistic << "," << s << ","
          << format_double(r.values[s]) << "\n";
    }
  }
}

void write_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << kKeyHeader << ",metric,step,mean,stderr,n\n";
  for (const auto& r : rows) {
    out << key_fields(r.key) << "," << r.metric << "," << r.step << "," << format_double(r.mean) << ","
        << format_double(r.stderr_) << "," << r.n << "\n";
  }
}

void write_sweep_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                         const SweepResult& sweep) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / name).string());
    return f;
  };
  std::vector<std::string> files;
  if (config.kind == ExperimentKind::fixed_point) {
    auto f = open("fixed_points.csv");
    write_fixed_point_csv(f, sweep.fixed_points);
    files.push_back("fixed_points.csv");
  } else {
    const auto rows = aggregate(sweep);
    const std::string selection_stat = config.kind == ExperimentKind::control ? "final" : "auc";
    std::vector<AggregateRow> best;
    for (const auto& metric : metrics_of(sweep)) {
      auto b = select_best(rows, metric, selection_stat);
      best.insert(best.end(), b.begin(), b.end());
    }
    {
      auto f = open("runs.csv");
      write_runs_csv(f, sweep);
    }
    {
      auto f = open("traces.csv");
      write_traces_csv(f, sweep);
    }
    {
      auto f = open("summary.csv");
      write_summary_csv(f, rows);
    }
    {
      auto f = open("best.csv");
      write_summary_csv(f, best);
    }
    {
      auto f = open("distribution.csv");
      write_distribution_csv(f, rows);
    }
    {
      auto f = open("curves.csv");
      write_curves_csv(f, learning_curves(sweep));
    }
    files.insert(files.end(), {"runs.csv", "traces.csv", "summary.csv", "best.csv", "distribution.csv", "curves.csv"});
    if (config.kind == ExperimentKind::control) {
      auto f = open("episodes.csv");
      write_episodes_csv(f, sweep);
      files.push_back("episodes.csv");
    }
  }
  int n_diverged = 0;
  int n_failed = 0;
  for (std::size_t i = 0; i < sweep.records.size(); ++i) {
    n_diverged += sweep.records[i].diverged ? 1 : 0;
    n_failed += sweep.errors[i].empty() ? 0 : 1;
  }
  json manifest;
  manifest["csv_schema_version"] = kCsvSchemaVersion;
  manifest["config"] = json::parse(config.to_json_text());
  manifest["files"] = files;
  manifest["n_runs"] = config.kind == ExperimentKind::fixed_point ? sweep.fixed_points.size() : sweep.records.size();
  manifest["n_diverged"] = n_diverged;
  manifest["n_failed"] = n_failed;
  auto f = open("manifest.json");
  f << manifest.dump(2) << "\n";
}

}  // namespace rbe
