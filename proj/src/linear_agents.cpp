#include "rbe/linear_agents.hpp"

#include <cmath>

#include "rbe/errors.hpp"
#include "rbe/objectives.hpp"
#include "rbe/rng.hpp"

namespace rbe {

double td_error(const AgentParams& params, const Transition& t, const Vec& x, const Vec& x_next) {
  return t.r + t.gamma * params.theta.dot(x_next) - params.theta.dot(x);
}

double secondary_value(const AgentParams& params, const Vec& x) {
  const double h = params.theta_h.dot(x);
  switch (params.transform) {
    case Transform::identity: return h;
    case Transform::clip: return clip(params.tau, h);
    case Transform::sign: return sign0(h);
  }
  return h;
}

void step_h(AgentParams& params, double rho, double delta, const Vec& x) {
  if (!std::isfinite(delta)) throw DivergenceError("non-finite TD error");
  const double prediction = params.theta_h.dot(x);
  params.theta_h += params.alpha_h * (rho * delta - prediction) * x;
}

void step_primary_gtd2(AgentParams& params, const Transition& t, double h, const Vec& x,
                       const Vec& x_next) {
  params.theta += params.alpha_v * h * (x - t.rho * t.gamma * x_next);
}

void step_primary_tdc(AgentParams& params, const Transition& t, double delta, double h, const Vec& x,
                      const Vec& x_next) {
  params.theta += params.alpha_v * t.rho * (delta * x - t.gamma * h * x_next);
}

void step_primary_td(AgentParams& params, const Transition& t, double delta, const Vec& x) {
  params.theta += params.alpha_v * t.rho * delta * x;
}

namespace {

bool out_of_bounds(const Vec& w) {
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!(std::abs(w[i]) <= kDivergenceThreshold)) return true;
  }
  return false;
}

}  // namespace

void agent_step(AgentParams& params, const Transition& t, const Vec& x, const Vec& x_next) {
  const double delta = td_error(params, t, x, x_next);
  if (!std::isfinite(delta)) throw DivergenceError("non-finite TD error");
  switch (params.family) {
    case Family::td:
      step_primary_td(params, t, delta, x);
      break;
    case Family::gtd2: {
      const double h = secondary_value(params, x);
      step_primary_gtd2(params, t, h, x, x_next);
      step_h(params, t.rho, delta, x);
      break;
    }
    case Family::tdc: {
      const double h = secondary_value(params, x);
      step_primary_tdc(params, t, delta, h, x, x_next);
      step_h(params, t.rho, delta, x);
      break;
    }
  }
  if (out_of_bounds(params.theta) || out_of_bounds(params.theta_h)) {
    throw DivergenceError("weights exceeded the divergence threshold");
  }
}

AgentConfig AgentConfig::from_name(std::string_view name, double alpha, double eta, double tau) {
  AgentConfig c;
  c.alpha = alpha;
  c.eta = eta;
  c.tau = tau;
  std::string_view family = name;
  std::string_view suffix;
  if (const auto pos = name.find('_'); pos != std::string_view::npos) {
    family = name.substr(0, pos);
    suffix = name.substr(pos + 1);
  }
  if (family == "td") {
    c.family = Family::td;
  } else if (family == "gtd2") {
    c.family = Family::gtd2;
  } else if (family == "tdc") {
    c.family = Family::tdc;
  } else {
    throw Error("unknown linear agent '" + std::string(name) + "'");
  }
  if (suffix.empty()) {
    c.transform = Transform::identity;
  } else if (suffix == "huber" && c.family != Family::td) {
    c.transform = Transform::clip;
  } else if (suffix == "abs" && c.family != Family::td) {
    c.transform = Transform::sign;
  } else {
    throw Error("unknown linear agent '" + std::string(name) + "'");
  }
  if (!(alpha >= 0.0) || !(eta >= 0.0)) throw Error("stepsizes must be non-negative");
  if (c.transform == Transform::clip && !(tau > 0.0)) throw Error("huber agents need tau > 0");
  return c;
}

std::string AgentConfig::name() const {
  std::string out = family == Family::td ? "td" : family == Family::gtd2 ? "gtd2" : "tdc";
  if (transform == Transform::clip) out += "_huber";
  if (transform == Transform::sign) out += "_abs";
  return out;
}

AgentParams AgentConfig::initial_params(const PredictionProblem& problem) const {
  AgentParams p;
  p.theta = problem.initial_theta;
  p.theta_h = Vec::Zero(problem.n_features());
  p.alpha_v = alpha;
  p.alpha_h = eta * alpha;
  p.tau = tau;
  p.transform = transform;
  p.family = family;
  return p;
}

const std::vector<std::string>& linear_agent_names() {
  static const std::vector<std::string> names = {"td",  "gtd2",      "gtd2_huber", "gtd2_abs",
                                                 "tdc", "tdc_huber", "tdc_abs"};
  return names;
}

namespace {

Vec projected_bellman_error(const PredictionProblem& problem, const Vec& theta) {
  const Vec u = bellman_error_vector(problem.chain, problem.x() * theta);
  const Vec sqrt_d = problem.d().cwiseSqrt();
  const Mat a = sqrt_d.asDiagonal() * problem.x();
  const Vec w = a.completeOrthogonalDecomposition().solve(sqrt_d.cwiseProduct(u));
  return problem.x() * w;
}

}  // namespace

double correction_bias_diagnostic(const PredictionProblem& problem, const Vec& theta, double tau,
                                  Transform transform) {
  const Vec u = bellman_error_vector(problem.chain, problem.x() * theta);
  Vec h = projected_bellman_error(problem, theta);
  if (transform == Transform::clip) h = h.unaryExpr([tau](double v) { return clip(tau, v); });
  if (transform == Transform::sign) h = h.unaryExpr([](double v) { return sign0(v); });
  const Vec bias = problem.x().transpose() * problem.d().cwiseProduct(h - u);
  return bias.cwiseAbs().maxCoeff();
}

double correction_bias_bound(const PredictionProblem& problem, const Vec& theta, double tau) {
  const FiniteMdp& mdp = problem.mdp;
  const Vec v = problem.x() * theta;
  const Vec h = projected_bellman_error(problem, theta);
  double total = 0.0;
  for (int s = 0; s < mdp.n_states(); ++s) {
    if (!(std::abs(h[s]) > tau)) continue;
    const double target = tau * sign0(h[s]);
    double expected = 0.0;
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const double pa = problem.target.probs(s, a);
      if (pa == 0.0) continue;
      for (int next = 0; next < mdp.n_states(); ++next) {
        const double p = mdp.prob(s, a, next);
        if (p == 0.0) continue;
        const double delta = mdp.reward(s, a, next) + mdp.discount(s, a, next) * v[next] - v[s];
        expected += pa * p * std::abs(target - delta);
      }
    }
    total += problem.d()[s] * expected * problem.x().row(s).cwiseAbs().maxCoeff();
  }
  return total;
}

namespace {

// Cumulative tables for sampling actions and next states.
class TransitionSampler {
 public:
  explicit TransitionSampler(const PredictionProblem& problem) : problem_(problem) {
    const FiniteMdp& mdp = problem.mdp;
    const int n = mdp.n_states();
    next_probs_.resize(static_cast<std::size_t>(n) * mdp.n_actions());
    for (int s = 0; s < n; ++s) {
      for (int a = 0; a < mdp.n_actions(); ++a) {
        auto& row = next_probs_[static_cast<std::size_t>(s) * mdp.n_actions() + a];
        row.resize(n);
        for (int next = 0; next < n; ++next) row[next] = mdp.prob(s, a, next);
      }
    }
    action_probs_.resize(n);
    for (int s = 0; s < n; ++s) {
      action_probs_[s].resize(mdp.n_actions());
      for (int a = 0; a < mdp.n_actions(); ++a) action_probs_[s][a] = problem.behavior.probs(s, a);
    }
    const Vec& start = mdp.start_distribution();
    start_.assign(start.data(), start.data() + start.size());
  }

  int start(Rng& rng) const { return static_cast<int>(rng.categorical(start_)); }

  Transition step(int s, Rng& rng) const {
    const FiniteMdp& mdp = problem_.mdp;
    const int a = static_cast<int>(rng.categorical(action_probs_[s]));
    const auto& row = next_probs_[static_cast<std::size_t>(s) * mdp.n_actions() + a];
    const int next = static_cast<int>(rng.categorical(row));
    const double rho = problem_.target.probs(s, a) / problem_.behavior.probs(s, a);
    return Transition{s, a, mdp.reward(s, a, next), next, mdp.discount(s, a, next), rho};
  }

 private:
  const PredictionProblem& problem_;
  std::vector<std::vector<double>> next_probs_;
  std::vector<std::vector<double>> action_probs_;
  std::vector<double> start_;
};

}  // namespace

RunRecord run_prediction(const PredictionProblem& problem, const AgentConfig& config, long n_steps,
                         std::uint64_t seed) {
  if (n_steps < 1) throw Error("n_steps must be positive");
  RunRecord record;
  record.problem = problem.name;
  record.algorithm = config.name();
  record.params = {{"alpha", config.alpha}, {"eta", config.eta}, {"tau", config.tau}};
  record.seed = seed;
  record.n_steps = n_steps;
  record.traces = {Trace{"msve", {}}, Trace{"mave", {}}};

  std::vector<Vec> xs(problem.n_states());
  for (int s = 0; s < problem.n_states(); ++s) xs[s] = problem.x().row(s).transpose();

  AgentParams params = config.initial_params(problem);
  TransitionSampler sampler(problem);
  Rng rng(seed);
  const long interval = logging_interval(n_steps);
  auto log = [&](long step) {
    record.traces[0].points.push_back({step, msve(problem, params.theta)});
    record.traces[1].points.push_back({step, mave(problem, params.theta)});
  };

  log(0);
  int s = sampler.start(rng);
  for (long step = 1; step <= n_steps; ++step) {
    const Transition t = sampler.step(s, rng);
    try {
      agent_step(params, t, xs[t.s], xs[t.next]);
    } catch (const DivergenceError&) {
      record.diverged = true;
      record.diverged_at = step;
      break;
    }
    s = t.next;
    if (step % interval == 0) log(step);
  }
  return record;
}

}  // namespace rbe
