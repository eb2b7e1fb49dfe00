#include <doctest.h>

#include <cmath>
#include <limits>

#include "rbe/environments.hpp"
#include "rbe/errors.hpp"
#include "rbe/fixed_point.hpp"
#include "rbe/linear_agents.hpp"
#include "rbe/rng.hpp"

using namespace rbe;

namespace {

AgentParams make_params(int n, Family family, Transform transform, double alpha_v, double alpha_h,
                        double tau = 1.0) {
  AgentParams p;
  p.theta = Vec::Zero(n);
  p.theta_h = Vec::Zero(n);
  p.alpha_v = alpha_v;
  p.alpha_h = alpha_h;
  p.tau = tau;
  p.transform = transform;
  p.family = family;
  return p;
}

Vec unit(int n, int i) {
  Vec v = Vec::Zero(n);
  v[i] = 1.0;
  return v;
}

struct RandomTransition {
  Transition t;
  Vec x, x_next;
};

RandomTransition random_transition(Rng& rng, int n, bool on_policy) {
  RandomTransition out;
  out.t = Transition{0, 0, rng.normal(), 1, rng.uniform() < 0.1 ? 0.0 : 0.9,
                     on_policy ? 1.0 : rng.uniform(0.0, 3.0)};
  out.x = Vec(n);
  out.x_next = Vec(n);
  for (int i = 0; i < n; ++i) {
    out.x[i] = rng.normal();
    out.x_next[i] = rng.normal();
  }
  return out;
}

// Textbook GTD2 and TDC written out without the library's helpers.
void reference_step(Family family, Vec& w, Vec& u, double a, double b, const RandomTransition& rt) {
  const Transition& t = rt.t;
  double delta = t.r + t.gamma * w.dot(rt.x_next) - w.dot(rt.x);
  double h = u.dot(rt.x);
  Vec w_new = w;
  if (family == Family::gtd2) {
    w_new = w + a * h * (rt.x - t.rho * t.gamma * rt.x_next);
  } else {
    w_new = w + a * t.rho * delta * rt.x - a * t.rho * t.gamma * h * rt.x_next;
  }
  u = u + b * (t.rho * delta - h) * rt.x;
  w = w_new;
}

}  // namespace

TEST_CASE("secondary update arithmetic") {
  AgentParams p = make_params(1, Family::gtd2, Transform::identity, 0.1, 0.5);
  step_h(p, 1.0, 0.0, unit(1, 0));
  CHECK(p.theta_h[0] == 0.0);
  step_h(p, 1.0, 1.0, unit(1, 0));
  CHECK(p.theta_h[0] == 0.5);
  CHECK_THROWS_AS(step_h(p, 1.0, std::nan(""), unit(1, 0)), DivergenceError);
}

TEST_CASE("primary updates") {
  const Transition t{0, 0, 1.0, 1, 0.9, 1.0};
  SUBCASE("gtd2 with zero h is a no-op") {
    AgentParams p = make_params(2, Family::gtd2, Transform::identity, 0.1, 0.1);
    p.theta << 0.3, -0.2;
    const Vec before = p.theta;
    step_primary_gtd2(p, t, 0.0, unit(2, 0), unit(2, 1));
    CHECK(p.theta == before);
  }
  SUBCASE("gtd2 on a two-state tabular problem") {
    AgentParams p = make_params(2, Family::gtd2, Transform::identity, 0.5, 0.25);
    p.theta << 1.0, 2.0;
    p.theta_h << 0.4, 0.0;
    agent_step(p, t, unit(2, 0), unit(2, 1));
    // delta = 1 + 0.9 * 2 - 1 = 1.8, h = 0.4
    // theta = (1, 2) + 0.5 * 0.4 * ((1, 0) - 0.9 (0, 1)) = (1.2, 1.82)
    // theta_h = (0.4, 0) + 0.25 (1.8 - 0.4) (1, 0) = (0.75, 0)
    CHECK(p.theta[0] == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(p.theta[1] == doctest::Approx(1.82).epsilon(1e-15));
    CHECK(p.theta_h[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(p.theta_h[1] == 0.0);
  }
  SUBCASE("tdc with zero delta and h is a no-op") {
    AgentParams p = make_params(2, Family::tdc, Transform::identity, 0.1, 0.1);
    step_primary_tdc(p, t, 0.0, 0.0, unit(2, 0), unit(2, 1));
    CHECK(p.theta == Vec::Zero(2));
  }
  SUBCASE("termination drops the correction") {
    const Transition term{0, 0, 1.0, 1, 0.0, 2.0};
    for (Transform tr : {Transform::identity, Transform::clip, Transform::sign}) {
      AgentParams p = make_params(2, Family::tdc, tr, 0.1, 0.1);
      p.theta_h << 5.0, 5.0;
      const Vec x = (Vec(2) << 1.0, 0.5).finished();
      agent_step(p, term, x, unit(2, 1));
      CHECK((p.theta - 0.1 * 2.0 * 1.0 * x).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
  SUBCASE("td") {
    AgentParams p = make_params(1, Family::td, Transform::identity, 0.5, 0.0);
    step_primary_td(p, Transition{0, 0, 1.0, 0, 0.9, 2.0}, 1.0, unit(1, 0));
    CHECK(p.theta[0] == 1.0);
  }
}

TEST_CASE("library updates match straight-line implementations") {
  for (Family family : {Family::gtd2, Family::tdc}) {
    for (bool on_policy : {true, false}) {
      Rng rng(on_policy ? 1 : 2);
      AgentParams p = make_params(4, family, Transform::identity, 0.01, 0.02);
      Vec w = Vec::Zero(4), u = Vec::Zero(4);
      for (int i = 0; i < 1000; ++i) {
        const RandomTransition rt = random_transition(rng, 4, on_policy);
        agent_step(p, rt.t, rt.x, rt.x_next);
        reference_step(family, w, u, 0.01, 0.02, rt);
      }
      CHECK((p.theta - w).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((p.theta_h - u).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("infinite tau clip equals identity bit for bit") {
  for (Family family : {Family::gtd2, Family::tdc}) {
    Rng rng(3);
    AgentParams a = make_params(3, family, Transform::identity, 0.01, 0.01);
    AgentParams b = make_params(3, family, Transform::clip, 0.01, 0.01, std::numeric_limits<double>::infinity());
    for (int i = 0; i < 1000; ++i) {
      const RandomTransition rt = random_transition(rng, 3, false);
      agent_step(a, rt.t, rt.x, rt.x_next);
      agent_step(b, rt.t, rt.x, rt.x_next);
    }
    CHECK(a.theta == b.theta);
    CHECK(a.theta_h == b.theta_h);
  }
}

TEST_CASE("divergence detection") {
  AgentParams p = make_params(1, Family::td, Transform::identity, 1.0, 0.0);
  p.theta[0] = 0.9e8;
  CHECK_THROWS_AS(agent_step(p, Transition{0, 0, 2e8, 0, 0.0, 1.0}, unit(1, 0), unit(1, 0)), DivergenceError);
}

TEST_CASE("agent names") {
  for (const auto& name : linear_agent_names()) CHECK(AgentConfig::from_name(name, 0.1).name() == name);
  const AgentConfig c = AgentConfig::from_name("tdc_huber", 0.25, 4.0, 2.0);
  CHECK(c.family == Family::tdc);
  CHECK(c.transform == Transform::clip);
  const AgentParams p = c.initial_params(make_prediction_problem("small_chain"));
  CHECK(p.alpha_h == 1.0);
  CHECK(p.tau == 2.0);
  CHECK(p.theta_h == Vec::Zero(2));
  CHECK_THROWS_AS(AgentConfig::from_name("td_huber", 0.1), Error);
  CHECK_THROWS_AS(AgentConfig::from_name("gtd3", 0.1), Error);
  CHECK_THROWS_AS(AgentConfig::from_name("gtd2", -1.0), Error);
}

TEST_CASE("secondary weights track the projected bellman error") {
  set_warnings_enabled(false);
  // The projected h in value space is unchanged by rescaling the features;
  // unit-scale features keep the stochastic approximation fast.
  const auto raw = make_prediction_problem("small_chain");
  const auto p = PredictionProblem::assemble(raw.name, raw.mdp, raw.target, raw.behavior,
                                             FeatureMap(raw.x() / raw.x().cwiseAbs().maxCoeff()),
                                             Weighting::behavior_stationary);
  const Vec theta = (Vec(2) << 0.5, -0.8).finished();
  ObjectiveSpec spec;
  spec.h_class = HClass::v_features;
  const Vec h_star = make_evaluator(p, spec).h(theta);

  AgentParams params = make_params(2, Family::gtd2, Transform::identity, 0.0, 0.0);
  params.theta = theta;
  Rng rng(42);
  const FiniteMdp& mdp = p.mdp;
  std::vector<double> start(mdp.start_distribution().data(), mdp.start_distribution().data() + mdp.n_states());
  int s = static_cast<int>(rng.categorical(start));
  Vec avg = Vec::Zero(2);
  const long n = 1'000'000;
  for (long t = 1; t <= n; ++t) {
    const std::vector<double> pa = {p.behavior.probs(s, 0), p.behavior.probs(s, 1)};
    const int a = static_cast<int>(rng.categorical(pa));
    std::vector<double> pn(mdp.n_states());
    for (int k = 0; k < mdp.n_states(); ++k) pn[k] = mdp.prob(s, a, k);
    const int next = static_cast<int>(rng.categorical(pn));
    const double rho = p.target.probs(s, a) / p.behavior.probs(s, a);
    const Vec x = p.x().row(s).transpose(), xn = p.x().row(next).transpose();
    const double delta = mdp.reward(s, a, next) + mdp.discount(s, a, next) * theta.dot(xn) - theta.dot(x);
    params.alpha_h = 1.0 / (10.0 + t / 100.0);
    step_h(params, rho, delta, x);
    if (t > n / 2) avg += params.theta_h / static_cast<double>(n - n / 2);
    s = next;
  }
  CHECK((p.x() * avg - h_star).cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("correction bias") {
  set_warnings_enabled(false);
  Rng rng(17);
  for (const auto& name : prediction_problem_names()) {
    const auto p = make_prediction_problem(name);
    for (int k = 0; k < 5; ++k) {
      Vec theta(p.n_features());
      for (int i = 0; i < theta.size(); ++i) theta[i] = rng.normal();
      CHECK(correction_bias_diagnostic(p, theta, 1.0, Transform::identity) < 1e-10);
      ObjectiveSpec spec;
      spec.h_class = HClass::v_features;
      const double big_tau = make_evaluator(p, spec).h(theta).cwiseAbs().maxCoeff() + 1.0;
      CHECK(correction_bias_diagnostic(p, theta, big_tau, Transform::clip) < 1e-10);
    }
  }
  const auto outlier = make_prediction_problem("outlier");
  const Vec theta = Vec::Zero(outlier.n_features());
  const double bias = correction_bias_diagnostic(outlier, theta, 0.01, Transform::clip);
  CHECK(bias > 0.0);
  CHECK(bias <= correction_bias_bound(outlier, theta, 0.01));
}

TEST_CASE("prediction runs") {
  set_warnings_enabled(false);
  const auto p = make_prediction_problem("hard_alias_1");
  SUBCASE("zero stepsize keeps the error constant") {
    const RunRecord r = run_prediction(p, AgentConfig::from_name("gtd2", 0.0), 2000, 5);
    const auto& pts = r.trace("msve").points;
    REQUIRE(pts.size() == 501);
    for (const auto& pt : pts) CHECK(pt.value == pts.front().value);
    CHECK(pts.front().value == msve(p, p.initial_theta));
  }
  SUBCASE("deterministic given the seed") {
    const RunRecord a = run_prediction(p, AgentConfig::from_name("tdc_huber", 0.05), 3000, 9);
    const RunRecord b = run_prediction(p, AgentConfig::from_name("tdc_huber", 0.05), 3000, 9);
    const RunRecord c = run_prediction(p, AgentConfig::from_name("tdc_huber", 0.05), 3000, 10);
    REQUIRE(a.traces.size() == b.traces.size());
    for (std::size_t i = 0; i < a.traces.size(); ++i) {
      for (std::size_t j = 0; j < a.traces[i].points.size(); ++j) {
        CHECK(a.traces[i].points[j].value == b.traces[i].points[j].value);
      }
    }
    CHECK(a.trace("msve").points.back().value != c.trace("msve").points.back().value);
  }
  SUBCASE("steps are increasing and evenly spaced") {
    const RunRecord r = run_prediction(p, AgentConfig::from_name("gtd2", 0.01), 10'000, 1);
    const auto& pts = r.trace("mave").points;
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].step - pts[i - 1].step == 20);
    CHECK(pts.back().step == 10'000);
  }
  SUBCASE("semi-gradient td diverges on baird") {
    const auto baird = make_prediction_problem("baird");
    const RunRecord r = run_prediction(baird, AgentConfig::from_name("td", 0.125), 50'000, 1);
    CHECK(r.diverged);
    CHECK(r.diverged_at > 0);
    CHECK(r.trace("msve").points.back().step < r.diverged_at);
  }
}

TEST_CASE("tdc converges to the td fixed point on small_chain") {
  const auto p = make_prediction_problem("small_chain");
  const double target = msve(p, td_fixed_point(p));
  const RunRecord r = run_prediction(p, AgentConfig::from_name("tdc", 0.5, 1.0), 100'000, 3);
  const Summary s = summarize(r.trace("msve"), r.n_steps);
  CHECK(std::abs(s.final - target) <= 0.02 * target);
}

TEST_CASE("gtd2 huber approaches its fixed point at the best swept stepsize") {
  set_warnings_enabled(false);
  for (const char* name : {"small_chain", "big_chain", "hard_alias_1"}) {
    const auto p = make_prediction_problem(name);
    ObjectiveSpec spec;
    spec.kind = ErrorKind::huber;
    spec.h_class = HClass::v_features;
    const double target = solve_fixed_point(p, spec).msve;
    double best = std::numeric_limits<double>::infinity();
    for (int k = -10; k <= -1; ++k) {
      for (int e = -6; e <= 6; e += 2) {
        const auto cfg = AgentConfig::from_name("gtd2_huber", std::ldexp(1.0, k), std::ldexp(1.0, e));
        const RunRecord r = run_prediction(p, cfg, 1'000'000, 1);
        if (!r.diverged) best = std::min(best, summarize(r.trace("msve"), r.n_steps).final);
      }
    }
    INFO(name, ": best final ", best, " fixed point ", target);
    CHECK(std::abs(best - target) <= 0.1 * target);
  }
}
