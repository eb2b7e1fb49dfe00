#include <doctest.h>

#include <cmath>

#include "rbe/environments.hpp"
#include "rbe/errors.hpp"
#include "rbe/mdp.hpp"
#include "rbe/rng.hpp"

using namespace rbe;

namespace {

FiniteMdp self_loop(double reward, double gamma) {
  MdpBuilder b(1, 1);
  b.start(Vec::Ones(1));
  b.add(0, 0, 0, 1.0, reward, gamma);
  return b.build();
}

// s0 -> s1 (reward 0) -> terminal (reward 1).
FiniteMdp two_state_chain(double gamma) {
  MdpBuilder b(2, 1);
  Vec start(2);
  start << 1.0, 0.0;
  b.start(start);
  b.add(0, 0, 1, 1.0, 0.0, gamma);
  b.terminate(1, 0, 1.0, 1.0);
  return b.build();
}

std::vector<PredictionProblem> bundled() {
  set_warnings_enabled(false);
  std::vector<PredictionProblem> out;
  for (const auto& name : prediction_problem_names()) out.push_back(make_prediction_problem(name));
  return out;
}

}  // namespace

TEST_CASE("single self-loop chain") {
  const FiniteMdp mdp = self_loop(1.0, 0.5);
  const MarkovChain chain = induce_chain(mdp, Policy::uniform(1, 1));
  CHECK(chain.transition(0, 0) == 1.0);
  CHECK(chain.discounted_transition(0, 0) == 0.5);
  CHECK(chain.reward[0] == 1.0);
  CHECK(true_values(chain)[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_FALSE(chain.weighting.has_value());
  CHECK_THROWS_AS(chain.d(), Error);
}

TEST_CASE("zero reward gives zero values") {
  const MarkovChain chain = induce_chain(self_loop(0.0, 0.9), Policy::uniform(1, 1));
  CHECK(true_values(chain)[0] == 0.0);
}

TEST_CASE("termination zeroes the discounted row") {
  const double gamma = 0.9;
  const MarkovChain chain = induce_chain(two_state_chain(gamma), Policy::uniform(2, 1));
  CHECK(chain.reward[0] == 0.0);
  CHECK(chain.reward[1] == 1.0);
  CHECK(chain.discounted_transition.row(1).cwiseAbs().sum() == 0.0);
  // Terminating mass restarts in s0.
  CHECK(chain.transition(1, 0) == 1.0);
  const Vec v = true_values(chain);
  CHECK(v[0] == doctest::Approx(gamma).epsilon(1e-14));
  CHECK(v[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("small chain under uniform behavior is tridiagonal with restarts") {
  const PredictionProblem p = make_prediction_problem("small_chain");
  const MarkovChain chain = induce_chain(p.mdp, p.behavior);
  // Hand enumeration: each state moves left or right with probability 1/2;
  // stepping off either end restarts in the middle state 2.
  Mat expected(5, 5);
  expected << 0.0, 0.5, 0.5, 0.0, 0.0,
              0.5, 0.0, 0.5, 0.0, 0.0,
              0.0, 0.5, 0.0, 0.5, 0.0,
              0.0, 0.0, 0.5, 0.0, 0.5,
              0.0, 0.0, 0.5, 0.5, 0.0;
  CHECK((chain.transition - expected).cwiseAbs().maxCoeff() < 1e-15);
  // Discounted matrix drops the restart entries.
  CHECK(chain.discounted_transition(0, 2) == 0.0);
  CHECK(chain.discounted_transition(4, 2) == 0.0);
  CHECK(chain.discounted_transition(0, 1) == doctest::Approx(0.5 * 0.99));
  CHECK(chain.reward[0] == doctest::Approx(-0.5));
  CHECK(chain.reward[4] == doctest::Approx(0.5));
}

TEST_CASE("true values residual and singular systems") {
  for (const auto& p : bundled()) {
    const Mat a = Mat::Identity(p.n_states(), p.n_states()) - p.chain.discounted_transition;
    CHECK((a * p.true_values - p.chain.reward).cwiseAbs().maxCoeff() < 1e-10);
  }
  const MarkovChain undiscounted = induce_chain(self_loop(1.0, 1.0), Policy::uniform(1, 1));
  CHECK_THROWS_AS(true_values(undiscounted), SingularSystemError);
}

TEST_CASE("stationary weighting") {
  SUBCASE("one state") {
    const Vec d = stationary_weighting(self_loop(1.0, 0.5), Policy::uniform(1, 1));
    CHECK(d[0] == doctest::Approx(1.0));
  }
  SUBCASE("swap chain") {
    MdpBuilder b(2, 1);
    Vec start(2);
    start << 1.0, 0.0;
    b.start(start);
    b.add(0, 0, 1, 1.0, 0.0, 0.9);
    b.add(1, 0, 0, 1.0, 0.0, 0.9);
    const Vec d = stationary_weighting(b.build(), Policy::uniform(2, 1));
    CHECK(d[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(d[1] == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("small chain matches the eigenvector of P^T") {
    const PredictionProblem p = make_prediction_problem("small_chain");
    const Vec d = stationary_weighting(p.mdp, p.behavior);
    // Balance equations solved by hand give (1, 2, 3, 2, 1) / 9.
    Vec by_hand(5);
    by_hand << 1, 2, 3, 2, 1;
    by_hand /= 9.0;
    CHECK((d - by_hand).cwiseAbs().maxCoeff() < 1e-10);

    const MarkovChain chain = induce_chain(p.mdp, p.behavior);
    Eigen::EigenSolver<Mat> es(chain.transition.transpose());
    Eigen::Index best = 0;
    (es.eigenvalues().array() - 1.0).abs().minCoeff(&best);
    Vec eig = es.eigenvectors().col(best).real();
    eig /= eig.sum();
    CHECK((d - eig).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("residual and starting-vector invariance on bundled problems") {
    Rng rng(7);
    for (const auto& p : bundled()) {
      const MarkovChain b = induce_chain(p.mdp, p.behavior);
      const Vec d = p.d();
      CHECK(d.minCoeff() >= 0.0);
      CHECK(std::abs(d.sum() - 1.0) < 1e-10);
      CHECK((b.transition.transpose() * d - d).cwiseAbs().sum() < 1e-10);
      for (int k = 0; k < 2; ++k) {
        Vec init(p.n_states());
        for (auto& x : init) x = rng.uniform() + 1e-3;
        init /= init.sum();
        StationaryOptions opts;
        opts.initial = init;
        const Vec other = stationary_weighting(p.mdp, p.behavior, opts);
        CHECK((other - d).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }
}

TEST_CASE("bellman error vector") {
  const PredictionProblem p = make_prediction_problem("small_chain");
  const MarkovChain& c = p.chain;
  const Vec v = p.true_values;
  CHECK(bellman_error_vector(c, v).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((bellman_error_vector(c, Vec::Zero(5)) - c.reward).cwiseAbs().maxCoeff() == 0.0);
  const Vec shifted = bellman_error_vector(c, v + Vec::Ones(5));
  const Vec expected = (c.discounted_transition - Mat::Identity(5, 5)) * Vec::Ones(5);
  CHECK((shifted - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fixed point of T on every bundled problem") {
  for (const auto& p : bundled()) {
    CHECK(bellman_error_vector(p.chain, p.true_values).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("value error is bounded by the resolvent norm times the Bellman error") {
  Rng rng(11);
  for (const auto& p : bundled()) {
    const double norm = induced_l1_norm(resolvent(p.chain));
    for (int trial = 0; trial < 100; ++trial) {
      Vec v(p.n_states());
      for (auto& x : v) x = rng.normal() * 10.0;
      const double lhs = (p.true_values - v).cwiseAbs().sum();
      const double rhs = norm * bellman_error_vector(p.chain, v).cwiseAbs().sum();
      CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
    }
  }
}

TEST_CASE("induced l1 norm is the maximum absolute column sum") {
  Mat m(2, 2);
  m << 1, -4, 2, 1;
  CHECK(induced_l1_norm(m) == 5.0);
}

TEST_CASE("model validation") {
  MdpBuilder b(2, 1);
  CHECK_THROWS_AS(b.terminate(0, 0, 1.0, 0.0), Error);  // start not set
  b.start(Vec::Constant(2, 0.5));
  b.add(0, 0, 1, 0.5, 1.0, 0.9);
  CHECK_THROWS_AS(b.add(0, 0, 1, 0.5, 2.0, 0.9), Error);  // conflicting reward
  b.add(0, 0, 1, 0.5, 1.0, 0.9);                           // merges
  CHECK_THROWS_AS(b.build(), Error);                        // state 1 has no outcomes
  b.add(1, 0, 0, 1.0, 0.0, 0.9);
  const FiniteMdp mdp = b.build();
  CHECK(mdp.prob(0, 0, 1) == 1.0);

  CHECK_THROWS_AS(Policy(Mat::Constant(1, 2, 0.6)), Error);
  CHECK_THROWS_AS(FiniteMdp(1, 1, {0.9}, {0.0}, {0.5}, Vec::Ones(1)), Error);
  CHECK_THROWS_AS(FiniteMdp(1, 1, {1.0}, {0.0}, {1.5}, Vec::Ones(1)), Error);
}
