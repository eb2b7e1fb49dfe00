#include <doctest.h>

#include <cmath>
#include <deque>
#include <numbers>

#include "rbe/control_constants.hpp"
#include "rbe/control_envs.hpp"
#include "rbe/environments.hpp"
#include "rbe/errors.hpp"
#include "rbe/rng.hpp"

using namespace rbe;

TEST_CASE("prediction problems satisfy the model invariants") {
  set_warnings_enabled(false);
  for (const auto& name : prediction_problem_names()) {
    const auto p = make_prediction_problem(name);
    INFO(name);
    CHECK(p.name == name);
    CHECK(p.features.n_rows() == p.n_states());
    const Mat& pt = p.chain.transition;
    CHECK(pt.minCoeff() >= 0.0);
    CHECK((pt.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(p.chain.discounted_transition.rowwise().sum().maxCoeff() <= 1.0 + 1e-12);
    CHECK(p.d().minCoeff() >= 0.0);
    CHECK(p.d().sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.true_values.allFinite());
    CHECK((p.target.probs.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK((p.behavior.probs.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    for (int s = 0; s < p.n_states(); ++s) {
      for (int a = 0; a < p.mdp.n_actions(); ++a) {
        if (p.target.probs(s, a) > 0.0) CHECK(p.behavior.probs(s, a) > 0.0);
      }
    }
  }
  CHECK_THROWS_AS(make_prediction_problem("grid"), Error);
}

TEST_CASE("hard alias 2 structure") {
  const auto p = make_prediction_problem("hard_alias_2");
  REQUIRE(p.n_states() == 2);
  CHECK(p.mdp.reward(0, 0, 1) == 1.0);
  CHECK(p.mdp.prob(0, 0, 1) == 1.0);
  CHECK(p.mdp.reward(1, 0, 1) == 0.0);
  CHECK(p.mdp.reward(1, 0, 0) == 0.0);
  CHECK(p.mdp.discount(1, 0, 0) == 0.0);
  CHECK(p.mdp.prob(1, 0, 1) == doctest::Approx(0.99));
  CHECK(p.x()(0, 0) == 1.0);
  CHECK(p.x()(1, 0) == 2.0);

  ProblemOptions opts;
  opts.stay_probability = 0.5;
  CHECK(make_prediction_problem("hard_alias_2", opts).mdp.prob(1, 0, 1) == 0.5);
  opts.stay_probability = 1.0;
  CHECK_THROWS_AS(make_prediction_problem("hard_alias_2", opts), Error);
}

TEST_CASE("hard alias 1 structure") {
  const auto p = make_prediction_problem("hard_alias_1");
  CHECK(p.n_states() == 8);
  CHECK(p.n_features() == 4);
  for (int s = 0; s < 8; ++s) {
    CHECK(p.chain.reward[s] == -1.0);
    CHECK(p.true_values[s] < 0.0);
  }
  CHECK(p.mdp.prob(0, 0, 0) == 1.0);
  CHECK(p.mdp.discount(7, 1, 0) == 0.0);
}

TEST_CASE("outlier structure") {
  const auto p = make_prediction_problem("outlier");
  CHECK(p.n_states() == 50);
  CHECK(p.n_features() == 5);
  CHECK(p.mdp.reward(0, 0, 0) == -1000.0);
  CHECK(p.mdp.discount(0, 0, 0) == 0.0);
  CHECK(p.mdp.prob(0, 0, 0) == doctest::Approx(0.01));
  CHECK(p.mdp.prob(0, 1, 25) == doctest::Approx(0.99));
  CHECK(p.target.probs == p.behavior.probs);
}

TEST_CASE("baird structure") {
  const auto p = make_prediction_problem("baird");
  CHECK(p.n_states() == 7);
  CHECK(p.n_features() == 8);
  CHECK(p.behavior.probs(0, 0) == doctest::Approx(6.0 / 7.0));
  CHECK(p.target.probs(3, 1) == 1.0);
  CHECK(p.chain.reward.cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.true_values.cwiseAbs().maxCoeff() == 0.0);
  for (int s = 0; s < 7; ++s) CHECK(p.d()[s] == doctest::Approx(1.0 / 7.0).epsilon(1e-10));
  CHECK(p.initial_theta == Vec::Ones(8));
  ProblemOptions textbook;
  textbook.baird_lower_weight = 10.0;
  const Vec theta0 = make_prediction_problem("baird", textbook).initial_theta;
  CHECK(theta0[6] == 10.0);
  CHECK(theta0.sum() == 17.0);
}

TEST_CASE("weighting options") {
  ProblemOptions opts;
  opts.weighting = Weighting::uniform;
  const auto p = make_prediction_problem("small_chain", opts);
  for (int s = 0; s < 5; ++s) CHECK(p.d()[s] == doctest::Approx(0.2));
  opts = ProblemOptions{};
  opts.feature_seed = 3;
  CHECK(make_prediction_problem("big_chain", opts).x() != make_prediction_problem("big_chain").x());
}

TEST_CASE("small chain values agree with monte carlo rollouts") {
  const auto p = make_prediction_problem("small_chain");
  Rng rng(123);
  const int episodes_per_state = 200'000;
  for (int s0 = 0; s0 < 5; ++s0) {
    double sum = 0.0, sum_sq = 0.0;
    for (int e = 0; e < episodes_per_state; ++e) {
      int s = s0;
      double ret = 0.0, discount = 1.0;
      while (true) {
        const bool left = rng.uniform() < 0.9;
        if (left && s == 0) {
          ret -= discount;
          break;
        }
        if (!left && s == 4) {
          ret += discount;
          break;
        }
        s += left ? -1 : 1;
        discount *= 0.99;
      }
      sum += ret;
      sum_sq += ret * ret;
    }
    const double mean = sum / episodes_per_state;
    const double var = sum_sq / episodes_per_state - mean * mean;
    const double se = std::sqrt(var / episodes_per_state);
    CHECK(std::abs(mean - p.true_values[s0]) <= 3 * se);
  }
}

TEST_CASE("cliff world") {
  CliffWorld env;
  Vec obs = env.reset();
  CHECK(obs.size() == 20);
  CHECK(obs[15] == 1.0);
  CHECK(obs.sum() == 1.0);

  SUBCASE("cliff returns to start without ending the episode") {
    const StepResult r = env.step(1);
    CHECK(r.reward == -1000.0);
    CHECK_FALSE(r.terminated);
    CHECK_FALSE(r.cutoff);
    CHECK(env.row() == 3);
    CHECK(env.col() == 0);
  }
  SUBCASE("optimal path return equals minus its length") {
    // Breadth-first search over the free cells.
    const int rows = 4, cols = 5;
    auto free = [&](int r, int c) { return !(r == 3 && c > 0 && c < 4); };
    std::vector<int> dist(rows * cols, -1), parent_action(rows * cols, -1), parent(rows * cols, -1);
    std::deque<int> queue{3 * cols};
    dist[3 * cols] = 0;
    const int dr[4] = {-1, 0, 1, 0}, dc[4] = {0, 1, 0, -1};
    while (!queue.empty()) {
      const int cell = queue.front();
      queue.pop_front();
      for (int a = 0; a < 4; ++a) {
        const int r = std::clamp(cell / cols + dr[a], 0, rows - 1);
        const int c = std::clamp(cell % cols + dc[a], 0, cols - 1);
        if (!free(r, c) || dist[r * cols + c] >= 0) continue;
        dist[r * cols + c] = dist[cell] + 1;
        parent[r * cols + c] = cell;
        parent_action[r * cols + c] = a;
        queue.push_back(r * cols + c);
      }
    }
    const int goal = 3 * cols + 4;
    REQUIRE(dist[goal] == 6);
    std::vector<int> actions;
    for (int cell = goal; cell != 3 * cols; cell = parent[cell]) actions.insert(actions.begin(), parent_action[cell]);
    double ret = 0.0;
    StepResult r;
    for (int a : actions) {
      r = env.step(a);
      ret += r.reward;
    }
    CHECK(r.terminated);
    CHECK(ret == -6.0);
  }
  SUBCASE("cutoff after the step limit") {
    StepResult r;
    for (int i = 0; i < 500; ++i) {
      r = env.step(3);
      CHECK_FALSE(r.terminated);
      if (i < 499) CHECK_FALSE(r.cutoff);
    }
    CHECK(r.cutoff);
    CHECK(env.episode_steps() == 500);
  }
  CHECK_THROWS_AS(env.step(4), Error);
}

TEST_CASE("mountain car without throttle never reaches the goal") {
  MountainCar env;
  env.reset();
  env.set_state(-std::numbers::pi / 6.0, 0.0);
  StepResult r;
  for (long i = 0; i < constants::mountain_car::kCutoff; ++i) {
    r = env.step(1);
    CHECK_FALSE(r.terminated);
    CHECK(r.reward == -1.0);
  }
  CHECK(r.cutoff);
  CHECK(r.observation.minCoeff() >= 0.0);
  CHECK(r.observation.maxCoeff() <= 1.0);
}

TEST_CASE("mountain car can be solved by pumping energy") {
  MountainCar env;
  env.reset();
  StepResult r;
  for (int i = 0; i < 1000; ++i) {
    r = env.step(env.velocity() >= 0.0 ? 2 : 0);
    if (r.terminated) break;
  }
  CHECK(r.terminated);
  CHECK(env.episode_steps() < 200);
}

TEST_CASE("random cart-pole episodes are short") {
  CartPole env(7);
  Rng rng(8);
  double total = 0.0;
  for (int e = 0; e < 1000; ++e) {
    env.reset();
    long len = 0;
    while (true) {
      const StepResult r = env.step(static_cast<int>(rng.below(2)));
      CHECK(r.reward == 1.0);
      ++len;
      if (r.terminated || r.cutoff) break;
    }
    total += static_cast<double>(len);
  }
  const double mean = total / 1000.0;
  CHECK(mean > 10.0);
  CHECK(mean < 50.0);
}

TEST_CASE("acrobot") {
  Acrobot env(3);
  Vec obs = env.reset();
  CHECK(obs.size() == 4);
  CHECK(obs.cwiseAbs().maxCoeff() <= 0.1);
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const StepResult r = env.step(static_cast<int>(rng.below(3)));
    CHECK(std::abs(r.observation[0]) <= std::numbers::pi);
    CHECK(std::abs(r.observation[1]) <= std::numbers::pi);
    CHECK(std::abs(r.observation[2]) <= constants::acrobot::kMaxVel1);
    CHECK(std::abs(r.observation[3]) <= constants::acrobot::kMaxVel2);
    CHECK(r.reward == -1.0);
    CHECK_FALSE((r.terminated && r.cutoff));
    if (r.terminated || r.cutoff) break;
  }
}

TEST_CASE("control environments are replayable from the seed") {
  for (const auto& name : control_env_names()) {
    auto a = make_control_env(name, 11);
    auto b = make_control_env(name, 11);
    Rng ra(1), rb(1);
    Vec oa = a->reset(), ob = b->reset();
    CHECK(oa == ob);
    for (int i = 0; i < 2000; ++i) {
      const int act = static_cast<int>(ra.below(static_cast<std::size_t>(a->n_actions())));
      rb.below(static_cast<std::size_t>(b->n_actions()));
      const StepResult x = a->step(act), y = b->step(act);
      CHECK(x.observation == y.observation);
      CHECK(x.reward == y.reward);
      CHECK(x.terminated == y.terminated);
      CHECK_FALSE((x.terminated && x.cutoff));
      if (x.terminated || x.cutoff) {
        oa = a->reset();
        ob = b->reset();
        CHECK(oa == ob);
      }
    }
  }
  CHECK_THROWS_AS(make_control_env("lunar_lander", 0), Error);
}
