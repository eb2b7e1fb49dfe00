#include "rbe/environments.hpp"

#include "rbe/errors.hpp"

namespace rbe {

namespace {

constexpr int kLeft = 0;
constexpr int kRight = 1;

Vec point_mass(int n, int s) {
  Vec v = Vec::Zero(n);
  v[s] = 1.0;
  return v;
}

}  // namespace

const std::vector<std::string>& prediction_problem_names() {
  static const std::vector<std::string> names = {"small_chain", "big_chain", "hard_alias_1",
                                                 "hard_alias_2", "outlier", "baird"};
  return names;
}

PredictionProblem make_prediction_problem(std::string_view name, const ProblemOptions& options) {
  if (name == "small_chain") return random_walk_chain("small_chain", 5, options);
  if (name == "big_chain") return random_walk_chain("big_chain", 19, options);
  if (name == "hard_alias_1") return hard_alias_1(options);
  if (name == "hard_alias_2") return hard_alias_2(options);
  if (name == "outlier") return outlier(options);
  if (name == "baird") return baird(options);
  throw Error("unknown prediction problem '" + std::string(name) + "'");
}

// Walk over n states starting in the middle. Stepping off the left end
// terminates with -1, off the right end with +1. Target goes left 90% of
// the time, behavior is uniform. Features are the last (ReLU) layer of a
// frozen net with hidden sizes 4n, n and output size n / 2.
PredictionProblem random_walk_chain(std::string name, int n, const ProblemOptions& options) {
  MdpBuilder b(n, 2);
  b.start(point_mass(n, n / 2));
  for (int s = 0; s < n; ++s) {
    if (s == 0) {
      b.terminate(s, kLeft, 1.0, -1.0);
    } else {
      b.add(s, kLeft, s - 1, 1.0, 0.0, kDiscount);
    }
    if (s == n - 1) {
      b.terminate(s, kRight, 1.0, 1.0);
    } else {
      b.add(s, kRight, s + 1, 1.0, 0.0, kDiscount);
    }
  }
  FrozenFeatures frozen = frozen_relu_features(n, {4 * n, n}, n / 2, options.feature_seed,
                                               OutputActivation::relu);
  return PredictionProblem::assemble(std::move(name), b.build(), Policy::constant(n, {0.9, 0.1}),
                                     Policy::uniform(n, 2), std::move(frozen.features),
                                     options.weighting, std::nullopt, frozen.net.seed());
}

// 8-state walk from state 0 with -1 per step. Both policies move right with
// probability 0.9; the left move stays put at the wall. Moving right from
// the last state terminates.
PredictionProblem hard_alias_1(const ProblemOptions& options) {
  constexpr int n = 8;
  MdpBuilder b(n, 2);
  b.start(point_mass(n, 0));
  for (int s = 0; s < n; ++s) {
    b.add(s, kLeft, s == 0 ? 0 : s - 1, 1.0, -1.0, kDiscount);
    if (s == n - 1) {
      b.terminate(s, kRight, 1.0, -1.0);
    } else {
      b.add(s, kRight, s + 1, 1.0, -1.0, kDiscount);
    }
  }
  const Policy policy = Policy::constant(n, {0.1, 0.9});
  return PredictionProblem::assemble("hard_alias_1", b.build(), policy, policy,
                                     hard_alias_1_features(), options.weighting);
}

// Two states with features 1 and 2. The first always moves to the second
// with reward +1; the second stays with stay_probability and otherwise
// terminates, restarting in the first.
PredictionProblem hard_alias_2(const ProblemOptions& options) {
  const double stay = options.stay_probability;
  if (!(stay > 0.0 && stay < 1.0)) throw Error("hard_alias_2 stay probability must be in (0, 1)");
  MdpBuilder b(2, 1);
  b.start(point_mass(2, 0));
  b.add(0, 0, 1, 1.0, 1.0, kDiscount);
  b.add(1, 0, 1, stay, 0.0, kDiscount);
  b.terminate(1, 0, 1.0 - stay, 0.0);
  const Policy policy = Policy::uniform(2, 1);
  return PredictionProblem::assemble("hard_alias_2", b.build(), policy, policy,
                                     hard_alias_2_features(), options.weighting);
}

// State 0 is the entry state: terminate with -1000 with probability 0.01,
// otherwise enter state 25, the middle of the walk over states 1..49.
// Left is taken with probability 0.01 everywhere; the walk ends give -1 and
// +1. On-policy.
PredictionProblem outlier(const ProblemOptions& options) {
  constexpr int n = 50;
  constexpr double eps = 0.01;
  MdpBuilder b(n, 2);
  b.start(point_mass(n, 0));
  for (int a = 0; a < 2; ++a) {
    b.terminate(0, a, eps, -1000.0);
    b.add(0, a, 25, 1.0 - eps, 0.0, kDiscount);
  }
  for (int s = 1; s < n; ++s) {
    if (s == 1) {
      b.terminate(s, kLeft, 1.0, -1.0);
    } else {
      b.add(s, kLeft, s - 1, 1.0, 0.0, kDiscount);
    }
    if (s == n - 1) {
      b.terminate(s, kRight, 1.0, 1.0);
    } else {
      b.add(s, kRight, s + 1, 1.0, 0.0, kDiscount);
    }
  }
  FrozenFeatures frozen = frozen_relu_features(n, {10}, 5, options.feature_seed, OutputActivation::relu);
  const Policy policy = Policy::constant(n, {eps, 1.0 - eps});
  return PredictionProblem::assemble("outlier", b.build(), policy, policy, std::move(frozen.features),
                                     options.weighting, std::nullopt, frozen.net.seed());
}

// Star MDP: 7 states, 8 features. Action 0 (dashed) jumps uniformly to one
// of states 0..5, action 1 (solid) jumps to state 6. All rewards are 0.
// Target always takes solid; behavior takes dashed with probability 6/7.
PredictionProblem baird(const ProblemOptions& options) {
  constexpr int n = 7;
  MdpBuilder b(n, 2);
  b.start(Vec::Constant(n, 1.0 / n));
  for (int s = 0; s < n; ++s) {
    for (int next = 0; next < 6; ++next) b.add(s, 0, next, 1.0 / 6.0, 0.0, kDiscount);
    b.add(s, 1, 6, 1.0, 0.0, kDiscount);
  }
  Mat x = Mat::Zero(n, 8);
  for (int s = 0; s < 6; ++s) {
    x(s, s) = 2.0;
    x(s, 7) = 1.0;
  }
  x(6, 6) = 1.0;
  x(6, 7) = 2.0;
  Vec theta0 = Vec::Ones(8);
  theta0[6] = options.baird_lower_weight;
  return PredictionProblem::assemble("baird", b.build(), Policy::constant(n, {0.0, 1.0}),
                                     Policy::constant(n, {6.0 / 7.0, 1.0 / 7.0}), FeatureMap(std::move(x)),
                                     options.weighting, theta0);
}

}  // namespace rbe
