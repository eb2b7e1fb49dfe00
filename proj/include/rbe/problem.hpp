#pragma once

#include <cstdint>
#include <string>

#include "rbe/features.hpp"
#include "rbe/mdp.hpp"

namespace rbe {

enum class Weighting { behavior_stationary, uniform };

/// A linear off-policy prediction problem with everything needed for exact
/// evaluation precomputed: the target-policy chain carrying the weighting d,
/// and the true values v_pi.
struct PredictionProblem {
  std::string name;
  FiniteMdp mdp;
  Policy target;
  Policy behavior;
  FeatureMap features;
  MarkovChain chain;  // under the target policy, weighting set
  Vec true_values;
  Vec initial_theta;
  std::uint64_t feature_seed = 0;

  static PredictionProblem assemble(std::string name, FiniteMdp mdp, Policy target, Policy behavior,
                                    FeatureMap features, Weighting weighting,
                                    std::optional<Vec> initial_theta = std::nullopt,
                                    std::uint64_t feature_seed = 0);

  const Vec& d() const { return chain.d(); }
  int n_states() const { return mdp.n_states(); }
  int n_features() const { return features.n_features(); }
  const Mat& x() const { return features.matrix; }
};

double msve(const PredictionProblem& problem, const Vec& theta);
double mave(const PredictionProblem& problem, const Vec& theta);

}  // namespace rbe
