#include "rbe/problem.hpp"

#include "rbe/errors.hpp"

namespace rbe {

PredictionProblem PredictionProblem::assemble(std::string name, FiniteMdp mdp, Policy target,
                                              Policy behavior, FeatureMap features,
                                              Weighting weighting, std::optional<Vec> initial_theta,
                                              std::uint64_t feature_seed) {
  if (target.n_states() != mdp.n_states() || behavior.n_states() != mdp.n_states() ||
      target.n_actions() != mdp.n_actions() || behavior.n_actions() != mdp.n_actions()) {
    throw Error(name + ": policy shape does not match the MDP");
  }
  if (features.n_rows() != mdp.n_states()) {
    throw Error(name + ": feature rows do not match the number of states");
  }
  MarkovChain chain = induce_chain(mdp, target);
  if (weighting == Weighting::uniform) {
    chain.weighting = Vec::Constant(mdp.n_states(), 1.0 / mdp.n_states());
  } else {
    chain.weighting = stationary_weighting(mdp, behavior);
  }
  Vec v = rbe::true_values(chain);
  Vec theta0 = initial_theta.value_or(Vec::Zero(features.n_features()));
  if (theta0.size() != features.n_features()) throw Error(name + ": initial theta has the wrong length");
  return PredictionProblem{std::move(name), std::move(mdp),      std::move(target),
                           std::move(behavior), std::move(features), std::move(chain),
                           std::move(v),    std::move(theta0),   feature_seed};
}

double msve(const PredictionProblem& problem, const Vec& theta) {
  const Vec diff = problem.x() * theta - problem.true_values;
  return problem.d().dot(diff.cwiseAbs2());
}

double mave(const PredictionProblem& problem, const Vec& theta) {
  const Vec diff = problem.x() * theta - problem.true_values;
  return problem.d().dot(diff.cwiseAbs());
}

}  // namespace rbe
