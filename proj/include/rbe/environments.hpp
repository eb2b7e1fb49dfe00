#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rbe/problem.hpp"

namespace rbe {

struct ProblemOptions {
  Weighting weighting = Weighting::behavior_stationary;
  // HardAlias-2: probability of staying in the second state.
  double stay_probability = 0.99;
  // Seed of the frozen feature network (chains and Outlier).
  std::uint64_t feature_seed = 0;
  // Baird: initial weight on the lower state's own feature. 10 gives the
  // textbook start; every other weight starts at 1.
  double baird_lower_weight = 1.0;
};

inline constexpr double kDiscount = 0.99;

/// small_chain, big_chain, hard_alias_1, hard_alias_2, outlier, baird.
const std::vector<std::string>& prediction_problem_names();

PredictionProblem make_prediction_problem(std::string_view name, const ProblemOptions& options = {});

// Individual constructors.
PredictionProblem random_walk_chain(std::string name, int n_states, const ProblemOptions& options);
PredictionProblem hard_alias_1(const ProblemOptions& options);
PredictionProblem hard_alias_2(const ProblemOptions& options);
PredictionProblem outlier(const ProblemOptions& options);
PredictionProblem baird(const ProblemOptions& options);

}  // namespace rbe
