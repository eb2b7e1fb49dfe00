#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rbe/objectives.hpp"

namespace rbe {

/// ADAM on exact expected gradients with a 1/sqrt(t) stepsize and an
/// exponential average of the iterates.
struct SolverConfig {
  double adam_beta1 = 0.99;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double iterate_average_beta = 0.9;
  double step_scale = 1.0;  // alpha_t = step_scale / sqrt(t)
  double grad_norm_tol = 1e-7;
  long max_iters = 0;       // 0 picks 2,000,000 for abs objectives and 200,000 otherwise

  void validate() const;
  long resolved_max_iters(ErrorKind kind) const;
};

struct AdamResult {
  Vec theta;  // the averaged iterate
  double grad_norm = 0.0;
  long iterations = 0;
  bool converged = false;
};

using GradientFn = std::function<Vec(const Vec&)>;

/// Minimizes with the config's ADAM recursion. The stopping test is the
/// gradient norm at the averaged iterate.
AdamResult minimize_adam(const GradientFn& gradient, const Vec& theta0, const SolverConfig& config,
                         long max_iters);

/// c * M^T (d . h) with h the best response at theta (c = 2 for square and
/// huber, 1 for abs), i.e. the gradient of the saddle form with h held fixed.
Vec exact_gradient(const ObjectiveEvaluator& evaluator, const Vec& theta);
Vec exact_gradient(const PredictionProblem& problem, const ObjectiveSpec& spec, const Vec& theta);

enum class ValueMetric { msve, mave };

struct Representable {
  Vec theta;
  double error = 0.0;
};

/// Best value function in the span of the features under MSVE (weighted
/// least squares) or MAVE (weighted least absolute deviations via ADAM).
Representable best_representable(const PredictionProblem& problem, ValueMetric metric,
                                 const SolverConfig& config = {});

struct Baseline {
  double msve = 0.0;
  double mave = 0.0;
};
Baseline representable_baseline(const PredictionProblem& problem, const SolverConfig& config = {});

struct FixedPointResult {
  std::string problem;
  ObjectiveSpec spec;
  Vec theta;
  double grad_norm = 0.0;
  long iterations = 0;
  bool converged = false;
  double objective = 0.0;
  double msve = 0.0;
  double mave = 0.0;
  double msve_rel = 0.0;  // msve - best representable msve
  double mave_rel = 0.0;
};

/// Minimizer of the objective from theta = 0. Unconverged solves are
/// returned with converged = false.
FixedPointResult solve_fixed_point(const PredictionProblem& problem, const ObjectiveSpec& spec,
                                   const SolverConfig& config = {},
                                   const Baseline* baseline = nullptr);

/// Solves A theta = b with A = X^T D (X - P_{pi,gamma} X), b = X^T D r_pi.
/// Throws SingularSystemError when A is singular.
Vec td_fixed_point(const PredictionProblem& problem);

/// Minimum-norm minimizer of the MSBE from the normal equations.
Vec msbe_least_squares(const PredictionProblem& problem);

/// problem,objective,h_class,tau,beta,augment_seed,msve,mave,msve_rel,mave_rel,objective_value,grad_norm,iterations,converged
void write_fixed_point_csv(std::ostream& out, const std::vector<FixedPointResult>& rows,
                           bool header = true);

}  // namespace rbe
