#include "rbe/fixed_point.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "rbe/errors.hpp"

namespace rbe {

void SolverConfig::validate() const {
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) ||
      !(iterate_average_beta >= 0.0 && iterate_average_beta < 1.0)) {
    throw Error("solver betas must lie in [0, 1)");
  }
  if (!(grad_norm_tol > 0.0) || !(adam_eps > 0.0) || !(step_scale > 0.0)) {
    throw Error("solver tolerances and step scale must be positive");
  }
  if (max_iters < 0) throw Error("max_iters must be non-negative");
}

long SolverConfig::resolved_max_iters(ErrorKind kind) const {
  if (max_iters > 0) return max_iters;
  return kind == ErrorKind::abs ? 2'000'000 : 200'000;
}

AdamResult minimize_adam(const GradientFn& gradient, const Vec& theta0, const SolverConfig& config,
                         long max_iters) {
  config.validate();
  const Eigen::Index k = theta0.size();
  Vec theta = theta0;
  Vec average = theta0;
  Vec m = Vec::Zero(k);
  Vec v = Vec::Zero(k);
  double beta1_power = 1.0;
  double beta2_power = 1.0;

  AdamResult result;
  Vec g = gradient(average);
  result.grad_norm = g.norm();
  if (result.grad_norm < config.grad_norm_tol) {
    result.theta = average;
    result.converged = true;
    return result;
  }
  for (long t = 1; t <= max_iters; ++t) {
    if (t > 1) g = gradient(theta);
    m = config.adam_beta1 * m + (1.0 - config.adam_beta1) * g;
    v = config.adam_beta2 * v + (1.0 - config.adam_beta2) * g.cwiseAbs2();
    beta1_power *= config.adam_beta1;
    beta2_power *= config.adam_beta2;
    const double alpha = config.step_scale / std::sqrt(static_cast<double>(t));
    const Vec m_hat = m / (1.0 - beta1_power);
    const Vec v_hat = v / (1.0 - beta2_power);
    theta.array() -= alpha * m_hat.array() / (v_hat.array().sqrt() + config.adam_eps);
    average = config.iterate_average_beta * average + (1.0 - config.iterate_average_beta) * theta;

    result.iterations = t;
    if (!theta.allFinite()) {
      result.theta = average;
      result.grad_norm = std::numeric_limits<double>::infinity();
      return result;
    }
    const Vec g_avg = gradient(average);
    result.grad_norm = g_avg.norm();
    if (result.grad_norm < config.grad_norm_tol) {
      result.converged = true;
      break;
    }
  }
  result.theta = average;
  return result;
}

Vec exact_gradient(const ObjectiveEvaluator& evaluator, const Vec& theta) {
  const Vec h = evaluator.h(theta);
  const double c = evaluator.spec().kind == ErrorKind::abs ? 1.0 : 2.0;
  return c * (evaluator.residual_jacobian().transpose() * evaluator.d().cwiseProduct(h));
}

Vec exact_gradient(const PredictionProblem& problem, const ObjectiveSpec& spec, const Vec& theta) {
  return exact_gradient(make_evaluator(problem, spec), theta);
}

namespace {

// (X^T D X)^{-1} X^T D y with a ridge fallback for rank-deficient features.
Vec weighted_least_squares(const Mat& x, const Vec& d, const Vec& y) {
  const Mat xtd = x.transpose() * d.asDiagonal();
  Mat gram = xtd * x;
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram, Eigen::EigenvaluesOnly);
  const double largest = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (eig.eigenvalues().minCoeff() <= 1e-12 * std::max(largest, 1.0)) {
    log_warning("value features are rank deficient under d; adding a 1e-8 ridge");
    gram.diagonal().array() += 1e-8;
  }
  return gram.ldlt().solve(xtd * y);
}

}  // namespace

Representable best_representable(const PredictionProblem& problem, ValueMetric metric,
                                 const SolverConfig& config) {
  const Mat& x = problem.x();
  const Vec& d = problem.d();
  const Vec& v = problem.true_values;
  Vec theta = weighted_least_squares(x, d, v);
  if (metric == ValueMetric::msve) return {theta, msve(problem, theta)};

  // Start the LAD solve from zero like every other solve; keep whichever of
  // the ADAM result and the least-squares point is better.
  const Mat xtd = x.transpose() * d.asDiagonal();
  GradientFn grad = [&](const Vec& w) -> Vec {
    const Vec residual = x * w - v;
    return xtd * residual.unaryExpr([](double r) { return sign0(r); });
  };
  const AdamResult lad = minimize_adam(grad, Vec::Zero(x.cols()), config,
                                       config.resolved_max_iters(ErrorKind::abs));
  const double lad_error = mave(problem, lad.theta);
  const double ls_error = mave(problem, theta);
  if (ls_error < lad_error) return {theta, ls_error};
  return {lad.theta, lad_error};
}

Baseline representable_baseline(const PredictionProblem& problem, const SolverConfig& config) {
  return {best_representable(problem, ValueMetric::msve, config).error,
          best_representable(problem, ValueMetric::mave, config).error};
}

FixedPointResult solve_fixed_point(const PredictionProblem& problem, const ObjectiveSpec& spec,
                                   const SolverConfig& config, const Baseline* baseline) {
  const ObjectiveEvaluator evaluator = make_evaluator(problem, spec);
  GradientFn grad = [&](const Vec& theta) { return exact_gradient(evaluator, theta); };
  const AdamResult solve = minimize_adam(grad, Vec::Zero(problem.n_features()), config,
                                         config.resolved_max_iters(spec.kind));

  FixedPointResult result;
  result.problem = problem.name;
  result.spec = spec;
  result.theta = solve.theta;
  result.grad_norm = solve.grad_norm;
  result.iterations = solve.iterations;
  result.converged = solve.converged;
  result.objective = evaluator.value(solve.theta);
  result.msve = msve(problem, solve.theta);
  result.mave = mave(problem, solve.theta);
  const Baseline base = baseline ? *baseline : representable_baseline(problem, config);
  result.msve_rel = result.msve - base.msve;
  result.mave_rel = result.mave - base.mave;
  return result;
}

Vec td_fixed_point(const PredictionProblem& problem) {
  const Mat& x = problem.x();
  const Mat xtd = x.transpose() * problem.d().asDiagonal();
  const Mat a = xtd * (x - problem.chain.discounted_transition * x);
  const Vec b = xtd * problem.chain.reward;
  Eigen::FullPivLU<Mat> lu(a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw SingularSystemError(problem.name + ": TD fixed-point matrix A is singular (rank " +
                              std::to_string(lu.rank()) + " of " + std::to_string(a.rows()) + ")");
  }
  return lu.solve(b);
}

Vec msbe_least_squares(const PredictionProblem& problem) {
  const Mat& x = problem.x();
  const Mat m = problem.chain.discounted_transition * x - x;
  const Vec sqrt_d = problem.d().cwiseSqrt();
  const Mat a = sqrt_d.asDiagonal() * m;
  const Vec b = -(sqrt_d.asDiagonal() * problem.chain.reward);
  return a.completeOrthogonalDecomposition().solve(b);
}

void write_fixed_point_csv(std::ostream& out, const std::vector<FixedPointResult>& rows, bool header) {
  if (header) {
    out << "problem,objective,h_class,tau,beta,augment_seed,msve,mave,msve_rel,mave_rel,objective_value,"
           "grad_norm,iterations,converged\n";
  }
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%.17g,%.17g,%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%ld,%d\n",
                  r.problem.c_str(), to_string(r.spec.kind).c_str(), to_string(r.spec.h_class).c_str(),
                  r.spec.tau, r.spec.beta,
                  static_cast<unsigned long long>(r.spec.augment_seed), r.msve, r.mave, r.msve_rel, r.mave_rel, r.objective,
                  r.grad_norm, r.iterations, r.converged ? 1 : 0);
    out << buf;
  }
}

}  // namespace rbe
