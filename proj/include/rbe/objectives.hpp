#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rbe/problem.hpp"

namespace rbe {

enum class ErrorKind { square, abs, huber };
enum class HClass { all_functions, v_features, augmented_features };

ErrorKind parse_error_kind(std::string_view name);
HClass parse_h_class(std::string_view name);
std::string to_string(ErrorKind kind);
std::string to_string(HClass h_class);

/// Which Bellman error to evaluate and how the auxiliary h is restricted.
struct ObjectiveSpec {
  ErrorKind kind = ErrorKind::square;
  double tau = 1.0;           // huber only
  HClass h_class = HClass::all_functions;
  double beta = 0.0;          // l2 regularizer on the h fit (TDRC-style surface)
  int n_extra_features = 5;   // augmented_features only
  std::uint64_t augment_seed = 0;

  void validate() const;
  // e.g. "MSBE", "MHPBE", "MAPBE+aug"
  std::string name() const;
};

/// p_tau(a) = a^2 for |a| <= tau, 2 tau |a| - tau^2 otherwise.
double huber(double tau, double a);
double clip(double tau, double x);
/// sign with sign(0) = 0.
double sign0(double x);
/// f(a) for the given error kind (square, |a|, huber).
double error_function(ErrorKind kind, double tau, double a);

/// The maximand of the saddle form of f at a fixed h:
///   square, huber : 2 x h - h^2
///   abs           : x h
/// h must lie in the kind's feasible set (R, [-tau, tau], [-1, 1]).
double biconjugate_value(ErrorKind kind, double tau, double x, double h);

/// Exact evaluation of one objective on one problem. Everything that does
/// not depend on theta (M = (P_{pi,gamma} - I) X, the h-feature Gram matrix)
/// is computed once.
class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(const MarkovChain& chain_with_d, const Mat& v_features,
                     const Mat& h_features, ObjectiveSpec spec);

  const ObjectiveSpec& spec() const { return spec_; }
  const Vec& d() const { return d_; }
  // u(theta) = r_pi + M theta
  const Mat& residual_jacobian() const { return m_; }
  int n_parameters() const { return static_cast<int>(m_.cols()); }

  Vec bellman_error(const Vec& theta) const { return r_ + m_ * theta; }
  // Weighted least-squares fit of u onto the h features (or u itself for
  // all_functions), before the kind's transform.
  Vec fit(const Vec& u) const;
  // fit followed by identity / clip / sign.
  Vec h_from_bellman_error(const Vec& u) const;
  Vec h(const Vec& theta) const { return h_from_bellman_error(bellman_error(theta)); }

  // sum_s d(s) f(u(s)); unprojected regardless of h_class.
  double unprojected_value(const Vec& theta) const;
  // sum_s d(s) (2 u h - h^2), or sum_s d(s) u h for abs.
  double saddle_value(const Vec& theta) const;
  // unprojected_value for all_functions without regularization, saddle_value otherwise.
  double value(const Vec& theta) const;

 private:
  ObjectiveSpec spec_;
  Vec r_;
  Mat m_;
  Vec d_;
  Mat h_features_;
  Mat weighted_h_features_t_;  // X_h^T D
  Eigen::LDLT<Mat> gram_;
};

/// h features for the spec's class: X itself, or X augmented with extra
/// ReLU features. Unused for all_functions.
Mat h_features_for(const PredictionProblem& problem, const ObjectiveSpec& spec);
ObjectiveEvaluator make_evaluator(const PredictionProblem& problem, const ObjectiveSpec& spec);

double exact_objective(const MarkovChain& chain_with_d, const Mat& v_features, const Mat& h_features,
                       const Vec& theta, const ObjectiveSpec& spec);
Vec projected_h_star(const MarkovChain& chain_with_d, const Mat& v_features, const Mat& h_features,
                     const Vec& theta, const ObjectiveSpec& spec);
double projected_objective(const MarkovChain& chain_with_d, const Mat& v_features,
                           const Mat& h_features, const Vec& theta, const ObjectiveSpec& spec);
/// h = X w with (sum_s d x x^T + beta I) w = sum_s d x u.
Vec tdrc_surface_h(const MarkovChain& chain_with_d, const Mat& features, const Vec& theta, double beta);

struct GridAxis {
  int index;  // which component of theta varies
  double lo;
  double hi;
  int n;
};

/// 1-D or 2-D slice through parameter space around `base`.
struct SurfaceGrid {
  Vec base;
  std::vector<GridAxis> axes;

  // "index:lo:hi:n[,index:lo:hi:n]"
  static SurfaceGrid parse(std::string_view spec, Vec base);
  std::vector<Vec> points() const;
};

struct LossSurface {
  std::string objective;
  std::vector<int> axes;  // varied components
  std::vector<Vec> points;
  std::vector<double> values;

  std::size_t argmin() const;
};

LossSurface sample_loss_surface(const PredictionProblem& problem, const ObjectiveSpec& spec,
                                const SurfaceGrid& grid);
/// Columns theta_<i> for each varied axis, then value, objective.
void write_surface_csv(std::ostream& out, const LossSurface& surface, bool header = true);

}  // namespace rbe
