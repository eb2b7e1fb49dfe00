#include "rbe/objectives.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "rbe/errors.hpp"

namespace rbe {

ErrorKind parse_error_kind(std::string_view name) {
  if (name == "square" || name == "msbe") return ErrorKind::square;
  if (name == "abs" || name == "mabe") return ErrorKind::abs;
  if (name == "huber" || name == "mhbe") return ErrorKind::huber;
  throw Error("unknown error kind '" + std::string(name) + "' (square, abs, huber)");
}

HClass parse_h_class(std::string_view name) {
  if (name == "all_functions" || name == "all") return HClass::all_functions;
  if (name == "v_features" || name == "linear") return HClass::v_features;
  if (name == "augmented_features" || name == "augmented") return HClass::augmented_features;
  throw Error("unknown h class '" + std::string(name) +
              "' (all_functions, v_features, augmented_features)");
}

std::string to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::square: return "square";
    case ErrorKind::abs: return "abs";
    case ErrorKind::huber: return "huber";
  }
  return "?";
}

std::string to_string(HClass h_class) {
  switch (h_class) {
    case HClass::all_functions: return "all_functions";
    case HClass::v_features: return "v_features";
    case HClass::augmented_features: return "augmented_features";
  }
  return "?";
}

void ObjectiveSpec::validate() const {
  if (kind == ErrorKind::huber && !(tau > 0.0)) throw Error("huber objective needs tau > 0");
  if (!(beta >= 0.0)) throw Error("beta must be non-negative");
  if (h_class == HClass::all_functions && beta > 0.0) {
    throw Error("beta > 0 only applies to a parameterized h class");
  }
  if (h_class == HClass::augmented_features && n_extra_features < 0) {
    throw Error("n_extra_features must be non-negative");
  }
}

std::string ObjectiveSpec::name() const {
  const char* letter = kind == ErrorKind::square ? "S" : kind == ErrorKind::abs ? "A" : "H";
  std::string out = "M";
  out += letter;
  out += h_class == HClass::all_functions ? "BE" : "PBE";
  if (h_class == HClass::augmented_features) out += "+aug";
  if (beta > 0.0) out += "+reg";
  return out;
}

double huber(double tau, double a) {
  const double m = std::abs(a);
  return m <= tau ? a * a : 2.0 * tau * m - tau * tau;
}

double clip(double tau, double x) { return std::min(std::max(x, -tau), tau); }

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double error_function(ErrorKind kind, double tau, double a) {
  switch (kind) {
    case ErrorKind::square: return a * a;
    case ErrorKind::abs: return std::abs(a);
    case ErrorKind::huber: return huber(tau, a);
  }
  return 0.0;
}

double biconjugate_value(ErrorKind kind, double tau, double x, double h) {
  switch (kind) {
    case ErrorKind::square:
      return 2.0 * x * h - h * h;
    case ErrorKind::abs:
      if (std::abs(h) > 1.0) throw Error("abs biconjugate needs h in [-1, 1]");
      return x * h;
    case ErrorKind::huber:
      if (!(tau > 0.0)) throw Error("huber needs tau > 0");
      if (std::abs(h) > tau) throw Error("huber biconjugate needs h in [-tau, tau]");
      return 2.0 * x * h - h * h;
  }
  return 0.0;
}

ObjectiveEvaluator::ObjectiveEvaluator(const MarkovChain& chain_with_d, const Mat& v_features,
                                       const Mat& h_features, ObjectiveSpec spec)
    : spec_(spec), r_(chain_with_d.reward), d_(chain_with_d.d()) {
  spec_.validate();
  const int n = chain_with_d.n_states();
  if (v_features.rows() != n) throw Error("value features do not match the chain");
  m_ = chain_with_d.discounted_transition * v_features - v_features;
  if (spec_.h_class == HClass::all_functions) return;

  if (h_features.rows() != n) throw Error("h features do not match the chain");
  h_features_ = h_features;
  weighted_h_features_t_ = h_features.transpose() * d_.asDiagonal();
  Mat gram = weighted_h_features_t_ * h_features;
  if (spec_.beta > 0.0) {
    gram.diagonal().array() += spec_.beta;
  } else {
    Eigen::SelfAdjointEigenSolver<Mat> eig(gram, Eigen::EigenvaluesOnly);
    const double largest = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (eig.eigenvalues().minCoeff() <= 1e-12 * std::max(largest, 1.0)) {
      log_warning("h-feature Gram matrix is singular; adding a 1e-8 ridge");
      gram.diagonal().array() += 1e-8;
    }
  }
  gram_.compute(gram);
}

Vec ObjectiveEvaluator::fit(const Vec& u) const {
  if (spec_.h_class == HClass::all_functions) return u;
  const Vec w = gram_.solve(weighted_h_features_t_ * u);
  return h_features_ * w;
}

Vec ObjectiveEvaluator::h_from_bellman_error(const Vec& u) const {
  Vec h = fit(u);
  switch (spec_.kind) {
    case ErrorKind::square: break;
    case ErrorKind::huber: h = h.unaryExpr([&](double x) { return clip(spec_.tau, x); }); break;
    case ErrorKind::abs: h = h.unaryExpr([](double x) { return sign0(x); }); break;
  }
  return h;
}

double ObjectiveEvaluator::unprojected_value(const Vec& theta) const {
  const Vec u = bellman_error(theta);
  double total = 0.0;
  for (Eigen::Index s = 0; s < u.size(); ++s) {
    total += d_[s] * error_function(spec_.kind, spec_.tau, u[s]);
  }
  return total;
}

double ObjectiveEvaluator::saddle_value(const Vec& theta) const {
  const Vec u = bellman_error(theta);
  const Vec h = h_from_bellman_error(u);
  if (spec_.kind == ErrorKind::abs) return d_.dot(u.cwiseProduct(h));
  return d_.dot((2.0 * u - h).cwiseProduct(h));
}

double ObjectiveEvaluator::value(const Vec& theta) const {
  if (spec_.h_class == HClass::all_functions) return unprojected_value(theta);
  return saddle_value(theta);
}

Mat h_features_for(const PredictionProblem& problem, const ObjectiveSpec& spec) {
  switch (spec.h_class) {
    case HClass::all_functions: return Mat();
    case HClass::v_features: return problem.x();
    case HClass::augmented_features:
      return augmented_h_features(problem.features, spec.n_extra_features, spec.augment_seed).matrix;
  }
  return Mat();
}

ObjectiveEvaluator make_evaluator(const PredictionProblem& problem, const ObjectiveSpec& spec) {
  return ObjectiveEvaluator(problem.chain, problem.x(), h_features_for(problem, spec), spec);
}

double exact_objective(const MarkovChain& chain_with_d, const Mat& v_features, const Mat& h_features,
                       const Vec& theta, const ObjectiveSpec& spec) {
  return ObjectiveEvaluator(chain_with_d, v_features, h_features, spec).value(theta);
}

Vec projected_h_star(const MarkovChain& chain_with_d, const Mat& v_features, const Mat& h_features,
                     const Vec& theta, const ObjectiveSpec& spec) {
  return ObjectiveEvaluator(chain_with_d, v_features, h_features, spec).h(theta);
}

double projected_objective(const MarkovChain& chain_with_d, const Mat& v_features,
                           const Mat& h_features, const Vec& theta, const ObjectiveSpec& spec) {
  return ObjectiveEvaluator(chain_with_d, v_features, h_features, spec).saddle_value(theta);
}

Vec tdrc_surface_h(const MarkovChain& chain_with_d, const Mat& features, const Vec& theta, double beta) {
  if (!(beta > 0.0)) throw Error("tdrc_surface_h needs beta > 0");
  ObjectiveSpec spec;
  spec.kind = ErrorKind::square;
  spec.h_class = HClass::v_features;
  spec.beta = beta;
  return ObjectiveEvaluator(chain_with_d, features, features, spec).h(theta);
}

namespace {

template <typename T>
T parse_number(std::string_view text, const char* what) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(std::string("bad ") + what + " '" + std::string(text) + "' in grid spec");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

SurfaceGrid SurfaceGrid::parse(std::string_view spec, Vec base) {
  SurfaceGrid grid{std::move(base), {}};
  for (std::string_view axis_text : split(spec, ',')) {
    const auto fields = split(axis_text, ':');
    if (fields.size() != 4) throw Error("grid axis must look like index:lo:hi:n");
    GridAxis axis{parse_number<int>(fields[0], "index"), parse_number<double>(fields[1], "lo"),
                  parse_number<double>(fields[2], "hi"), parse_number<int>(fields[3], "n")};
    if (axis.index < 0 || axis.index >= grid.base.size()) throw Error("grid axis index out of range");
    if (axis.n < 1) throw Error("grid axis needs n >= 1");
    if (!(axis.hi >= axis.lo)) throw Error("grid axis needs hi >= lo");
    grid.axes.push_back(axis);
  }
  if (grid.axes.empty() || grid.axes.size() > 2) throw Error("grid must have one or two axes");
  if (grid.axes.size() == 2 && grid.axes[0].index == grid.axes[1].index) {
    throw Error("grid axes must vary different components");
  }
  return grid;
}

std::vector<Vec> SurfaceGrid::points() const {
  auto coordinate = [](const GridAxis& axis, int i) {
    if (axis.n == 1) return axis.lo;
    return axis.lo + (axis.hi - axis.lo) * static_cast<double>(i) / (axis.n - 1);
  };
  std::vector<Vec> out;
  const int n_outer = axes[0].n;
  const int n_inner = axes.size() > 1 ? axes[1].n : 1;
  out.reserve(static_cast<std::size_t>(n_outer) * n_inner);
  for (int i = 0; i < n_outer; ++i) {
    for (int j = 0; j < n_inner; ++j) {
      Vec p = base;
      p[axes[0].index] = coordinate(axes[0], i);
      if (axes.size() > 1) p[axes[1].index] = coordinate(axes[1], j);
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::size_t LossSurface::argmin() const {
  if (values.empty()) throw Error("empty loss surface");
  return static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
}

LossSurface sample_loss_surface(const PredictionProblem& problem, const ObjectiveSpec& spec,
                                const SurfaceGrid& grid) {
  const ObjectiveEvaluator evaluator = make_evaluator(problem, spec);
  LossSurface surface;
  surface.objective = spec.name();
  for (const auto& axis : grid.axes) surface.axes.push_back(axis.index);
  surface.points = grid.points();
  surface.values.reserve(surface.points.size());
  for (const Vec& p : surface.points) surface.values.push_back(evaluator.value(p));
  return surface;
}

void write_surface_csv(std::ostream& out, const LossSurface& surface, bool header) {
  if (header) {
    for (int axis : surface.axes) out << "theta_" << axis << ',';
    out << "value,objective\n";
  }
  char buf[32];
  for (std::size_t i = 0; i < surface.points.size(); ++i) {
    for (int axis : surface.axes) {
      std::snprintf(buf, sizeof buf, "%.17g", surface.points[i][axis]);
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", surface.values[i]);
    out << buf << ',' << surface.objective << '\n';
  }
}

}  // namespace rbe
