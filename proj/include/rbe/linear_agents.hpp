#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "rbe/problem.hpp"
#include "rbe/run_record.hpp"

namespace rbe {

enum class Family { td, gtd2, tdc };
enum class Transform { identity, clip, sign };

/// Weights and stepsizes of one linear agent.
struct AgentParams {
  Vec theta;
  Vec theta_h;
  double alpha_v = 0.0;
  double alpha_h = 0.0;
  double tau = 1.0;
  Transform transform = Transform::identity;
  Family family = Family::gtd2;
};

struct Transition {
  int s;
  int a;
  double r;
  int next;
  double gamma;  // discount on this transition, 0 on termination
  double rho;    // pi(a|s) / b(a|s)
};

/// Divergence threshold on any weight magnitude.
inline constexpr double kDivergenceThreshold = 1e8;

double td_error(const AgentParams& params, const Transition& t, const Vec& x, const Vec& x_next);
/// transform(theta_h^T x).
double secondary_value(const AgentParams& params, const Vec& x);

/// theta_h += alpha_h (rho delta - theta_h^T x) x.
void step_h(AgentParams& params, double rho, double delta, const Vec& x);
/// theta += alpha_v h (x - rho gamma x').
void step_primary_gtd2(AgentParams& params, const Transition& t, double h, const Vec& x, const Vec& x_next);
/// theta += alpha_v rho (delta x - gamma h x').
void step_primary_tdc(AgentParams& params, const Transition& t, double delta, double h, const Vec& x,
                      const Vec& x_next);
/// theta += alpha_v rho delta x.
void step_primary_td(AgentParams& params, const Transition& t, double delta, const Vec& x);

/// One full agent step on a transition: primary and secondary updates both
/// use the weights from before the step. Throws DivergenceError when a
/// weight exceeds the threshold or becomes non-finite.
void agent_step(AgentParams& params, const Transition& t, const Vec& x, const Vec& x_next);

/// An algorithm name plus stepsizes.
///   td, gtd2, gtd2_huber, gtd2_abs, tdc, tdc_huber, tdc_abs
struct AgentConfig {
  Family family = Family::gtd2;
  Transform transform = Transform::identity;
  double alpha = 0.01;
  double eta = 1.0;  // alpha_h = eta * alpha
  double tau = 1.0;

  static AgentConfig from_name(std::string_view name, double alpha, double eta = 1.0, double tau = 1.0);
  std::string name() const;
  AgentParams initial_params(const PredictionProblem& problem) const;
};

const std::vector<std::string>& linear_agent_names();

/// Exact ||sum_s d(s) x(s) (transform(h*(s)) - u(s))||_inf at theta, where
/// h* is the d-weighted least-squares projection of the Bellman error onto
/// the value features.
double correction_bias_diagnostic(const PredictionProblem& problem, const Vec& theta, double tau,
                                  Transform transform = Transform::clip);

/// sum over states with |h*(s)| > tau of
///   d(s) E_pi[|tau sign(h*(s)) - delta| | s] ||x(s)||_inf.
double correction_bias_bound(const PredictionProblem& problem, const Vec& theta, double tau);

/// Samples transitions with the behavior policy and applies agent_step
/// each step. MSVE and MAVE are logged every logging_interval(n_steps)
/// steps, including step 0. Divergence truncates the traces.
RunRecord run_prediction(const PredictionProblem& problem, const AgentConfig& config, long n_steps,
                         std::uint64_t seed);

}  // namespace rbe
