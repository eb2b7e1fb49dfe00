#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace rbe {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Finite MDP with transition-dependent discounts.
///
/// Every tensor is indexed [s][a][s']. Termination is encoded as a discount
/// of zero on the terminating transition; terminal states are never
/// materialized. Builders route terminating transitions to the start
/// distribution, so each row of P sums to one and the behavior chain is
/// recurrent under continual restarts.
class FiniteMdp {
 public:
  FiniteMdp(int n_states, int n_actions, std::vector<double> transition,
            std::vector<double> reward, std::vector<double> discount,
            Vec start_distribution);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }

  double prob(int s, int a, int next) const { return transition_[index(s, a, next)]; }
  double reward(int s, int a, int next) const { return reward_[index(s, a, next)]; }
  double discount(int s, int a, int next) const { return discount_[index(s, a, next)]; }
  const Vec& start_distribution() const { return start_; }

 private:
  std::size_t index(int s, int a, int next) const {
    return (static_cast<std::size_t>(s) * n_actions_ + a) * n_states_ + next;
  }

  int n_states_;
  int n_actions_;
  std::vector<double> transition_;
  std::vector<double> reward_;
  std::vector<double> discount_;
  Vec start_;
};

/// Accumulates transitions one outcome at a time.
class MdpBuilder {
 public:
  MdpBuilder(int n_states, int n_actions);

  // Adds probability mass p for (s, a) -> next. Repeated outcomes merge;
  // merging outcomes with different reward or discount is an error.
  MdpBuilder& add(int s, int a, int next, double p, double reward, double discount);
  // Terminating outcome: restarts from the start distribution with discount 0.
  MdpBuilder& terminate(int s, int a, double p, double reward);
  MdpBuilder& start(Vec distribution);

  FiniteMdp build() const;

 private:
  std::size_t index(int s, int a, int next) const {
    return (static_cast<std::size_t>(s) * n_actions_ + a) * n_states_ + next;
  }

  int n_states_;
  int n_actions_;
  std::vector<double> transition_;
  std::vector<double> reward_;
  std::vector<double> discount_;
  std::vector<bool> touched_;
  std::optional<Vec> start_;
};

/// Row-stochastic action probabilities pi[s][a].
struct Policy {
  Mat probs;

  explicit Policy(Mat probabilities);
  static Policy uniform(int n_states, int n_actions);
  // Same action distribution in every state.
  static Policy constant(int n_states, const std::vector<double>& row);

  int n_states() const { return static_cast<int>(probs.rows()); }
  int n_actions() const { return static_cast<int>(probs.cols()); }
};

/// State-to-state quantities of an MDP under a fixed policy.
struct MarkovChain {
  Mat transition;            // P_pi
  Mat discounted_transition; // P_{pi,gamma}, substochastic
  Vec reward;                // r_pi
  std::optional<Vec> weighting;  // d

  int n_states() const { return static_cast<int>(reward.size()); }
  const Vec& d() const;
};

MarkovChain induce_chain(const FiniteMdp& mdp, const Policy& policy);

/// Exact v_pi = (I - P_{pi,gamma})^{-1} r_pi by LU decomposition.
Vec true_values(const MarkovChain& chain);

/// (I - P_{pi,gamma})^{-1}.
Mat resolvent(const MarkovChain& chain);

struct StationaryOptions {
  std::optional<Vec> initial;   // defaults to the start distribution
  int max_iterations = 1'000'000;
  double tolerance = 1e-13;
};

/// Stationary distribution of the behavior chain (terminations already
/// restart through the start distribution). Power iteration on the lazy
/// chain (P + I) / 2, which shares the stationary distribution of P and is
/// aperiodic.
Vec stationary_weighting(const FiniteMdp& mdp, const Policy& behavior,
                         const StationaryOptions& options = {});

/// u = r_pi + P_{pi,gamma} v - v, the expected TD error in every state.
Vec bellman_error_vector(const MarkovChain& chain, const Vec& v);

/// Induced 1-norm: maximum absolute column sum.
double induced_l1_norm(const Mat& m);

}  // namespace rbe
