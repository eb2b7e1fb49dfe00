#include "rbe/mdp.hpp"

#include <cmath>
#include <sstream>

#include "rbe/errors.hpp"

namespace rbe {

namespace {

constexpr double kSumTolerance = 1e-12;

void check_distribution(const Vec& p, double tol, const char* what) {
  if ((p.array() < 0.0).any()) {
    throw Error(std::string(what) + " has negative entries");
  }
  if (std::abs(p.sum() - 1.0) > tol) {
    std::ostringstream os;
    os << what << " sums to " << p.sum() << ", expected 1";
    throw Error(os.str());
  }
}

}  // namespace

FiniteMdp::FiniteMdp(int n_states, int n_actions, std::vector<double> transition_tensor,
                     std::vector<double> reward_tensor, std::vector<double> discount_tensor,
                     Vec start_distribution)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition_tensor)),
      reward_(std::move(reward_tensor)),
      discount_(std::move(discount_tensor)),
      start_(std::move(start_distribution)) {
  if (n_states_ < 1 || n_actions_ < 1) throw Error("MDP needs at least one state and one action");
  const std::size_t size = static_cast<std::size_t>(n_states_) * n_actions_ * n_states_;
  if (transition_.size() != size || reward_.size() != size || discount_.size() != size) {
    throw Error("MDP tensor sizes do not match n_states x n_actions x n_states");
  }
  if (start_.size() != n_states_) throw Error("start distribution has the wrong length");
  check_distribution(start_, kSumTolerance, "start distribution");

  for (int s = 0; s < n_states_; ++s) {
    for (int a = 0; a < n_actions_; ++a) {
      double total = 0.0;
      for (int next = 0; next < n_states_; ++next) {
        const double p = prob(s, a, next);
        const double g = discount(s, a, next);
        if (p < 0.0) throw Error("negative transition probability");
        if (!(g >= 0.0 && g <= 1.0)) throw Error("discount outside [0, 1]");
        if (!std::isfinite(reward(s, a, next))) throw Error("non-finite reward");
        total += p;
      }
      if (std::abs(total - 1.0) > kSumTolerance) {
        std::ostringstream os;
        os << "transition probabilities for (s=" << s << ", a=" << a << ") sum to " << total;
        throw Error(os.str());
      }
    }
  }
}

MdpBuilder::MdpBuilder(int n_states, int n_actions)
    : n_states_(n_states), n_actions_(n_actions) {
  if (n_states < 1 || n_actions < 1) throw Error("MDP needs at least one state and one action");
  const std::size_t size = static_cast<std::size_t>(n_states) * n_actions * n_states;
  transition_.assign(size, 0.0);
  reward_.assign(size, 0.0);
  discount_.assign(size, 0.0);
  touched_.assign(size, false);
}

MdpBuilder& MdpBuilder::add(int s, int a, int next, double p, double reward, double discount) {
  if (s < 0 || s >= n_states_ || next < 0 || next >= n_states_ || a < 0 || a >= n_actions_) {
    throw Error("MdpBuilder::add index out of range");
  }
  if (p <= 0.0) return *this;
  const std::size_t i = index(s, a, next);
  if (touched_[i] && (reward_[i] != reward || discount_[i] != discount)) {
    std::ostringstream os;
    os << "conflicting outcomes for (s=" << s << ", a=" << a << ", next=" << next
       << "): rewards or discounts differ";
    throw Error(os.str());
  }
  touched_[i] = true;
  transition_[i] += p;
  reward_[i] = reward;
  discount_[i] = discount;
  return *this;
}

MdpBuilder& MdpBuilder::terminate(int s, int a, double p, double reward) {
  if (!start_) throw Error("MdpBuilder::terminate requires the start distribution first");
  for (int next = 0; next < n_states_; ++next) {
    add(s, a, next, p * (*start_)(next), reward, 0.0);
  }
  return *this;
}

MdpBuilder& MdpBuilder::start(Vec distribution) {
  if (distribution.size() != n_states_) throw Error("start distribution has the wrong length");
  start_ = std::move(distribution);
  return *this;
}

FiniteMdp MdpBuilder::build() const {
  if (!start_) throw Error("MdpBuilder: start distribution not set");
  return FiniteMdp(n_states_, n_actions_, transition_, reward_, discount_, *start_);
}

Policy::Policy(Mat probabilities) : probs(std::move(probabilities)) {
  if (probs.rows() < 1 || probs.cols() < 1) throw Error("empty policy");
  for (int s = 0; s < probs.rows(); ++s) {
    check_distribution(probs.row(s).transpose(), kSumTolerance, "policy row");
  }
}

Policy Policy::uniform(int n_states, int n_actions) {
  return Policy(Mat::Constant(n_states, n_actions, 1.0 / n_actions));
}

Policy Policy::constant(int n_states, const std::vector<double>& row) {
  Mat m(n_states, static_cast<int>(row.size()));
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < static_cast<int>(row.size()); ++a) m(s, a) = row[a];
  }
  return Policy(std::move(m));
}

const Vec& MarkovChain::d() const {
  if (!weighting) throw Error("Markov chain has no state weighting set");
  return *weighting;
}

MarkovChain induce_chain(const FiniteMdp& mdp, const Policy& policy) {
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions()) {
    throw Error("policy shape does not match the MDP");
  }
  const int n = mdp.n_states();
  MarkovChain chain;
  chain.transition = Mat::Zero(n, n);
  chain.discounted_transition = Mat::Zero(n, n);
  chain.reward = Vec::Zero(n);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const double pi = policy.probs(s, a);
      if (pi == 0.0) continue;
      for (int next = 0; next < n; ++next) {
        const double p = pi * mdp.prob(s, a, next);
        chain.transition(s, next) += p;
        chain.discounted_transition(s, next) += p * mdp.discount(s, a, next);
        chain.reward(s) += p * mdp.reward(s, a, next);
      }
    }
  }
  return chain;
}

namespace {

Eigen::PartialPivLU<Mat> factor_resolvent(const MarkovChain& chain) {
  const int n = chain.n_states();
  const Mat a = Mat::Identity(n, n) - chain.discounted_transition;
  Eigen::FullPivLU<Mat> check(a);
  if (!check.isInvertible()) {
    throw SingularSystemError(
        "I - P_{pi,gamma} is singular: the discounted transition matrix has spectral "
        "radius 1 (some recurrent class never terminates and is undiscounted)");
  }
  return Eigen::PartialPivLU<Mat>(a);
}

}  // namespace

Vec true_values(const MarkovChain& chain) {
  const auto lu = factor_resolvent(chain);
  Vec v = lu.solve(chain.reward);
  const int n = chain.n_states();
  const Vec residual = (Mat::Identity(n, n) - chain.discounted_transition) * v - chain.reward;
  if (residual.lpNorm<Eigen::Infinity>() >= 1e-10 * std::max(1.0, chain.reward.lpNorm<Eigen::Infinity>())) {
    // one step of iterative refinement
    v -= lu.solve(residual);
  }
  return v;
}

Mat resolvent(const MarkovChain& chain) {
  const int n = chain.n_states();
  return factor_resolvent(chain).solve(Mat::Identity(n, n));
}

Vec stationary_weighting(const FiniteMdp& mdp, const Policy& behavior,
                         const StationaryOptions& options) {
  const MarkovChain chain = induce_chain(mdp, behavior);
  const int n = chain.n_states();
  const Mat lazy_t = 0.5 * (chain.transition + Mat::Identity(n, n)).transpose();

  Vec d = options.initial ? *options.initial : mdp.start_distribution();
  if (d.size() != n) throw Error("initial weighting has the wrong length");
  if ((d.array() < 0.0).any() || d.sum() <= 0.0) throw Error("initial weighting must be a non-negative, non-zero vector");
  d /= d.sum();

  for (int it = 0; it < options.max_iterations; ++it) {
    Vec next = lazy_t * d;
    next /= next.sum();
    const double change = (next - d).lpNorm<1>();
    d = std::move(next);
    if (change < options.tolerance) {
      const double residual = (chain.transition.transpose() * d - d).lpNorm<1>();
      if (residual < 1e-10) return d;
    }
  }
  throw ConvergenceError("stationary_weighting: power iteration did not converge; "
                         "the behavior chain may not be ergodic");
}

Vec bellman_error_vector(const MarkovChain& chain, const Vec& v) {
  if (v.size() != chain.n_states()) throw Error("value vector has the wrong length");
  return chain.reward + chain.discounted_transition * v - v;
}

double induced_l1_norm(const Mat& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace rbe
