#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rbe/control_envs.hpp"
#include "rbe/mlp.hpp"
#include "rbe/rng.hpp"
#include "rbe/run_record.hpp"

namespace rbe {

enum class ControlAlgorithm { qrc, qrc_huber, dqn };

ControlAlgorithm parse_control_algorithm(std::string_view name);
std::string to_string(ControlAlgorithm algorithm);

struct ControlConfig {
  ControlAlgorithm algorithm = ControlAlgorithm::qrc_huber;
  double alpha = 1e-3;
  double tau = 1.0;
  double beta = 1.0;
  double epsilon = 0.1;
  double gamma = 0.99;
  int target_refresh = 1;  // 1 = no target network
  std::vector<int> hidden = {32, 32};
  int buffer_capacity = 4000;
  int batch_size = 32;

  /// Per-environment defaults: 64x64 on cart_pole, tau = 2 on mountain_car.
  static ControlConfig defaults_for(std::string_view env, ControlAlgorithm algorithm, double alpha);
  void validate() const;
};

/// Fixed-capacity ring of transitions. Sampling is uniform with
/// replacement over the filled part.
class ReplayBuffer {
 public:
  ReplayBuffer(int capacity, int observation_dim);

  void add(const Vec& obs, int action, double reward, const Vec& next_obs, double discount);
  int size() const { return size_; }
  int capacity() const { return capacity_; }

  struct Batch {
    Mat obs;       // dim x batch
    Mat next_obs;  // dim x batch
    std::vector<int> actions;
    Vec rewards;
    Vec discounts;
    std::vector<int> indices;
  };
  void sample(int batch_size, Rng& rng, Batch& batch) const;

 private:
  int capacity_;
  int size_ = 0;
  int next_ = 0;
  Mat obs_;
  Mat next_obs_;
  std::vector<int> actions_;
  Vec rewards_;
  Vec discounts_;
};

/// Index of the largest entry; ties broken uniformly with rng.
int argmax_random_ties(const Eigen::Ref<const Vec>& values, Rng& rng);

struct UpdateStats {
  double mean_delta = 0.0;
  double mean_abs_delta = 0.0;
};

/// One QRC / QRC-Huber step on a batch. The trunk and q head follow
///   delta grad q(s,a) - gamma' h(s,a) grad q(s', a*)
/// with h = h~ (qrc) or clip_tau(h~) (qrc_huber) and a* the greedy action of
/// the bootstrap net at s'. The h head follows (delta - h~) grad h~ - beta w_h.
/// `bootstrap` supplies max_a q(s', a); pass the online net when there is
/// no target network. Throws DivergenceError on non-finite values.
UpdateStats qrc_update(Mlp& online, const Mlp& bootstrap, const ReplayBuffer::Batch& batch,
                       const ControlConfig& config, Adam& adam, Rng& rng);

/// Semi-gradient step on mean 0.5 p_tau(y - q(s,a)) with
/// y = r + gamma' max_a q_target(s', a); the gradient through q(s,a) is
/// -clip_tau(delta).
UpdateStats dqn_update(Mlp& online, const Mlp& target, const ReplayBuffer::Batch& batch,
                       const ControlConfig& config, Adam& adam);

/// epsilon-greedy interaction with one mini-batch update per step once the
/// buffer holds a batch. Cutoff transitions are not stored. The "return"
/// trace holds, per logging bin, the mean over steps of the return of the
/// episode each step belongs to.
RunRecord run_control(std::string_view env_name, const ControlConfig& config, long n_steps,
                      std::uint64_t seed);

}  // namespace rbe
