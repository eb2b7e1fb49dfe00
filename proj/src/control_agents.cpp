#include "rbe/control_agents.hpp"

#include <cmath>
#include <limits>

#include "rbe/errors.hpp"
#include "rbe/objectives.hpp"

namespace rbe {

ControlAlgorithm parse_control_algorithm(std::string_view name) {
  if (name == "qrc") return ControlAlgorithm::qrc;
  if (name == "qrc_huber") return ControlAlgorithm::qrc_huber;
  if (name == "dqn") return ControlAlgorithm::dqn;
  throw Error("unknown control algorithm '" + std::string(name) + "' (qrc, qrc_huber, dqn)");
}

std::string to_string(ControlAlgorithm algorithm) {
  switch (algorithm) {
    case ControlAlgorithm::qrc: return "qrc";
    case ControlAlgorithm::qrc_huber: return "qrc_huber";
    case ControlAlgorithm::dqn: return "dqn";
  }
  return "?";
}

ControlConfig ControlConfig::defaults_for(std::string_view env, ControlAlgorithm algorithm, double alpha) {
  ControlConfig c;
  c.algorithm = algorithm;
  c.alpha = alpha;
  if (env == "cart_pole") c.hidden = {64, 64};
  if (env == "mountain_car") c.tau = 2.0;
  return c;
}

void ControlConfig::validate() const {
  if (!(alpha > 0.0)) throw Error("control alpha must be positive");
  if (!(tau > 0.0)) throw Error("control tau must be positive");
  if (!(beta >= 0.0)) throw Error("control beta must be non-negative");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw Error("epsilon must be in [0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("gamma must be in [0, 1]");
  if (target_refresh < 1) throw Error("target_refresh must be >= 1");
  if (buffer_capacity < 1 || batch_size < 1) throw Error("buffer and batch sizes must be positive");
}

ReplayBuffer::ReplayBuffer(int capacity, int observation_dim)
    : capacity_(capacity),
      obs_(observation_dim, capacity),
      next_obs_(observation_dim, capacity),
      actions_(capacity),
      rewards_(capacity),
      discounts_(capacity) {
  if (capacity < 1) throw Error("replay capacity must be positive");
}

void ReplayBuffer::add(const Vec& obs, int action, double reward, const Vec& next_obs, double discount) {
  obs_.col(next_) = obs;
  next_obs_.col(next_) = next_obs;
  actions_[next_] = action;
  rewards_[next_] = reward;
  discounts_[next_] = discount;
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

void ReplayBuffer::sample(int batch_size, Rng& rng, Batch& batch) const {
  if (size_ == 0) throw Error("cannot sample from an empty replay buffer");
  batch.obs.resize(obs_.rows(), batch_size);
  batch.next_obs.resize(obs_.rows(), batch_size);
  batch.actions.resize(batch_size);
  batch.rewards.resize(batch_size);
  batch.discounts.resize(batch_size);
  batch.indices.resize(batch_size);
  for (int i = 0; i < batch_size; ++i) {
    const int j = static_cast<int>(rng.below(static_cast<std::size_t>(size_)));
    batch.indices[i] = j;
    batch.obs.col(i) = obs_.col(j);
    batch.next_obs.col(i) = next_obs_.col(j);
    batch.actions[i] = actions_[j];
    batch.rewards[i] = rewards_[j];
    batch.discounts[i] = discounts_[j];
  }
}

int argmax_random_ties(const Eigen::Ref<const Vec>& values, Rng& rng) {
  const double best = values.maxCoeff();
  int count = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) count += values[i] == best;
  if (count == 1) {
    Eigen::Index idx;
    values.maxCoeff(&idx);
    return static_cast<int>(idx);
  }
  std::size_t pick = rng.below(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] == best && pick-- == 0) return static_cast<int>(i);
  }
  return 0;
}

namespace {

void check_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw DivergenceError(std::string("non-finite ") + what);
}

}  // namespace

UpdateStats qrc_update(Mlp& online, const Mlp& bootstrap, const ReplayBuffer::Batch& batch,
                       const ControlConfig& config, Adam& adam, Rng& rng) {
  const int n = static_cast<int>(batch.actions.size());
  if (n == 0) throw Error("empty batch");
  const bool separate_target = &online != &bootstrap;

  Mlp::Cache here;
  Mlp::Cache there;
  online.forward(batch.obs, here);
  online.forward(batch.next_obs, there);
  Mat next_q_boot;
  if (separate_target) next_q_boot = bootstrap.q_values(batch.next_obs);
  const Mat& boot = separate_target ? next_q_boot : there.q;

  const int n_actions = online.n_actions();
  Mat dq_here = Mat::Zero(n_actions, n);
  Mat dh_here = Mat::Zero(n_actions, n);
  Mat dq_there = Mat::Zero(n_actions, n);
  UpdateStats stats;
  const double scale = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    const int a = batch.actions[i];
    const int greedy = argmax_random_ties(boot.col(i), rng);
    const double delta = batch.rewards[i] + batch.discounts[i] * boot(greedy, i) - here.q(a, i);
    const double h_tilde = here.h(a, i);
    const double h = config.algorithm == ControlAlgorithm::qrc_huber ? clip(config.tau, h_tilde) : h_tilde;
    // Descent directions: negatives of the update terms.
    dq_here(a, i) = -delta * scale;
    dq_there(greedy, i) = batch.discounts[i] * h * scale;
    dh_here(a, i) = -(delta - h_tilde) * scale;
    stats.mean_delta += delta * scale;
    stats.mean_abs_delta += std::abs(delta) * scale;
  }
  if (!std::isfinite(stats.mean_abs_delta)) throw DivergenceError("non-finite TD error");

  Vec grad = Vec::Zero(online.n_parameters());
  online.backward(here, dq_here, dh_here, grad);
  online.backward(there, dq_there, Mat(), grad);
  const Eigen::Index h0 = online.h_head_offset();
  grad.tail(grad.size() - h0) += config.beta * online.parameters().tail(grad.size() - h0);
  check_finite(grad, "gradient");
  adam.step(online.parameters(), grad);
  check_finite(online.parameters(), "weights");
  return stats;
}

UpdateStats dqn_update(Mlp& online, const Mlp& target, const ReplayBuffer::Batch& batch,
                       const ControlConfig& config, Adam& adam) {
  const int n = static_cast<int>(batch.actions.size());
  if (n == 0) throw Error("empty batch");
  Mlp::Cache here;
  online.forward(batch.obs, here);
  const Mat next_q = target.q_values(batch.next_obs);
  Mat dq = Mat::Zero(online.n_actions(), n);
  UpdateStats stats;
  const double scale = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    const int a = batch.actions[i];
    const double y = batch.rewards[i] + batch.discounts[i] * next_q.col(i).maxCoeff();
    const double delta = y - here.q(a, i);
    dq(a, i) = -clip(config.tau, delta) * scale;
    stats.mean_delta += delta * scale;
    stats.mean_abs_delta += std::abs(delta) * scale;
  }
  if (!std::isfinite(stats.mean_abs_delta)) throw DivergenceError("non-finite TD error");
  Vec grad = Vec::Zero(online.n_parameters());
  online.backward(here, dq, Mat(), grad);
  check_finite(grad, "gradient");
  adam.step(online.parameters(), grad);
  check_finite(online.parameters(), "weights");
  return stats;
}

RunRecord run_control(std::string_view env_name, const ControlConfig& config, long n_steps,
                      std::uint64_t seed) {
  config.validate();
  if (n_steps < 1) throw Error("n_steps must be positive");
  // Independent streams for the environment, the network init and the agent.
  auto env = make_control_env(env_name, mix_seed(seed, 0));
  Mlp online(env->observation_dim(), config.hidden, env->n_actions(), mix_seed(seed, 1));
  Rng rng(mix_seed(seed, 2));
  Mlp target = online;
  Adam adam(online.n_parameters(), config.alpha);
  ReplayBuffer buffer(config.buffer_capacity, env->observation_dim());
  ReplayBuffer::Batch batch;

  RunRecord record;
  record.problem = std::string(env_name);
  record.algorithm = to_string(config.algorithm);
  record.params = {{"alpha", config.alpha},
                   {"tau", config.tau},
                   {"refresh", static_cast<double>(config.target_refresh)}};
  record.seed = seed;
  record.n_steps = n_steps;

  std::vector<int> step_episode;
  step_episode.reserve(static_cast<std::size_t>(n_steps));
  std::vector<double> episode_returns;
  double ep_return = 0.0;
  long ep_length = 0;
  long updates = 0;
  Vec obs = env->reset();

  for (long step = 1; step <= n_steps; ++step) {
    int action;
    if (rng.uniform() < config.epsilon) {
      action = static_cast<int>(rng.below(static_cast<std::size_t>(env->n_actions())));
    } else {
      const Mat q = online.q_values(obs);
      action = argmax_random_ties(q.col(0), rng);
    }
    const StepResult res = env->step(action);
    ep_return += res.reward;
    ++ep_length;
    step_episode.push_back(static_cast<int>(episode_returns.size()));
    if (!res.cutoff) {
      buffer.add(obs, action, res.reward, res.observation, res.terminated ? 0.0 : config.gamma);
    }

    if (buffer.size() >= config.batch_size) {
      buffer.sample(config.batch_size, rng, batch);
      const bool use_target = config.target_refresh > 1;
      try {
        if (config.algorithm == ControlAlgorithm::dqn) {
          dqn_update(online, use_target ? target : online, batch, config, adam);
        } else {
          qrc_update(online, use_target ? target : online, batch, config, adam, rng);
        }
      } catch (const DivergenceError&) {
        record.diverged = true;
        record.diverged_at = step;
        break;
      }
      ++updates;
      if (use_target && updates % config.target_refresh == 0) target = online;
    }

    if (res.terminated || res.cutoff) {
      record.episodes.push_back({static_cast<long>(episode_returns.size()), step, ep_length, ep_return,
                                 res.cutoff});
      episode_returns.push_back(ep_return);
      ep_return = 0.0;
      ep_length = 0;
      obs = env->reset();
    } else {
      obs = res.observation;
    }
  }
  // The unfinished last episode contributes its partial return.
  episode_returns.push_back(ep_return);

  Trace trace{"return", {}};
  const long interval = logging_interval(n_steps);
  const long recorded = static_cast<long>(step_episode.size());
  for (long end = interval; end <= recorded; end += interval) {
    double total = 0.0;
    for (long t = end - interval; t < end; ++t) total += episode_returns[step_episode[t]];
    trace.points.push_back({end, total / static_cast<double>(interval)});
  }
  record.traces.push_back(std::move(trace));
  return record;
}

}  // namespace rbe
