#pragma once

#include <cstdint>
#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rbe/mdp.hpp"
#include "rbe/rng.hpp"

namespace rbe {

struct StepResult {
  Vec observation;
  double reward = 0.0;
  bool terminated = false;
  bool cutoff = false;  // step limit reached without termination
};

/// Episodic control task with a step limit. Start-state randomness comes
/// from the environment's own seeded stream.
class ControlEnv {
 public:
  ControlEnv(long cutoff, std::uint64_t seed) : cutoff_(cutoff), rng_(seed) {}
  virtual ~ControlEnv() = default;

  virtual std::string name() const = 0;
  virtual int observation_dim() const = 0;
  virtual int n_actions() const = 0;

  long cutoff() const { return cutoff_; }
  long episode_steps() const { return steps_; }

  Vec reset();
  // Never sets both terminated and cutoff.
  StepResult step(int action);

 protected:
  virtual void reset_state(Rng& rng) = 0;
  // Advances the internal state; returns (reward, terminated).
  virtual std::pair<double, bool> advance(int action) = 0;
  virtual Vec observe() const = 0;

 private:
  long cutoff_;
  long steps_ = 0;
  Rng rng_;
};

/// 4 x 5 grid, one-hot observations over the 20 cells. Start is the
/// bottom-left cell, goal the bottom-right, the three cells between them
/// are the cliff. Actions: up, right, down, left. Each step costs -1;
/// stepping into the cliff costs -1000 and returns the agent to the start
/// without ending the episode.
class CliffWorld : public ControlEnv {
 public:
  explicit CliffWorld(std::uint64_t seed = 0);
  std::string name() const override { return "cliff_world"; }
  int observation_dim() const override;
  int n_actions() const override { return 4; }
  int row() const { return row_; }
  int col() const { return col_; }

 protected:
  void reset_state(Rng& rng) override;
  std::pair<double, bool> advance(int action) override;
  Vec observe() const override;

 private:
  int row_ = 0;
  int col_ = 0;
};

/// Observations are position and velocity scaled to [0, 1].
/// Actions: full reverse, zero throttle, full forward.
class MountainCar : public ControlEnv {
 public:
  explicit MountainCar(std::uint64_t seed = 0);
  std::string name() const override { return "mountain_car"; }
  int observation_dim() const override { return 2; }
  int n_actions() const override { return 3; }
  double position() const { return position_; }
  double velocity() const { return velocity_; }
  void set_state(double position, double velocity);

 protected:
  void reset_state(Rng& rng) override;
  std::pair<double, bool> advance(int action) override;
  Vec observe() const override;

 private:
  double position_ = 0.0;
  double velocity_ = 0.0;
};

/// Observation (x, x_dot, theta, theta_dot); actions push left or right.
class CartPole : public ControlEnv {
 public:
  explicit CartPole(std::uint64_t seed = 0);
  std::string name() const override { return "cart_pole"; }
  int observation_dim() const override { return 4; }
  int n_actions() const override { return 2; }
  const std::array<double, 4>& state() const { return state_; }

 protected:
  void reset_state(Rng& rng) override;
  std::pair<double, bool> advance(int action) override;
  Vec observe() const override;

 private:
  std::array<double, 4> state_{};
};

/// Observation (theta1, theta2, theta1_dot, theta2_dot); actions apply
/// torque -1, 0 or +1 at the joint.
class Acrobot : public ControlEnv {
 public:
  explicit Acrobot(std::uint64_t seed = 0);
  std::string name() const override { return "acrobot"; }
  int observation_dim() const override { return 4; }
  int n_actions() const override { return 3; }
  const std::array<double, 4>& state() const { return state_; }

 protected:
  void reset_state(Rng& rng) override;
  std::pair<double, bool> advance(int action) override;
  Vec observe() const override;

 private:
  std::array<double, 4> state_{};
};

/// cliff_world, mountain_car, cart_pole, acrobot.
const std::vector<std::string>& control_env_names();
std::unique_ptr<ControlEnv> make_control_env(std::string_view name, std::uint64_t seed = 0);

}  // namespace rbe
