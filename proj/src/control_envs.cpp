#include "rbe/control_envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rbe/control_constants.hpp"
#include "rbe/errors.hpp"

namespace rbe {

Vec ControlEnv::reset() {
  steps_ = 0;
  reset_state(rng_);
  return observe();
}

StepResult ControlEnv::step(int action) {
  if (action < 0 || action >= n_actions()) throw Error(name() + ": action out of range");
  const auto [reward, terminated] = advance(action);
  ++steps_;
  StepResult out;
  out.observation = observe();
  out.reward = reward;
  out.terminated = terminated;
  out.cutoff = !terminated && steps_ >= cutoff_;
  return out;
}

namespace cw = constants::cliff_world;

CliffWorld::CliffWorld(std::uint64_t seed) : ControlEnv(cw::kCutoff, seed) {}

int CliffWorld::observation_dim() const { return cw::kRows * cw::kCols; }

void CliffWorld::reset_state(Rng&) {
  row_ = cw::kRows - 1;
  col_ = 0;
}

std::pair<double, bool> CliffWorld::advance(int action) {
  static constexpr int kDr[4] = {-1, 0, 1, 0};
  static constexpr int kDc[4] = {0, 1, 0, -1};
  const int r = std::clamp(row_ + kDr[action], 0, cw::kRows - 1);
  const int c = std::clamp(col_ + kDc[action], 0, cw::kCols - 1);
  const bool bottom = r == cw::kRows - 1;
  if (bottom && c > 0 && c < cw::kCols - 1) {
    row_ = cw::kRows - 1;
    col_ = 0;
    return {cw::kCliffReward, false};
  }
  row_ = r;
  col_ = c;
  return {-1.0, bottom && c == cw::kCols - 1};
}

Vec CliffWorld::observe() const {
  Vec x = Vec::Zero(observation_dim());
  x[row_ * cw::kCols + col_] = 1.0;
  return x;
}

namespace mc = constants::mountain_car;

MountainCar::MountainCar(std::uint64_t seed) : ControlEnv(mc::kCutoff, seed) {}

void MountainCar::set_state(double position, double velocity) {
  position_ = position;
  velocity_ = velocity;
}

void MountainCar::reset_state(Rng& rng) {
  position_ = rng.uniform(mc::kStartLow, mc::kStartHigh);
  velocity_ = 0.0;
}

std::pair<double, bool> MountainCar::advance(int action) {
  velocity_ += (action - 1) * mc::kForce - mc::kGravity * std::cos(3.0 * position_);
  velocity_ = std::clamp(velocity_, -mc::kMaxSpeed, mc::kMaxSpeed);
  position_ += velocity_;
  if (position_ < mc::kMinPosition) {
    position_ = mc::kMinPosition;
    velocity_ = 0.0;
  }
  position_ = std::min(position_, mc::kMaxPosition);
  return {-1.0, position_ >= mc::kGoalPosition};
}

Vec MountainCar::observe() const {
  Vec x(2);
  x[0] = (position_ - mc::kMinPosition) / (mc::kMaxPosition - mc::kMinPosition);
  x[1] = (velocity_ + mc::kMaxSpeed) / (2.0 * mc::kMaxSpeed);
  return x;
}

namespace cp = constants::cart_pole;

CartPole::CartPole(std::uint64_t seed) : ControlEnv(cp::kCutoff, seed) {}

void CartPole::reset_state(Rng& rng) {
  for (double& v : state_) v = rng.uniform(-cp::kStartRange, cp::kStartRange);
}

std::pair<double, bool> CartPole::advance(int action) {
  auto& [x, x_dot, theta, theta_dot] = state_;
  constexpr double total_mass = cp::kMassCart + cp::kMassPole;
  constexpr double pole_mass_length = cp::kMassPole * cp::kHalfLength;
  const double force = action == 1 ? cp::kForceMagnitude : -cp::kForceMagnitude;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double temp = (force + pole_mass_length * theta_dot * theta_dot * sin_t) / total_mass;
  const double theta_acc = (cp::kGravity * sin_t - cos_t * temp) /
                           (cp::kHalfLength * (4.0 / 3.0 - cp::kMassPole * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;
  x += cp::kTimeStep * x_dot;
  x_dot += cp::kTimeStep * x_acc;
  theta += cp::kTimeStep * theta_dot;
  theta_dot += cp::kTimeStep * theta_acc;
  const bool done = x < -cp::kXLimit || x > cp::kXLimit || theta < -cp::kThetaLimit ||
                    theta > cp::kThetaLimit;
  return {1.0, done};
}

Vec CartPole::observe() const { return Eigen::Map<const Vec>(state_.data(), 4); }

namespace ac = constants::acrobot;

namespace {

using State4 = std::array<double, 4>;

// Time derivative of (theta1, theta2, dtheta1, dtheta2) under torque.
State4 acrobot_derivative(const State4& s, double torque) {
  constexpr double m1 = ac::kLinkMass1, m2 = ac::kLinkMass2, l1 = ac::kLinkLength1;
  constexpr double lc1 = ac::kLinkCom1, lc2 = ac::kLinkCom2, i1 = ac::kLinkMoi, i2 = ac::kLinkMoi;
  constexpr double g = ac::kGravity;
  constexpr double pi = std::numbers::pi;
  const double theta1 = s[0], theta2 = s[1], dtheta1 = s[2], dtheta2 = s[3];
  const double d1 = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2 * l1 * lc2 * std::cos(theta2)) + i1 + i2;
  const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + i2;
  const double phi2 = m2 * lc2 * g * std::cos(theta1 + theta2 - pi / 2.0);
  const double phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * std::sin(theta2) -
                      2 * m2 * l1 * lc2 * dtheta2 * dtheta1 * std::sin(theta2) +
                      (m1 * lc1 + m2 * l1) * g * std::cos(theta1 - pi / 2.0) + phi2;
  const double ddtheta2 = (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * std::sin(theta2) - phi2) /
                          (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
  const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
  return {dtheta1, dtheta2, ddtheta1, ddtheta2};
}

double wrap_angle(double x) {
  constexpr double pi = std::numbers::pi;
  const double two_pi = 2.0 * pi;
  while (x > pi) x -= two_pi;
  while (x < -pi) x += two_pi;
  return x;
}

}  // namespace

Acrobot::Acrobot(std::uint64_t seed) : ControlEnv(ac::kCutoff, seed) {}

void Acrobot::reset_state(Rng& rng) {
  for (double& v : state_) v = rng.uniform(-ac::kStartRange, ac::kStartRange);
}

std::pair<double, bool> Acrobot::advance(int action) {
  const double torque = static_cast<double>(action - 1);
  const double dt = ac::kTimeStep;
  auto axpy = [](const State4& a, double h, const State4& b) {
    return State4{a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2], a[3] + h * b[3]};
  };
  const State4& s = state_;
  const State4 k1 = acrobot_derivative(s, torque);
  const State4 k2 = acrobot_derivative(axpy(s, dt / 2.0, k1), torque);
  const State4 k3 = acrobot_derivative(axpy(s, dt / 2.0, k2), torque);
  const State4 k4 = acrobot_derivative(axpy(s, dt, k3), torque);
  State4 next;
  for (int i = 0; i < 4; ++i) next[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  next[0] = wrap_angle(next[0]);
  next[1] = wrap_angle(next[1]);
  next[2] = std::clamp(next[2], -ac::kMaxVel1, ac::kMaxVel1);
  next[3] = std::clamp(next[3], -ac::kMaxVel2, ac::kMaxVel2);
  state_ = next;
  const bool done = -std::cos(state_[0]) - std::cos(state_[1] + state_[0]) > 1.0;
  return {-1.0, done};
}

Vec Acrobot::observe() const { return Eigen::Map<const Vec>(state_.data(), 4); }

const std::vector<std::string>& control_env_names() {
  static const std::vector<std::string> names = {"cliff_world", "mountain_car", "cart_pole", "acrobot"};
  return names;
}

std::unique_ptr<ControlEnv> make_control_env(std::string_view name, std::uint64_t seed) {
  if (name == "cliff_world") return std::make_unique<CliffWorld>(seed);
  if (name == "mountain_car") return std::make_unique<MountainCar>(seed);
  if (name == "cart_pole") return std::make_unique<CartPole>(seed);
  if (name == "acrobot") return std::make_unique<Acrobot>(seed);
  throw Error("unknown control environment '" + std::string(name) + "'");
}

}  // namespace rbe
