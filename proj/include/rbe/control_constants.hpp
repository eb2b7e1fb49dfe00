#pragma once

// Physical constants of the classic-control tasks, pinned to the standard
// published formulations.

namespace rbe::constants {

// Mountain car (Moore 1990; Sutton & Barto 2018, section 10.1).
namespace mountain_car {
inline constexpr double kMinPosition = -1.2;
inline constexpr double kMaxPosition = 0.5;
inline constexpr double kMaxSpeed = 0.07;
inline constexpr double kGoalPosition = 0.5;
inline constexpr double kForce = 0.001;
inline constexpr double kGravity = 0.0025;
inline constexpr double kStartLow = -0.6;
inline constexpr double kStartHigh = -0.4;
inline constexpr long kCutoff = 1000;
}  // namespace mountain_car

// Cart-pole (Barto, Sutton & Anderson 1983), Euler integration.
namespace cart_pole {
inline constexpr double kGravity = 9.8;
inline constexpr double kMassCart = 1.0;
inline constexpr double kMassPole = 0.1;
inline constexpr double kHalfLength = 0.5;
inline constexpr double kForceMagnitude = 10.0;
inline constexpr double kTimeStep = 0.02;
inline constexpr double kThetaLimit = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
inline constexpr double kXLimit = 2.4;
inline constexpr double kStartRange = 0.05;
inline constexpr long kCutoff = 500;
}  // namespace cart_pole

// Acrobot (Sutton 1996; Sutton & Barto 1998 dynamics), RK4 integration.
namespace acrobot {
inline constexpr double kLinkLength1 = 1.0;
inline constexpr double kLinkMass1 = 1.0;
inline constexpr double kLinkMass2 = 1.0;
inline constexpr double kLinkCom1 = 0.5;
inline constexpr double kLinkCom2 = 0.5;
inline constexpr double kLinkMoi = 1.0;
inline constexpr double kGravity = 9.8;
inline constexpr double kTimeStep = 0.2;
inline constexpr double kMaxVel1 = 4.0 * 3.14159265358979323846;
inline constexpr double kMaxVel2 = 9.0 * 3.14159265358979323846;
inline constexpr double kStartRange = 0.1;
inline constexpr long kCutoff = 500;
}  // namespace acrobot

// CliffWorld: 4 x 5 grid.
namespace cliff_world {
inline constexpr int kRows = 4;
inline constexpr int kCols = 5;
inline constexpr double kCliffReward = -1000.0;
inline constexpr long kCutoff = 500;
}  // namespace cliff_world

}  // namespace rbe::constants
