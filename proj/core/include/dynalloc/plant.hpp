#pragma once

// Single-joint elbow with viscous damping and gravity, plus a first-order
// exoskeleton torque source. Angles are measured from the downward vertical.

#include <cmath>
#include <optional>

#include <Eigen/Core>

#include "dynalloc/rk4.hpp"
#include "dynalloc/torque.hpp"

namespace dynalloc {

struct ElbowPlant {
  double inertia = 0.072;     // kg·m²
  double damping = 0.15;      // N·m·s/rad
  double mass_moment = 3.0;   // N·m, forearm plus interface, compensated by the exo
  double payload_moment = 0.0;  // N·m, load the controller does not know about
  double min_angle_deg = 0.0;
  double max_angle_deg = 120.0;
  std::optional<double> locked_angle_deg;  // joint held fixed when set

  /// Throws ConfigError on non-positive inertia, negative damping or unordered limits.
  void validate() const;
};

/// τg = mass_moment·sin θ.
double gravity_torque(const ElbowPlant& plant, double angle_deg);

namespace detail {
PlantState clamp_to_limits(const ElbowPlant& plant, const PlantState& s);
}

/// RK4 step of I·θ̈ = τ − b·θ̇ − (mass_moment + payload)·sin θ.
///
/// `torque(s, angle_deg, velocity_deg_s)` gives the applied torque at time
/// s ∈ [0, dt] into the step. The result is clamped to the joint limits with
/// the velocity zeroed on contact.
template <class TorqueFn>
PlantState plant_step(const ElbowPlant& plant, const PlantState& state, TorqueFn&& torque, double dt) {
  if (plant.locked_angle_deg) return PlantState{*plant.locked_angle_deg, 0.0};
  const double load = plant.mass_moment + plant.payload_moment;
  // x = [θ, θ̇] in radians.
  auto f = [&](double s, const Eigen::Vector2d& x) -> Eigen::Vector2d {
    const double tau = torque(s, rad_to_deg(x[0]), rad_to_deg(x[1]));
    return {x[1], (tau - plant.damping * x[1] - load * std::sin(x[0])) / plant.inertia};
  };
  const Eigen::Vector2d next =
      rk4_step_timed(Eigen::Vector2d(deg_to_rad(state.angle_deg), deg_to_rad(state.velocity_deg_s)), dt, f);
  return detail::clamp_to_limits(plant, PlantState{rad_to_deg(next[0]), rad_to_deg(next[1])});
}

/// Constant applied torque over the step.
PlantState plant_step(const ElbowPlant& plant, const PlantState& state, double tau_total, double dt);

struct ExoActuator {
  double torque_limit = 15.0;  // N·m
  double bandwidth_hz = 20.0;  // first-order torque tracking

  void validate() const;
};

struct ExoCommand {
  double command = 0.0;   // τE + τg after clamping
  bool clamped = false;
  double applied_start = 0.0;  // lag output at the start of the step
  double applied_end = 0.0;    // lag output at the end of the step

  /// Lag output s seconds into the step.
  double applied_at(double s, double bandwidth_hz) const;
};

/// Gravity-compensated command τE + τg, clamped to ±limit, through the lag.
/// `applied` is the lag output at the start of the step.
ExoCommand exo_command(const ExoActuator& exo, double tau_e_desired, double gravity_comp, double applied, double dt);

}  // namespace dynalloc
