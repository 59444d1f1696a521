#include "dynalloc/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dynalloc/errors.hpp"

namespace dynalloc {

void ElbowPlant::validate() const {
  if (!(inertia > 0.0)) throw ConfigError("plant: inertia must be positive");
  if (!(damping >= 0.0)) throw ConfigError("plant: damping must be non-negative");
  if (!std::isfinite(mass_moment) || !std::isfinite(payload_moment)) throw ConfigError("plant: non-finite load");
  if (!(max_angle_deg > min_angle_deg)) throw ConfigError("plant: joint limits must be ordered");
  if (locked_angle_deg && (*locked_angle_deg < min_angle_deg || *locked_angle_deg > max_angle_deg)) {
    throw ConfigError("plant: locked angle outside the joint limits");
  }
}

double gravity_torque(const ElbowPlant& plant, double angle_deg) {
  return plant.mass_moment * std::sin(deg_to_rad(angle_deg));
}

namespace detail {

PlantState clamp_to_limits(const ElbowPlant& plant, const PlantState& s) {
  if (s.angle_deg < plant.min_angle_deg) return {plant.min_angle_deg, std::max(0.0, s.velocity_deg_s)};
  if (s.angle_deg > plant.max_angle_deg) return {plant.max_angle_deg, std::min(0.0, s.velocity_deg_s)};
  return s;
}

}  // namespace detail

PlantState plant_step(const ElbowPlant& plant, const PlantState& state, double tau_total, double dt) {
  return plant_step(plant, state, [tau_total](double, double, double) { return tau_total; }, dt);
}

void ExoActuator::validate() const {
  if (!(torque_limit > 0.0) || !(bandwidth_hz > 0.0)) {
    throw ConfigError("exoskeleton: torque limit and bandwidth must be positive");
  }
}

double ExoCommand::applied_at(double s, double bandwidth_hz) const {
  return command + (applied_start - command) * std::exp(-2.0 * std::numbers::pi * bandwidth_hz * s);
}

ExoCommand exo_command(const ExoActuator& exo, double tau_e_desired, double gravity_comp, double applied, double dt) {
  ExoCommand out;
  const double raw = tau_e_desired + gravity_comp;
  out.command = std::clamp(raw, -exo.torque_limit, exo.torque_limit);
  out.clamped = out.command != raw;
  out.applied_start = applied;
  out.applied_end = out.applied_at(dt, exo.bandwidth_hz);
  return out;
}

}  // namespace dynalloc
