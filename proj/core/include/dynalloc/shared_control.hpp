#pragma once

// Reference trajectory and impedance law that produce the nominal torque.

#include <array>
#include <vector>

#include "dynalloc/torque.hpp"

namespace dynalloc {

struct TrajectoryParams {
  double theta0_deg = 52.6;
  double theta_a_deg = 37.6;
  std::array<double, 3> freqs_hz{0.050, 0.068, 0.093};
  double t0_s = 2.5;
  double dwell_s = 2.0;      // hold at each local extremum
  double duration_s = 30.0;  // horizon of the base curve; dwells extend it

  void validate() const;
};

struct ReferenceSample {
  double angle_deg = 0.0;
  double velocity_deg_s = 0.0;
};

/// θ₀ + θ_A·∏ sin(2πfᵢ(t − t₀)) with a dwell inserted at every interior
/// extremum of the base curve.
class ReferenceTrajectory {
 public:
  explicit ReferenceTrajectory(const TrajectoryParams& params);

  /// Throws DomainError outside [0, total_duration()].
  ReferenceSample at(double t) const;

  double base(double tb) const;
  double base_rate(double tb) const;
  /// Base-curve times of the interior extrema, increasing.
  const std::vector<double>& extrema() const { return extrema_; }
  double total_duration() const;
  const TrajectoryParams& params() const { return params_; }

 private:
  TrajectoryParams params_;
  std::vector<double> extrema_;
};

struct ImpedanceGains {
  double kp = 30.0;  // N·m/rad
  double kd = 3.0;   // N·m·s/rad
  double alpha_bar = 0.0;

  void validate() const;
};

/// kp·(θd − θ) + kd·(θ̇d − θ̇), angles converted to radians.
double impedance_torque(const ReferenceSample& ref, const PlantState& state, const ImpedanceGains& gains);

/// [ᾱσ₁, ᾱσ₂, 1 − ᾱ]ᵀτ̄ᴺ + [1, −1, 0]ᵀτᶜ, σ from the sign of τ̄ᴺ (kept from
/// `previous` at zero).
JointTorque distribute_nominal(double net, double alpha_bar, const Distributor& previous = kFlexionDistributor,
                               double cocontraction = 0.0);

JointTorque nominal_torque(const ReferenceSample& ref, const PlantState& state, const ImpedanceGains& gains,
                           const Distributor& previous = kFlexionDistributor, double cocontraction = 0.0);

}  // namespace dynalloc
