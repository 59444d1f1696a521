#pragma once

// Joint-level torque algebra shared by the allocator, the controllers and the
// simulation harness.
//
// Sign convention: positive torque flexes the elbow. The flexor FES channel
// therefore produces torque >= 0, the extensor channel torque <= 0, and the
// exoskeleton either sign.

#include <array>
#include <functional>
#include <numbers>

namespace dynalloc {

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Torque input vector at one joint: flexor FES, extensor FES, exoskeleton [N·m].
struct JointTorque {
  double flexor_fes = 0.0;
  double extensor_fes = 0.0;
  double exo = 0.0;

  /// Net control torque 1ᵀτ.
  double net() const { return flexor_fes + extensor_fes + exo; }
  /// Net FES-induced torque.
  double fes() const { return flexor_fes + extensor_fes; }
  bool finite() const;

  friend bool operator==(const JointTorque&, const JointTorque&) = default;
};

/// FES flexor/extensor distributor σ = [h(τᴺ), 1 − h(τᴺ)].
using Distributor = std::array<double, 2>;

inline constexpr Distributor kFlexionDistributor{1.0, 0.0};
inline constexpr Distributor kExtensionDistributor{0.0, 1.0};

/// Net torque, cooperative gain, co-contraction and distributor of a JointTorque.
struct Decomposition {
  double net = 0.0;               // τᴺ [N·m]
  double cooperative_gain = 0.0;  // α, FES share of τᴺ
  double cocontraction = 0.0;     // τᶜ >= 0 [N·m]
  Distributor sigma = kFlexionDistributor;
};

/// Distributor for a net torque. Zero net torque keeps `previous`.
Distributor distributor_for(double net, const Distributor& previous);

/// Splits `tau` into net torque, cooperative gain, co-contraction and σ.
///
/// When the net torque is exactly zero the cooperative gain and σ of `prev`
/// are retained. Throws InvalidInput for non-finite components.
Decomposition decompose(const JointTorque& tau, const Decomposition& prev = {});

/// Inverse of decompose: [ασ₁, ασ₂, 1 − α]ᵀτᴺ + [1, −1, 0]ᵀτᶜ.
///
/// Exact inverse for torques whose flexor part is >= 0, extensor part <= 0 and
/// whose net FES torque has the sign of the net torque.
JointTorque reconstruct(const Decomposition& d);

/// Angle-dependent magnitude bound, angle in degrees, result in N·m.
using TorqueBound = std::function<double(double)>;

/// Magnitude and bandwidth limits of the three actuators.
struct AttainableSet {
  TorqueBound fes_flexor_max;    // upper bound of the flexor channel
  TorqueBound fes_extensor_max;  // magnitude bound of the extensor channel
  double exo_max = 0.0;
  double fes_flexor_bandwidth_hz = 0.0;
  double fes_extensor_bandwidth_hz = 0.0;

  /// Throws ConfigError when a bound or bandwidth is missing or not positive.
  void validate() const;
  /// Throws ConfigError when an FES bound is not positive at `angle_deg`.
  void validate_at(double angle_deg) const;
  double max_fes_bandwidth_hz() const;
};

/// Joint state: angle measured from the downward vertical, degrees.
struct PlantState {
  double angle_deg = 0.0;
  double velocity_deg_s = 0.0;
};

}  // namespace dynalloc
