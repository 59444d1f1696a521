#pragma once

// Allocation with redundancy inside the muscle groups: every stimulated muscle
// is its own actuator. The torque vector is
//
//   τ⁺ = [τ_f1 … τ_fnf, τ_e1 … τ_ene, τ_E]
//
// with null-space basis B⁺ = [I; −1ᵀ] and S⁺ gating flexor muscles with σ₁ and
// extensor muscles with σ₂. For one flexor and one extensor this is the
// two-channel allocator with the exchange basis.

#include <vector>

#include <Eigen/Core>

#include "dynalloc/torque.hpp"

namespace dynalloc {

struct MuscleLayout {
  int n_flexor = 1;
  int n_extensor = 1;

  int muscles() const { return n_flexor + n_extensor; }
  void validate() const;
};

struct ExtendedAllocatorParams {
  MuscleLayout layout;
  Eigen::VectorXd k_plus;  // n_m positive gains
  Eigen::VectorXd w_plus;  // n_m + 1 positive base weights, exoskeleton last
  std::vector<TorqueBound> muscle_limits;  // n_m magnitude bounds, angle in degrees
  double exo_max = 0.0;
  double fes_margin_eps = 1e-3;
  bool saturation_barrier = true;

  /// Throws ConfigError on inconsistent dimensions or non-positive gains.
  void validate() const;
};

struct ExtendedAllocatorState {
  Eigen::VectorXd zeta_plus;  // n_m states [N·m]
  Distributor last_sigma = kFlexionDistributor;
};

ExtendedAllocatorState make_extended_state(const MuscleLayout& layout);

/// B⁺ = [I_nm; −1ᵀ].
Eigen::MatrixXd extended_basis(int n_muscles);

/// Diagonal of S⁺ for the given layout and distributor.
Eigen::VectorXd extended_gate(const MuscleLayout& layout, const Distributor& sigma);

/// τ̄⁺ + B⁺S⁺ζ⁺ with σ from the sign of the nominal net torque.
Eigen::VectorXd extended_redistribute(const Eigen::VectorXd& nominal, const ExtendedAllocatorState& state,
                                      const MuscleLayout& layout);

/// Per-muscle barrier weights, exoskeleton weight last.
Eigen::VectorXd extended_weights(const Eigen::VectorXd& tau_plus, const ExtendedAllocatorParams& params,
                                 double angle_deg);

struct ExtendedTick {
  Eigen::VectorXd applied;             // τ⁺ at the start of the tick
  Distributor sigma{};
  Eigen::VectorXd weights;
  std::vector<bool> muscle_violation;  // |τ_m| beyond its attainable set
  ExtendedAllocatorState next;
};

/// One RK4 step of ζ̇⁺ = −K⁺S⁺B⁺ᵀW⁺τ⁺ with W⁺ evaluated at the applied torque.
///
/// Throws ConfigError when dimensions disagree with the layout or dt <= 0.
ExtendedTick extended_allocator_tick(const ExtendedAllocatorState& state, const Eigen::VectorXd& nominal,
                                     const ExtendedAllocatorParams& params, double angle_deg, double dt);

ExtendedAllocatorState extended_allocator_step(const ExtendedAllocatorState& state,
                                               const Eigen::VectorXd& nominal,
                                               const ExtendedAllocatorParams& params, double angle_deg,
                                               double dt);

/// Sums the muscle entries of τ⁺ back into a three-channel JointTorque.
JointTorque collapse(const Eigen::VectorXd& tau_plus, const MuscleLayout& layout);

/// Nominal τ̄⁺ with the group FES torques split evenly over the muscles.
Eigen::VectorXd expand(const JointTorque& nominal, const MuscleLayout& layout);

}  // namespace dynalloc
