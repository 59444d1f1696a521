#pragma once

// Dynamic input allocation between flexor FES, extensor FES and the
// exoskeleton at a single joint.
//
// The applied torque is the nominal torque plus a null-space redistribution,
//
//   τ = τ̄ + B S ζ,        ζ̇ = −K S Bᵀ W τ,
//
// where B is a basis of ker(1ᵀ), S = diag(σ) gates the channel matching the
// sign of the net torque, K sets the convergence rate and W(τ, θ, t) the
// steady-state split.

#include <array>
#include <functional>
#include <optional>

#include <Eigen/Core>

#include "dynalloc/torque.hpp"

namespace dynalloc {

using RedistributionBasis = Eigen::Matrix<double, 3, 2>;
using Weights = std::array<double, 3>;

/// Which null-space basis drives the redistribution.
enum class BasisKind {
  /// Columns [1,0,−1] and [0,1,−1]: each column exchanges torque between one
  /// FES channel and the exoskeleton. With this basis the dynamics decouple
  /// into ζ̇ᵢ = −k′ᵢζᵢ + k′ᵢ(αˢᵢ − ᾱ)τ̄ᴺ.
  exchange,
  /// Columns [1,0,−1] and [1,−1,0]. The second column is the co-contraction direction, so the extensor state
  /// never shifts torque away from the exoskeleton.
  cocontraction,
};

/// The co-contraction basis [[1,1],[0,−1],[−1,0]].
RedistributionBasis null_space_basis();
/// The channel-exchange basis [[1,0],[0,1],[−1,−1]].
RedistributionBasis exchange_basis();
RedistributionBasis basis_matrix(BasisKind kind);

struct AllocatorParams {
  std::array<double, 2> k{1.0, 1.0};  // k₁, k₂ > 0
  Weights w_base{1.0, 1.0, 1.0};      // nominal w₁, w₂, w₃ > 0
  double fes_margin_eps = 1e-3;       // barrier floor ε
  AttainableSet limits;
  std::optional<double> alpha_cap;    // upper bound on each αˢᵢ, in (0, 1]
  BasisKind basis = BasisKind::exchange;
  /// When false the weights stay at w_base (times the modulation, if any).
  bool saturation_barrier = true;
  /// Multiplicative W(t) schedule, e.g. for fatigue. Identity when empty.
  std::function<Weights(double)> weight_modulation;

  /// Throws ConfigError on invalid gains, weights, ε, cap or limits.
  void validate() const;
};

/// Gains kᵢ for which the nominal convergence rate k′ᵢ at w_base equals
/// 2π·bandwidthᵢ of the matching FES channel.
std::array<double, 2> bandwidth_matched_gains(const Weights& w_base, double flexor_bandwidth_hz,
                                              double extensor_bandwidth_hz);

struct WeightSchedule {
  Weights w{1.0, 1.0, 1.0};
  /// Channel torque beyond its bound; the weight sits at its ε-capped maximum.
  std::array<bool, 3> saturated{false, false, false};

  bool any_saturated() const { return saturated[0] || saturated[1] || saturated[2]; }
};

/// Saturation-aware weights wᵢ = w_base,ᵢ / max(ε, 1 − (τᵢ/mᵢ(θ))²).
///
/// FES channels use the angle-dependent bounds, the exoskeleton uses exo_max.
/// With an alpha cap the FES weights are floored at w₃(1 − cap)/cap so that
/// αˢᵢ <= cap.
WeightSchedule weight_schedule(const JointTorque& tau, const AllocatorParams& params, double angle_deg,
                               double t = 0.0);

struct DerivedGains {
  std::array<double, 2> alpha_s{};  // αˢᵢ = w₃/(wᵢ + w₃)
  std::array<double, 2> k_prime{};  // k′ᵢ = kᵢσᵢ(wᵢ + w₃)
};

DerivedGains derived_gains(const AllocatorParams& params, const Weights& w, const Distributor& sigma);

struct AllocatorState {
  std::array<double, 2> zeta{0.0, 0.0};  // [N·m]
  Decomposition last_decomposition;      // of the most recent nominal torque
};

/// τ̄ + B·diag(σ)·ζ with σ taken from the sign of the nominal net torque
/// (retained from `state` when it is zero). Net-neutral for any ζ.
JointTorque redistribute(const JointTorque& nominal, const AllocatorState& state,
                         BasisKind basis = BasisKind::exchange);
JointTorque redistribute(const JointTorque& nominal, const AllocatorState& state,
                         const RedistributionBasis& basis);

/// Everything produced while advancing the allocator by one control tick.
struct AllocatorTick {
  JointTorque applied;       // torque at the start of the tick
  Distributor sigma{};
  WeightSchedule weights;    // evaluated at `applied`
  DerivedGains gains;
  AllocatorState next;       // state at the end of the tick
};

/// Forms the applied torque from the current state, evaluates W at it and
/// integrates ζ over `dt` with one RK4 step (τ̄, σ and W held).
///
/// Throws ConfigError when dt <= 0 or dt > 1/(20·max FES bandwidth).
AllocatorTick allocator_tick(const AllocatorState& state, const JointTorque& nominal,
                             const AllocatorParams& params, double angle_deg, double dt, double t = 0.0);

/// State part of allocator_tick.
AllocatorState allocator_step(const AllocatorState& state, const JointTorque& nominal,
                              const AllocatorParams& params, double angle_deg, double dt, double t = 0.0);

/// ζ̇ for frozen σ, W and τ̄.
Eigen::Vector2d allocator_derivative(const Eigen::Vector2d& zeta, const JointTorque& nominal,
                                     const Distributor& sigma, const Weights& w,
                                     const std::array<double, 2>& k, const RedistributionBasis& basis);

/// Lyapunov derivative −ζᵀS Bᵀ W B S ζ of V = ½ζᵀK⁻¹ζ for τ̄ = 0.
double lyapunov_derivative(const Eigen::Vector2d& zeta, const Distributor& sigma, const Weights& w,
                           const RedistributionBasis& basis);

double lyapunov_value(const Eigen::Vector2d& zeta, const std::array<double, 2>& k);

/// Constant-ratio baseline: α·τ̄ᴺ to the FES channel matching the sign of τ̄ᴺ,
/// the rest to the exoskeleton. Ignores the attainable sets.
JointTorque constant_allocate(double net_nominal, double alpha_const, const Decomposition& prev = {});

}  // namespace dynalloc
