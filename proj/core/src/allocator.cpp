#include "dynalloc/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dynalloc/errors.hpp"
#include "dynalloc/rk4.hpp"

namespace dynalloc {

RedistributionBasis null_space_basis() {
  RedistributionBasis g;
  g << 1.0, 1.0,
       0.0, -1.0,
      -1.0, 0.0;
  return g;
}

RedistributionBasis exchange_basis() {
  RedistributionBasis g;
  g << 1.0, 0.0,
       0.0, 1.0,
      -1.0, -1.0;
  return g;
}

RedistributionBasis basis_matrix(BasisKind kind) {
  return kind == BasisKind::cocontraction ? null_space_basis() : exchange_basis();
}

void AllocatorParams::validate() const {
  if (!(k[0] > 0.0) || !(k[1] > 0.0)) throw ConfigError("allocator: gains k must be positive");
  for (double w : w_base) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("allocator: base weights must be positive");
  }
  if (!(fes_margin_eps > 0.0) || !(fes_margin_eps < 1.0)) {
    throw ConfigError("allocator: fes_margin_eps must lie in (0, 1)");
  }
  if (alpha_cap && !(*alpha_cap > 0.0 && *alpha_cap <= 1.0)) {
    throw ConfigError("allocator: alpha_cap must lie in (0, 1]");
  }
  limits.validate();
}

std::array<double, 2> bandwidth_matched_gains(const Weights& w_base, double flexor_bandwidth_hz,
                                              double extensor_bandwidth_hz) {
  const double two_pi = 2.0 * std::numbers::pi;
  return {two_pi * flexor_bandwidth_hz / (w_base[0] + w_base[2]),
          two_pi * extensor_bandwidth_hz / (w_base[1] + w_base[2])};
}

namespace {

double barrier(double tau, double bound, double eps, bool& saturated) {
  const double ratio = tau / bound;
  saturated = std::abs(tau) > bound;
  return 1.0 / std::max(eps, 1.0 - ratio * ratio);
}

void check_dt(const AllocatorParams& params, double dt) {
  const double max_dt = 1.0 / (20.0 * params.limits.max_fes_bandwidth_hz());
  if (!(dt > 0.0) || dt > max_dt) {
    throw ConfigError("allocator: dt " + std::to_string(dt) + " s outside (0, " + std::to_string(max_dt) +
                      "] required by the FES bandwidth");
  }
}

}  // namespace

WeightSchedule weight_schedule(const JointTorque& tau, const AllocatorParams& params, double angle_deg,
                               double t) {
  WeightSchedule out;
  out.w = params.w_base;
  if (params.saturation_barrier) {
    const double eps = params.fes_margin_eps;
    bool sat = false;
    out.w[0] *= barrier(tau.flexor_fes, params.limits.fes_flexor_max(angle_deg), eps, sat);
    out.saturated[0] = sat;
    out.w[1] *= barrier(tau.extensor_fes, params.limits.fes_extensor_max(angle_deg), eps, sat);
    out.saturated[1] = sat;
    out.w[2] *= barrier(tau.exo, params.limits.exo_max, eps, sat);
    out.saturated[2] = sat;
  }
  if (params.weight_modulation) {
    const Weights m = params.weight_modulation(t);
    for (std::size_t i = 0; i < 3; ++i) out.w[i] *= m[i];
  }
  if (params.alpha_cap) {
    const double cap = *params.alpha_cap;
    const double floor = out.w[2] * (1.0 - cap) / cap;
    out.w[0] = std::max(out.w[0], floor);
    out.w[1] = std::max(out.w[1], floor);
  }
  return out;
}

DerivedGains derived_gains(const AllocatorParams& params, const Weights& w, const Distributor& sigma) {
  DerivedGains g;
  for (std::size_t i = 0; i < 2; ++i) {
    g.alpha_s[i] = w[2] / (w[i] + w[2]);
    g.k_prime[i] = params.k[i] * sigma[i] * (w[i] + w[2]);
  }
  return g;
}

JointTorque redistribute(const JointTorque& nominal, const AllocatorState& state, BasisKind basis) {
  return redistribute(nominal, state, basis_matrix(basis));
}

JointTorque redistribute(const JointTorque& nominal, const AllocatorState& state,
                         const RedistributionBasis& basis) {
  const Distributor sigma = distributor_for(nominal.net(), state.last_decomposition.sigma);
  const Eigen::Vector2d gated(sigma[0] * state.zeta[0], sigma[1] * state.zeta[1]);
  const Eigen::Vector3d shift = basis * gated;
  return JointTorque{nominal.flexor_fes + shift[0], nominal.extensor_fes + shift[1], nominal.exo + shift[2]};
}

Eigen::Vector2d allocator_derivative(const Eigen::Vector2d& zeta, const JointTorque& nominal,
                                     const Distributor& sigma, const Weights& w,
                                     const std::array<double, 2>& k, const RedistributionBasis& basis) {
  const Eigen::Vector2d gated(sigma[0] * zeta[0], sigma[1] * zeta[1]);
  const Eigen::Vector3d tau = Eigen::Vector3d(nominal.flexor_fes, nominal.extensor_fes, nominal.exo) + basis * gated;
  const Eigen::Vector3d weighted(w[0] * tau[0], w[1] * tau[1], w[2] * tau[2]);
  const Eigen::Vector2d projected = basis.transpose() * weighted;
  return {-k[0] * sigma[0] * projected[0], -k[1] * sigma[1] * projected[1]};
}

double lyapunov_derivative(const Eigen::Vector2d& zeta, const Distributor& sigma, const Weights& w,
                           const RedistributionBasis& basis) {
  const Eigen::Vector2d gated(sigma[0] * zeta[0], sigma[1] * zeta[1]);
  const Eigen::Vector3d shift = basis * gated;
  double quad = 0.0;
  for (int i = 0; i < 3; ++i) quad += w[static_cast<std::size_t>(i)] * shift[i] * shift[i];
  return -quad;
}

double lyapunov_value(const Eigen::Vector2d& zeta, const std::array<double, 2>& k) {
  return 0.5 * (zeta[0] * zeta[0] / k[0] + zeta[1] * zeta[1] / k[1]);
}

AllocatorTick allocator_tick(const AllocatorState& state, const JointTorque& nominal,
                             const AllocatorParams& params, double angle_deg, double dt, double t) {
  check_dt(params, dt);
  if (!nominal.finite()) throw InvalidInput("allocator: non-finite nominal torque");

  const RedistributionBasis basis = basis_matrix(params.basis);

  AllocatorTick out;
  const Decomposition nominal_split = decompose(nominal, state.last_decomposition);
  out.sigma = nominal_split.sigma;

  AllocatorState current = state;
  current.last_decomposition = nominal_split;
  out.applied = redistribute(nominal, current, basis);
  out.weights = weight_schedule(out.applied, params, angle_deg, t);
  out.gains = derived_gains(params, out.weights.w, out.sigma);

  const Eigen::Vector2d zeta0(state.zeta[0], state.zeta[1]);
  const Eigen::Vector2d zeta1 = rk4_step(zeta0, dt, [&](const Eigen::Vector2d& z) {
    return allocator_derivative(z, nominal, out.sigma, out.weights.w, params.k, basis);
  });

  out.next.zeta = {zeta1[0], zeta1[1]};
  out.next.last_decomposition = nominal_split;
  return out;
}

AllocatorState allocator_step(const AllocatorState& state, const JointTorque& nominal,
                              const AllocatorParams& params, double angle_deg, double dt, double t) {
  return allocator_tick(state, nominal, params, angle_deg, dt, t).next;
}

JointTorque constant_allocate(double net_nominal, double alpha_const, const Decomposition& prev) {
  if (!(alpha_const >= 0.0 && alpha_const <= 1.0)) {
    throw ConfigError("constant allocation: alpha must lie in [0, 1]");
  }
  if (!std::isfinite(net_nominal)) throw InvalidInput("constant allocation: non-finite net torque");
  const Distributor sigma = distributor_for(net_nominal, prev.sigma);
  const double fes = alpha_const * net_nominal;
  JointTorque out{0.0, 0.0, (1.0 - alpha_const) * net_nominal};
  if (sigma[0] > 0.0) {
    out.flexor_fes = fes;
  } else {
    out.extensor_fes = fes;
  }
  return out;
}

}  // namespace dynalloc
