#include "dynalloc/extended_allocator.hpp"

#include <algorithm>
#include <cmath>

#include "dynalloc/errors.hpp"
#include "dynalloc/rk4.hpp"

namespace dynalloc {

void MuscleLayout::validate() const {
  if (n_flexor < 1 || n_extensor < 1) throw ConfigError("muscle layout: need at least one flexor and one extensor");
}

void ExtendedAllocatorParams::validate() const {
  layout.validate();
  const auto n = static_cast<Eigen::Index>(layout.muscles());
  if (k_plus.size() != n) throw ConfigError("extended allocator: k_plus must have n_m entries");
  if (w_plus.size() != n + 1) throw ConfigError("extended allocator: w_plus must have n_m + 1 entries");
  if (static_cast<Eigen::Index>(muscle_limits.size()) != n) {
    throw ConfigError("extended allocator: one attainable bound per muscle required");
  }
  if (!(k_plus.array() > 0.0).all() || !(w_plus.array() > 0.0).all()) {
    throw ConfigError("extended allocator: gains and weights must be positive");
  }
  for (const auto& m : muscle_limits) {
    if (!m) throw ConfigError("extended allocator: missing muscle bound");
  }
  if (!(exo_max > 0.0)) throw ConfigError("extended allocator: exo_max must be positive");
  if (!(fes_margin_eps > 0.0 && fes_margin_eps < 1.0)) {
    throw ConfigError("extended allocator: fes_margin_eps must lie in (0, 1)");
  }
}

ExtendedAllocatorState make_extended_state(const MuscleLayout& layout) {
  layout.validate();
  return ExtendedAllocatorState{Eigen::VectorXd::Zero(layout.muscles()), kFlexionDistributor};
}

Eigen::MatrixXd extended_basis(int n_muscles) {
  Eigen::MatrixXd b(n_muscles + 1, n_muscles);
  b.topRows(n_muscles).setIdentity();
  b.bottomRows(1).setConstant(-1.0);
  return b;
}

Eigen::VectorXd extended_gate(const MuscleLayout& layout, const Distributor& sigma) {
  Eigen::VectorXd gate(layout.muscles());
  gate.head(layout.n_flexor).setConstant(sigma[0]);
  gate.tail(layout.n_extensor).setConstant(sigma[1]);
  return gate;
}

namespace {

void check_dims(const Eigen::VectorXd& nominal, const ExtendedAllocatorState& state, const MuscleLayout& layout) {
  if (nominal.size() != layout.muscles() + 1 || state.zeta_plus.size() != layout.muscles()) {
    throw ConfigError("extended allocator: dimension mismatch with the muscle layout");
  }
}

}  // namespace

Eigen::VectorXd extended_redistribute(const Eigen::VectorXd& nominal, const ExtendedAllocatorState& state,
                                      const MuscleLayout& layout) {
  check_dims(nominal, state, layout);
  const Distributor sigma = distributor_for(nominal.sum(), state.last_sigma);
  const Eigen::VectorXd gated = extended_gate(layout, sigma).cwiseProduct(state.zeta_plus);
  return nominal + extended_basis(layout.muscles()) * gated;
}

Eigen::VectorXd extended_weights(const Eigen::VectorXd& tau_plus, const ExtendedAllocatorParams& params,
                                 double angle_deg) {
  Eigen::VectorXd w = params.w_plus;
  if (!params.saturation_barrier) return w;
  const auto n = tau_plus.size() - 1;
  for (Eigen::Index j = 0; j <= n; ++j) {
    const double bound = j < n ? params.muscle_limits[static_cast<std::size_t>(j)](angle_deg) : params.exo_max;
    const double ratio = tau_plus[j] / bound;
    w[j] /= std::max(params.fes_margin_eps, 1.0 - ratio * ratio);
  }
  return w;
}

ExtendedTick extended_allocator_tick(const ExtendedAllocatorState& state, const Eigen::VectorXd& nominal,
                                     const ExtendedAllocatorParams& params, double angle_deg, double dt) {
  params.validate();
  check_dims(nominal, state, params.layout);
  if (!(dt > 0.0)) throw ConfigError("extended allocator: dt must be positive");
  if (!nominal.allFinite()) throw InvalidInput("extended allocator: non-finite nominal torque");

  const int n = params.layout.muscles();
  const Eigen::MatrixXd basis = extended_basis(n);

  ExtendedTick out;
  out.sigma = distributor_for(nominal.sum(), state.last_sigma);
  const Eigen::VectorXd gate = extended_gate(params.layout, out.sigma);
  out.applied = nominal + basis * gate.cwiseProduct(state.zeta_plus);
  out.weights = extended_weights(out.applied, params, angle_deg);

  out.muscle_violation.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double bound = params.muscle_limits[static_cast<std::size_t>(j)](angle_deg);
    out.muscle_violation[static_cast<std::size_t>(j)] = std::abs(out.applied[j]) > bound;
  }

  const Eigen::VectorXd gain = params.k_plus.cwiseProduct(gate);
  auto f = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    const Eigen::VectorXd tau = nominal + basis * gate.cwiseProduct(z);
    return -gain.cwiseProduct(basis.transpose() * out.weights.cwiseProduct(tau));
  };
  out.next.zeta_plus = rk4_step(state.zeta_plus, dt, f);
  out.next.last_sigma = out.sigma;
  return out;
}

ExtendedAllocatorState extended_allocator_step(const ExtendedAllocatorState& state,
                                               const Eigen::VectorXd& nominal,
                                               const ExtendedAllocatorParams& params, double angle_deg,
                                               double dt) {
  return extended_allocator_tick(state, nominal, params, angle_deg, dt).next;
}

JointTorque collapse(const Eigen::VectorXd& tau_plus, const MuscleLayout& layout) {
  if (tau_plus.size() != layout.muscles() + 1) throw ConfigError("collapse: dimension mismatch");
  return JointTorque{tau_plus.head(layout.n_flexor).sum(), tau_plus.segment(layout.n_flexor, layout.n_extensor).sum(),
                     tau_plus[layout.muscles()]};
}

Eigen::VectorXd expand(const JointTorque& nominal, const MuscleLayout& layout) {
  layout.validate();
  Eigen::VectorXd tau(layout.muscles() + 1);
  tau.head(layout.n_flexor).setConstant(nominal.flexor_fes / layout.n_flexor);
  tau.segment(layout.n_flexor, layout.n_extensor).setConstant(nominal.extensor_fes / layout.n_extensor);
  tau[layout.muscles()] = nominal.exo;
  return tau;
}

}  // namespace dynalloc
