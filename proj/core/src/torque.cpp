#include "dynalloc/torque.hpp"

#include <algorithm>
#include <cmath>

#include "dynalloc/errors.hpp"

namespace dynalloc {

bool JointTorque::finite() const {
  return std::isfinite(flexor_fes) && std::isfinite(extensor_fes) && std::isfinite(exo);
}

Distributor distributor_for(double net, const Distributor& previous) {
  if (net > 0.0) return kFlexionDistributor;
  if (net < 0.0) return kExtensionDistributor;
  return previous;
}

Decomposition decompose(const JointTorque& tau, const Decomposition& prev) {
  if (!tau.finite()) throw InvalidInput("decompose: non-finite torque component");

  Decomposition d;
  d.net = tau.net();
  d.cocontraction = std::min(std::abs(tau.flexor_fes), std::abs(tau.extensor_fes));
  if (d.net != 0.0) {
    d.cooperative_gain = tau.fes() / d.net;
  } else {
    d.cooperative_gain = prev.cooperative_gain;
  }
  d.sigma = distributor_for(d.net, prev.sigma);
  return d;
}

JointTorque reconstruct(const Decomposition& d) {
  if (!std::isfinite(d.net) || !std::isfinite(d.cooperative_gain) || !std::isfinite(d.cocontraction)) {
    throw InvalidInput("reconstruct: non-finite decomposition");
  }
  const double fes = d.cooperative_gain * d.net;
  return JointTorque{
      .flexor_fes = d.sigma[0] * fes + d.cocontraction,
      .extensor_fes = d.sigma[1] * fes - d.cocontraction,
      .exo = (1.0 - d.cooperative_gain) * d.net,
  };
}

void AttainableSet::validate() const {
  if (!fes_flexor_max || !fes_extensor_max) throw ConfigError("attainable set: missing FES bound");
  if (!(exo_max > 0.0)) throw ConfigError("attainable set: exo_max must be positive");
  if (!(fes_flexor_bandwidth_hz > 0.0) || !(fes_extensor_bandwidth_hz > 0.0)) {
    throw ConfigError("attainable set: FES bandwidths must be positive");
  }
}

void AttainableSet::validate_at(double angle_deg) const {
  validate();
  if (!(fes_flexor_max(angle_deg) > 0.0) || !(fes_extensor_max(angle_deg) > 0.0)) {
    throw ConfigError("attainable set: FES bound not positive at " + std::to_string(angle_deg) + " deg");
  }
}

double AttainableSet::max_fes_bandwidth_hz() const {
  return std::max(fes_flexor_bandwidth_hz, fes_extensor_bandwidth_hz);
}

}  // namespace dynalloc
