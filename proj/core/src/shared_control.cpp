#include "dynalloc/shared_control.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dynalloc/errors.hpp"

namespace dynalloc {

void TrajectoryParams::validate() const {
  if (!(duration_s > 0.0)) throw ConfigError("trajectory: duration must be positive");
  if (!(dwell_s >= 0.0)) throw ConfigError("trajectory: dwell must be non-negative");
  for (double f : freqs_hz) {
    if (!(f > 0.0)) throw ConfigError("trajectory: frequencies must be positive");
  }
  if (!std::isfinite(theta0_deg) || !std::isfinite(theta_a_deg) || !std::isfinite(t0_s)) {
    throw ConfigError("trajectory: non-finite parameter");
  }
}

ReferenceTrajectory::ReferenceTrajectory(const TrajectoryParams& params) : params_(params) {
  params_.validate();
  constexpr double kProbe = 1e-3;
  const auto n = static_cast<long>(std::floor(params_.duration_s / kProbe));
  double prev = base_rate(0.0);
  for (long i = 1; i <= n; ++i) {
    const double t = i * kProbe;
    const double cur = base_rate(t);
    if ((prev > 0.0 && cur <= 0.0) || (prev < 0.0 && cur >= 0.0)) {
      double lo = t - kProbe;
      double hi = t;
      const bool falling = prev > 0.0;
      for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((base_rate(mid) > 0.0) == falling) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double te = 0.5 * (lo + hi);
      // Rounding noise at a zero of odd multiplicity above one (e.g. t0, where
      // all factors vanish) flips the sign without a true extremum.
      const bool turns = base_rate(te - kProbe) * base_rate(te + kProbe) < 0.0;
      if (turns && te > 0.0 && te < params_.duration_s) extrema_.push_back(te);
    }
    prev = cur;
  }
}

double ReferenceTrajectory::base(double tb) const {
  double p = 1.0;
  for (double f : params_.freqs_hz) p *= std::sin(2.0 * std::numbers::pi * f * (tb - params_.t0_s));
  return params_.theta0_deg + params_.theta_a_deg * p;
}

double ReferenceTrajectory::base_rate(double tb) const {
  const double two_pi = 2.0 * std::numbers::pi;
  std::array<double, 3> s{};
  std::array<double, 3> c{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double arg = two_pi * params_.freqs_hz[i] * (tb - params_.t0_s);
    s[i] = std::sin(arg);
    c[i] = two_pi * params_.freqs_hz[i] * std::cos(arg);
  }
  return params_.theta_a_deg * (c[0] * s[1] * s[2] + s[0] * c[1] * s[2] + s[0] * s[1] * c[2]);
}

double ReferenceTrajectory::total_duration() const {
  return params_.duration_s + params_.dwell_s * static_cast<double>(extrema_.size());
}

ReferenceSample ReferenceTrajectory::at(double t) const {
  if (!(t >= 0.0) || t > total_duration() + 1e-12) {
    throw DomainError("reference: t = " + std::to_string(t) + " s outside [0, " + std::to_string(total_duration()) +
                      "]");
  }
  double offset = 0.0;
  for (double te : extrema_) {
    const double start = te + offset;
    if (t < start) break;
    if (t < start + params_.dwell_s) return {base(te), 0.0};
    offset += params_.dwell_s;
  }
  const double tb = t - offset;
  return {base(tb), base_rate(tb)};
}

void ImpedanceGains::validate() const {
  if (!(kp >= 0.0) || !(kd >= 0.0)) throw ConfigError("impedance: gains must be non-negative");
  if (!(alpha_bar >= 0.0 && alpha_bar <= 1.0)) throw ConfigError("impedance: alpha_bar must lie in [0, 1]");
}

double impedance_torque(const ReferenceSample& ref, const PlantState& state, const ImpedanceGains& gains) {
  return gains.kp * deg_to_rad(ref.angle_deg - state.angle_deg) +
         gains.kd * deg_to_rad(ref.velocity_deg_s - state.velocity_deg_s);
}

JointTorque distribute_nominal(double net, double alpha_bar, const Distributor& previous, double cocontraction) {
  const Distributor sigma = distributor_for(net, previous);
  const double fes = alpha_bar * net;
  return JointTorque{sigma[0] * fes + cocontraction, sigma[1] * fes - cocontraction, (1.0 - alpha_bar) * net};
}

JointTorque nominal_torque(const ReferenceSample& ref, const PlantState& state, const ImpedanceGains& gains,
                           const Distributor& previous, double cocontraction) {
  return distribute_nominal(impedance_torque(ref, state, gains), gains.alpha_bar, previous, cocontraction);
}

}  // namespace dynalloc
