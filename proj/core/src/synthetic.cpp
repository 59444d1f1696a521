#include "dynalloc/synthetic.hpp"

#include <cmath>
#include <numbers>

namespace dynalloc {

namespace {

double peak_torque(Muscle muscle, double angle_deg) {
  const double pi = std::numbers::pi;
  if (muscle == Muscle::flexor) {
    return 1.2 + 4.8 * std::pow(std::sin(pi * angle_deg / 150.0), 1.5);
  }
  const double s = std::sin(pi * (angle_deg + 20.0) / 170.0);
  return 1.0 + 3.0 * s * s;
}

// Smoothstep recruitment whose steepness drifts with joint angle.
double recruitment(double x, double angle_deg) {
  const double s = x * x * (3.0 - 2.0 * x);
  const double p = 1.0 + 0.25 * std::cos(std::numbers::pi * angle_deg / 120.0);
  return std::pow(s, p);
}

}  // namespace

FesModel synthetic_model(Muscle muscle, const SyntheticOptions& options) {
  FesModel m;
  const bool flexor = muscle == Muscle::flexor;
  m.upsilon_min_ma = flexor ? 8.0 : 6.0;
  m.upsilon_max_ma = flexor ? 30.0 : 24.0;
  m.delay_s = options.delay_s;
  m.fatigue_psi = options.psi;
  const double bw = options.bandwidth_hz > 0.0 ? options.bandwidth_hz : (flexor ? kFlexorBandwidthHz : kExtensorBandwidthHz);
  m.activation = ActivationDynamics::critically_damped(bw);

  std::vector<double> angles;
  std::vector<double> peaks;
  std::vector<MonotoneSpline> curves;
  constexpr int kKnots = 25;
  for (int i = 0; i <= 16; ++i) {
    const double angle = 7.5 * i;
    angles.push_back(angle);
    peaks.push_back(peak_torque(muscle, angle));
    std::vector<double> u(kKnots), r(kKnots);
    for (int k = 0; k < kKnots; ++k) {
      const double x = static_cast<double>(k) / (kKnots - 1);
      u[static_cast<std::size_t>(k)] = m.upsilon_min_ma + x * (m.upsilon_max_ma - m.upsilon_min_ma);
      r[static_cast<std::size_t>(k)] = recruitment(x, angle);
    }
    curves.emplace_back(std::move(u), std::move(r));
  }
  m.recruitment = RecruitmentMap(angles, std::move(curves));
  m.contraction = ContractionMap(std::move(angles), std::move(peaks));
  return m;
}

}  // namespace dynalloc
