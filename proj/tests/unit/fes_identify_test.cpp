#include <cmath>

#include <gtest/gtest.h>

#include "dynalloc/errors.hpp"
#include "dynalloc/fes_identify.hpp"
#include "dynalloc/synthetic.hpp"

using namespace dynalloc;

namespace {

// RMSE of r(υ, θ)·τ*(θ) over the protocol grid, relative to the peak torque.
double recruitment_error(const FesModel& truth, const FesModel& fit, const GridProtocol& p) {
  double sum = 0.0, scale = 0.0;
  int n = 0;
  for (double th : p.angles_deg) {
    scale = std::max(scale, truth.max_torque(th));
    for (double u = truth.upsilon_min_ma; u <= truth.upsilon_max_ma; u += 0.25) {
      const double d = truth.recruit(u, th) * truth.contraction(th) - fit.recruit(u, th) * fit.contraction(th);
      sum += d * d;
      ++n;
    }
  }
  return std::sqrt(sum / n) / scale;
}

}  // namespace

class IdentifyRoundTrip : public ::testing::TestWithParam<Muscle> {};

TEST_P(IdentifyRoundTrip, RecoversModel) {
  const Muscle muscle = GetParam();
  const FesModel truth = synthetic_model(muscle);
  const GridProtocol protocol;
  const TrainingGrid grid = generate_grid(truth, muscle, protocol);
  IdentifyOptions opt;
  opt.upsilon_min_ma = truth.upsilon_min_ma;
  const IdentifyResult res = identify(grid, muscle, opt);
  EXPECT_LE(recruitment_error(truth, res.model, protocol), 0.02);
  EXPECT_NEAR(res.model.bandwidth_hz(), truth.bandwidth_hz(), 0.1 * truth.bandwidth_hz());
  EXPECT_LE(std::abs(res.model.delay_s - truth.delay_s), 1.0 / protocol.sample_hz);
  EXPECT_NO_THROW(res.model.validate());
}

INSTANTIATE_TEST_SUITE_P(BothMuscles, IdentifyRoundTrip, ::testing::Values(Muscle::flexor, Muscle::extensor));

TEST(Identify, SingleAngleRejected) {
  const FesModel truth = synthetic_model(Muscle::flexor);
  GridProtocol p;
  p.angles_deg = {45.0};
  EXPECT_THROW(identify(generate_grid(truth, Muscle::flexor, p), Muscle::flexor, {}), IdentificationError);
}

TEST(Identify, ZeroTorqueGridRejected) {
  const FesModel truth = synthetic_model(Muscle::flexor);
  TrainingGrid grid = generate_grid(truth, Muscle::flexor, GridProtocol{});
  for (auto& s : grid) s.torque_nm = 0.0;
  EXPECT_THROW(identify(grid, Muscle::flexor, {}), IdentificationError);
}

TEST(Identify, NonMonotoneDataWarns) {
  const FesModel truth = synthetic_model(Muscle::flexor);
  GridProtocol p;
  TrainingGrid grid = generate_grid(truth, Muscle::flexor, p);
  const double top = default_intensities(truth).back();
  // Weaken the strongest level at one angle well below the next one down.
  for (auto& s : grid) {
    if (s.theta_deg == 45.0 && s.upsilon_ma == top) s.torque_nm *= 0.5;
  }
  IdentifyOptions opt;
  opt.upsilon_min_ma = truth.upsilon_min_ma;
  const IdentifyResult res = identify(grid, Muscle::flexor, opt);
  EXPECT_FALSE(res.warnings.empty());
  const auto& curve_at_45 = res.model.recruitment;
  double prev = 0.0;
  for (double u = truth.upsilon_min_ma; u <= truth.upsilon_max_ma; u += 0.1) {
    const double r = curve_at_45(u, 45.0, res.model.upsilon_min_ma);
    EXPECT_GE(r, prev - 1e-12);
    prev = r;
  }
}

TEST(Identify, NoSamplesForMuscle) {
  const FesModel truth = synthetic_model(Muscle::flexor);
  const TrainingGrid grid = generate_grid(truth, Muscle::flexor, GridProtocol{});
  EXPECT_THROW(identify(grid, Muscle::extensor, {}), IdentificationError);
}
