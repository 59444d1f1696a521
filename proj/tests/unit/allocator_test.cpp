#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "dynalloc/allocator.hpp"
#include "dynalloc/errors.hpp"

using namespace dynalloc;

namespace {

AllocatorParams frozen_params(double alpha_s, double k_prime) {
  AllocatorParams p;
  const double w1 = (1.0 - alpha_s) / alpha_s;
  p.w_base = {w1, w1, 1.0};
  p.k = {k_prime / (w1 + 1.0), k_prime / (w1 + 1.0)};
  p.saturation_barrier = false;
  p.limits.fes_flexor_max = [](double) { return 100.0; };
  p.limits.fes_extensor_max = [](double) { return 100.0; };
  p.limits.exo_max = 100.0;
  p.limits.fes_flexor_bandwidth_hz = 1.0;
  p.limits.fes_extensor_bandwidth_hz = 1.0;
  return p;
}

}  // namespace

TEST(Basis, PublishedColumns) {
  RedistributionBasis expected;
  expected << 1, 1, 0, -1, -1, 0;
  EXPECT_EQ(null_space_basis(), expected);
}

TEST(Basis, NullSpaceAndRank) {
  for (BasisKind kind : {BasisKind::cocontraction, BasisKind::exchange}) {
    const RedistributionBasis b = basis_matrix(kind);
    const Eigen::RowVector2d sums = Eigen::RowVector3d::Ones() * b;
    EXPECT_EQ(sums(0), 0.0);
    EXPECT_EQ(sums(1), 0.0);
    EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(b).rank(), 2);
  }
}

TEST(WeightSchedule, InactiveAtZeroTorque) {
  AllocatorParams p = frozen_params(0.5, 1.0);
  p.saturation_barrier = true;
  p.w_base = {1.0, 1.0, 1.0};
  const WeightSchedule ws = weight_schedule({0.0, 0.0, 0.0}, p, 45.0);
  EXPECT_EQ(ws.w, (Weights{1.0, 1.0, 1.0}));
  EXPECT_FALSE(ws.any_saturated());
}

TEST(WeightSchedule, BoundaryHitsEpsilonCap) {
  AllocatorParams p = frozen_params(0.5, 1.0);
  p.saturation_barrier = true;
  p.w_base = {0.3, 1.0, 1.0};
  p.limits.fes_flexor_max = [](double) { return 4.0; };
  const WeightSchedule at = weight_schedule({4.0, 0.0, 0.0}, p, 45.0);
  EXPECT_NEAR(at.w[0], 0.3 / p.fes_margin_eps, 1e-9);
  const WeightSchedule beyond = weight_schedule({5.0, 0.0, 0.0}, p, 45.0);
  EXPECT_NEAR(beyond.w[0], 0.3 / p.fes_margin_eps, 1e-9);
  EXPECT_TRUE(beyond.saturated[0]);
}

TEST(WeightSchedule, AlphaCapFloorsFesWeights) {
  AllocatorParams p = frozen_params(0.5, 1.0);
  p.w_base = {0.01, 0.01, 1.0};
  p.alpha_cap = 0.8;
  const WeightSchedule ws = weight_schedule({0.0, 0.0, 0.0}, p, 45.0);
  EXPECT_NEAR(ws.w[0], 0.25, 1e-15);
  EXPECT_NEAR(ws.w[1], 0.25, 1e-15);
  EXPECT_NEAR(ws.w[2] / (ws.w[0] + ws.w[2]), 0.8, 1e-15);
}

TEST(DerivedGains, Examples) {
  AllocatorParams p;
  p.k = {2.0, 3.0};
  const DerivedGains sym = derived_gains(p, {1.0, 1.0, 1.0}, kFlexionDistributor);
  EXPECT_DOUBLE_EQ(sym.alpha_s[0], 0.5);
  const DerivedGains g = derived_gains(p, {0.25, 1.0, 1.0}, kExtensionDistributor);
  EXPECT_DOUBLE_EQ(g.alpha_s[0], 0.8);
  EXPECT_EQ(g.k_prime[0], 0.0);
  EXPECT_DOUBLE_EQ(g.k_prime[1], 3.0 * 2.0);
}

TEST(AllocatorStep, MatchesFirstOrderClosedForm) {
  const double k_prime = 5.0;
  const AllocatorParams p = frozen_params(0.8, k_prime);
  const JointTorque nominal{0.0, 0.0, 10.0};
  AllocatorState s;
  const double dt = 1e-3;
  for (int i = 1; i <= 1000; ++i) {
    s = allocator_step(s, nominal, p, 45.0, dt);
    if (i % 100 == 0) {
      const double t = i * dt;
      EXPECT_NEAR(s.zeta[0], 8.0 * (1.0 - std::exp(-k_prime * t)), 1e-6) << "t=" << t;
    }
  }
  EXPECT_NEAR(s.zeta[0], 7.946, 5e-4);
}

TEST(AllocatorStep, EquilibriumAtZero) {
  const AllocatorParams p = frozen_params(0.8, 5.0);
  AllocatorState s;
  for (int i = 0; i < 100; ++i) s = allocator_step(s, {}, p, 45.0, 1e-3);
  EXPECT_EQ(s.zeta[0], 0.0);
  EXPECT_EQ(s.zeta[1], 0.0);
}

TEST(AllocatorStep, InactiveChannelFrozenBitForBit) {
  AllocatorParams p = frozen_params(0.7, 3.0);
  p.saturation_barrier = true;
  AllocatorState s;
  s.zeta = {0.0, -1.2345678901234567};
  for (int i = 0; i < 500; ++i) {
    const double before = s.zeta[1];
    s = allocator_step(s, {0.0, 0.0, 10.0}, p, 45.0, 1e-3);
    ASSERT_EQ(s.zeta[1], before);
  }
  s.zeta[0] = 3.25;
  for (int i = 0; i < 500; ++i) {
    const double before = s.zeta[0];
    s = allocator_step(s, {0.0, 0.0, -4.0}, p, 45.0, 1e-3);
    ASSERT_EQ(s.zeta[0], before);
  }
}

TEST(AllocatorStep, DtGuard) {
  const AllocatorParams p = frozen_params(0.8, 5.0);
  EXPECT_THROW(allocator_step({}, {}, p, 45.0, 0.0), ConfigError);
  EXPECT_THROW(allocator_step({}, {}, p, 45.0, 0.051), ConfigError);
  EXPECT_NO_THROW(allocator_step({}, {}, p, 45.0, 0.05));
}

TEST(Redistribute, Examples) {
  AllocatorState s;
  s.zeta = {8.0, 0.0};
  EXPECT_EQ(redistribute({0.0, 0.0, 10.0}, s), (JointTorque{8.0, 0.0, 2.0}));
  EXPECT_EQ(redistribute({0.0, 0.0, 10.0}, s, BasisKind::cocontraction), (JointTorque{8.0, 0.0, 2.0}));

  AllocatorState zero;
  EXPECT_EQ(redistribute({1.0, -2.0, 3.0}, zero), (JointTorque{1.0, -2.0, 3.0}));

  AllocatorState ext;
  ext.zeta = {0.0, 4.0};
  const JointTorque cc = redistribute({0.0, 0.0, -6.0}, ext, BasisKind::cocontraction);
  EXPECT_EQ(cc, (JointTorque{4.0, -4.0, -6.0}));
  EXPECT_EQ(cc.net(), -6.0);
  ext.zeta = {0.0, -4.0};
  EXPECT_EQ(redistribute({0.0, 0.0, -6.0}, ext), (JointTorque{0.0, -4.0, -2.0}));
}

TEST(Redistribute, NetNeutralForRandomZeta) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const JointTorque nominal{u(rng), u(rng), u(rng)};
    AllocatorState s;
    s.zeta = {u(rng), u(rng)};
    for (BasisKind kind : {BasisKind::cocontraction, BasisKind::exchange}) {
      EXPECT_NEAR(redistribute(nominal, s, kind).net(), nominal.net(), 1e-12);
    }
  }
}

TEST(ConstantAllocate, Examples) {
  const JointTorque pos = constant_allocate(10.0, 0.9);
  EXPECT_DOUBLE_EQ(pos.flexor_fes, 9.0);
  EXPECT_EQ(pos.extensor_fes, 0.0);
  EXPECT_NEAR(pos.exo, 1.0, 1e-15);
  const JointTorque neg = constant_allocate(-10.0, 0.9);
  EXPECT_EQ(neg.flexor_fes, 0.0);
  EXPECT_DOUBLE_EQ(neg.extensor_fes, -9.0);
  EXPECT_NEAR(neg.exo, -1.0, 1e-15);
  EXPECT_EQ(constant_allocate(7.0, 0.0), (JointTorque{0.0, 0.0, 7.0}));
}

TEST(BandwidthMatchedGains, ConvergenceRateMatchesBandwidth) {
  const Weights w{0.1, 0.1, 1.0};
  const auto k = bandwidth_matched_gains(w, 0.908, 3.976);
  AllocatorParams p;
  p.k = k;
  const double kf = derived_gains(p, w, kFlexionDistributor).k_prime[0];
  const double ke = derived_gains(p, w, kExtensionDistributor).k_prime[1];
  EXPECT_NEAR(kf, 2.0 * M_PI * 0.908, 1e-12);
  EXPECT_NEAR(ke, 2.0 * M_PI * 3.976, 1e-12);
}
