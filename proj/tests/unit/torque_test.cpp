#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "dynalloc/errors.hpp"
#include "dynalloc/torque.hpp"

using namespace dynalloc;

TEST(Decompose, MixedSigns) {
  const Decomposition d = decompose({2.0, -1.0, 3.0});
  EXPECT_DOUBLE_EQ(d.net, 4.0);
  EXPECT_DOUBLE_EQ(d.cocontraction, 1.0);
  EXPECT_DOUBLE_EQ(d.cooperative_gain, 0.25);
  EXPECT_EQ(d.sigma, kFlexionDistributor);
}

TEST(Decompose, ZeroNetRetainsPrevious) {
  Decomposition prev;
  prev.cooperative_gain = 0.7;
  prev.sigma = kExtensionDistributor;
  const Decomposition d = decompose({0.0, 0.0, 0.0}, prev);
  EXPECT_EQ(d.net, 0.0);
  EXPECT_EQ(d.cocontraction, 0.0);
  EXPECT_EQ(d.cooperative_gain, 0.7);
  EXPECT_EQ(d.sigma, kExtensionDistributor);
}

TEST(Decompose, AllNegative) {
  const Decomposition d = decompose({-1.0, -2.0, -3.0});
  EXPECT_DOUBLE_EQ(d.net, -6.0);
  EXPECT_DOUBLE_EQ(d.cocontraction, 1.0);
  EXPECT_DOUBLE_EQ(d.cooperative_gain, 0.5);
  EXPECT_EQ(d.sigma, kExtensionDistributor);
}

TEST(Decompose, RejectsNonFinite) {
  EXPECT_THROW(decompose({std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0}), InvalidInput);
  EXPECT_THROW(decompose({0.0, 0.0, std::numeric_limits<double>::infinity()}), InvalidInput);
}

TEST(Reconstruct, Examples) {
  const JointTorque plain = reconstruct({10.0, 0.8, 0.0, kFlexionDistributor});
  EXPECT_DOUBLE_EQ(plain.flexor_fes, 8.0);
  EXPECT_EQ(plain.extensor_fes, 0.0);
  EXPECT_NEAR(plain.exo, 2.0, 1e-15);
  const JointTorque cc = reconstruct({10.0, 0.8, 1.0, kFlexionDistributor});
  EXPECT_DOUBLE_EQ(cc.flexor_fes, 9.0);
  EXPECT_DOUBLE_EQ(cc.extensor_fes, -1.0);
  EXPECT_NEAR(cc.exo, 2.0, 1e-15);
  EXPECT_EQ(reconstruct({0.0, 0.3, 0.0, kExtensionDistributor}), (JointTorque{0.0, 0.0, 0.0}));
}

TEST(Reconstruct, RoundTripAndNet) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::uniform_real_distribution<double> e(-10.0, 10.0);
  for (int i = 0; i < 2000; ++i) {
    // Sign-consistent split: flexor >= 0, extensor <= 0, FES net agreeing with the net torque.
    const double f = u(rng);
    const double x = -u(rng);
    const double exo = e(rng);
    const JointTorque tau{f, x, exo};
    if (tau.net() == 0.0 || (f + x) * tau.net() < 0.0) continue;
    const Decomposition d = decompose(tau);
    const JointTorque back = reconstruct(d);
    EXPECT_NEAR(back.flexor_fes, f, 1e-12);
    EXPECT_NEAR(back.extensor_fes, x, 1e-12);
    EXPECT_NEAR(back.exo, exo, 1e-12);
    EXPECT_NEAR(back.net(), d.net, 1e-12);
  }
}

TEST(Decompose, ScaleCovariant) {
  const JointTorque tau{1.5, -0.5, 2.0};
  const Decomposition a = decompose(tau);
  const Decomposition b = decompose({3.0 * tau.flexor_fes, 3.0 * tau.extensor_fes, 3.0 * tau.exo});
  EXPECT_DOUBLE_EQ(b.net, 3.0 * a.net);
  EXPECT_DOUBLE_EQ(b.cooperative_gain, a.cooperative_gain);
}

TEST(Distributor, SignAndRetention) {
  EXPECT_EQ(distributor_for(1e-12, kExtensionDistributor), kFlexionDistributor);
  EXPECT_EQ(distributor_for(-3.0, kFlexionDistributor), kExtensionDistributor);
  EXPECT_EQ(distributor_for(0.0, kExtensionDistributor), kExtensionDistributor);
}
