#include <cmath>

#include <gtest/gtest.h>

#include "dynalloc/errors.hpp"
#include "dynalloc/extended_allocator.hpp"
#include "dynalloc/oracles.hpp"

using namespace dynalloc;

namespace {

ExtendedAllocatorParams two_flexor_params() {
  ExtendedAllocatorParams p;
  p.layout = {2, 1};
  p.k_plus = Eigen::Vector3d(3.0, 3.0, 3.0);
  p.w_plus = Eigen::Vector4d(0.2, 0.2, 0.5, 1.0);
  const TorqueBound m = [](double) { return 50.0; };
  p.muscle_limits = {m, m, m};
  p.exo_max = 50.0;
  p.saturation_barrier = false;
  return p;
}

}  // namespace

TEST(ExtendedBasis, ColumnsSumToZero) {
  const Eigen::MatrixXd b = extended_basis(3);
  ASSERT_EQ(b.rows(), 4);
  ASSERT_EQ(b.cols(), 3);
  for (Eigen::Index j = 0; j < b.cols(); ++j) EXPECT_EQ(b.col(j).sum(), 0.0);
  EXPECT_EQ(b.topRows(3), Eigen::MatrixXd::Identity(3, 3));
}

TEST(ExtendedRedistribute, ZeroStateIsIdentity) {
  const MuscleLayout layout{2, 1};
  const ExtendedAllocatorState s = make_extended_state(layout);
  const Eigen::Vector4d nominal(1.0, 0.5, -0.25, 2.0);
  EXPECT_EQ(extended_redistribute(nominal, s, layout), Eigen::VectorXd(nominal));
}

TEST(ExtendedAllocator, SymmetricFlexorsShareEqually) {
  const ExtendedAllocatorParams p = two_flexor_params();
  ExtendedAllocatorState s = make_extended_state(p.layout);
  const Eigen::Vector4d nominal(0.0, 0.0, 0.0, 6.0);
  for (int i = 0; i < 20000; ++i) s = extended_allocator_step(s, nominal, p, 45.0, 1e-3);
  const Eigen::VectorXd tau = extended_redistribute(nominal, s, p.layout);
  EXPECT_NEAR(tau[0], tau[1], 1e-6);
  // Steady state of the flexor block: w_f τ_f = w_E τ_E and 2τ_f + τ_E = 6.
  const double tau_f = 6.0 / (2.0 + 0.2 / 1.0);
  EXPECT_NEAR(tau[0], tau_f, 1e-6);
  EXPECT_NEAR(tau.sum(), 6.0, 1e-12);
}

TEST(ExtendedAllocator, DimensionMismatch) {
  const ExtendedAllocatorParams p = two_flexor_params();
  const ExtendedAllocatorState s = make_extended_state(p.layout);
  EXPECT_THROW(extended_allocator_step(s, Eigen::Vector3d::Zero(), p, 45.0, 1e-3), ConfigError);
  ExtendedAllocatorParams bad = p;
  bad.k_plus = Eigen::Vector2d(1.0, 1.0);
  EXPECT_THROW(extended_allocator_step(s, Eigen::Vector4d::Zero(), bad, 45.0, 1e-3), ConfigError);
}

TEST(ExtendedAllocator, ZeroInputStaysZero) {
  const ExtendedAllocatorParams p = two_flexor_params();
  ExtendedAllocatorState s = make_extended_state(p.layout);
  for (int i = 0; i < 1000; ++i) s = extended_allocator_step(s, Eigen::Vector4d::Zero(), p, 45.0, 1e-3);
  EXPECT_EQ(s.zeta_plus, Eigen::VectorXd::Zero(3));
}

TEST(ExtendedAllocator, ReducesToTwoChannelAllocator) {
  EXPECT_LE(extended_equivalence_check().worst, 1e-9);
  const OracleResult mismatch = extended_equivalence_check(true);
  EXPECT_FALSE(mismatch.passed);
  EXPECT_GT(mismatch.worst, 1e-9);
}

TEST(ExtendedAllocator, CollapseExpand) {
  const MuscleLayout layout{2, 3};
  const JointTorque t{4.0, -3.0, 1.5};
  const Eigen::VectorXd plus = expand(t, layout);
  EXPECT_EQ(plus.size(), 6);
  EXPECT_EQ(collapse(plus, layout), t);
}
