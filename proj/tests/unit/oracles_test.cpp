#include <cmath>

#include <gtest/gtest.h>

#include "dynalloc/errors.hpp"
#include "dynalloc/oracles.hpp"

using namespace dynalloc;

TEST(Invisibility, ZeroScheduleIsExact) {
  InvisibilityOptions o;
  o.zeta = [](double) { return std::array<double, 2>{0.0, 0.0}; };
  EXPECT_EQ(invisibility_check(o).worst, 0.0);
}

TEST(Invisibility, SinusoidalSchedule) {
  InvisibilityOptions o;
  o.zeta = [](double t) { return std::array<double, 2>{5.0 * std::sin(t), 0.0}; };
  const OracleResult r = invisibility_check(o);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.worst, 1e-9);
}

TEST(Invisibility, SeededFamilies) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    InvisibilityOptions o;
    o.seed = seed;
    EXPECT_LE(invisibility_check(o).worst, 1e-9) << seed;
  }
}

TEST(Invisibility, CorruptedBasisIsVisible) {
  for (BasisKind kind : {BasisKind::exchange, BasisKind::cocontraction}) {
    InvisibilityOptions o;
    o.basis = basis_matrix(kind);
    o.basis(2, 0) = -1.1;
    const OracleResult r = invisibility_check(o);
    EXPECT_FALSE(r.passed);
    EXPECT_GT(r.worst, 1e-3);
  }
}

TEST(Invisibility, UnboundedScheduleRejected) {
  InvisibilityOptions o;
  o.zeta = [](double t) { return std::array<double, 2>{std::exp(t), 0.0}; };
  EXPECT_THROW(invisibility_check(o), ConfigError);
}

TEST(Lyapunov, HandValues) {
  const Weights identity{1.0, 1.0, 1.0};
  for (BasisKind kind : {BasisKind::exchange, BasisKind::cocontraction}) {
    EXPECT_EQ(lyapunov_derivative({1.0, 0.0}, kFlexionDistributor, identity, basis_matrix(kind)), -2.0);
    EXPECT_EQ(lyapunov_derivative({0.0, 0.0}, kExtensionDistributor, identity, basis_matrix(kind)), 0.0);
  }
}

TEST(Lyapunov, RandomTrials) {
  const OracleResult r = lyapunov_check(1000, 42);
  EXPECT_TRUE(r.passed) << r.detail;
  EXPECT_LE(r.worst, 1e-12);
  EXPECT_TRUE(lyapunov_check(100, 7, BasisKind::cocontraction).passed);
  EXPECT_THROW(lyapunov_check(99, 1), ConfigError);
}

TEST(SteadyState, ConvergesToShare) {
  const SteadyStateResult r = steady_state_check();
  EXPECT_TRUE(r.result.passed);
  EXPECT_GE(r.fes_final, 3.96);
  EXPECT_LE(r.fes_final, 4.04);
}

TEST(SteadyState, DoubledRateHalvesSettling) {
  SteadyStateOptions slow;
  SteadyStateOptions fast;
  fast.k_prime = 2.0 * slow.k_prime;
  const double ts = steady_state_check(slow).time_to_band;
  const double tf = steady_state_check(fast).time_to_band;
  ASSERT_GT(tf, 0.0);
  EXPECT_NEAR(ts / tf, 2.0, 0.2);
}

TEST(SteadyState, MatchingNominalShareNeedsNoRedistribution) {
  SteadyStateOptions o;
  o.alpha_bar = o.alpha_s;
  const SteadyStateResult r = steady_state_check(o);
  EXPECT_NEAR(r.fes_final, r.target, 1e-12);
  EXPECT_EQ(r.time_to_band, 0.0);
}

namespace {

// Trace of a frozen-weight allocator run under a constant flexion request.
Trace allocator_trace(double net, std::array<double, 2> zeta0, int ticks) {
  AllocatorParams p;
  p.w_base = {0.25, 0.25, 1.0};
  p.k = {4.0, 4.0};
  p.saturation_barrier = false;
  p.limits.fes_flexor_max = [](double) { return 100.0; };
  p.limits.fes_extensor_max = [](double) { return 100.0; };
  p.limits.exo_max = 100.0;
  p.limits.fes_flexor_bandwidth_hz = 1.0;
  p.limits.fes_extensor_bandwidth_hz = 1.0;
  Trace t;
  t.columns = {trace_columns().begin(), trace_columns().end()};
  AllocatorState s;
  s.zeta = zeta0;
  for (int i = 0; i < ticks; ++i) {
    const AllocatorTick tick = allocator_tick(s, {0.0, 0.0, net}, p, 45.0, 1e-3);
    TraceRow r;
    r.t_s = i * 1e-3;
    r.tau_n_nominal = net;
    r.zeta1 = s.zeta[0];
    r.zeta2 = s.zeta[1];
    r.alpha_s1 = tick.gains.alpha_s[0];
    r.alpha_s2 = tick.gains.alpha_s[1];
    t.rows.push_back(r);
    s = tick.next;
  }
  return t;
}

}  // namespace

TEST(IssBound, FrozenWeightsBoundIsShareTimesPeak) {
  const IssReport rep = iss_bound_report(allocator_trace(10.0, {0.0, 0.0}, 3000));
  EXPECT_TRUE(rep.passed);
  EXPECT_DOUBLE_EQ(rep.channels[0].bound, 0.8 * 10.0);
  // The steady state approaches the bound from below.
  EXPECT_GT(rep.channels[0].max_abs_zeta, 0.999 * rep.channels[0].bound);
  EXPECT_LE(rep.channels[0].max_abs_zeta, rep.channels[0].bound);
}

TEST(IssBound, UnforcedDecay) {
  const IssReport rep = iss_bound_report(allocator_trace(0.0, {3.0, -2.0}, 2000));
  EXPECT_TRUE(rep.passed);
  EXPECT_LE(rep.channels[0].max_abs_zeta, 3.0);
  EXPECT_LE(rep.channels[1].max_abs_zeta, 2.0);
}

TEST(IssBound, DetectsExcursion) {
  Trace t = allocator_trace(10.0, {0.0, 0.0}, 100);
  t.rows[50].zeta1 = 9.0;
  EXPECT_FALSE(iss_bound_check(t).passed);
}

TEST(Format, OneLinePerOracle) {
  const std::string line = format_result({"demo", true, 0.5, "x=1"});
  EXPECT_EQ(line, "demo PASS worst=0.5 x=1");
}
