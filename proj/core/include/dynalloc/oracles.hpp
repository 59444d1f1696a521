#pragma once

// Executable checks of the allocator's stability and invisibility properties.
// Every check is deterministic for a given seed.

#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "dynalloc/allocator.hpp"
#include "dynalloc/plant.hpp"
#include "dynalloc/trace.hpp"

namespace dynalloc {

struct OracleResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // worst observed value of the checked quantity
  std::string detail;
};

/// "name status worst detail" on one line.
std::string format_result(const OracleResult& r);

using ZetaSchedule = std::function<std::array<double, 2>(double)>;

/// Bounded ζ(t) family indexed by seed: constants, sinusoids, steps and random
/// piecewise-constant signals, in turn.
ZetaSchedule zeta_schedule(std::uint64_t seed);

struct InvisibilityOptions {
  double duration_s = 30.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  ZetaSchedule zeta;  // empty: zeta_schedule(seed)
  RedistributionBasis basis = exchange_basis();
  double zeta_limit = 1e3;  // larger |ζ| rejects the schedule
  double tolerance = 1e-9;
};

/// Drives the plant open loop with τ̄(t) and with τ̄(t) + B S ζ(t) and reports
/// the largest angle (deg) or velocity (deg/s) difference.
///
/// Throws ConfigError when the schedule leaves ±zeta_limit.
OracleResult invisibility_check(const InvisibilityOptions& options);

/// V̇ = −ζᵀS Bᵀ W B S ζ ≤ 1e−12 for random W, σ, ζ, and V non-increasing along
/// unforced allocator runs. Requires n_trials >= 100.
OracleResult lyapunov_check(int n_trials, std::uint64_t seed, BasisKind basis = BasisKind::exchange);

struct IssChannel {
  double zeta0 = 0.0;
  double max_abs_zeta = 0.0;
  double max_abs_c = 0.0;  // max |αˢᵢ − ᾱ|
  double bound = 0.0;      // max{|ζᵢ(0)|, max|cᵢ|·max|τ̄ᴺ|}
  double margin = 0.0;     // smallest running bound − |ζᵢ| where either is nonzero
};

struct IssReport {
  std::array<IssChannel, 2> channels{};
  double max_abs_net = 0.0;
  bool passed = true;
};

/// Uniform bound |ζᵢ(t)| ≤ max{|ζᵢ(0)|, max|cᵢ|·max|τ̄ᴺ|} checked at every row
/// with running maxima. Throws InvalidInput when a needed column is missing.
IssReport iss_bound_report(const Trace& trace, double tolerance = 1e-6);
OracleResult iss_bound_check(const Trace& trace, double tolerance = 1e-6);

struct SteadyStateOptions {
  double net = 5.0;
  double alpha_s = 0.8;
  double alpha_bar = 0.0;
  double k_prime = 5.0;  // 1/s
  double dt = 1e-3;
};

struct SteadyStateResult {
  double fes_final = 0.0;     // FES torque after 5/k′ seconds
  double target = 0.0;        // αˢ·τ̄ᴺ
  double time_to_band = 0.0;  // first time within 1% of |τ̄ᴺ|, s
  OracleResult result;
};

/// Constant τ̄ᴺ with frozen W: FES torque reaches αˢτ̄ᴺ within 1% of |τ̄ᴺ|
/// after 5/k′ seconds.
SteadyStateResult steady_state_check(const SteadyStateOptions& options = {});

/// Runs the two-channel and the extended allocator (one flexor, one extensor)
/// side by side. `mismatch` scales the extended gains as a negative control.
OracleResult extended_equivalence_check(bool mismatch = false, double tolerance = 1e-9);

}  // namespace dynalloc
