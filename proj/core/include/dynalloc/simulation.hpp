#pragma once

// Closed-loop runner. Each control tick:
//   reference → nominal torque → allocation (applied torque, weights)
//   → FES feedforward and muscle response → exoskeleton command and lag
//   → plant step → allocator state update → trace row.

#include <array>
#include <cstddef>
#include <string>

#include "dynalloc/fes_io.hpp"
#include "dynalloc/scenario.hpp"
#include "dynalloc/trace.hpp"

namespace dynalloc {

struct RunSummary {
  std::string scenario;
  std::string scenario_hash;
  std::string mode;
  std::size_t ticks = 0;
  double duration_s = 0.0;
  double rmse_deg = 0.0;
  /// FES share statistics over ticks with |τ̄ᴺ| >= kAlphaStatsMinNet, α clipped to [0, 1].
  double alpha_mean = 0.0;
  double alpha_p95 = 0.0;  // fraction of those ticks with α >= 0.95
  double alpha_const = 0.0;  // share used by constant allocation
  std::size_t af_violations = 0;  // ticks with a flexor or extensor violation
  std::size_t exo_clamps = 0;
  std::size_t stim_saturations = 0;
  std::size_t barrier_saturations = 0;
  std::array<double, 2> max_abs_zeta{};
  std::array<double, 2> zeta_bound{};
  double max_net_error = 0.0;  // max |τFf + τFe + τE − τ̄ᴺ|
};

inline constexpr double kAlphaStatsMinNet = 0.1;  // N·m

struct RunResult {
  Trace trace;
  RunSummary summary;
};

/// FES models for a scenario: the synthetic pair or the model file it names.
FesModelSet scenario_models(const Scenario& s);

/// Runs the scenario. Constant allocation without an explicit share first
/// runs the dynamic twin and uses its mean α.
///
/// Throws ConfigError before the first tick on bad settings and NumericError
/// with the tick index when a state turns non-finite.
RunResult run(const Scenario& s);
RunResult run(const Scenario& s, const FesModelSet& models);

RunSummary summarize(const Trace& trace, double alpha_const = 0.0);

}  // namespace dynalloc
