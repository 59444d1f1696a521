#pragma once

// Per-tick simulation trace and its CSV form.
//
// The CSV starts with '#' comment lines carrying provenance (scenario name and
// hash, allocator mode), followed by one header row and one row per tick.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dynalloc {

/// Event bits of TraceRow::flags.
enum TraceFlag : std::uint32_t {
  kFlexorViolation = 1u << 0,    // desired flexor torque outside [0, m_f(θ)]
  kExtensorViolation = 1u << 1,  // desired extensor torque outside [−m_e(θ), 0]
  kExoClamp = 1u << 2,
  kFlexorStimSaturation = 1u << 3,
  kExtensorStimSaturation = 1u << 4,
  kBarrierSaturation = 1u << 5,
};

struct TraceRow {
  double t_s = 0.0;
  double theta_d_deg = 0.0;
  double theta_deg = 0.0;
  double tau_n_nominal = 0.0;
  double tau_ff = 0.0;
  double tau_fe = 0.0;
  double tau_e = 0.0;
  double tau_f_realized = 0.0;
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double alpha = 0.0;
  double alpha_s1 = 0.0;
  double alpha_s2 = 0.0;
  double alpha_bar = 0.0;
  double upsilon_f = 0.0;
  double upsilon_e = 0.0;
  double af_upper = 0.0;
  double af_lower = 0.0;
  std::uint32_t flags = 0;
};

/// Column names in file order.
const std::vector<std::string>& trace_columns();

struct Trace {
  std::string scenario;
  std::string scenario_hash;
  std::string mode;
  std::vector<TraceRow> rows;
  /// Columns present in the source file; all of them for generated traces.
  std::set<std::string> columns;

  /// Throws InvalidInput naming the first missing column.
  void require(std::initializer_list<std::string_view> names) const;
};

void write_trace(std::ostream& out, const Trace& trace);
/// Missing columns are tolerated and left zero; see Trace::require.
Trace read_trace(std::istream& in);

void save_trace(const std::string& path, const Trace& trace);
Trace load_trace(const std::string& path);

struct ChannelStats {
  double mean = 0.0;
  double max_abs = 0.0;
};

struct TraceStats {
  double rmse_deg = 0.0;
  std::size_t violations = 0;  // ticks with a flexor or extensor violation
  ChannelStats flexor;
  ChannelStats extensor;
  ChannelStats exo;
};

TraceStats trace_stats(const Trace& trace);

struct ComparisonReport {
  TraceStats a;
  TraceStats b;
  double max_abs_delta_theta = 0.0;
  double max_abs_delta_tau_ff = 0.0;
  double max_abs_delta_tau_fe = 0.0;
  double max_abs_delta_tau_e = 0.0;
};

/// Paired statistics. Throws ComparisonError unless both traces share the
/// same time grid.
ComparisonReport compare(const Trace& a, const Trace& b);

}  // namespace dynalloc
