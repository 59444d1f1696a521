#include "dynalloc/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "dynalloc/errors.hpp"
#include "dynalloc/text.hpp"

namespace dynalloc {

namespace {

using Member = double TraceRow::*;

const std::vector<std::pair<std::string, Member>>& numeric_columns() {
  static const std::vector<std::pair<std::string, Member>> cols{
      {"t_s", &TraceRow::t_s},
      {"theta_d_deg", &TraceRow::theta_d_deg},
      {"theta_deg", &TraceRow::theta_deg},
      {"tau_N_nominal_Nm", &TraceRow::tau_n_nominal},
      {"tau_Ff_Nm", &TraceRow::tau_ff},
      {"tau_Fe_Nm", &TraceRow::tau_fe},
      {"tau_E_Nm", &TraceRow::tau_e},
      {"tau_F_realized_Nm", &TraceRow::tau_f_realized},
      {"zeta1_Nm", &TraceRow::zeta1},
      {"zeta2_Nm", &TraceRow::zeta2},
      {"alpha", &TraceRow::alpha},
      {"alpha_s1", &TraceRow::alpha_s1},
      {"alpha_s2", &TraceRow::alpha_s2},
      {"alpha_bar", &TraceRow::alpha_bar},
      {"upsilon_f_mA", &TraceRow::upsilon_f},
      {"upsilon_e_mA", &TraceRow::upsilon_e},
      {"AF_upper_Nm", &TraceRow::af_upper},
      {"AF_lower_Nm", &TraceRow::af_lower},
  };
  return cols;
}

}  // namespace

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, member] : numeric_columns()) out.push_back(name);
    out.emplace_back("flags");
    return out;
  }();
  return names;
}

void Trace::require(std::initializer_list<std::string_view> names) const {
  for (auto n : names) {
    if (!columns.count(std::string(n))) throw InvalidInput("trace is missing column '" + std::string(n) + "'");
  }
}

void write_trace(std::ostream& out, const Trace& trace) {
  out << "# dynalloc trace v1\n";
  out << "# scenario: " << trace.scenario << '\n';
  out << "# scenario_hash: " << trace.scenario_hash << '\n';
  out << "# mode: " << trace.mode << '\n';
  out << "# units: s, deg, N*m, mA; flags bits 1 flexor violation, 2 extensor violation, 4 exo clamp, "
         "8 flexor stimulator saturation, 16 extensor stimulator saturation, 32 barrier saturation\n";
  const auto& names = trace_columns();
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  std::string line;
  for (const auto& row : trace.rows) {
    line.clear();
    for (const auto& [name, member] : numeric_columns()) {
      line += format_double(row.*member);
      line += ',';
    }
    line += std::to_string(row.flags);
    line += '\n';
    out << line;
  }
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::vector<std::string> header;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto body = trim(t.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string_view::npos) continue;
      const auto key = trim(body.substr(0, colon));
      const std::string value(trim(body.substr(colon + 1)));
      if (key == "scenario") trace.scenario = value;
      if (key == "scenario_hash") trace.scenario_hash = value;
      if (key == "mode") trace.mode = value;
      continue;
    }
    for (auto c : split(t, ',')) header.emplace_back(trim(c));
    break;
  }
  if (header.empty()) throw InvalidInput("trace: missing header row");

  std::map<std::string, Member> lookup;
  for (const auto& [name, member] : numeric_columns()) lookup[name] = member;
  std::vector<Member> slots(header.size(), nullptr);
  std::ptrdiff_t flags_index = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    trace.columns.insert(header[i]);
    if (header[i] == "flags") {
      flags_index = static_cast<std::ptrdiff_t>(i);
    } else if (auto it = lookup.find(header[i]); it != lookup.end()) {
      slots[i] = it->second;
    }
  }

  while (std::getline(in, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split(t, ',');
    if (cells.size() != header.size()) {
      throw InvalidInput("trace line " + std::to_string(number) + ": expected " + std::to_string(header.size()) +
                         " fields");
    }
    TraceRow row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (slots[i]) {
        row.*slots[i] = parse_double(cells[i], header[i]);
      } else if (static_cast<std::ptrdiff_t>(i) == flags_index) {
        row.flags = static_cast<std::uint32_t>(parse_int(cells[i], "flags"));
      }
    }
    trace.rows.push_back(row);
  }
  return trace;
}

void save_trace(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write trace '" + path + "'");
  write_trace(out, trace);
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trace '" + path + "'");
  return read_trace(in);
}

namespace {

void accumulate(ChannelStats& s, double v) {
  s.mean += v;
  s.max_abs = std::max(s.max_abs, std::abs(v));
}

}  // namespace

TraceStats trace_stats(const Trace& trace) {
  trace.require({"theta_d_deg", "theta_deg", "tau_Ff_Nm", "tau_Fe_Nm", "tau_E_Nm", "flags"});
  TraceStats s;
  if (trace.rows.empty()) return s;
  double se = 0.0;
  for (const auto& r : trace.rows) {
    const double e = r.theta_d_deg - r.theta_deg;
    se += e * e;
    if (r.flags & (kFlexorViolation | kExtensorViolation)) ++s.violations;
    accumulate(s.flexor, r.tau_ff);
    accumulate(s.extensor, r.tau_fe);
    accumulate(s.exo, r.tau_e);
  }
  const auto n = static_cast<double>(trace.rows.size());
  s.rmse_deg = std::sqrt(se / n);
  s.flexor.mean /= n;
  s.extensor.mean /= n;
  s.exo.mean /= n;
  return s;
}

ComparisonReport compare(const Trace& a, const Trace& b) {
  a.require({"t_s"});
  b.require({"t_s"});
  if (a.rows.size() != b.rows.size()) {
    throw ComparisonError("traces differ in length (" + std::to_string(a.rows.size()) + " vs " +
                          std::to_string(b.rows.size()) + " rows)");
  }
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (std::abs(a.rows[i].t_s - b.rows[i].t_s) > 1e-9) {
      throw ComparisonError("traces differ in time grid at row " + std::to_string(i));
    }
  }
  ComparisonReport r;
  r.a = trace_stats(a);
  r.b = trace_stats(b);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    r.max_abs_delta_theta = std::max(r.max_abs_delta_theta, std::abs(x.theta_deg - y.theta_deg));
    r.max_abs_delta_tau_ff = std::max(r.max_abs_delta_tau_ff, std::abs(x.tau_ff - y.tau_ff));
    r.max_abs_delta_tau_fe = std::max(r.max_abs_delta_tau_fe, std::abs(x.tau_fe - y.tau_fe));
    r.max_abs_delta_tau_e = std::max(r.max_abs_delta_tau_e, std::abs(x.tau_e - y.tau_e));
  }
  return r;
}

}  // namespace dynalloc
