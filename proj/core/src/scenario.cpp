#include "dynalloc/scenario.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "dynalloc/errors.hpp"
#include "dynalloc/text.hpp"

namespace dynalloc {

std::string to_string(AllocatorMode m) {
  switch (m) {
    case AllocatorMode::dynamic:
      return "dynamic";
    case AllocatorMode::constant:
      return "constant";
    case AllocatorMode::extended:
      return "extended";
  }
  return "dynamic";
}

std::string to_string(ReferenceMode m) { return m == ReferenceMode::trajectory ? "trajectory" : "torque_steps"; }

void Scenario::validate() const {
  if (!(dt > 0.0)) throw ConfigError("scenario: dt must be positive");
  if (!(duration_s > 0.0)) throw ConfigError("scenario: duration must be positive");
  trajectory.validate();
  impedance.validate();
  if (reference == ReferenceMode::torque_steps) {
    if (steps.empty()) throw ConfigError("scenario: torque_steps reference needs reference.steps");
    for (std::size_t i = 1; i < steps.size(); ++i) {
      if (!(steps[i].t_s > steps[i - 1].t_s)) throw ConfigError("scenario: step times must increase");
    }
  }
  if (k && (!((*k)[0] > 0.0) || !((*k)[1] > 0.0))) throw ConfigError("scenario: allocator.k must be positive");
  for (double w : w_base) {
    if (!(w > 0.0)) throw ConfigError("scenario: allocator.w_base must be positive");
  }
  if (alpha_cap && !(*alpha_cap > 0.0 && *alpha_cap <= 1.0)) {
    throw ConfigError("scenario: allocator.alpha_cap must lie in (0, 1]");
  }
  if (alpha_const && !(*alpha_const >= 0.0 && *alpha_const <= 1.0)) {
    throw ConfigError("scenario: allocator.alpha_const must lie in [0, 1]");
  }
  if (!(fes_margin_eps > 0.0 && fes_margin_eps < 1.0)) throw ConfigError("scenario: allocator.eps must lie in (0, 1)");
  if (n_flexor < 1 || n_extensor < 1) throw ConfigError("scenario: muscle counts must be at least 1");
  if (mode != AllocatorMode::extended && (n_flexor != 1 || n_extensor != 1)) {
    throw ConfigError("scenario: muscle counts other than 1 need allocator.mode = extended");
  }
  if (mode == AllocatorMode::extended && basis != BasisKind::exchange) {
    throw ConfigError("scenario: the extended allocator uses the exchange basis");
  }
  plant.validate();
  exo.validate();
  if (!(fes_psi > 0.0 && fes_psi <= 1.0)) throw ConfigError("scenario: fes.psi must lie in (0, 1]");
  if (!(fes_delay_em_s >= 0.0)) throw ConfigError("scenario: fes.delay_em_s must be non-negative");
  if (!(flexor_bandwidth_hz > 0.0) || !(extensor_bandwidth_hz > 0.0)) {
    throw ConfigError("scenario: FES bandwidths must be positive");
  }
  if (!(fes_lead_s >= 0.0)) throw ConfigError("scenario: fes.lead_s must be non-negative");
}

double Scenario::total_duration() const {
  if (reference == ReferenceMode::torque_steps) return duration_s;
  TrajectoryParams p = trajectory;
  p.duration_s = duration_s;
  return ReferenceTrajectory(p).total_duration();
}

namespace {

struct Field {
  std::function<void(std::string_view)> set;
  std::function<std::string()> get;
};

std::string fmt(double v) { return format_double(v); }

std::vector<double> numbers(std::string_view v, std::string_view key, std::size_t n) {
  const auto toks = tokens(v);
  if (toks.size() != n) {
    throw ConfigError(std::string(key) + " expects " + std::to_string(n) + " number(s)");
  }
  std::vector<double> out;
  for (auto t : toks) out.push_back(parse_double(t, key));
  return out;
}

double number(std::string_view v, std::string_view key) { return numbers(v, key, 1)[0]; }

bool is_none(std::string_view v) { return v == "none" || v == "auto"; }

bool boolean(std::string_view v, std::string_view key) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError(std::string(key) + " expects on/off");
}

std::map<std::string, Field> fields(Scenario& s) {
  std::map<std::string, Field> f;
  auto num = [&f](const std::string& key, double& ref) {
    f[key] = {[&ref, key](std::string_view v) { ref = number(v, key); }, [&ref] { return fmt(ref); }};
  };
  auto opt = [&f](const std::string& key, std::optional<double>& ref, const char* none) {
    f[key] = {[&ref, key](std::string_view v) { ref = is_none(v) ? std::nullopt : std::optional(number(v, key)); },
              [&ref, none] { return ref ? fmt(*ref) : std::string(none); }};
  };

  f["name"] = {[&s](std::string_view v) { s.name = std::string(v); }, [&s] { return s.name; }};
  num("dt", s.dt);
  num("duration", s.duration_s);
  f["seed"] = {[&s](std::string_view v) {
                 const long long x = parse_int(v, "seed");
                 if (x < 0) throw ConfigError("seed must be non-negative");
                 s.seed = static_cast<std::uint64_t>(x);
               },
               [&s] { return std::to_string(s.seed); }};

  f["reference.mode"] = {[&s](std::string_view v) {
                           if (v == "trajectory") {
                             s.reference = ReferenceMode::trajectory;
                           } else if (v == "torque_steps") {
                             s.reference = ReferenceMode::torque_steps;
                           } else {
                             throw ConfigError("reference.mode expects trajectory or torque_steps");
                           }
                         },
                         [&s] { return to_string(s.reference); }};
  num("reference.theta0_deg", s.trajectory.theta0_deg);
  num("reference.theta_a_deg", s.trajectory.theta_a_deg);
  f["reference.freqs_hz"] = {[&s](std::string_view v) {
                               const auto x = numbers(v, "reference.freqs_hz", 3);
                               s.trajectory.freqs_hz = {x[0], x[1], x[2]};
                             },
                             [&s] {
                               const auto& q = s.trajectory.freqs_hz;
                               return fmt(q[0]) + " " + fmt(q[1]) + " " + fmt(q[2]);
                             }};
  num("reference.t0_s", s.trajectory.t0_s);
  num("reference.dwell_s", s.trajectory.dwell_s);
  f["reference.steps"] = {[&s](std::string_view v) {
                            s.steps.clear();
                            if (trim(v) == "none") return;
                            for (auto tok : tokens(v)) {
                              const auto parts = split(tok, ':');
                              if (parts.size() != 2) throw ConfigError("reference.steps expects t:torque pairs");
                              s.steps.push_back({parse_double(parts[0], "reference.steps"),
                                                 parse_double(parts[1], "reference.steps")});
                            }
                          },
                          [&s] {
                            std::string out;
                            for (const auto& st : s.steps) {
                              if (!out.empty()) out += ' ';
                              out += fmt(st.t_s) + ":" + fmt(st.net_nm);
                            }
                            return out.empty() ? std::string("none") : out;
                          }};

  num("impedance.kp", s.impedance.kp);
  num("impedance.kd", s.impedance.kd);
  num("impedance.alpha_bar", s.impedance.alpha_bar);

  f["allocator.mode"] = {[&s](std::string_view v) {
                           if (v == "dynamic") {
                             s.mode = AllocatorMode::dynamic;
                           } else if (v == "constant") {
                             s.mode = AllocatorMode::constant;
                           } else if (v == "extended") {
                             s.mode = AllocatorMode::extended;
                           } else {
                             throw ConfigError("allocator.mode expects dynamic, constant or extended");
                           }
                         },
                         [&s] { return to_string(s.mode); }};
  f["allocator.k"] = {[&s](std::string_view v) {
                        if (is_none(v)) {
                          s.k.reset();
                        } else {
                          const auto x = numbers(v, "allocator.k", 2);
                          s.k = std::array<double, 2>{x[0], x[1]};
                        }
                      },
                      [&s] { return s.k ? fmt((*s.k)[0]) + " " + fmt((*s.k)[1]) : std::string("auto"); }};
  f["allocator.w_base"] = {[&s](std::string_view v) {
                             const auto x = numbers(v, "allocator.w_base", 3);
                             s.w_base = {x[0], x[1], x[2]};
                           },
                           [&s] { return fmt(s.w_base[0]) + " " + fmt(s.w_base[1]) + " " + fmt(s.w_base[2]); }};
  opt("allocator.alpha_cap", s.alpha_cap, "none");
  num("allocator.eps", s.fes_margin_eps);
  f["allocator.basis"] = {[&s](std::string_view v) {
                            if (v == "exchange") {
                              s.basis = BasisKind::exchange;
                            } else if (v == "cocontraction") {
                              s.basis = BasisKind::cocontraction;
                            } else {
                              throw ConfigError("allocator.basis expects exchange or cocontraction");
                            }
                          },
                          [&s] { return std::string(s.basis == BasisKind::exchange ? "exchange" : "cocontraction"); }};
  f["allocator.barrier"] = {[&s](std::string_view v) { s.barrier = boolean(v, "allocator.barrier"); },
                            [&s] { return std::string(s.barrier ? "on" : "off"); }};
  f["allocator.alpha_const"] = {[&s](std::string_view v) {
                                  s.alpha_const = v == "mean_dynamic" ? std::nullopt
                                                                      : std::optional(number(v, "allocator.alpha_const"));
                                },
                                [&s] { return s.alpha_const ? fmt(*s.alpha_const) : std::string("mean_dynamic"); }};
  f["allocator.n_flexor"] = {[&s](std::string_view v) { s.n_flexor = static_cast<int>(parse_int(v, "allocator.n_flexor")); },
                             [&s] { return std::to_string(s.n_flexor); }};
  f["allocator.n_extensor"] = {
      [&s](std::string_view v) { s.n_extensor = static_cast<int>(parse_int(v, "allocator.n_extensor")); },
      [&s] { return std::to_string(s.n_extensor); }};
  f["allocator.zeta0"] = {[&s](std::string_view v) {
                            const auto x = numbers(v, "allocator.zeta0", 2);
                            s.zeta0 = {x[0], x[1]};
                          },
                          [&s] { return fmt(s.zeta0[0]) + " " + fmt(s.zeta0[1]); }};

  num("plant.inertia", s.plant.inertia);
  num("plant.damping", s.plant.damping);
  num("plant.mass_moment", s.plant.mass_moment);
  num("plant.payload_moment", s.plant.payload_moment);
  num("plant.min_angle_deg", s.plant.min_angle_deg);
  num("plant.max_angle_deg", s.plant.max_angle_deg);
  opt("plant.locked_angle_deg", s.plant.locked_angle_deg, "none");
  opt("plant.initial_angle_deg", s.initial_angle_deg, "auto");

  num("exo.torque_limit", s.exo.torque_limit);
  num("exo.bandwidth_hz", s.exo.bandwidth_hz);

  f["fes.model"] = {[&s](std::string_view v) { s.fes_model = std::string(v); }, [&s] { return s.fes_model; }};
  num("fes.psi", s.fes_psi);
  num("fes.delay_em_s", s.fes_delay_em_s);
  num("fes.flexor_bandwidth_hz", s.flexor_bandwidth_hz);
  num("fes.extensor_bandwidth_hz", s.extensor_bandwidth_hz);
  num("fes.lead_s", s.fes_lead_s);
  return f;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  auto table = fields(s);
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const auto where = "scenario line " + std::to_string(number) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key(trim(body.substr(0, eq)));
    const auto value = trim(body.substr(eq + 1));
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(where + "missing value for '" + key + "'");
    try {
      it->second.set(value);
    } catch (const Error& e) {
      throw ConfigError(where + e.what());
    }
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string canonical_text(const Scenario& s) {
  Scenario copy = s;
  std::string out;
  for (const auto& [key, field] : fields(copy)) out += key + " = " + field.get() + "\n";
  return out;
}

std::string scenario_hash(const Scenario& s) { return fnv1a_hex(canonical_text(s)); }

Scenario resolve_scenario(const std::string& name_or_path) {
  for (const auto& name : preset_names()) {
    if (name == name_or_path) return parse_scenario(preset_text(name));
  }
  return load_scenario(name_or_path);
}

}  // namespace dynalloc
