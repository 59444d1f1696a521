#pragma once

// Scenario files: one `key = value` per line, '#' starts a comment. Unknown
// keys are rejected. See README for the full key list.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dynalloc/allocator.hpp"
#include "dynalloc/plant.hpp"
#include "dynalloc/shared_control.hpp"

namespace dynalloc {

enum class AllocatorMode { dynamic, constant, extended };
enum class ReferenceMode { trajectory, torque_steps };

std::string to_string(AllocatorMode m);
std::string to_string(ReferenceMode m);

/// Net torque held from `t_s` until the next step.
struct TorqueStep {
  double t_s = 0.0;
  double net_nm = 0.0;
};

struct Scenario {
  std::string name = "unnamed";
  double dt = 1e-3;
  double duration_s = 30.0;  // base horizon; trajectory dwells extend the run
  std::uint64_t seed = 1;

  ReferenceMode reference = ReferenceMode::trajectory;
  TrajectoryParams trajectory;
  std::vector<TorqueStep> steps;
  ImpedanceGains impedance;

  AllocatorMode mode = AllocatorMode::dynamic;
  std::optional<std::array<double, 2>> k;  // empty: matched to the FES bandwidths
  Weights w_base{1.0, 1.0, 1.0};
  std::optional<double> alpha_cap;
  double fes_margin_eps = 1e-3;
  BasisKind basis = BasisKind::exchange;
  bool barrier = true;
  std::optional<double> alpha_const;  // empty: mean α of the dynamic twin
  int n_flexor = 1;
  int n_extensor = 1;
  std::array<double, 2> zeta0{0.0, 0.0};

  ElbowPlant plant;
  std::optional<double> initial_angle_deg;  // empty: reference at t = 0
  ExoActuator exo;

  std::string fes_model = "builtin";  // or a model file path
  double fes_psi = 1.0;
  double fes_delay_em_s = 0.030;      // electromechanical part of the delay
  double flexor_bandwidth_hz = 0.908;
  double extensor_bandwidth_hz = 3.976;
  double fes_lead_s = 0.0;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
  /// Run length including dwells.
  double total_duration() const;
};

/// Parses scenario text. Throws ConfigError naming the line.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Every key with its resolved value, sorted; stable across formatting.
std::string canonical_text(const Scenario& s);
std::string scenario_hash(const Scenario& s);

/// Built-in scenarios shipped with the library (also under scenarios/).
std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
const std::string& preset_text(const std::string& name);

/// Loads `name_or_path` as a preset name when one matches, otherwise as a file path.
Scenario resolve_scenario(const std::string& name_or_path);

}  // namespace dynalloc
