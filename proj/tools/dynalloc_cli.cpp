// dynalloc: run scenarios, identify FES models, verify the allocator.
//
// Exit codes: 0 success, 1 configuration or input error, 2 invariant violation.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynalloc/errors.hpp"
#include "dynalloc/fes_identify.hpp"
#include "dynalloc/fes_io.hpp"
#include "dynalloc/oracles.hpp"
#include "dynalloc/scenario.hpp"
#include "dynalloc/simulation.hpp"
#include "dynalloc/synthetic.hpp"
#include "dynalloc/trace.hpp"

namespace {

using nlohmann::ordered_json;
using namespace dynalloc;

constexpr int kOk = 0;
constexpr int kConfig = 1;
constexpr int kViolation = 2;

constexpr double kNetTolerance = 1e-9;

ordered_json to_json(const RunSummary& s) {
  return {{"scenario", s.scenario},
          {"scenario_hash", s.scenario_hash},
          {"mode", s.mode},
          {"ticks", s.ticks},
          {"duration_s", s.duration_s},
          {"rmse_deg", s.rmse_deg},
          {"alpha_mean", s.alpha_mean},
          {"alpha_p95", s.alpha_p95},
          {"alpha_const", s.alpha_const},
          {"af_violations", s.af_violations},
          {"exo_clamps", s.exo_clamps},
          {"stim_saturations", s.stim_saturations},
          {"barrier_saturations", s.barrier_saturations},
          {"max_abs_zeta", s.max_abs_zeta},
          {"zeta_bound", s.zeta_bound},
          {"max_net_error", s.max_net_error}};
}

ordered_json to_json(const ChannelStats& c) { return {{"mean", c.mean}, {"max_abs", c.max_abs}}; }

ordered_json to_json(const TraceStats& s) {
  return {{"rmse_deg", s.rmse_deg},
          {"violations", s.violations},
          {"flexor", to_json(s.flexor)},
          {"extensor", to_json(s.extensor)},
          {"exo", to_json(s.exo)}};
}

int cmd_run(const std::string& scenario, const std::string& out) {
  const RunResult r = run(resolve_scenario(scenario));
  if (!out.empty()) save_trace(out, r.trace);
  std::cout << to_json(r.summary).dump(2) << "\n";
  const bool iss_ok = iss_bound_check(r.trace).passed;
  if (r.summary.max_net_error > kNetTolerance || !iss_ok) {
    std::cerr << "invariant violated: net error " << r.summary.max_net_error << (iss_ok ? "" : ", zeta bound") << "\n";
    return kViolation;
  }
  return kOk;
}

int cmd_identify(const std::string& csv, const std::string& out, const std::string& muscle, double hint,
                 double upsilon_min, double psi) {
  const TrainingGrid grid = load_training_csv(csv);
  FesModelSet set;
  std::vector<Muscle> muscles;
  if (muscle == "both") {
    for (Muscle m : {Muscle::flexor, Muscle::extensor}) {
      for (const auto& s : grid) {
        if (s.muscle == m) {
          muscles.push_back(m);
          break;
        }
      }
    }
  } else {
    muscles.push_back(muscle_from_string(muscle));
  }
  if (muscles.empty()) throw InvalidInput("training data holds no samples");

  for (Muscle m : muscles) {
    IdentifyOptions opt;
    opt.bandwidth_hint_hz = hint;
    opt.psi = psi;
    if (upsilon_min > 0.0) opt.upsilon_min_ma = upsilon_min;
    const IdentifyResult res = identify(grid, m, opt);
    for (const auto& w : res.warnings) std::cerr << "warning: " << to_string(m) << ": " << w << "\n";
    (m == Muscle::flexor ? set.flexor : set.extensor) = res.model;
    std::cout << to_string(m) << " bandwidth_hz=" << res.model.bandwidth_hz() << " delay_s=" << res.model.delay_s
              << " max_torque_60deg_Nm=" << res.model.max_torque(60.0) << "\n";
  }
  save_models(out, set);
  return kOk;
}

int cmd_generate_grid(const std::string& out, const std::string& muscle, double noise, std::uint64_t seed) {
  TrainingGrid all;
  const std::vector<Muscle> muscles = muscle == "both" ? std::vector<Muscle>{Muscle::flexor, Muscle::extensor}
                                                       : std::vector<Muscle>{muscle_from_string(muscle)};
  for (Muscle m : muscles) {
    GridProtocol p;
    p.noise_nm = noise;
    p.seed = seed;
    const TrainingGrid g = generate_grid(synthetic_model(m), m, p);
    all.insert(all.end(), g.begin(), g.end());
  }
  std::ofstream file(out);
  if (!file) throw InvalidInput("cannot write '" + out + "'");
  write_training_csv(file, all);
  return kOk;
}

std::vector<OracleResult> invisibility_suite(std::uint64_t seed) {
  std::vector<OracleResult> out;
  for (std::uint64_t i = 0; i < 12; ++i) {
    InvisibilityOptions o;
    o.seed = seed + i;
    out.push_back(invisibility_check(o));
  }
  // A basis column off the null space must show up in the motion.
  InvisibilityOptions bad;
  bad.seed = seed;
  bad.basis << 1.0, 0.0, 0.0, 1.0, -1.1, -1.0;
  bad.tolerance = 1e-3;
  OracleResult r = invisibility_check(bad);
  r.name = "invisibility-corrupted";
  r.passed = r.worst > 1e-3;
  out.push_back(r);
  return out;
}

std::vector<OracleResult> iss_suite(const std::vector<std::string>& traces) {
  std::vector<OracleResult> out;
  if (traces.empty()) {
    for (const auto& name : preset_names()) {
      OracleResult r = iss_bound_check(run(resolve_scenario(name)).trace);
      r.name = "iss:" + name;
      out.push_back(r);
    }
  }
  for (const auto& path : traces) {
    OracleResult r = iss_bound_check(load_trace(path));
    r.name = "iss:" + path;
    out.push_back(r);
  }
  return out;
}

std::vector<OracleResult> extended_suite() {
  std::vector<OracleResult> out{extended_equivalence_check()};
  OracleResult neg = extended_equivalence_check(true);
  neg.name = "extended-mismatch";
  neg.passed = neg.worst > 1e-9;
  out.push_back(neg);
  return out;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::vector<std::string>& traces) {
  const bool all = suite == "all";
  std::vector<OracleResult> results;
  auto add = [&](std::vector<OracleResult> r) { results.insert(results.end(), r.begin(), r.end()); };
  if (all || suite == "invisibility") add(invisibility_suite(seed));
  if (all || suite == "lyapunov") add({lyapunov_check(1000, seed)});
  if (all || suite == "iss") add(iss_suite(traces));
  if (all || suite == "steady-state") add({steady_state_check().result});
  if (all || suite == "extended") add(extended_suite());

  bool ok = true;
  for (const auto& r : results) {
    std::cout << format_result(r) << "\n";
    ok = ok && r.passed;
  }
  return ok ? kOk : kViolation;
}

int cmd_compare(const std::string& a, const std::string& b) {
  const Trace ta = load_trace(a);
  const Trace tb = load_trace(b);
  const ComparisonReport rep = compare(ta, tb);
  ordered_json j{{"a", {{"scenario", ta.scenario}, {"mode", ta.mode}, {"stats", to_json(rep.a)}}},
                 {"b", {{"scenario", tb.scenario}, {"mode", tb.mode}, {"stats", to_json(rep.b)}}},
                 {"max_abs_delta_theta_deg", rep.max_abs_delta_theta},
                 {"max_abs_delta_tau_Ff_Nm", rep.max_abs_delta_tau_ff},
                 {"max_abs_delta_tau_Fe_Nm", rep.max_abs_delta_tau_fe},
                 {"max_abs_delta_tau_E_Nm", rep.max_abs_delta_tau_e}};
  std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic FES/exoskeleton torque allocation for the elbow"};
  app.require_subcommand(1);

  std::string scenario, trace_out;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario file or preset and print a JSON summary");
  run_cmd->add_option("scenario", scenario, "Scenario file or preset name")->required();
  run_cmd->add_option("-o,--output", trace_out, "Trace CSV to write");

  std::string csv, model_out, muscle = "both";
  double hint = 1.0, upsilon_min = 0.0, psi = 1.0;
  auto* id_cmd = app.add_subcommand("identify", "Fit FES models from recruitment training data");
  id_cmd->add_option("training", csv, "Training CSV")->required()->check(CLI::ExistingFile);
  id_cmd->add_option("-o,--output", model_out, "Model file to write")->required();
  id_cmd->add_option("--muscle", muscle, "flexor, extensor or both")->check(CLI::IsMember({"flexor", "extensor", "both"}));
  id_cmd->add_option("--bandwidth-hint", hint, "Expected activation bandwidth, Hz")->check(CLI::PositiveNumber);
  id_cmd->add_option("--upsilon-min", upsilon_min, "Motor threshold, mA");
  id_cmd->add_option("--psi", psi, "Fatigue factor during the recordings")->check(CLI::PositiveNumber);

  std::string grid_out, grid_muscle = "both";
  double noise = 0.0;
  std::uint64_t grid_seed = 1;
  auto* grid_cmd = app.add_subcommand("generate-grid", "Write a synthetic training grid from the builtin models");
  grid_cmd->add_option("-o,--output", grid_out, "Training CSV to write")->required();
  grid_cmd->add_option("--muscle", grid_muscle, "flexor, extensor or both")
      ->check(CLI::IsMember({"flexor", "extensor", "both"}));
  grid_cmd->add_option("--noise", noise, "Measurement noise standard deviation, N·m")->check(CLI::NonNegativeNumber);
  grid_cmd->add_option("--seed", grid_seed, "Noise seed");

  std::string suite = "all";
  std::uint64_t seed = 1;
  std::vector<std::string> traces;
  auto* verify_cmd = app.add_subcommand("verify", "Run the stability and invisibility oracles");
  verify_cmd->add_option("--suite", suite, "Oracle suite")
      ->check(CLI::IsMember({"all", "invisibility", "iss", "lyapunov", "steady-state", "extended"}));
  verify_cmd->add_option("--seed", seed, "Base seed for randomized oracles");
  verify_cmd->add_option("--trace", traces, "Trace files for the bound check (default: shipped presets)");

  std::string trace_a, trace_b;
  auto* cmp_cmd = app.add_subcommand("compare", "Paired statistics of two traces on the same time grid");
  cmp_cmd->add_option("trace_a", trace_a)->required();
  cmp_cmd->add_option("trace_b", trace_b)->required();

  auto* presets_cmd = app.add_subcommand("presets", "List shipped scenarios or print one");
  std::string preset;
  presets_cmd->add_option("name", preset, "Preset to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run_cmd) return cmd_run(scenario, trace_out);
    if (*id_cmd) return cmd_identify(csv, model_out, muscle, hint, upsilon_min, psi);
    if (*grid_cmd) return cmd_generate_grid(grid_out, grid_muscle, noise, grid_seed);
    if (*verify_cmd) return cmd_verify(suite, seed, traces);
    if (*cmp_cmd) return cmd_compare(trace_a, trace_b);
    if (*presets_cmd) {
      if (preset.empty()) {
        for (const auto& n : preset_names()) std::cout << n << "\n";
      } else {
        std::cout << preset_text(preset);
      }
      return kOk;
    }
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kOk;
}
