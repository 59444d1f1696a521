// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "dynalloc/allocator.hpp"
#include "dynalloc/extended_allocator.hpp"
#include "dynalloc/fes_identify.hpp"
#include "dynalloc/oracles.hpp"
#include "dynalloc/simulation.hpp"
#include "dynalloc/synthetic.hpp"

using namespace dynalloc;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.passed) ++failures;
  std::printf("%s %s (%.3f s) %s\n", o.passed ? "PASS" : "FAIL", name, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

Outcome null_space() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  for (BasisKind kind : {BasisKind::cocontraction, BasisKind::exchange}) {
    const RedistributionBasis b = basis_matrix(kind);
    const Eigen::RowVector2d sums = Eigen::RowVector3d::Ones() * b;
    ok = ok && sums(0) == 0.0 && sums(1) == 0.0 && Eigen::FullPivLU<Eigen::MatrixXd>(b).rank() == 2;
  }
  const double t = seconds_since(start);
  return {ok && t < 1e-3, fmt("column sums exactly 0, rank 2, %.2e s", t)};
}

Outcome invisibility() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    InvisibilityOptions o;
    o.seed = seed;
    worst = std::max(worst, invisibility_check(o).worst);
  }
  InvisibilityOptions bad;
  bad.basis(2, 0) = -1.1;
  const double corrupted = invisibility_check(bad).worst;
  return {worst <= 1e-9 && corrupted > 1e-3,
          fmt("12 schedules max deviation %.3e (<= 1e-9), corrupted basis %.3e (> 1e-3)", worst, corrupted)};
}

Outcome lyapunov() {
  const auto start = std::chrono::steady_clock::now();
  const OracleResult r = lyapunov_check(1000, 2024);
  const double hand = lyapunov_derivative({1.0, 0.0}, kFlexionDistributor, {1.0, 1.0, 1.0}, exchange_basis());
  const double t = seconds_since(start);
  return {r.passed && hand == -2.0 && t < 1.0,
          fmt("1000 trials max Vdot %.3e, hand value %.17g, %.3f s", r.worst, hand, t)};
}

Outcome iss_all_presets() {
  double worst = INFINITY;
  bool ok = true;
  for (const auto& name : preset_names()) {
    const OracleResult r = iss_bound_check(run(resolve_scenario(name)).trace);
    ok = ok && r.passed;
    worst = std::min(worst, r.worst);
  }
  return {ok, fmt("all shipped scenarios, worst margin %.3e (>= -1e-6)", worst)};
}

Outcome steady_state() {
  const SteadyStateResult r = steady_state_check();
  // ζ₁(t) = 8(1 − e^(−k′t)) for τ̄ᴺ = 10, αˢ = 0.8, k′ = 5.
  AllocatorParams p;
  p.w_base = {0.25, 0.25, 1.0};
  p.k = {4.0, 4.0};
  p.saturation_barrier = false;
  p.limits.fes_flexor_max = [](double) { return 100.0; };
  p.limits.fes_extensor_max = [](double) { return 100.0; };
  p.limits.exo_max = 100.0;
  p.limits.fes_flexor_bandwidth_hz = 1.0;
  p.limits.fes_extensor_bandwidth_hz = 1.0;
  AllocatorState s;
  double err = 0.0;
  for (int i = 1; i <= 2000; ++i) {
    s = allocator_step(s, {0.0, 0.0, 10.0}, p, 45.0, 1e-3);
    if (i % 50 == 0) err = std::max(err, std::abs(s.zeta[0] - 8.0 * (1.0 - std::exp(-5.0 * i * 1e-3))));
  }
  const bool ok = std::abs(r.fes_final - 4.0) <= 0.04 && err <= 1e-6;
  return {ok, fmt("FES torque %.6f after 5/k' s (4 +- 0.04), closed-form error %.3e", r.fes_final, err)};
}

Outcome figure3() {
  const auto start = std::chrono::steady_clock::now();
  const RunResult a = run(resolve_scenario("fig3a"));
  const RunResult b = run(resolve_scenario("fig3b"));
  double max_alpha = 0.0;
  for (double end : {6.0, 12.0, 18.0, 24.0, 30.0}) {
    max_alpha = std::max(max_alpha, b.trace.rows[static_cast<std::size_t>(std::llround(end / 1e-3)) - 1].alpha);
  }
  auto rise = [&](double from, double to, bool flexor) {
    const auto& rows = a.trace.rows;
    auto z = [&](std::size_t i) { return flexor ? rows[i].zeta1 : rows[i].zeta2; };
    const auto i0 = static_cast<std::size_t>(std::llround(from / 1e-3));
    const auto i1 = static_cast<std::size_t>(std::llround(to / 1e-3)) - 1;
    for (std::size_t i = i0; i <= i1; ++i) {
      if (std::abs(z(i) - z(i0)) >= (1.0 - std::exp(-1.0)) * std::abs(z(i1) - z(i0))) return rows[i].t_s - from;
    }
    return -1.0;
  };
  const double ratio = rise(0.0, 6.0, true) / rise(12.0, 18.0, false);
  const double target = 3.976 / 0.908;
  const double t = seconds_since(start);
  const bool ok = a.summary.af_violations == 0 && max_alpha <= 0.8 + 1e-3 &&
                  std::abs(ratio - target) <= 0.2 * target && t < 10.0;
  std::string d = "cap 1: " + std::to_string(a.summary.af_violations) + " violations; ";
  d += fmt("cap 0.8: plateau alpha <= %.4f; time-constant ratio %.3f vs %.3f", max_alpha, ratio, target);
  return {ok, d};
}

Outcome constant_vs_dynamic() {
  const RunResult dyn = run(resolve_scenario("tracking"));
  const RunResult con = run(resolve_scenario("tracking_constant"));
  const bool ok = dyn.summary.af_violations == 0 && con.summary.af_violations >= 1 &&
                  dyn.summary.rmse_deg <= con.summary.rmse_deg;
  return {ok, "dynamic " + std::to_string(dyn.summary.af_violations) + " violations, constant " +
                  std::to_string(con.summary.af_violations) +
                  fmt(" (alpha %.4f); RMSE %.3f <= %.3f deg", con.summary.alpha_const, dyn.summary.rmse_deg,
                      con.summary.rmse_deg)};
}

Outcome identification() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string d;
  for (Muscle m : {Muscle::flexor, Muscle::extensor}) {
    const FesModel truth = synthetic_model(m);
    const GridProtocol protocol;  // 5 intensities x 6 angles
    IdentifyOptions opt;
    opt.upsilon_min_ma = truth.upsilon_min_ma;
    const FesModel fit = identify(generate_grid(truth, m, protocol), m, opt).model;
    double sum = 0.0, scale = 0.0;
    int n = 0;
    for (double th : protocol.angles_deg) {
      scale = std::max(scale, truth.max_torque(th));
      for (double u = truth.upsilon_min_ma; u <= truth.upsilon_max_ma; u += 0.25, ++n) {
        const double e = truth.recruit(u, th) * truth.contraction(th) - fit.recruit(u, th) * fit.contraction(th);
        sum += e * e;
      }
    }
    const double rmse = std::sqrt(sum / n) / scale;
    const double bw = std::abs(fit.bandwidth_hz() / truth.bandwidth_hz() - 1.0);
    const double delay = std::abs(fit.delay_s - truth.delay_s);
    ok = ok && rmse <= 0.02 && bw <= 0.1 && delay <= 1.0 / protocol.sample_hz;
    d += to_string(m) + fmt(": rmse %.4f, bandwidth error %.4f, delay error %.4f s; ", rmse, bw, delay);
  }
  const double t = seconds_since(start);
  return {ok && t < 5.0, d + fmt("%.3f s", t)};
}

Outcome inversion() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> angle(0.0, 120.0);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  double worst = 0.0;
  bool clamp_ok = true;
  for (Muscle m : {Muscle::flexor, Muscle::extensor}) {
    const FesModel model = synthetic_model(m);
    for (int i = 0; i < 1000; ++i) {
      const double th = angle(rng);
      const double a = frac(rng) * model.recruit(model.upsilon_max_ma, th);
      worst = std::max(worst, std::abs(model.recruit(invert_recruitment(model, a, th).upsilon_ma, th) - a));
    }
    const Inversion over = invert_recruitment(model, model.recruit(model.upsilon_max_ma, 60.0) + 0.1, 60.0);
    clamp_ok = clamp_ok && over.saturated && over.upsilon_ma == model.upsilon_max_ma;
  }
  return {worst <= 1e-6 && clamp_ok,
          fmt("max |r(u*) - a_r| %.3e over 2000 requests, clamp and flag %s", worst) + (clamp_ok ? "ok" : "wrong")};
}

Outcome net_conservation() {
  double worst = 0.0;
  for (const auto& name : preset_names()) worst = std::max(worst, run(resolve_scenario(name)).summary.max_net_error);
  return {worst <= 1e-9, fmt("max per-tick |sum - nominal| %.3e N*m", worst)};
}

Outcome extended_reduction() {
  const OracleResult eq = extended_equivalence_check();
  ExtendedAllocatorParams p;
  p.layout = {2, 1};
  p.k_plus = Eigen::Vector3d(3.0, 3.0, 3.0);
  p.w_plus = Eigen::Vector4d(0.2, 0.2, 0.5, 1.0);
  const TorqueBound m = [](double) { return 50.0; };
  p.muscle_limits = {m, m, m};
  p.exo_max = 50.0;
  ExtendedAllocatorState s = make_extended_state(p.layout);
  const Eigen::Vector4d nominal(0.0, 0.0, 0.0, 6.0);
  for (int i = 0; i < 20000; ++i) s = extended_allocator_step(s, nominal, p, 45.0, 1e-3);
  const Eigen::VectorXd tau = extended_redistribute(nominal, s, p.layout);
  const double gap = std::abs(tau[0] - tau[1]);
  return {eq.worst <= 1e-9 && gap <= 1e-6,
          fmt("two-channel match %.3e, symmetric flexor gap %.3e", eq.worst, gap)};
}

Outcome determinism() {
  bool ok = true;
  for (const auto& name : preset_names()) {
    const Scenario s = resolve_scenario(name);
    std::ostringstream a, b;
    write_trace(a, run(s).trace);
    write_trace(b, run(s).trace);
    ok = ok && a.str() == b.str();
  }
  return {ok, "repeated runs of every shipped scenario byte-identical"};
}

}  // namespace

int main() {
  report("null-space-exactness", null_space);
  report("invisibility", invisibility);
  report("lyapunov", lyapunov);
  report("zeta-uniform-bound", iss_all_presets);
  report("steady-state-allocation", steady_state);
  report("step-scenario-reproduction", figure3);
  report("constant-vs-dynamic", constant_vs_dynamic);
  report("identification-round-trip", identification);
  report("recruitment-inversion", inversion);
  report("net-conservation", net_conservation);
  report("extended-reduction", extended_reduction);
  report("determinism", determinism);
  return failures == 0 ? 0 : 1;
}
