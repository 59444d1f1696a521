#include "dynalloc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "dynalloc/allocator.hpp"
#include "dynalloc/errors.hpp"
#include "dynalloc/extended_allocator.hpp"
#include "dynalloc/fes_model.hpp"
#include "dynalloc/oracles.hpp"
#include "dynalloc/synthetic.hpp"

namespace dynalloc {

FesModelSet scenario_models(const Scenario& s) {
  if (s.fes_model != "builtin") {
    FesModelSet set = load_models(s.fes_model);
    set.get(Muscle::flexor).validate();
    set.get(Muscle::extensor).validate();
    return set;
  }
  FesModelSet set;
  const double delay = 0.016 + s.fes_delay_em_s;
  set.flexor = synthetic_model(Muscle::flexor, {s.flexor_bandwidth_hz, delay, s.fes_psi});
  set.extensor = synthetic_model(Muscle::extensor, {s.extensor_bandwidth_hz, delay, s.fes_psi});
  return set;
}

namespace {

constexpr double kViolationTol = 1e-9;

double step_torque(const std::vector<TorqueStep>& steps, double t) {
  double v = 0.0;
  for (const auto& st : steps) {
    if (st.t_s > t + 1e-12) break;
    v = st.net_nm;
  }
  return v;
}

double equivalent_share(const Eigen::VectorXd& w, int first, int count, double w_exo) {
  double h = 0.0;
  for (int j = first; j < first + count; ++j) h += 1.0 / w[j];
  return w_exo * h / (1.0 + w_exo * h);
}

void check_finite(const TraceRow& r, std::size_t tick) {
  const double v[] = {r.theta_deg, r.tau_n_nominal, r.tau_ff, r.tau_fe, r.tau_e, r.tau_f_realized, r.zeta1, r.zeta2};
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericError("simulation produced a non-finite value", tick);
  }
}

RunResult run_with(const Scenario& s, const FesModelSet& models, double alpha_const) {
  const FesModel& flexor = models.get(Muscle::flexor);
  const FesModel& extensor = models.get(Muscle::extensor);
  flexor.validate();
  extensor.validate();

  AllocatorParams params;
  params.limits = attainable_set(flexor, extensor, s.exo.torque_limit);
  params.w_base = s.w_base;
  params.k = s.k ? *s.k
                 : bandwidth_matched_gains(s.w_base, params.limits.fes_flexor_bandwidth_hz,
                                           params.limits.fes_extensor_bandwidth_hz);
  params.fes_margin_eps = s.fes_margin_eps;
  params.alpha_cap = s.alpha_cap;
  params.basis = s.basis;
  params.saturation_barrier = s.barrier;
  params.validate();
  const double max_dt = 1.0 / (20.0 * params.limits.max_fes_bandwidth_hz());
  if (s.dt > max_dt) throw ConfigError("scenario: dt exceeds 1/(20 x max FES bandwidth)");
  if (s.mode == AllocatorMode::extended && s.alpha_cap) {
    throw ConfigError("scenario: alpha_cap is not supported by the extended allocator");
  }

  // Per-muscle allocation inside each group, each muscle owning 1/n of the group bound.
  const MuscleLayout layout{s.n_flexor, s.n_extensor};
  ExtendedAllocatorParams ext;
  ExtendedAllocatorState ext_state;
  if (s.mode == AllocatorMode::extended) {
    const int n = layout.muscles();
    ext.layout = layout;
    ext.k_plus.resize(n);
    ext.w_plus.resize(n + 1);
    for (int j = 0; j < n; ++j) {
      const bool is_flexor = j < layout.n_flexor;
      ext.k_plus[j] = params.k[is_flexor ? 0 : 1];
      ext.w_plus[j] = s.w_base[is_flexor ? 0 : 1];
      const double share = 1.0 / (is_flexor ? layout.n_flexor : layout.n_extensor);
      const TorqueBound group = is_flexor ? params.limits.fes_flexor_max : params.limits.fes_extensor_max;
      ext.muscle_limits.push_back([group, share](double a) { return share * group(a); });
    }
    ext.w_plus[n] = s.w_base[2];
    ext.exo_max = s.exo.torque_limit;
    ext.fes_margin_eps = s.fes_margin_eps;
    ext.saturation_barrier = s.barrier;
    ext.validate();
    ext_state = make_extended_state(layout);
    ext_state.zeta_plus.head(layout.n_flexor).setConstant(s.zeta0[0] / layout.n_flexor);
    ext_state.zeta_plus.tail(layout.n_extensor).setConstant(s.zeta0[1] / layout.n_extensor);
  }

  std::unique_ptr<ReferenceTrajectory> reference;
  if (s.reference == ReferenceMode::trajectory) {
    TrajectoryParams tp = s.trajectory;
    tp.duration_s = s.duration_s;
    reference = std::make_unique<ReferenceTrajectory>(tp);
  }
  const double total = reference ? reference->total_duration() : s.duration_s;
  const auto ticks = static_cast<std::size_t>(std::floor(total / s.dt + 1e-9)) + 1;

  PlantState plant{};
  plant.angle_deg = s.initial_angle_deg.value_or(
      s.plant.locked_angle_deg.value_or(reference ? reference->at(0.0).angle_deg : s.trajectory.theta0_deg));
  if (s.plant.locked_angle_deg) plant.angle_deg = *s.plant.locked_angle_deg;

  AllocatorState alloc;
  alloc.zeta = s.zeta0;
  Decomposition prev_applied;
  Distributor nominal_sigma = kFlexionDistributor;

  FesChannel ch_f(flexor, Muscle::flexor, s.dt);
  FesChannel ch_e(extensor, Muscle::extensor, s.dt);
  FeedforwardController ff_f(flexor, s.fes_lead_s);
  FeedforwardController ff_e(extensor, s.fes_lead_s);
  double exo_applied = gravity_torque(s.plant, plant.angle_deg);

  RunResult result;
  Trace& trace = result.trace;
  trace.scenario = s.name;
  trace.scenario_hash = scenario_hash(s);
  trace.mode = to_string(s.mode);
  trace.columns.insert(trace_columns().begin(), trace_columns().end());
  trace.rows.reserve(ticks);

  for (std::size_t k = 0; k < ticks; ++k) {
    const double t = static_cast<double>(k) * s.dt;
    const double theta = plant.angle_deg;
    TraceRow row;
    row.t_s = t;
    row.theta_deg = theta;
    row.alpha_bar = s.impedance.alpha_bar;

    JointTorque nominal;
    if (reference) {
      const ReferenceSample ref = reference->at(std::min(t, total));
      row.theta_d_deg = ref.angle_deg;
      nominal = nominal_torque(ref, plant, s.impedance, nominal_sigma);
    } else {
      row.theta_d_deg = theta;
      nominal = distribute_nominal(step_torque(s.steps, t), s.impedance.alpha_bar, nominal_sigma);
    }
    nominal_sigma = distributor_for(nominal.net(), nominal_sigma);
    row.tau_n_nominal = nominal.net();

    JointTorque applied;
    switch (s.mode) {
      case AllocatorMode::dynamic: {
        const AllocatorTick tick = allocator_tick(alloc, nominal, params, theta, s.dt, t);
        applied = tick.applied;
        row.zeta1 = alloc.zeta[0];
        row.zeta2 = alloc.zeta[1];
        row.alpha_s1 = tick.gains.alpha_s[0];
        row.alpha_s2 = tick.gains.alpha_s[1];
        if (tick.weights.any_saturated()) row.flags |= kBarrierSaturation;
        alloc = tick.next;
        break;
      }
      case AllocatorMode::constant: {
        applied = constant_allocate(nominal.net(), alpha_const, prev_applied);
        row.alpha_s1 = alpha_const;
        row.alpha_s2 = alpha_const;
        break;
      }
      case AllocatorMode::extended: {
        const ExtendedTick tick = extended_allocator_tick(ext_state, expand(nominal, layout), ext, theta, s.dt);
        applied = collapse(tick.applied, layout);
        row.zeta1 = ext_state.zeta_plus.head(layout.n_flexor).sum();
        row.zeta2 = ext_state.zeta_plus.tail(layout.n_extensor).sum();
        const double w_exo = tick.weights[layout.muscles()];
        row.alpha_s1 = equivalent_share(tick.weights, 0, layout.n_flexor, w_exo);
        row.alpha_s2 = equivalent_share(tick.weights, layout.n_flexor, layout.n_extensor, w_exo);
        if (std::find(tick.muscle_violation.begin(), tick.muscle_violation.end(), true) !=
            tick.muscle_violation.end()) {
          row.flags |= kBarrierSaturation;
        }
        ext_state = tick.next;
        break;
      }
    }
    prev_applied = decompose(applied, prev_applied);
    row.tau_ff = applied.flexor_fes;
    row.tau_fe = applied.extensor_fes;
    row.tau_e = applied.exo;
    row.alpha = prev_applied.cooperative_gain;

    const double m_f = params.limits.fes_flexor_max(theta);
    const double m_e = params.limits.fes_extensor_max(theta);
    row.af_upper = m_f;
    row.af_lower = -m_e;
    if (applied.flexor_fes < -kViolationTol || applied.flexor_fes > m_f + kViolationTol) row.flags |= kFlexorViolation;
    if (applied.extensor_fes > kViolationTol || applied.extensor_fes < -m_e - kViolationTol) {
      row.flags |= kExtensorViolation;
    }

    const FeedforwardCommand cmd_f = ff_f.command(std::max(0.0, applied.flexor_fes), theta, s.dt);
    const FeedforwardCommand cmd_e = ff_e.command(std::max(0.0, -applied.extensor_fes), theta, s.dt);
    row.upsilon_f = cmd_f.upsilon_ma;
    row.upsilon_e = cmd_e.upsilon_ma;
    if (cmd_f.saturated || cmd_f.infeasible) row.flags |= kFlexorStimSaturation;
    if (cmd_e.saturated || cmd_e.infeasible) row.flags |= kExtensorStimSaturation;
    const double tau_f_realized = ch_f.step(cmd_f.upsilon_ma, theta) + ch_e.step(cmd_e.upsilon_ma, theta);
    row.tau_f_realized = tau_f_realized;

    const ExoCommand exo = exo_command(s.exo, applied.exo, gravity_torque(s.plant, theta), exo_applied, s.dt);
    if (exo.clamped) row.flags |= kExoClamp;

    check_finite(row, k);
    trace.rows.push_back(row);

    const double bw = s.exo.bandwidth_hz;
    plant = plant_step(
        s.plant, plant,
        [&](double sec, double, double) { return tau_f_realized + exo.applied_at(sec, bw); }, s.dt);
    exo_applied = exo.applied_end;
    if (!std::isfinite(plant.angle_deg) || !std::isfinite(plant.velocity_deg_s)) {
      throw NumericError("plant state became non-finite", k);
    }
  }

  result.summary = summarize(trace, alpha_const);
  return result;
}

}  // namespace

RunResult run(const Scenario& s) { return run(s, scenario_models(s)); }

RunResult run(const Scenario& s, const FesModelSet& models) {
  s.validate();
  double alpha_const = 0.0;
  if (s.mode == AllocatorMode::constant) {
    if (s.alpha_const) {
      alpha_const = *s.alpha_const;
    } else {
      Scenario twin = s;
      twin.mode = AllocatorMode::dynamic;
      alpha_const = run_with(twin, models, 0.0).summary.alpha_mean;
    }
  }
  return run_with(s, models, alpha_const);
}

RunSummary summarize(const Trace& trace, double alpha_const) {
  RunSummary s;
  s.scenario = trace.scenario;
  s.scenario_hash = trace.scenario_hash;
  s.mode = trace.mode;
  s.ticks = trace.rows.size();
  s.alpha_const = alpha_const;
  if (trace.rows.empty()) return s;
  s.duration_s = trace.rows.back().t_s;

  double se = 0.0;
  double alpha_sum = 0.0;
  std::size_t alpha_n = 0;
  std::size_t alpha_high = 0;
  for (const auto& r : trace.rows) {
    const double e = r.theta_d_deg - r.theta_deg;
    se += e * e;
    if (std::abs(r.tau_n_nominal) >= kAlphaStatsMinNet) {
      const double a = std::clamp(r.alpha, 0.0, 1.0);
      alpha_sum += a;
      ++alpha_n;
      if (a >= 0.95) ++alpha_high;
    }
    if (r.flags & (kFlexorViolation | kExtensorViolation)) ++s.af_violations;
    if (r.flags & kExoClamp) ++s.exo_clamps;
    if (r.flags & (kFlexorStimSaturation | kExtensorStimSaturation)) ++s.stim_saturations;
    if (r.flags & kBarrierSaturation) ++s.barrier_saturations;
    s.max_net_error = std::max(s.max_net_error, std::abs(r.tau_ff + r.tau_fe + r.tau_e - r.tau_n_nominal));
  }
  s.rmse_deg = std::sqrt(se / static_cast<double>(trace.rows.size()));
  if (alpha_n > 0) {
    s.alpha_mean = alpha_sum / static_cast<double>(alpha_n);
    s.alpha_p95 = static_cast<double>(alpha_high) / static_cast<double>(alpha_n);
  }
  const IssReport iss = iss_bound_report(trace);
  for (std::size_t i = 0; i < 2; ++i) {
    s.max_abs_zeta[i] = iss.channels[i].max_abs_zeta;
    s.zeta_bound[i] = iss.channels[i].bound;
  }
  return s;
}

}  // namespace dynalloc
