#include "dynalloc/fes_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "dynalloc/errors.hpp"
#include "dynalloc/rk4.hpp"

namespace dynalloc {

std::string to_string(Muscle m) { return m == Muscle::flexor ? "flexor" : "extensor"; }

Muscle muscle_from_string(const std::string& s) {
  if (s == "flexor") return Muscle::flexor;
  if (s == "extensor") return Muscle::extensor;
  throw InvalidInput("unknown muscle '" + s + "'");
}

double muscle_sign(Muscle m) { return m == Muscle::flexor ? 1.0 : -1.0; }

namespace {

void check_angles(const std::vector<double>& angles, const char* what) {
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (!std::isfinite(angles[i])) throw InvalidInput(std::string(what) + ": non-finite angle");
    if (i > 0 && !(angles[i] > angles[i - 1])) throw InvalidInput(std::string(what) + ": angles must increase");
  }
}

// Index i and weight t such that the value is (1 − t)·v[i] + t·v[i + 1].
std::pair<std::size_t, double> bracket(const std::vector<double>& grid, double x) {
  if (grid.size() == 1 || x <= grid.front()) return {0, 0.0};
  if (x >= grid.back()) return {grid.size() - 2, 1.0};
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const auto i = static_cast<std::size_t>(it - grid.begin() - 1);
  return {i, (x - grid[i]) / (grid[i + 1] - grid[i])};
}

}  // namespace

RecruitmentMap::RecruitmentMap(std::vector<double> angles_deg, std::vector<MonotoneSpline> curves)
    : angles_(std::move(angles_deg)), curves_(std::move(curves)) {
  if (angles_.empty() || angles_.size() != curves_.size()) {
    throw InvalidInput("recruitment map: one curve per angle required");
  }
  check_angles(angles_, "recruitment map");
  for (const auto& c : curves_) {
    if (c.empty()) throw InvalidInput("recruitment map: empty curve");
  }
}

double RecruitmentMap::operator()(double upsilon_ma, double angle_deg, double upsilon_min_ma) const {
  if (curves_.empty()) throw InvalidInput("recruitment map: empty");
  if (upsilon_ma <= upsilon_min_ma) return 0.0;
  const auto [i, t] = bracket(angles_, angle_deg);
  double r = curves_[i](upsilon_ma);
  if (t > 0.0) r = (1.0 - t) * r + t * curves_[i + 1](upsilon_ma);
  return std::clamp(r, 0.0, 1.0);
}

ContractionMap::ContractionMap(std::vector<double> angles_deg, std::vector<double> torque_nm)
    : angles_(std::move(angles_deg)), torques_(std::move(torque_nm)) {
  if (angles_.empty() || angles_.size() != torques_.size()) {
    throw InvalidInput("contraction map: angle and torque tables differ in size");
  }
  check_angles(angles_, "contraction map");
  for (double v : torques_) {
    if (!std::isfinite(v)) throw InvalidInput("contraction map: non-finite torque");
  }
}

double ContractionMap::operator()(double angle_deg) const {
  if (angles_.empty()) throw InvalidInput("contraction map: empty");
  const auto [i, t] = bracket(angles_, angle_deg);
  if (t == 0.0) return torques_[i];
  return (1.0 - t) * torques_[i] + t * torques_[i + 1];
}

ActivationDynamics ActivationDynamics::second_order(double natural_hz, double damping_ratio) {
  if (!(natural_hz > 0.0) || !(damping_ratio > 0.0)) {
    throw ConfigError("activation dynamics: frequency and damping must be positive");
  }
  const double w = 2.0 * std::numbers::pi * natural_hz;
  ActivationDynamics d;
  d.A << 0.0, 1.0, -w * w, -2.0 * damping_ratio * w;
  d.B << 0.0, w * w;
  return d;
}

double ActivationDynamics::natural_frequency_hz() const {
  return std::sqrt(std::max(0.0, A.determinant())) / (2.0 * std::numbers::pi);
}

double ActivationDynamics::damping_ratio() const {
  const double w = std::sqrt(std::max(0.0, A.determinant()));
  return w > 0.0 ? -A.trace() / (2.0 * w) : 0.0;
}

double ActivationDynamics::dc_gain() const {
  const Eigen::Vector2d x = A.fullPivLu().solve(B);
  return -x[0];
}

bool ActivationDynamics::stable() const {
  const Eigen::EigenSolver<Eigen::Matrix2d> es(A, false);
  return (es.eigenvalues().real().array() < 0.0).all();
}

double critically_damped_step(double natural_hz, double t) {
  const double wt = 2.0 * std::numbers::pi * natural_hz * t;
  return 1.0 - (1.0 + wt) * std::exp(-wt);
}

void FesModel::validate() const {
  if (recruitment.curves().empty()) throw ConfigError("FES model: missing recruitment map");
  if (contraction.angles().empty()) throw ConfigError("FES model: missing contraction map");
  if (!activation.stable()) throw ConfigError("FES model: activation dynamics unstable");
  if (std::abs(activation.dc_gain() - 1.0) > 1e-9) throw ConfigError("FES model: activation DC gain is not 1");
  if (!(fatigue_psi > 0.0 && fatigue_psi <= 1.0)) throw ConfigError("FES model: psi must lie in (0, 1]");
  if (!(delay_s >= 0.0)) throw ConfigError("FES model: delay must be non-negative");
  if (!(upsilon_max_ma > upsilon_min_ma) || upsilon_min_ma < 0.0) {
    throw ConfigError("FES model: need 0 <= upsilon_min < upsilon_max");
  }
  for (double v : contraction.torques()) {
    if (!(v > 0.0)) throw ConfigError("FES model: contraction map must be positive");
  }
}

double FesModel::recruit(double upsilon_ma, double angle_deg) const {
  return recruitment(upsilon_ma, angle_deg, upsilon_min_ma);
}

double FesModel::max_torque(double angle_deg) const {
  return fatigue_psi * recruit(upsilon_max_ma, angle_deg) * contraction(angle_deg);
}

ActivationState activation_step(const ActivationDynamics& dyn, const ActivationState& a, double a_r, double dt) {
  return rk4_step(a, dt, [&](const ActivationState& x) -> ActivationState { return dyn.A * x + dyn.B * a_r; });
}

DelayLine::DelayLine(double delay_s, double dt) {
  if (!(dt > 0.0) || !(delay_s >= 0.0)) throw ConfigError("delay line: need dt > 0 and delay >= 0");
  samples_ = static_cast<std::size_t>(std::llround(delay_s / dt));
}

double DelayLine::push(double value) {
  if (samples_ == 0) return value;
  buffer_.push_back(value);
  if (buffer_.size() <= samples_) return 0.0;
  const double out = buffer_.front();
  buffer_.pop_front();
  return out;
}

FesChannel::FesChannel(const FesModel& model, Muscle muscle, double dt)
    : model_(&model), muscle_(muscle), dt_(dt), delay_(model.delay_s, dt) {}

double FesChannel::step(double upsilon_ma, double angle_deg) {
  const double delayed = delay_.push(upsilon_ma);
  const double a_r = model_->recruit(delayed, angle_deg);
  // Output reported at the start of the tick, the state then advances.
  torque_ = muscle_sign(muscle_) * model_->fatigue_psi * state_[0] * model_->contraction(angle_deg);
  state_ = activation_step(model_->activation, state_, a_r, dt_);
  return torque_;
}

Inversion invert_recruitment(const FesModel& model, double a_r, double angle_deg) {
  if (!(a_r > 0.0)) return {};
  const double r_max = model.recruit(model.upsilon_max_ma, angle_deg);
  if (a_r >= r_max) return {model.upsilon_max_ma, a_r > r_max};

  double lo = model.upsilon_min_ma;
  double hi = model.upsilon_max_ma;
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (model.recruit(mid, angle_deg) < a_r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {hi, false};
}

FeedforwardController::FeedforwardController(const FesModel& model, double lead_s)
    : model_(&model), lead_s_(lead_s) {
  if (lead_s < 0.0) throw ConfigError("feedforward: lead time must be non-negative");
}

FeedforwardCommand FeedforwardController::command(double tau_desired, double angle_deg, double dt) {
  FeedforwardCommand out;
  const double peak = model_->fatigue_psi * model_->contraction(angle_deg);
  if (!(peak > 1e-9)) {
    out.infeasible = tau_desired > 0.0;
    return out;
  }
  double a = std::max(0.0, tau_desired) / peak;
  if (lead_s_ > 0.0) {
    // (1 + T s)/(1 + T s/10) lead on the requested activation.
    const double tf = 0.1 * lead_s_;
    if (!primed_) {
      filtered_ = a;
      primed_ = true;
    }
    const double lead = a + (lead_s_ - tf) / tf * (a - filtered_);
    filtered_ += std::min(1.0, dt / tf) * (a - filtered_);
    a = std::max(0.0, lead);
  }
  out.a_r = a;
  const Inversion inv = invert_recruitment(*model_, a, angle_deg);
  out.upsilon_ma = inv.upsilon_ma;
  out.saturated = inv.saturated;
  return out;
}

FeedforwardCommand feedforward_control(const FesModel& model, double tau_desired, double angle_deg) {
  FeedforwardController ff(model);
  return ff.command(tau_desired, angle_deg, 1e-3);
}

AttainableSet attainable_set(const FesModel& flexor, const FesModel& extensor, double exo_max) {
  AttainableSet set;
  set.fes_flexor_max = [flexor](double angle) { return flexor.max_torque(angle); };
  set.fes_extensor_max = [extensor](double angle) { return extensor.max_torque(angle); };
  set.exo_max = exo_max;
  set.fes_flexor_bandwidth_hz = flexor.bandwidth_hz();
  set.fes_extensor_bandwidth_hz = extensor.bandwidth_hz();
  return set;
}

}  // namespace dynalloc
