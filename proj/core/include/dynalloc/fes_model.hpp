#pragma once

// Hammerstein-Wiener model of FES-induced joint torque:
//
//   a_r = r(υ(t − t_d), θ)         static recruitment
//   ȧ   = A a + B a_r              activation dynamics, unit DC gain
//   τ   = ψ · a₁ · τ*(θ)           fatigue scale and contraction map
//
// Intensities are in mA, angles in degrees, torques in N·m (magnitudes; the
// extensor channel applies the sign).

#include <deque>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dynalloc/monotone_spline.hpp"
#include "dynalloc/torque.hpp"

namespace dynalloc {

enum class Muscle { flexor, extensor };

std::string to_string(Muscle m);
/// Throws InvalidInput for anything but "flexor" or "extensor".
Muscle muscle_from_string(const std::string& s);
/// +1 for the flexor, −1 for the extensor.
double muscle_sign(Muscle m);

/// Recruitment curves r(υ) at a set of angles, interpolated linearly in angle.
class RecruitmentMap {
 public:
  RecruitmentMap() = default;
  /// One curve per angle; angles strictly increasing. Throws InvalidInput.
  RecruitmentMap(std::vector<double> angles_deg, std::vector<MonotoneSpline> curves);

  /// r(υ, θ) in [0, 1]; zero at or below υ_min, angle clamped to the table.
  double operator()(double upsilon_ma, double angle_deg, double upsilon_min_ma) const;

  const std::vector<double>& angles() const { return angles_; }
  const std::vector<MonotoneSpline>& curves() const { return curves_; }

 private:
  std::vector<double> angles_;
  std::vector<MonotoneSpline> curves_;
};

/// Peak torque τ*(θ), piecewise linear, clamped outside the table.
class ContractionMap {
 public:
  ContractionMap() = default;
  ContractionMap(std::vector<double> angles_deg, std::vector<double> torque_nm);

  double operator()(double angle_deg) const;

  const std::vector<double>& angles() const { return angles_; }
  const std::vector<double>& torques() const { return torques_; }

 private:
  std::vector<double> angles_;
  std::vector<double> torques_;
};

/// Second-order activation dynamics with output a₁.
struct ActivationDynamics {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Vector2d B = Eigen::Vector2d::Zero();

  /// A = [[0, 1], [−ω², −2ζω]], B = [0, ω²] with ω = 2π·natural_hz.
  static ActivationDynamics second_order(double natural_hz, double damping_ratio);
  static ActivationDynamics critically_damped(double natural_hz) { return second_order(natural_hz, 1.0); }

  double natural_frequency_hz() const;
  double damping_ratio() const;
  /// −[1 0] A⁻¹ B.
  double dc_gain() const;
  bool stable() const;
};

/// Closed-form step response of the critically damped system.
double critically_damped_step(double natural_hz, double t);

struct FesModel {
  RecruitmentMap recruitment;
  ContractionMap contraction;
  ActivationDynamics activation;
  double fatigue_psi = 1.0;
  double delay_s = 0.046;
  double upsilon_min_ma = 0.0;  // motor threshold
  double upsilon_max_ma = 0.0;  // maximum comfortable intensity

  /// Throws ConfigError on an unusable model.
  void validate() const;

  double recruit(double upsilon_ma, double angle_deg) const;
  double bandwidth_hz() const { return activation.natural_frequency_hz(); }
  /// Steady-state torque magnitude at maximum intensity, ψ·r(υ_max, θ)·τ*(θ).
  double max_torque(double angle_deg) const;
};

/// Activation state [a, ȧ].
using ActivationState = Eigen::Vector2d;

/// One RK4 step with the recruitment command held.
ActivationState activation_step(const ActivationDynamics& dyn, const ActivationState& a, double a_r, double dt);

/// Fixed-length FIFO of stimulation commands; reads zero until filled.
class DelayLine {
 public:
  DelayLine() = default;
  DelayLine(double delay_s, double dt);

  /// Pushes the current command and returns the one issued `samples()` ticks ago.
  double push(double value);
  std::size_t samples() const { return samples_; }

 private:
  std::size_t samples_ = 0;
  std::deque<double> buffer_;
};

/// Per-run state of one stimulated muscle.
class FesChannel {
 public:
  FesChannel(const FesModel& model, Muscle muscle, double dt);

  /// Advances one tick under intensity `upsilon_ma` and returns the signed torque.
  double step(double upsilon_ma, double angle_deg);

  double torque() const { return torque_; }
  const ActivationState& activation() const { return state_; }
  Muscle muscle() const { return muscle_; }
  const FesModel& model() const { return *model_; }

 private:
  const FesModel* model_;
  Muscle muscle_;
  double dt_;
  DelayLine delay_;
  ActivationState state_ = ActivationState::Zero();
  double torque_ = 0.0;
};

struct Inversion {
  double upsilon_ma = 0.0;
  bool saturated = false;
};

/// Intensity υ* ∈ [0, υ_max] that minimises (r(υ, θ) − a_r)².
Inversion invert_recruitment(const FesModel& model, double a_r, double angle_deg);

struct FeedforwardCommand {
  double upsilon_ma = 0.0;
  double a_r = 0.0;
  bool saturated = false;   // request beyond r(υ_max, θ)
  bool infeasible = false;  // τ*(θ) vanishes at this angle
};

/// Static inverse of the torque model with an optional lead on a_ψ.
class FeedforwardController {
 public:
  /// `lead_s` = 0 gives the pure static inverse.
  explicit FeedforwardController(const FesModel& model, double lead_s = 0.0);

  /// `tau_desired` is a torque magnitude (N·m, >= 0).
  FeedforwardCommand command(double tau_desired, double angle_deg, double dt);

 private:
  const FesModel* model_;
  double lead_s_;
  double filtered_ = 0.0;
  bool primed_ = false;
};

/// Static feedforward for a single request, no lead.
FeedforwardCommand feedforward_control(const FesModel& model, double tau_desired, double angle_deg);

/// Angle-dependent magnitude bounds and bandwidths of a flexor/extensor pair.
AttainableSet attainable_set(const FesModel& flexor, const FesModel& extensor, double exo_max);

}  // namespace dynalloc
