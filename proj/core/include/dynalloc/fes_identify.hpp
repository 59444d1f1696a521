#pragma once

// Training grids and Hammerstein-Wiener identification of FesModel.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynalloc/fes_model.hpp"

namespace dynalloc {

/// One sampled torque measurement. Extensor torques are negative.
struct TrainingSample {
  Muscle muscle = Muscle::flexor;
  double upsilon_ma = 0.0;
  double theta_deg = 0.0;
  double t_s = 0.0;
  double torque_nm = 0.0;
};

using TrainingGrid = std::vector<TrainingSample>;

/// Stimulation protocol: at every angle each intensity is held for `stim_s`
/// and followed by `rest_s` of rest, `repeats` times.
struct GridProtocol {
  std::vector<double> angles_deg{15.0, 30.0, 45.0, 60.0, 75.0, 90.0};
  std::vector<double> intensities_ma;  // empty: five levels spread up to υ_max
  int repeats = 2;
  double stim_s = 5.0;
  double rest_s = 5.0;
  double sample_hz = 100.0;
  double sim_dt = 1e-3;
  double noise_nm = 0.0;  // standard deviation of additive measurement noise
  std::uint64_t seed = 1;
};

/// Five intensities evenly spaced on (υ_min, υ_max].
std::vector<double> default_intensities(const FesModel& model);

/// Simulates the protocol on `truth` and samples the torque.
TrainingGrid generate_grid(const FesModel& truth, Muscle muscle, const GridProtocol& protocol);

struct IdentifyOptions {
  double bandwidth_hint_hz = 1.0;
  std::optional<double> upsilon_min_ma;  // motor threshold; default lowest intensity
  double min_delay_s = 0.016;            // stimulator plus communication delay
  double max_delay_s = 0.25;
  double steady_fraction = 0.4;          // tail of each stimulation window
  double monotone_tolerance = 0.02;      // allowed dip in normalized recruitment
  double psi = 1.0;
};

struct IdentifyResult {
  FesModel model;
  std::vector<std::string> warnings;
};

/// Fits recruitment, contraction map, activation dynamics and delay for one
/// muscle of `grid`.
///
/// Throws IdentificationError with fewer than two angles or intensities, a
/// degenerate contraction map, a rank-deficient regression or unstable
/// dynamics.
IdentifyResult identify(const TrainingGrid& grid, Muscle muscle, const IdentifyOptions& options);

}  // namespace dynalloc
