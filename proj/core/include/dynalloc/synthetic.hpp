#pragma once

// Built-in synthetic muscles used by the shipped scenarios. Their contraction
// maps peak at 6 N·m (flexor) and 4 N·m (extensor); they are stand-ins, not
// measured data.

#include "dynalloc/fes_model.hpp"

namespace dynalloc {

struct SyntheticOptions {
  double bandwidth_hz = 0.0;  // 0 selects 0.908 Hz (flexor) or 3.976 Hz (extensor)
  double delay_s = 0.046;
  double psi = 1.0;
};

FesModel synthetic_model(Muscle muscle, const SyntheticOptions& options = {});

inline constexpr double kFlexorBandwidthHz = 0.908;
inline constexpr double kExtensorBandwidthHz = 3.976;

}  // namespace dynalloc
