#pragma once

// Text formats for FES models and training grids.
//
// Model file: line-oriented, '#' starts a comment. One block per muscle:
//
//   muscle flexor
//   psi 1
//   delay_s 0.046
//   upsilon_min_mA 8
//   upsilon_max_mA 30
//   activation_A 0 1 -32.55 -11.41
//   activation_B 0 32.55
//   contraction_deg_Nm 2
//   15 3.1
//   90 5.8
//   recruitment_angles 2
//   angle_deg 15 knots 3
//   8 0
//   ...
//   end
//
// Training CSV: header muscle,upsilon_mA,theta_deg,t_s,torque_Nm.

#include <iosfwd>
#include <optional>
#include <string>

#include "dynalloc/fes_identify.hpp"
#include "dynalloc/fes_model.hpp"

namespace dynalloc {

struct FesModelSet {
  std::optional<FesModel> flexor;
  std::optional<FesModel> extensor;

  const FesModel& get(Muscle m) const;
};

void write_models(std::ostream& out, const FesModelSet& models);
/// Throws InvalidInput with the offending line number.
FesModelSet read_models(std::istream& in);

FesModelSet load_models(const std::string& path);
void save_models(const std::string& path, const FesModelSet& models);

void write_training_csv(std::ostream& out, const TrainingGrid& grid);
/// Throws InvalidInput on a missing column or malformed row.
TrainingGrid read_training_csv(std::istream& in);
TrainingGrid load_training_csv(const std::string& path);

}  // namespace dynalloc
