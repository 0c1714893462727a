#pragma once

#include <map>
#include <optional>
#include <string>

#include "gbmcal/constants.hpp"
#include "gbmcal/design.hpp"
#include "gbmcal/grid.hpp"

namespace gbmcal {

struct ProfileFile {
  CellProfile profile;
  bool normalized = false;  // u given as fraction of c_sat
};

// CSV with header "x,u"; an optional leading comment "# normalized=true|false"
// declares the density units
ProfileFile read_profile_csv(const std::string& path);
void write_profile_csv(const std::string& path, const CellProfile& p, bool normalized);

// flat key = value file over the FixedConstants field names; D_O2, k_m and L
// fall back to their literature defaults
FixedConstants read_constants(const std::string& path);
void write_constants(const std::string& path, const FixedConstants& c);

// flat key = value configuration text (comments with '#')
std::map<std::string, std::string> read_keyvalue_file(const std::string& path);

// physical-units dataset assembled from profile files; normalized inputs are
// scaled by c_sat on load
ExperimentalDataset load_experimental_dataset(const std::string& data_csv,
                                              const std::string& u0_csv,
                                              const std::optional<std::string>& v0_csv,
                                              const FixedConstants& consts);

}  // namespace gbmcal
