#pragma once

#include <string>

#include "types.hpp"

namespace midas {

// Strain CSV: header "time,s1,...,sN", one row per timestep, full precision.
void write_strain_csv(const std::string& path, const StrainSet& set);
StrainSet read_strain_csv(const std::string& path);

// Layout CSV: header "id,x_cm,y_cm".
void write_layout_csv(const std::string& path, const SensorLayout& layout);
SensorLayout read_layout_csv(const std::string& path);

}  // namespace midas
