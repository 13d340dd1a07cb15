#pragma once

#include "pm/kinematics.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pm {

/// {family:"ellipse",agents:[{X,Y,a,b,phi}]} or
/// {family:"fourier",agents:[{fx,fy,a:[...],b:[...],phix:[...],phiy:[...]}]}.
std::vector<TrajectoryParams> load_params(std::string_view text);
std::vector<TrajectoryParams> load_params_file(const std::filesystem::path& path);

/// Throws std::invalid_argument when the agents mix families.
std::string dump_params(const std::vector<TrajectoryParams>& params);

}  // namespace pm
