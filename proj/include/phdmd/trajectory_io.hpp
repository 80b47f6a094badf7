#pragma once

#include <filesystem>
#include <string>

#include "phdmd/simulate.hpp"

namespace phdmd {

/// CSV with header `t,u_1..u_m,x_1..x_n,y_1..y_p`, one row per sample, every
/// value printed with 17 significant digits.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
std::string trajectory_csv(const Trajectory& traj);

/// Column groups are recovered from the header names; dt is taken from the
/// first two time stamps and the grid must be uniform.
Trajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace phdmd
