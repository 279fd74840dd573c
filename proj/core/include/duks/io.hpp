#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "duks/landau.hpp"
#include "duks/solver.hpp"

namespace duks {

/// Shortest round-trip decimal representation.
std::string format_double(double value);

/// Columns t,k,re_u,im_u,re_v,im_v,re_Z,im_Z; one row per (sample, k) with k in [-N, N].
std::string trajectory_csv(const Trajectory& traj);

/// Columns T,re_A1,im_A1,re_A3,im_A3,re_A2,im_A2,re_A4,im_A4,re_A6,im_A6.
std::string amplitude_csv(const AmplitudeTrajectory& amp);

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace duks
