#pragma once

#include <optional>
#include <span>

#include "splidar/cube.hpp"

namespace splidar {

/// Histogram [0, T_r) into bins of width T_p/2 anchored at t = 0 (the last bin
/// may be shorter) and return the centre of the fullest bin. Ties go to the
/// lowest bin index.
std::optional<double> mode_estimate(std::span<const double> neighbor_timestamps,
                                    const AcquisitionParams& params);

/// ROM pipeline with the histogram mode as the censoring anchor.
CensoredCube mode_filter_scene(const TimestampCube& cube, unsigned threads = 0);

}  // namespace splidar
