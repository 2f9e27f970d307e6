// ============================================================================
// rom_filter.hpp -- rank-ordered mean (ROM) signal extraction
//
// Per pixel: pool the timestamps of the 8 surrounding pixels (the pixel itself
// is left out, borders are truncated), take the lower median as the anchor,
// and keep the pixel's own timestamps within half of the acceptance window
//     dT_sig = 4 T_p B / (eta alpha_hat S + B)
// around it. alpha_hat is inverted from the pixel's own photon count.
// ============================================================================
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "splidar/cube.hpp"

namespace splidar {

/// Timestamps of the in-bounds 8-neighbours of (row, col), centre excluded.
std::vector<double> gather_ring(const TimestampCube& cube, std::size_t row, std::size_t col);

/// Lower median (rank m of 2m, rank m+1 of 2m+1); nullopt for an empty list.
std::optional<double> rom_estimate(std::span<const double> neighbor_timestamps);

/// clamp((count/N - B) / (eta S), 0, 1).
double reflectivity_estimate(std::size_t pixel_count, const AcquisitionParams& params);

/// Full width of the acceptance zone. Throws std::domain_error when
/// eta alpha_hat S + B == 0.
double censor_window(double alpha_hat, const AcquisitionParams& params);

/// Timestamps t of `own` with |t - anchor| < window / 2.
std::vector<double> censor(std::span<const double> own, double anchor, double window);

/// Anchor estimator run on a pixel's neighbour pool.
using AnchorEstimator = std::function<std::optional<double>(std::span<const double>)>;

/// Shared ROM-style pipeline: gather_ring -> anchor -> own-count window -> censor.
CensoredCube censor_scene(const TimestampCube& cube, const AnchorEstimator& anchor,
                          unsigned threads = 0);

CensoredCube rom_filter_scene(const TimestampCube& cube, unsigned threads = 0);

}  // namespace splidar
