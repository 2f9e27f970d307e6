// ============================================================================
// consensus_filter.hpp -- neighbourhood consensus signal extraction
//
// 1. Pool timestamps over an n_sp x n_sp square (centre included) where n_sp^2
//    is the smallest odd square >= 16 / sigma, sigma the scene signal PPP.
// 2. Sort the pool, take consecutive gaps d, smooth them with [1/4, 1/2, 1/4]
//    and anchor on the third timestamp of the tightest 4-timestamp run; keep
//    the pool's timestamps within T_p of the anchor. No anchor if the tightest
//    smoothed gap is >= T_p.
// 3. Drop timestamps farther than p standard deviations from the scene-wide
//    mean of everything kept.
// ============================================================================
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "splidar/cube.hpp"
#include "splidar/scene.hpp"

namespace splidar {

/// Empirical minimum signal count per pool for reliable cluster selection.
inline constexpr double kConsensusMinSignalCount = 4.0;

/// Target pool size numerator: N_sp ~ 16 / sigma.
inline constexpr double kConsensusPoolNumerator = 16.0;

struct NeighborhoodPlan {
  int side = 1;            // n_sp, odd
  int pixels = 1;          // n_sp^2
  double signal_ppp = 0;   // sigma used for the plan
};

NeighborhoodPlan plan_neighborhood(double signal_ppp);
NeighborhoodPlan plan_neighborhood(const Scene& scene, const AcquisitionParams& params);

/// Scene signal PPP estimated from the data: mean count per pixel minus B N.
double estimate_signal_ppp(const TimestampCube& cube);

/// All timestamps of the side x side square centred at (row, col), clipped to
/// the image.
std::vector<double> gather_neighborhood(const TimestampCube& cube, std::size_t row,
                                        std::size_t col, int side);

struct ClusterSelection {
  std::optional<double> anchor;  // t_diff
  double min_smoothed_gap = 0;   // c_min; +inf when fewer than 4 timestamps
};

ClusterSelection select_cluster(std::span<const double> pool, const AcquisitionParams& params);

/// Timestamps of the pool with |t - anchor| < T_p; empty if no anchor.
std::vector<double> extract_signal(std::span<const double> pool, const ClusterSelection& selection,
                                   const AcquisitionParams& params);

struct OutlierRejection {
  CensoredCube cube;
  double mean = 0;
  double stddev = 0;
  bool skipped = false;  // nothing retained scene-wide, or zero spread
};

/// Scene-wide p-sigma clipping of every retained timestamp.
OutlierRejection reject_outliers(const CensoredCube& cube, double p);

struct ConsensusOptions {
  double p_outlier = 1.0;
  std::optional<int> side_override;
  std::optional<double> signal_ppp;  // defaults to estimate_signal_ppp(cube)
  unsigned threads = 0;
};

struct ConsensusResult {
  CensoredCube cube;  // estimates carry t_diff per pixel
  NeighborhoodPlan plan;
  bool outliers_skipped = false;
};

ConsensusResult consensus_filter_scene(const TimestampCube& cube,
                                       const ConsensusOptions& options = {});

}  // namespace splidar
