#include "splidar/consensus_filter.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "splidar/parallel.hpp"

namespace splidar {

NeighborhoodPlan plan_neighborhood(double signal_ppp) {
  if (!(signal_ppp > 0.0)) throw std::invalid_argument("signal PPP must be positive");
  NeighborhoodPlan plan;
  plan.signal_ppp = signal_ppp;
  if (signal_ppp >= kConsensusPoolNumerator) return plan;

  const double target = kConsensusPoolNumerator / signal_ppp;
  int side = 1;
  // Relative slack so that exact squares such as 16 / (16/9) = 9 stay at 3.
  while (static_cast<double>(side) * side < target * (1.0 - 1e-12)) side += 2;
  plan.side = side;
  plan.pixels = side * side;
  return plan;
}

NeighborhoodPlan plan_neighborhood(const Scene& scene, const AcquisitionParams& params) {
  return plan_neighborhood(params.efficiency * scene.mean_reflectivity() * params.signal_flux *
                           static_cast<double>(params.pulses));
}

double estimate_signal_ppp(const TimestampCube& cube) {
  const double mean_count = static_cast<double>(cube.timestamps.total()) /
                            static_cast<double>(cube.timestamps.pixel_count());
  return mean_count - cube.params.background * static_cast<double>(cube.params.pulses);
}

std::vector<double> gather_neighborhood(const TimestampCube& cube, std::size_t row,
                                        std::size_t col, int side) {
  if (side < 1 || side % 2 == 0) throw std::invalid_argument("neighbourhood side must be odd");
  const auto half = static_cast<std::size_t>(side / 2);
  const std::size_t r0 = row > half ? row - half : 0;
  const std::size_t c0 = col > half ? col - half : 0;
  const std::size_t r1 = std::min(cube.height() - 1, row + half);
  const std::size_t c1 = std::min(cube.width() - 1, col + half);
  std::vector<double> pool;
  for (std::size_t r = r0; r <= r1; ++r) {
    for (std::size_t c = c0; c <= c1; ++c) {
      const auto ts = cube.pixel(r, c);
      pool.insert(pool.end(), ts.begin(), ts.end());
    }
  }
  return pool;
}

ClusterSelection select_cluster(std::span<const double> pool, const AcquisitionParams& params) {
  ClusterSelection out;
  out.min_smoothed_gap = std::numeric_limits<double>::infinity();
  if (pool.size() < 4) return out;

  std::vector<double> t(pool.begin(), pool.end());
  std::sort(t.begin(), t.end());
  std::vector<double> gaps(t.size() - 1);
  for (std::size_t u = 0; u + 1 < t.size(); ++u) gaps[u] = t[u + 1] - t[u];

  std::size_t best = 0;
  for (std::size_t u = 0; u + 2 < gaps.size(); ++u) {
    const double smoothed = 0.25 * gaps[u] + 0.5 * gaps[u + 1] + 0.25 * gaps[u + 2];
    if (smoothed < out.min_smoothed_gap) {
      out.min_smoothed_gap = smoothed;
      best = u;
    }
  }
  if (out.min_smoothed_gap >= params.pulse_width) return out;
  out.anchor = t[best + 2];
  return out;
}

std::vector<double> extract_signal(std::span<const double> pool, const ClusterSelection& selection,
                                   const AcquisitionParams& params) {
  std::vector<double> kept;
  if (!selection.anchor) return kept;
  for (double t : pool)
    if (std::abs(t - *selection.anchor) < params.pulse_width) kept.push_back(t);
  return kept;
}

OutlierRejection reject_outliers(const CensoredCube& cube, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("outlier threshold p must be positive");
  OutlierRejection out;
  const auto& all = cube.signal_sets.values();
  if (all.empty()) {
    std::cerr << "warning: outlier rejection skipped, no retained timestamps\n";
    out.cube = cube;
    out.skipped = true;
    return out;
  }
  double sum = 0.0;
  for (double t : all) sum += t;
  out.mean = sum / static_cast<double>(all.size());
  const auto [lo, hi] = std::minmax_element(all.begin(), all.end());
  if (*lo != *hi) {
    double sq = 0.0;
    for (double t : all) sq += (t - out.mean) * (t - out.mean);
    out.stddev = std::sqrt(sq / static_cast<double>(all.size()));
  }

  if (out.stddev == 0.0 || std::isinf(p)) {
    out.cube = cube;
    out.skipped = out.stddev == 0.0;
    return out;
  }
  const double limit = p * out.stddev;
  std::vector<std::vector<double>> kept(cube.signal_sets.pixel_count());
  for (std::size_t k = 0; k < kept.size(); ++k)
    for (double t : cube.signal_sets.at(k))
      if (std::abs(t - out.mean) < limit) kept[k].push_back(t);
  out.cube.signal_sets = PixelLists::from_lists(cube.height(), cube.width(), kept);
  out.cube.estimates = cube.estimates;
  return out;
}

ConsensusResult consensus_filter_scene(const TimestampCube& cube, const ConsensusOptions& options) {
  const std::size_t h = cube.height(), w = cube.width();
  ConsensusResult result;
  if (options.side_override) {
    result.plan.side = *options.side_override;
    result.plan.pixels = result.plan.side * result.plan.side;
  } else {
    // A non-positive data estimate (pure background) falls back to the widest
    // pool the image allows.
    const double ppp = options.signal_ppp.value_or(estimate_signal_ppp(cube));
    const double floor_ppp =
        kConsensusPoolNumerator / static_cast<double>(std::max(h, w) * std::max(h, w));
    result.plan = plan_neighborhood(std::max(ppp, floor_ppp));
  }
  result.plan.signal_ppp = options.signal_ppp.value_or(estimate_signal_ppp(cube));

  std::vector<std::vector<double>> kept(h * w);
  std::vector<double> anchors(h * w, std::numeric_limits<double>::quiet_NaN());
  parallel_for(h * w, options.threads, [&](std::size_t k) {
    const std::size_t r = k / w, c = k % w;
    const auto pool = gather_neighborhood(cube, r, c, result.plan.side);
    const auto selection = select_cluster(pool, cube.params);
    if (!selection.anchor) return;
    anchors[k] = *selection.anchor;
    kept[k] = extract_signal(pool, selection, cube.params);
  });

  CensoredCube extracted;
  extracted.signal_sets = PixelLists::from_lists(h, w, kept);
  extracted.estimates = std::move(anchors);
  auto rejected = reject_outliers(extracted, options.p_outlier);
  result.cube = std::move(rejected.cube);
  result.outliers_skipped = rejected.skipped;
  return result;
}

}  // namespace splidar
