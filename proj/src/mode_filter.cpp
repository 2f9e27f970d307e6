#include "splidar/mode_filter.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "splidar/rom_filter.hpp"

namespace splidar {

std::optional<double> mode_estimate(std::span<const double> neighbor_timestamps,
                                    const AcquisitionParams& params) {
  if (neighbor_timestamps.empty()) return std::nullopt;
  const double bin_width = params.pulse_width / 2.0;
  const double period = params.repetition_period;
  const auto last_bin = static_cast<long long>(std::ceil(period / bin_width)) - 1;

  std::vector<long long> bins;
  bins.reserve(neighbor_timestamps.size());
  for (double t : neighbor_timestamps)
    bins.push_back(std::clamp(static_cast<long long>(std::floor(t / bin_width)), 0LL, last_bin));
  std::sort(bins.begin(), bins.end());

  long long best_bin = bins.front();
  std::size_t best_count = 0;
  for (std::size_t k = 0; k < bins.size();) {
    std::size_t run = k;
    while (run < bins.size() && bins[run] == bins[k]) ++run;
    if (run - k > best_count) {  // strict: earlier (lower) bins win ties
      best_count = run - k;
      best_bin = bins[k];
    }
    k = run;
  }
  const double lo = static_cast<double>(best_bin) * bin_width;
  const double hi = std::min(lo + bin_width, period);
  return 0.5 * (lo + hi);
}

CensoredCube mode_filter_scene(const TimestampCube& cube, unsigned threads) {
  const AcquisitionParams params = cube.params;
  return censor_scene(
      cube, [params](std::span<const double> pool) { return mode_estimate(pool, params); },
      threads);
}

}  // namespace splidar
