#include "splidar/rom_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "splidar/parallel.hpp"

namespace splidar {

std::vector<double> gather_ring(const TimestampCube& cube, std::size_t row, std::size_t col) {
  std::vector<double> pool;
  const std::size_t h = cube.height(), w = cube.width();
  const std::size_t r0 = row == 0 ? 0 : row - 1, r1 = std::min(h - 1, row + 1);
  const std::size_t c0 = col == 0 ? 0 : col - 1, c1 = std::min(w - 1, col + 1);
  for (std::size_t r = r0; r <= r1; ++r) {
    for (std::size_t c = c0; c <= c1; ++c) {
      if (r == row && c == col) continue;
      const auto ts = cube.pixel(r, c);
      pool.insert(pool.end(), ts.begin(), ts.end());
    }
  }
  return pool;
}

std::optional<double> rom_estimate(std::span<const double> neighbor_timestamps) {
  if (neighbor_timestamps.empty()) return std::nullopt;
  std::vector<double> v(neighbor_timestamps.begin(), neighbor_timestamps.end());
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

double reflectivity_estimate(std::size_t pixel_count, const AcquisitionParams& params) {
  const double per_pulse =
      static_cast<double>(pixel_count) / static_cast<double>(params.pulses);
  const double alpha = (per_pulse - params.background) / (params.efficiency * params.signal_flux);
  return std::clamp(alpha, 0.0, 1.0);
}

double censor_window(double alpha_hat, const AcquisitionParams& params) {
  const double denom = params.efficiency * alpha_hat * params.signal_flux + params.background;
  if (denom == 0.0) throw std::domain_error("censor window undefined: no expected detections");
  return 4.0 * params.pulse_width * params.background / denom;
}

std::vector<double> censor(std::span<const double> own, double anchor, double window) {
  std::vector<double> kept;
  for (double t : own)
    if (std::abs(t - anchor) < window / 2.0) kept.push_back(t);
  return kept;
}

CensoredCube censor_scene(const TimestampCube& cube, const AnchorEstimator& anchor,
                          unsigned threads) {
  const std::size_t h = cube.height(), w = cube.width();
  std::vector<std::vector<double>> kept(h * w);
  std::vector<double> estimates(h * w, std::numeric_limits<double>::quiet_NaN());
  parallel_for(h * w, threads, [&](std::size_t k) {
    const std::size_t r = k / w, c = k % w;
    const auto est = anchor(gather_ring(cube, r, c));
    if (!est) return;
    estimates[k] = *est;
    const auto own = cube.pixel(r, c);
    if (own.empty()) return;
    const double window = censor_window(reflectivity_estimate(own.size(), cube.params), cube.params);
    kept[k] = censor(own, *est, window);
  });
  CensoredCube out;
  out.signal_sets = PixelLists::from_lists(h, w, kept);
  out.estimates = std::move(estimates);
  return out;
}

CensoredCube rom_filter_scene(const TimestampCube& cube, unsigned threads) {
  return censor_scene(cube, [](std::span<const double> pool) { return rom_estimate(pool); },
                      threads);
}

}  // namespace splidar
