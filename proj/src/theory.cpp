#include "splidar/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "splidar/parallel.hpp"
#include "splidar/rom_filter.hpp"

namespace splidar {

Predictor predictor(double alpha, double depth, double mean_alpha, double sbr,
                    const AcquisitionParams& params) {
  if (!(sbr > 0.0)) throw std::invalid_argument("predictor needs SBR > 0");
  if (!(mean_alpha > 0.0)) throw std::invalid_argument("predictor needs mean reflectivity > 0");
  if (!(depth >= 0.0 && depth < params.max_depth()))
    throw std::domain_error("depth outside [0, z_max)");
  Predictor p;
  p.alpha = alpha;
  p.depth = depth;
  p.halfway_depth = params.halfway_depth();
  p.sbr = sbr;
  p.mean_alpha = mean_alpha;
  // A dark pixel contributes no signal even without background.
  const double ratio = alpha == 0.0 ? 0.0 : alpha * sbr / mean_alpha;
  p.value = ratio - std::abs(depth - p.halfway_depth) / p.halfway_depth;
  return p;
}

double theoretical_abs_error(const Predictor& pi, const AcquisitionParams& params) {
  return std::max(-(params.repetition_period / 2.0) * pi.value, 0.0);
}

CountSplit count_split(double alpha, double depth, const AcquisitionParams& params) {
  const double t_star = time_of_flight(depth);
  const double half = params.pulse_width / 2.0;
  const double rate = params.background / params.repetition_period;
  CountSplit split;
  split.below = rate * std::max(t_star - half, 0.0);
  split.upto = params.efficiency * alpha * params.signal_flux +
               rate * std::min(t_star + half, params.repetition_period);
  return split;
}

PhaseTransitionReport phase_transition_report(const Scene& scene, const TimestampCube& cube,
                                              double bin_width, unsigned threads) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
  if (scene.height() != cube.height() || scene.width() != cube.width())
    throw std::invalid_argument("scene and cube differ in size");
  const AcquisitionParams& params = cube.params;
  const double sbr = scene_sbr(scene, params);
  const double mean_alpha = scene.mean_reflectivity();
  const std::size_t h = scene.height(), w = scene.width();

  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> error(h * w, kNaN), value(h * w, kNaN);
  parallel_for(h * w, threads, [&](std::size_t k) {
    const std::size_t r = k / w, c = k % w;
    const double z = scene.depth()(r, c);
    value[k] = predictor(scene.reflectivity()(r, c), z, mean_alpha, sbr, params).value;
    if (auto t_rom = rom_estimate(gather_ring(cube, r, c)))
      error[k] = std::abs(*t_rom - time_of_flight(z));
  });

  struct Acc {
    double sum = 0;
    std::size_t n = 0;
  };
  std::map<long long, Acc> regular;
  Acc overflow, saturated;
  PhaseTransitionReport report;
  for (std::size_t k = 0; k < h * w; ++k) {
    if (std::isnan(error[k])) {
      ++report.absent;
      continue;
    }
    if (value[k] < kOverflowPredictor) {
      overflow.sum += error[k];
      ++overflow.n;
      continue;
    }
    if (value[k] > kSaturatedPredictor) {
      saturated.sum += error[k];
      ++saturated.n;
      continue;
    }
    auto& acc = regular[static_cast<long long>(std::floor(value[k] / bin_width))];
    acc.sum += error[k];
    ++acc.n;
  }

  auto theoretical = [&](double center) {
    Predictor p;
    p.value = center;
    return theoretical_abs_error(p, params);
  };
  if (overflow.n > 0) {
    report.overflow = overflow.n;
    const double center = kOverflowPredictor - bin_width / 2.0;
    report.bins.push_back({center, overflow.sum / static_cast<double>(overflow.n),
                           theoretical(center), overflow.n});
  }
  for (const auto& [index, acc] : regular) {
    const double center = (static_cast<double>(index) + 0.5) * bin_width;
    report.bins.push_back(
        {center, acc.sum / static_cast<double>(acc.n), theoretical(center), acc.n});
  }
  if (saturated.n > 0) {
    report.saturated = saturated.n;
    const double center = kSaturatedPredictor + bin_width / 2.0;
    report.bins.push_back({center, saturated.sum / static_cast<double>(saturated.n),
                           theoretical(center), saturated.n});
  }
  return report;
}

}  // namespace splidar
