#include "splidar/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "splidar/parallel.hpp"

namespace splidar {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t pixel_stream_seed(RngSeed seed, std::size_t row, std::size_t col) {
  std::uint64_t h = splitmix64(seed.value);
  h = splitmix64(h ^ static_cast<std::uint64_t>(row));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(col) << 1 | 1ULL));
  return h;
}

LabeledTimestamps simulate_pixel_labeled(double alpha, double depth,
                                         const AcquisitionParams& params, RngSeed seed) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("alpha outside [0, 1]");
  if (!(depth >= 0.0 && depth < params.max_depth()))
    throw std::domain_error("depth outside [0, z_max)");

  std::mt19937_64 rng(seed.value);
  const double period = params.repetition_period;
  const double pulses = static_cast<double>(params.pulses);
  const double signal_mean = params.efficiency * alpha * params.signal_flux * pulses;
  const double background_mean = params.background * pulses;

  const long long signal_count =
      signal_mean > 0.0 ? std::poisson_distribution<long long>(signal_mean)(rng) : 0;
  const long long background_count =
      background_mean > 0.0 ? std::poisson_distribution<long long>(background_mean)(rng) : 0;

  LabeledTimestamps out;
  out.times.reserve(static_cast<std::size_t>(signal_count + background_count));
  out.is_signal.reserve(out.times.capacity());

  std::normal_distribution<double> jitter(time_of_flight(depth), params.pulse_sigma());
  for (long long k = 0; k < signal_count; ++k) {
    double t = jitter(rng);
    while (!(t >= 0.0 && t < period)) t = jitter(rng);
    out.times.push_back(t);
    out.is_signal.push_back(1);
  }
  std::uniform_real_distribution<double> uniform(0.0, period);
  for (long long k = 0; k < background_count; ++k) {
    double t = uniform(rng);
    while (!(t < period)) t = uniform(rng);
    out.times.push_back(t);
    out.is_signal.push_back(0);
  }

  // Fisher-Yates with our own index draw so the permutation is stdlib-independent.
  for (std::size_t k = out.times.size(); k > 1; --k) {
    const std::size_t pick = static_cast<std::size_t>(rng() % k);
    std::swap(out.times[k - 1], out.times[pick]);
    std::swap(out.is_signal[k - 1], out.is_signal[pick]);
  }
  return out;
}

std::vector<double> simulate_pixel(double alpha, double depth, const AcquisitionParams& params,
                                   RngSeed seed) {
  return simulate_pixel_labeled(alpha, depth, params, seed).times;
}

LabeledCube simulate_scene_labeled(const Scene& scene, const AcquisitionParams& params,
                                   RngSeed seed, unsigned threads) {
  params.validate();
  scene.validate(params);
  const std::size_t h = scene.height(), w = scene.width();
  std::vector<LabeledTimestamps> pixels(h * w);
  parallel_for(h * w, threads, [&](std::size_t k) {
    const std::size_t r = k / w, c = k % w;
    pixels[k] = simulate_pixel_labeled(scene.reflectivity()(r, c), scene.depth()(r, c), params,
                                       RngSeed{pixel_stream_seed(seed, r, c)});
  });

  std::vector<std::vector<double>> lists(h * w);
  std::vector<std::uint8_t> labels;
  for (std::size_t k = 0; k < pixels.size(); ++k) {
    labels.insert(labels.end(), pixels[k].is_signal.begin(), pixels[k].is_signal.end());
    lists[k] = std::move(pixels[k].times);
  }
  LabeledCube out;
  out.cube.timestamps = PixelLists::from_lists(h, w, lists);
  out.cube.params = params;
  out.is_signal = std::move(labels);
  return out;
}

TimestampCube simulate_scene(const Scene& scene, const AcquisitionParams& params, RngSeed seed,
                             unsigned threads) {
  return simulate_scene_labeled(scene, params, seed, threads).cube;
}

AcquisitionParams configure_for_targets(const Scene& scene, const AcquisitionParams& base,
                                        double target_sbr, double target_signal_ppp) {
  if (!(target_signal_ppp > 0.0)) throw ConfigError("target signal PPP must be positive");
  if (!(target_sbr > 0.0)) throw ConfigError("target SBR must be positive");
  const double per_pulse = base.efficiency * scene.mean_reflectivity() * base.signal_flux;
  if (!(per_pulse > 0.0)) throw ConfigError("scene produces no signal (eta * mean alpha * S = 0)");

  const double pulses = std::round(target_signal_ppp / per_pulse);
  if (pulses < 1.0)
    throw ConfigError("target signal PPP " + std::to_string(target_signal_ppp) +
                      " is below what a single pulse delivers");
  AcquisitionParams out = base;
  out.pulses = static_cast<long long>(pulses);
  out.background = std::isinf(target_sbr) ? 0.0 : per_pulse / target_sbr;
  out.validate();
  return out;
}

bool violates_low_flux(const Scene& scene, const AcquisitionParams& params) {
  const auto& a = scene.reflectivity().data();
  const double brightest = *std::max_element(a.begin(), a.end());
  return pixel_flux(brightest, params).total_count > 1.0;
}

}  // namespace splidar
