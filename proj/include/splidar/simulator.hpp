// ============================================================================
// simulator.hpp -- Poisson photon-timestamp generator
//
// Counts are drawn once for the whole acquisition (Poisson over N pulses).
// Signal times are Gaussian around 2z/c with std T_p/2, redrawn when they fall
// outside [0, T_r); background times are uniform on [0, T_r). Every pixel owns
// an RNG substream derived from (seed, row, col), so scenes are reproducible
// for any worker count.
// ============================================================================
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "splidar/cube.hpp"
#include "splidar/scene.hpp"

namespace splidar {

struct RngSeed {
  std::uint64_t value = 0;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Substream seed for pixel (row, col); stable across platforms.
std::uint64_t pixel_stream_seed(RngSeed seed, std::size_t row, std::size_t col);

struct LabeledTimestamps {
  std::vector<double> times;
  std::vector<std::uint8_t> is_signal;  // parallel to times
};

/// Shuffled timestamps of one pixel together with their ground-truth labels.
LabeledTimestamps simulate_pixel_labeled(double alpha, double depth,
                                         const AcquisitionParams& params, RngSeed seed);

/// Unlabeled, unsorted timestamps of one pixel.
std::vector<double> simulate_pixel(double alpha, double depth, const AcquisitionParams& params,
                                   RngSeed seed);

struct LabeledCube {
  TimestampCube cube;
  std::vector<std::uint8_t> is_signal;  // parallel to cube.timestamps.values()
};

TimestampCube simulate_scene(const Scene& scene, const AcquisitionParams& params, RngSeed seed,
                             unsigned threads = 0);

LabeledCube simulate_scene_labeled(const Scene& scene, const AcquisitionParams& params,
                                   RngSeed seed, unsigned threads = 0);

/// Picks N so that eta * mean(alpha) * S * N hits the target signal PPP and B
/// so that the scene SBR hits target_sbr (kInfiniteSbr gives B = 0). Throws
/// ConfigError when no N >= 1 is close enough.
AcquisitionParams configure_for_targets(const Scene& scene, const AcquisitionParams& base,
                                        double target_sbr, double target_signal_ppp);

/// Expected detections per pulse of the brightest pixel exceed one.
bool violates_low_flux(const Scene& scene, const AcquisitionParams& params);

}  // namespace splidar
