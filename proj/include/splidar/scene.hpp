// ============================================================================
// scene.hpp -- physical acquisition model for single-photon LiDAR
//
// A scene is a pair of reflectivity/depth images. Each pixel sees a Poisson
// photon stream whose rate is a Gaussian signal pulse (std T_p/2) centred on
// the round-trip time 2z/c, on top of a flat background B/T_r.
// ============================================================================
#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>

#include "splidar/grid.hpp"

namespace splidar {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, exact

/// Sentinel used for an infinite scene SBR (background-free acquisition).
inline constexpr double kInfiniteSbr = std::numeric_limits<double>::infinity();

/// The Gaussian pulse is treated as exactly zero beyond this many standard
/// deviations from its mean.
inline constexpr double kPulseCutoffSigmas = 6.0;

/// Pulse, detector and repetition parameters. B is the calibrated background
/// count per repetition period; ambient flux and dark count are not stored apart.
struct AcquisitionParams {
  double repetition_period = 100e-9;  // T_r, s
  double pulse_width = 270e-12;       // T_p (RMS), s
  double efficiency = 0.35;           // eta
  double signal_flux = 0.0114;        // S, photons per pulse
  long long pulses = 1;               // N
  double background = 0.0;            // B, photons per period

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  double max_depth() const { return kSpeedOfLight * repetition_period / 2.0; }
  double halfway_depth() const { return kSpeedOfLight * repetition_period / 4.0; }
  double pulse_sigma() const { return pulse_width / 2.0; }
};

struct PixelFlux {
  double signal_count = 0.0;
  double background_count = 0.0;
  double total_count = 0.0;
};

class Scene {
 public:
  Scene() = default;
  Scene(Grid<double> reflectivity, Grid<double> depth);

  std::size_t width() const { return reflectivity_.width(); }
  std::size_t height() const { return reflectivity_.height(); }
  std::size_t pixel_count() const { return reflectivity_.size(); }

  const Grid<double>& reflectivity() const { return reflectivity_; }
  const Grid<double>& depth() const { return depth_; }

  double mean_reflectivity() const;

  /// Checks the value ranges against a given acquisition (depth < c T_r / 2).
  void validate(const AcquisitionParams& params) const;

 private:
  Grid<double> reflectivity_;
  Grid<double> depth_;
};

inline double time_of_flight(double depth) { return 2.0 * depth / kSpeedOfLight; }
inline double depth_of_flight(double time) { return kSpeedOfLight * time / 2.0; }

/// Detection rate lambda(t) in photons per second. Throws std::domain_error
/// for t, t_star outside [0, T_r) or alpha outside [0, 1].
double rate_function(double alpha, double t_star, double t, const AcquisitionParams& params);

PixelFlux pixel_flux(double alpha, const AcquisitionParams& params);

/// eta * mean(alpha) * S / B, or kInfiniteSbr when B == 0.
double scene_sbr(const Scene& scene, const AcquisitionParams& params);

/// n x n ramp: reflectivity j/n along columns, depth 0.5 + i*14/n metres down
/// rows (1-based i, j).
Scene toy_scene(std::size_t n);

/// Piecewise-constant n x n scene of overlapping rectangles at distinct
/// depths and reflectivities in front of a back wall.
Scene blocks_scene(std::size_t n);

}  // namespace splidar
