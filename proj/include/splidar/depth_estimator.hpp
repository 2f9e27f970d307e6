// ============================================================================
// depth_estimator.hpp -- maximum-likelihood depth from censored timestamps
//
// With a Gaussian pulse the per-pixel negative log-likelihood is quadratic in
// z, so each pixel reduces to (count, mean timestamp). The penalized estimate
// minimizes
//     sum_pixels sum_t (t - 2 z/c)^2 / (2 (T_p/2)^2) + beta * TV_huber(z)
// where TV_huber is the anisotropic total variation with each absolute
// difference replaced by a Huber function of width delta = 1e-4 z_max.
// ============================================================================
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "splidar/cube.hpp"
#include "splidar/grid.hpp"

namespace splidar {

struct DepthImage {
  Grid<double> depth;         // metres
  Grid<std::uint8_t> valid;   // 0 where no data exists in the 3x3 surround

  std::size_t height() const { return depth.height(); }
  std::size_t width() const { return depth.width(); }
};

struct PmlConfig {
  double beta = 0.3;                // grid-searched on the toy scene, see tools/calibrate.cpp
  int max_iterations = 500;
  double tolerance = 1e-9;          // relative objective change
  double huber_fraction = 1e-4;     // delta as a fraction of z_max
  int max_inner_iterations = 50;    // conjugate-gradient steps per outer step
  unsigned threads = 0;

  void validate() const;
};

struct PmlResult {
  DepthImage image;
  std::vector<double> objective_history;  // initial value, then one per step
  int iterations = 0;
  bool converged = false;
};

/// (c/2) * mean(timestamps), clamped to [0, z_max); nullopt for an empty set.
std::optional<double> cml_depth(std::span<const double> signal_set,
                                const AcquisitionParams& params);

/// Per-pixel sufficient statistics of the quadratic data term.
struct PixelData {
  std::vector<double> weight;   // photon count
  std::vector<double> target;   // CML depth (unclamped), 0 where weight == 0
  double constant = 0;          // sum of within-pixel squared deviations, in the objective's units
};

PixelData pixel_data(const CensoredCube& censored, const AcquisitionParams& params);

/// PML objective of a depth image (row-major) for the given data.
double pml_objective(std::span<const double> depth, std::size_t height, std::size_t width,
                     const PixelData& data, const AcquisitionParams& params,
                     const PmlConfig& config);

/// Throws std::invalid_argument when every pixel is empty.
PmlResult pml_depth(const CensoredCube& censored, const AcquisitionParams& params,
                    const PmlConfig& config);

/// Depth image of per-pixel CML values; empty pixels are 0 and invalid.
DepthImage cml_image(const CensoredCube& censored, const AcquisitionParams& params);

}  // namespace splidar
