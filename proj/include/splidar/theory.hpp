// ============================================================================
// theory.hpp -- when does the ROM anchor land on the signal?
//
// The ROM median sits on the signal return only if the per-pixel
// signal-to-background ratio beats the pixel's offset from the halfway depth:
//     pi = alpha / (mean_alpha / SBR) - |z - z_half| / z_half >= 0,
// and otherwise misses it by (T_r / 2) * (-pi).
// ============================================================================
#pragma once

#include <cstddef>
#include <vector>

#include "splidar/cube.hpp"
#include "splidar/scene.hpp"

namespace splidar {

struct Predictor {
  double value = 0;
  double alpha = 0;
  double depth = 0;
  double halfway_depth = 0;
  double sbr = 0;
  double mean_alpha = 0;
};

Predictor predictor(double alpha, double depth, double mean_alpha, double sbr,
                    const AcquisitionParams& params);

/// max(-(T_r/2) pi, 0) in seconds.
double theoretical_abs_error(const Predictor& pi, const AcquisitionParams& params);

/// Expected counts per period in [0, t* - T_p/2] (k_minus) and
/// [0, t* + T_p/2] (k_plus) with the pulse truncated to its T_p-wide core.
struct CountSplit {
  double below = 0;  // k_minus
  double upto = 0;   // k_plus
};
CountSplit count_split(double alpha, double depth, const AcquisitionParams& params);

struct PhaseBin {
  double center = 0;
  double empirical_error = 0;    // mean |t_ROM - t*| over the bin, s
  double theoretical_error = 0;  // at the bin centre, s
  std::size_t pixels = 0;
};

struct PhaseTransitionReport {
  std::vector<PhaseBin> bins;     // ascending by centre
  std::size_t absent = 0;         // pixels without neighbour timestamps
  std::size_t overflow = 0;       // pixels with pi < kOverflowPredictor (folded into one bin)
  std::size_t saturated = 0;      // pixels with pi > kSaturatedPredictor, including B = 0
};

inline constexpr double kDefaultPredictorBinWidth = 0.05;
inline constexpr double kOverflowPredictor = -2.0;
inline constexpr double kSaturatedPredictor = 2.0;

/// Bins every pixel by its predictor and compares the empirical ROM error with
/// the error law. Pixels with pi < -2 share a single overflow bin placed first;
/// pixels with pi > 2 (infinite without background) share one placed last.
PhaseTransitionReport phase_transition_report(const Scene& scene, const TimestampCube& cube,
                                              double bin_width = kDefaultPredictorBinWidth,
                                              unsigned threads = 0);

}  // namespace splidar
