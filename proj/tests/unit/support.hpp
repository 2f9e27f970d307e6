// Shared fixtures for the unit tests.
#pragma once

#include <cmath>
#include <vector>

#include "splidar/cube.hpp"
#include "splidar/scene.hpp"

namespace splidar::testing {

inline AcquisitionParams default_params(long long pulses = 1000, double background = 0.001) {
  AcquisitionParams p;
  p.pulses = pulses;
  p.background = background;
  return p;
}

// Dyadic timing so every sum and difference of grid timestamps is exact:
// T_r = 2^-23 s (~119 ns), T_p = 2^-31 s (~466 ps).
inline AcquisitionParams dyadic_params() {
  AcquisitionParams p;
  p.repetition_period = std::ldexp(1.0, -23);
  p.pulse_width = std::ldexp(1.0, -31);
  p.pulses = 1000;
  p.background = 0.001;
  return p;
}

inline TimestampCube make_cube(std::size_t h, std::size_t w,
                               const std::vector<std::vector<double>>& lists,
                               const AcquisitionParams& params) {
  TimestampCube cube;
  cube.timestamps = PixelLists::from_lists(h, w, lists);
  cube.params = params;
  return cube;
}

inline Scene uniform_scene(std::size_t h, std::size_t w, double alpha, double depth) {
  return Scene(Grid<double>(h, w, alpha), Grid<double>(h, w, depth));
}

}  // namespace splidar::testing
