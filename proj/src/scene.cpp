#include "splidar/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace splidar {

void AcquisitionParams::validate() const {
  if (!(repetition_period > 0.0)) throw std::invalid_argument("T_r must be positive");
  if (!(pulse_width > 0.0)) throw std::invalid_argument("T_p must be positive");
  if (pulse_width > repetition_period / 100.0)
    throw std::invalid_argument("T_p must not exceed T_r/100");
  if (!(efficiency >= 0.0 && efficiency < 1.0))
    throw std::invalid_argument("quantum efficiency must lie in [0, 1)");
  if (!(signal_flux > 0.0)) throw std::invalid_argument("signal flux S must be positive");
  if (pulses < 1) throw std::invalid_argument("pulse count N must be >= 1");
  if (!(background >= 0.0) || !std::isfinite(background))
    throw std::invalid_argument("background B must be finite and >= 0");
}

Scene::Scene(Grid<double> reflectivity, Grid<double> depth)
    : reflectivity_(std::move(reflectivity)), depth_(std::move(depth)) {
  if (reflectivity_.width() == 0 || reflectivity_.height() == 0)
    throw std::invalid_argument("scene must have at least one pixel");
  if (reflectivity_.width() != depth_.width() || reflectivity_.height() != depth_.height())
    throw std::invalid_argument("reflectivity and depth images differ in size");
  for (double a : reflectivity_.data())
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("reflectivity outside [0, 1]");
  for (double z : depth_.data())
    if (!(z >= 0.0) || !std::isfinite(z)) throw std::invalid_argument("depth must be >= 0");
}

double Scene::mean_reflectivity() const {
  const auto& a = reflectivity_.data();
  return std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
}

void Scene::validate(const AcquisitionParams& params) const {
  const double z_max = params.max_depth();
  for (double z : depth_.data())
    if (z >= z_max)
      throw std::invalid_argument("depth " + std::to_string(z) + " m exceeds z_max " +
                                  std::to_string(z_max) + " m");
}

double rate_function(double alpha, double t_star, double t, const AcquisitionParams& params) {
  const double period = params.repetition_period;
  if (!(t >= 0.0 && t < period)) throw std::domain_error("t outside [0, T_r)");
  if (!(t_star >= 0.0 && t_star < period)) throw std::domain_error("t_star outside [0, T_r)");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("alpha outside [0, 1]");

  const double sigma = params.pulse_sigma();
  const double x = (t - t_star) / sigma;
  const double pulse =
      params.signal_flux * std::exp(-0.5 * x * x) / (sigma * std::sqrt(2.0 * std::numbers::pi));
  return params.efficiency * alpha * pulse + params.background / period;
}

PixelFlux pixel_flux(double alpha, const AcquisitionParams& params) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("alpha outside [0, 1]");
  PixelFlux flux;
  flux.signal_count = params.efficiency * alpha * params.signal_flux;
  flux.background_count = params.background;
  flux.total_count = flux.signal_count + flux.background_count;
  return flux;
}

double scene_sbr(const Scene& scene, const AcquisitionParams& params) {
  if (params.background == 0.0) return kInfiniteSbr;
  return params.efficiency * scene.mean_reflectivity() * params.signal_flux / params.background;
}

Scene toy_scene(std::size_t n) {
  if (n < 2) throw std::invalid_argument("toy scene needs n >= 2");
  Grid<double> alpha(n, n), depth(n, n);
  const double nd = static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      alpha(r, c) = static_cast<double>(c + 1) / nd;
      depth(r, c) = 0.5 + static_cast<double>(r + 1) * (14.0 / nd);
    }
  }
  return Scene(std::move(alpha), std::move(depth));
}

namespace {

struct Block {
  // Fractions of the side length: [row0, row1) x [col0, col1).
  double row0, row1, col0, col1;
  double depth;
  double reflectivity;
};

// Painted back to front so nearer blocks occlude farther ones.
constexpr std::array<Block, 6> kBlocks{{
    {0.00, 1.00, 0.00, 1.00, 11.0, 0.35},  // back wall
    {0.15, 0.45, 0.62, 0.92, 8.5, 0.25},
    {0.35, 0.90, 0.30, 0.70, 6.5, 0.55},
    {0.10, 0.55, 0.08, 0.45, 4.0, 0.75},
    {0.70, 0.85, 0.75, 0.90, 3.2, 0.60},
    {0.60, 0.95, 0.05, 0.25, 2.5, 0.90},
}};

}  // namespace

Scene blocks_scene(std::size_t n) {
  if (n < 8) throw std::invalid_argument("blocks scene needs n >= 8");
  Grid<double> alpha(n, n), depth(n, n);
  const double nd = static_cast<double>(n);
  auto edge = [nd](double f) { return static_cast<std::size_t>(std::lround(f * nd)); };
  for (const Block& b : kBlocks) {
    for (std::size_t r = edge(b.row0); r < edge(b.row1); ++r) {
      for (std::size_t c = edge(b.col0); c < edge(b.col1); ++c) {
        alpha(r, c) = b.reflectivity;
        depth(r, c) = b.depth;
      }
    }
  }
  return Scene(std::move(alpha), std::move(depth));
}

}  // namespace splidar
