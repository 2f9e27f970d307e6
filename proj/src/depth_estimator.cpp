#include "splidar/depth_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "splidar/parallel.hpp"

namespace splidar {

namespace {

// Weight of one photon in the data term, per square metre of depth error.
double photon_curvature(const AcquisitionParams& params) {
  const double dt_dz = 2.0 / kSpeedOfLight;
  const double sigma = params.pulse_sigma();
  return dt_dz * dt_dz / (2.0 * sigma * sigma);
}

double huber(double x, double delta) {
  const double a = std::abs(x);
  return a <= delta ? 0.5 * x * x / delta : a - 0.5 * delta;
}

double clamp_depth(double z, const AcquisitionParams& params) {
  return std::clamp(z, 0.0, std::nextafter(params.max_depth(), 0.0));
}

// Validity: the pixel or one of its 8 neighbours holds data.
Grid<std::uint8_t> validity_mask(const std::vector<double>& weight, std::size_t h,
                                 std::size_t w) {
  Grid<std::uint8_t> valid(h, w, 0);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t r0 = r == 0 ? 0 : r - 1, r1 = std::min(h - 1, r + 1);
      const std::size_t c0 = c == 0 ? 0 : c - 1, c1 = std::min(w - 1, c + 1);
      for (std::size_t rr = r0; rr <= r1 && !valid(r, c); ++rr)
        for (std::size_t cc = c0; cc <= c1; ++cc)
          if (weight[rr * w + cc] > 0.0) {
            valid(r, c) = 1;
            break;
          }
    }
  }
  return valid;
}

// Multi-source breadth-first fill of empty pixels from their nearest data pixel.
std::vector<double> nearest_fill(const PixelData& data, std::size_t h, std::size_t w) {
  std::vector<double> z(h * w, 0.0);
  std::vector<std::uint8_t> seen(h * w, 0);
  std::deque<std::size_t> queue;
  for (std::size_t k = 0; k < h * w; ++k) {
    if (data.weight[k] > 0.0) {
      z[k] = data.target[k];
      seen[k] = 1;
      queue.push_back(k);
    }
  }
  while (!queue.empty()) {
    const std::size_t k = queue.front();
    queue.pop_front();
    const std::size_t r = k / w, c = k % w;
    const std::size_t next[4] = {r > 0 ? k - w : k, r + 1 < h ? k + w : k, c > 0 ? k - 1 : k,
                                 c + 1 < w ? k + 1 : k};
    for (std::size_t n : next) {
      if (seen[n]) continue;
      seen[n] = 1;
      z[n] = z[k];
      queue.push_back(n);
    }
  }
  return z;
}

// Weighted graph Laplacian over right/down edges plus the diagonal data term:
//   y = 2 A x + L_omega x.
struct QuadraticModel {
  std::size_t h = 0, w = 0;
  std::vector<double> data_diag;  // 2 a_k
  std::vector<double> right;      // omega of edge (k, k+1); 0 on the last column
  std::vector<double> down;       // omega of edge (k, k+w); 0 on the last row

  void apply(const std::vector<double>& x, std::vector<double>& y, unsigned threads) const {
    parallel_for(h, threads, [&](std::size_t r) {
      for (std::size_t c = 0; c < w; ++c) {
        const std::size_t k = r * w + c;
        double acc = data_diag[k] * x[k];
        if (c + 1 < w) acc += right[k] * (x[k] - x[k + 1]);
        if (c > 0) acc += right[k - 1] * (x[k] - x[k - 1]);
        if (r + 1 < h) acc += down[k] * (x[k] - x[k + w]);
        if (r > 0) acc += down[k - w] * (x[k] - x[k - w]);
        y[k] = acc;
      }
    });
  }

  double diagonal(std::size_t k) const {
    const std::size_t r = k / w, c = k % w;
    double d = data_diag[k];
    if (c + 1 < w) d += right[k];
    if (c > 0) d += right[k - 1];
    if (r + 1 < h) d += down[k];
    if (r > 0) d += down[k - w];
    return d;
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Jacobi-preconditioned CG on M x = rhs from the given start. Every CG step
// lowers the quadratic 0.5 x'Mx - rhs'x, which is what keeps the outer loop
// monotone.
void solve_pcg(const QuadraticModel& model, const std::vector<double>& rhs, std::vector<double>& x,
               int max_steps, unsigned threads) {
  const std::size_t n = x.size();
  std::vector<double> inv_diag(n), r(n), zv(n), p(n), mp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double d = model.diagonal(k);
    inv_diag[k] = d > 0.0 ? 1.0 / d : 0.0;
  }
  model.apply(x, mp, threads);
  for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - mp[k];
  for (std::size_t k = 0; k < n; ++k) zv[k] = inv_diag[k] * r[k];
  p = zv;
  double rz = dot(r, zv);
  const double stop = rz * 1e-20;
  for (int step = 0; step < max_steps && rz > stop && rz > 0.0; ++step) {
    model.apply(p, mp, threads);
    const double curvature = dot(p, mp);
    if (!(curvature > 0.0)) break;
    const double alpha = rz / curvature;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * mp[k];
      zv[k] = inv_diag[k] * r[k];
    }
    const double rz_next = dot(r, zv);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < n; ++k) p[k] = zv[k] + beta * p[k];
  }
}

}  // namespace

void PmlConfig::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("PML beta must be positive");
  if (!(tolerance > 0.0)) throw std::invalid_argument("PML tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("PML max_iterations must be >= 1");
  if (!(huber_fraction > 0.0)) throw std::invalid_argument("Huber width must be positive");
}

std::optional<double> cml_depth(std::span<const double> signal_set,
                                const AcquisitionParams& params) {
  if (signal_set.empty()) return std::nullopt;
  double sum = 0.0;
  for (double t : signal_set) sum += t;
  return clamp_depth(depth_of_flight(sum / static_cast<double>(signal_set.size())), params);
}

PixelData pixel_data(const CensoredCube& censored, const AcquisitionParams& params) {
  const std::size_t n = censored.signal_sets.pixel_count();
  const double kappa = photon_curvature(params);
  PixelData data;
  data.weight.assign(n, 0.0);
  data.target.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto set = censored.signal_sets.at(k);
    if (set.empty()) continue;
    double sum = 0.0;
    for (double t : set) sum += depth_of_flight(t);
    const double mean = sum / static_cast<double>(set.size());
    double spread = 0.0;
    for (double t : set) spread += (depth_of_flight(t) - mean) * (depth_of_flight(t) - mean);
    data.weight[k] = static_cast<double>(set.size());
    data.target[k] = mean;
    data.constant += kappa * spread;
  }
  return data;
}

double pml_objective(std::span<const double> depth, std::size_t height, std::size_t width,
                     const PixelData& data, const AcquisitionParams& params,
                     const PmlConfig& config) {
  const double kappa = photon_curvature(params);
  const double delta = config.huber_fraction * params.max_depth();
  double fidelity = data.constant;
  double tv = 0.0;
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const std::size_t k = r * width + c;
      const double e = depth[k] - data.target[k];
      fidelity += kappa * data.weight[k] * e * e;
      if (c + 1 < width) tv += huber(depth[k] - depth[k + 1], delta);
      if (r + 1 < height) tv += huber(depth[k] - depth[k + width], delta);
    }
  }
  return fidelity + config.beta * tv;
}

PmlResult pml_depth(const CensoredCube& censored, const AcquisitionParams& params,
                    const PmlConfig& config) {
  config.validate();
  const std::size_t h = censored.height(), w = censored.width();
  const PixelData data = pixel_data(censored, params);
  if (std::none_of(data.weight.begin(), data.weight.end(), [](double x) { return x > 0.0; }))
    throw std::invalid_argument("PML needs at least one nonempty pixel");

  const double kappa = photon_curvature(params);
  const double delta = config.huber_fraction * params.max_depth();

  QuadraticModel model;
  model.h = h;
  model.w = w;
  model.data_diag.resize(h * w);
  model.right.assign(h * w, 0.0);
  model.down.assign(h * w, 0.0);
  std::vector<double> rhs(h * w);
  for (std::size_t k = 0; k < h * w; ++k) {
    model.data_diag[k] = 2.0 * kappa * data.weight[k];
    rhs[k] = model.data_diag[k] * data.target[k];
  }

  PmlResult result;
  std::vector<double> z = nearest_fill(data, h, w);
  double objective = pml_objective(z, h, w, data, params, config);
  result.objective_history.push_back(objective);

  std::vector<double> candidate;
  for (int it = 0; it < config.max_iterations; ++it) {
    // Half-quadratic majorizer of the Huber terms at the current iterate.
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        const std::size_t k = r * w + c;
        if (c + 1 < w) model.right[k] = config.beta / std::max(std::abs(z[k] - z[k + 1]), delta);
        if (r + 1 < h) model.down[k] = config.beta / std::max(std::abs(z[k] - z[k + w]), delta);
      }
    }
    candidate = z;
    solve_pcg(model, rhs, candidate, config.max_inner_iterations, config.threads);
    const double next = pml_objective(candidate, h, w, data, params, config);
    ++result.iterations;
    if (!(next <= objective)) {
      // Round-off floor: the majorizer can no longer certify a decrease.
      result.converged = true;
      break;
    }
    const double change = (objective - next) / std::max(std::abs(next), 1e-300);
    z.swap(candidate);
    objective = next;
    result.objective_history.push_back(objective);
    if (change < config.tolerance) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged)
    std::cerr << "warning: PML stopped at max_iterations=" << config.max_iterations
              << " before reaching tolerance\n";

  result.image.depth = Grid<double>(h, w);
  for (std::size_t k = 0; k < h * w; ++k) result.image.depth.data()[k] = clamp_depth(z[k], params);
  result.image.valid = validity_mask(data.weight, h, w);
  return result;
}

DepthImage cml_image(const CensoredCube& censored, const AcquisitionParams& params) {
  const std::size_t h = censored.height(), w = censored.width();
  DepthImage image{Grid<double>(h, w, 0.0), Grid<std::uint8_t>(h, w, 0)};
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c)
      if (auto z = cml_depth(censored.pixel(r, c), params)) {
        image.depth(r, c) = *z;
        image.valid(r, c) = 1;
      }
  return image;
}

}  // namespace splidar
