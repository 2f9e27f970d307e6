#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "splidar/scene.hpp"

namespace splidar {

/// Variable-length per-pixel lists stored contiguously in row-major pixel order.
class PixelLists {
 public:
  PixelLists() = default;
  PixelLists(std::size_t height, std::size_t width)
      : height_(height), width_(width), offsets_(height * width + 1, 0) {}

  /// Concatenates per-pixel vectors given in row-major order.
  static PixelLists from_lists(std::size_t height, std::size_t width,
                               const std::vector<std::vector<double>>& lists);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t pixel_count() const { return height_ * width_; }
  std::size_t total() const { return values_.size(); }

  std::span<const double> at(std::size_t index) const {
    return {values_.data() + offsets_[index], offsets_[index + 1] - offsets_[index]};
  }
  std::span<const double> at(std::size_t row, std::size_t col) const {
    return at(row * width_ + col);
  }
  std::size_t count(std::size_t row, std::size_t col) const { return at(row, col).size(); }

  const std::vector<double>& values() const { return values_; }
  const std::vector<std::size_t>& offsets() const { return offsets_; }

  bool operator==(const PixelLists&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<double> values_;
};

/// Detection timestamps (seconds, in [0, T_r)) for every pixel of an acquisition.
struct TimestampCube {
  PixelLists timestamps;
  AcquisitionParams params;

  std::size_t height() const { return timestamps.height(); }
  std::size_t width() const { return timestamps.width(); }
  std::span<const double> pixel(std::size_t row, std::size_t col) const {
    return timestamps.at(row, col);
  }

  bool operator==(const TimestampCube& other) const {
    return timestamps == other.timestamps;
  }
};

/// Output of a signal-extraction filter: the timestamps presumed to be signal,
/// plus the per-pixel anchor the filter censored around (NaN when absent).
struct CensoredCube {
  PixelLists signal_sets;
  std::vector<double> estimates;

  std::size_t height() const { return signal_sets.height(); }
  std::size_t width() const { return signal_sets.width(); }
  std::span<const double> pixel(std::size_t row, std::size_t col) const {
    return signal_sets.at(row, col);
  }
  std::optional<double> estimate(std::size_t row, std::size_t col) const;
  std::size_t nonempty_pixels() const;
};

}  // namespace splidar
