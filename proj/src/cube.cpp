#include "splidar/cube.hpp"

#include <cmath>
#include <stdexcept>

namespace splidar {

PixelLists PixelLists::from_lists(std::size_t height, std::size_t width,
                                  const std::vector<std::vector<double>>& lists) {
  if (lists.size() != height * width) throw std::invalid_argument("list count != pixel count");
  PixelLists out(height, width);
  std::size_t total = 0;
  for (const auto& l : lists) total += l.size();
  out.values_.reserve(total);
  for (std::size_t k = 0; k < lists.size(); ++k) {
    out.values_.insert(out.values_.end(), lists[k].begin(), lists[k].end());
    out.offsets_[k + 1] = out.values_.size();
  }
  return out;
}

std::optional<double> CensoredCube::estimate(std::size_t row, std::size_t col) const {
  const double e = estimates.at(row * width() + col);
  if (std::isnan(e)) return std::nullopt;
  return e;
}

std::size_t CensoredCube::nonempty_pixels() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < signal_sets.pixel_count(); ++k)
    if (!signal_sets.at(k).empty()) ++n;
  return n;
}

}  // namespace splidar
