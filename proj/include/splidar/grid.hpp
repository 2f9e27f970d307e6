#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace splidar {

/// Row-major 2-D array indexed as (row, col). Rows run along i, columns along j.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t height, std::size_t width, T fill = T{})
      : height_(height), width_(width), data_(height * width, fill) {}

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }
  const T& operator()(std::size_t row, std::size_t col) const {
    return data_[row * width_ + col];
  }

  T& at(std::size_t row, std::size_t col) {
    check(row, col);
    return (*this)(row, col);
  }
  const T& at(std::size_t row, std::size_t col) const {
    check(row, col);
    return (*this)(row, col);
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  void check(std::size_t row, std::size_t col) const {
    if (row >= height_ || col >= width_) throw std::out_of_range("grid index out of range");
  }

  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<T> data_;
};

}  // namespace splidar
