#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "regionplan/error.hpp"

namespace regionplan {

/// Row-major 2-D array. x is the column, y is the row, origin at the top-left.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height), cells_(checked_size(width, height), fill) {}
  Raster(int width, int height, std::vector<T> cells)
      : width_(width), height_(height), cells_(std::move(cells)) {
    if (cells_.size() != checked_size(width, height)) {
      throw Error(ErrorCode::kDimensionMismatch, "cell count does not match width*height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return cells_.size(); }
  bool empty() const noexcept { return cells_.empty(); }

  bool in_bounds(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  T& operator()(int x, int y) noexcept { return cells_[index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return cells_[index(x, y)]; }

  std::span<T> cells() & noexcept { return cells_; }
  std::span<const T> cells() const& noexcept { return cells_; }
  // A span into a temporary would dangle.
  void cells() && = delete;

  bool same_shape(int width, int height) const noexcept {
    return width_ == width && height_ == height;
  }
  template <typename U>
  bool same_shape(const Raster<U>& other) const noexcept {
    return same_shape(other.width(), other.height());
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static std::size_t checked_size(int width, int height) {
    if (width < 0 || height < 0) {
      throw Error(ErrorCode::kInvalidArgument, "negative raster dimension");
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> cells_;
};

/// Binary labels, 1 = in region.
using RegionMask = Raster<std::uint8_t>;

/// Per-pixel probability of lying in the promising region, each in [0,1].
using ProbabilityMap = Raster<double>;

/// Throws kInvalidArgument if any cell lies outside [0,1] or is NaN.
void validate_probabilities(const ProbabilityMap& pm);

ProbabilityMap to_probabilities(const RegionMask& mask);

}  // namespace regionplan
