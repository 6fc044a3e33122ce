#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "uiknow/domain.hpp"
#include "uiknow/image.hpp"

namespace uiknow {

/// 64-bit difference hash over a 9x8 grayscale downsample.
struct PerceptualHash {
  std::uint64_t bits = 0;
  friend bool operator==(const PerceptualHash&, const PerceptualHash&) = default;
};

inline int hamming_distance(PerceptualHash a, PerceptualHash b) noexcept {
  return std::popcount(a.bits ^ b.bits);
}

/// Exact box-filter downsample to a cols x rows grid.
///
/// Source pixel x covers [x*cols, (x+1)*cols) and output column i covers
/// [i*W, (i+1)*W) in the same integer units, so every cell is a weighted sum
/// with integer weights and all cells share the same total weight W*H. An
/// image and its integer-factor nearest upscale produce sums that differ by a
/// constant factor, which keeps derived hashes bit-identical.
class AreaGrid {
 public:
  AreaGrid(const Image& image, int cols, int rows);

  int cols() const noexcept { return cols_; }
  int rows() const noexcept { return rows_; }

  /// Weighted luma sum (0.299/0.587/0.114 scaled by 1000).
  std::int64_t luma_sum(int col, int row) const noexcept;
  /// Cell mean colour, truncated to integers.
  Rgb mean(int col, int row) const noexcept;

 private:
  struct Sums {
    std::int64_t r = 0, g = 0, b = 0;
  };
  int cols_;
  int rows_;
  std::int64_t cell_weight_;
  std::vector<Sums> cells_;
};

/// Throws EmptyImage.
PerceptualHash phash(const Image& image);

/// True iff the screenshots' perceptual hashes are within `threshold` bits (inclusive).
bool observations_equal(const Observation& a, const Observation& b, int threshold);

inline constexpr int kDefaultPhashThreshold = 5;

/// Copy of the screenshot with each visible element boxed in red and its
/// index drawn white-on-red at the box's top-left corner.
Image annotate_screenshot(const Observation& observation);

}  // namespace uiknow
