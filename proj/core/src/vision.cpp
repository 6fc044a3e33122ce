#include "uiknow/vision.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "uiknow/error.hpp"

namespace uiknow {

namespace {

// Overlap length of [a0, a1) and [b0, b1).
std::int64_t overlap(std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) {
  return std::max<std::int64_t>(0, std::min(a1, b1) - std::max(a0, b0));
}

// 3x5 bitmap digits, one row per entry, MSB = leftmost column.
constexpr std::array<std::array<std::uint8_t, 5>, 10> kDigits{{
    {0b111, 0b101, 0b101, 0b101, 0b111},
    {0b010, 0b110, 0b010, 0b010, 0b111},
    {0b111, 0b001, 0b111, 0b100, 0b111},
    {0b111, 0b001, 0b111, 0b001, 0b111},
    {0b101, 0b101, 0b111, 0b001, 0b001},
    {0b111, 0b100, 0b111, 0b001, 0b111},
    {0b111, 0b100, 0b111, 0b101, 0b111},
    {0b111, 0b001, 0b010, 0b010, 0b010},
    {0b111, 0b101, 0b111, 0b101, 0b111},
    {0b111, 0b101, 0b111, 0b001, 0b111},
}};

constexpr Rgb kMarkRed{230, 30, 30};
constexpr Rgb kLabelWhite{255, 255, 255};
constexpr int kBorder = 2;
constexpr int kGlyphScale = 2;
constexpr int kPad = 2;

void draw_label(Image& image, int x, int y, int number) {
  const auto digits = std::to_string(std::max(number, 0));
  const int glyph_w = 3 * kGlyphScale;
  const int glyph_h = 5 * kGlyphScale;
  const int width = kPad * 2 + static_cast<int>(digits.size()) * (glyph_w + kGlyphScale) - kGlyphScale;
  const int height = kPad * 2 + glyph_h;
  image.fill({x, y, x + width, y + height}, kMarkRed);

  int pen = x + kPad;
  for (char ch : digits) {
    const auto& glyph = kDigits[static_cast<std::size_t>(ch - '0')];
    for (int row = 0; row < 5; ++row) {
      for (int col = 0; col < 3; ++col) {
        if ((glyph[static_cast<std::size_t>(row)] >> (2 - col)) & 1U) {
          const int px = pen + col * kGlyphScale;
          const int py = y + kPad + row * kGlyphScale;
          image.fill({px, py, px + kGlyphScale, py + kGlyphScale}, kLabelWhite);
        }
      }
    }
    pen += glyph_w + kGlyphScale;
  }
}

}  // namespace

AreaGrid::AreaGrid(const Image& image, int cols, int rows)
    : cols_(cols), rows_(rows),
      cell_weight_(static_cast<std::int64_t>(image.width()) * image.height()),
      cells_(static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows)) {
  if (image.empty()) {
    throw Error(ErrorKind::EmptyImage, "cannot downsample an empty image");
  }
  const std::int64_t w = image.width();
  const std::int64_t h = image.height();

  // Horizontal pass: per source row, weighted sums for every output column.
  std::vector<Sums> row_cells(static_cast<std::size_t>(h) * static_cast<std::size_t>(cols));
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      const Rgb px = image.at(static_cast<int>(x), static_cast<int>(y));
      const std::int64_t first = (x * cols) / w;
      const std::int64_t last = std::min<std::int64_t>(cols - 1, ((x + 1) * cols - 1) / w);
      for (std::int64_t i = first; i <= last; ++i) {
        const auto weight = overlap(x * cols, (x + 1) * cols, i * w, (i + 1) * w);
        auto& s = row_cells[static_cast<std::size_t>(y * cols + i)];
        s.r += weight * px.r;
        s.g += weight * px.g;
        s.b += weight * px.b;
      }
    }
  }
  // Vertical pass.
  for (std::int64_t y = 0; y < h; ++y) {
    const std::int64_t first = (y * rows) / h;
    const std::int64_t last = std::min<std::int64_t>(rows - 1, ((y + 1) * rows - 1) / h);
    for (std::int64_t j = first; j <= last; ++j) {
      const auto weight = overlap(y * rows, (y + 1) * rows, j * h, (j + 1) * h);
      for (std::int64_t i = 0; i < cols; ++i) {
        const auto& src = row_cells[static_cast<std::size_t>(y * cols + i)];
        auto& dst = cells_[static_cast<std::size_t>(j * cols + i)];
        dst.r += weight * src.r;
        dst.g += weight * src.g;
        dst.b += weight * src.b;
      }
    }
  }
}

std::int64_t AreaGrid::luma_sum(int col, int row) const noexcept {
  const auto& s = cells_[static_cast<std::size_t>(row * cols_ + col)];
  return 299 * s.r + 587 * s.g + 114 * s.b;
}

Rgb AreaGrid::mean(int col, int row) const noexcept {
  const auto& s = cells_[static_cast<std::size_t>(row * cols_ + col)];
  return {static_cast<std::uint8_t>(s.r / cell_weight_), static_cast<std::uint8_t>(s.g / cell_weight_),
          static_cast<std::uint8_t>(s.b / cell_weight_)};
}

PerceptualHash phash(const Image& image) {
  if (image.empty()) {
    throw Error(ErrorKind::EmptyImage, "cannot hash an empty image");
  }
  const AreaGrid grid(image, 9, 8);
  std::uint64_t bits = 0;
  for (int row = 0; row < 8; ++row) {
    for (int col = 0; col < 8; ++col) {
      bits <<= 1;
      if (grid.luma_sum(col, row) > grid.luma_sum(col + 1, row)) {
        bits |= 1U;
      }
    }
  }
  return {bits};
}

bool observations_equal(const Observation& a, const Observation& b, int threshold) {
  if (threshold < 0) {
    throw Error(ErrorKind::PreconditionViolation, "phash threshold must be non-negative");
  }
  return hamming_distance(phash(a.screenshot), phash(b.screenshot)) <= threshold;
}

Image annotate_screenshot(const Observation& observation) {
  Image out = observation.screenshot;
  for (const auto& element : observation.elements) {
    if (!element.visible) continue;
    const Rect& b = element.bbox;
    out.fill({b.left, b.top, b.right, b.top + kBorder}, kMarkRed);
    out.fill({b.left, b.bottom - kBorder, b.right, b.bottom}, kMarkRed);
    out.fill({b.left, b.top, b.left + kBorder, b.bottom}, kMarkRed);
    out.fill({b.right - kBorder, b.top, b.right, b.bottom}, kMarkRed);
    draw_label(out, b.left, b.top, element.index);
  }
  return out;
}

}  // namespace uiknow
