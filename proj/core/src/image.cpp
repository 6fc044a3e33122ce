#include "uiknow/image.hpp"

#include <png.h>
#include <sodium.h>

#include <algorithm>
#include <fstream>
#include <iterator>

#include "uiknow/error.hpp"

namespace uiknow {

Image::Image(int width, int height, Rgb fill)
    : width_(width), height_(height),
      pixels_(static_cast<std::size_t>(std::max(width, 0)) *
              static_cast<std::size_t>(std::max(height, 0)) * 3) {
  if (width < 0 || height < 0) {
    throw Error(ErrorKind::DegenerateBox, "negative image dimensions");
  }
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

void Image::fill(Rect rect, Rgb c) {
  const int x0 = std::max(rect.left, 0);
  const int y0 = std::max(rect.top, 0);
  const int x1 = std::min(rect.right, width_);
  const int y1 = std::min(rect.bottom, height_);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      set(x, y, c);
    }
  }
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.empty()) {
    throw Error(ErrorKind::EmptyImage, "cannot encode an empty image");
  }
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(image.width());
  desc.height = static_cast<png_uint_32>(image.height());
  desc.format = PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&desc, nullptr, &size, 0, image.bytes().data(), 0, nullptr)) {
    throw Error(ErrorKind::Io, std::string("png sizing failed: ") + desc.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&desc, out.data(), &size, 0, image.bytes().data(), 0, nullptr)) {
    throw Error(ErrorKind::Io, std::string("png encode failed: ") + desc.message);
  }
  out.resize(size);
  return out;
}

Image decode_png(std::span<const std::uint8_t> data) {
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&desc, data.data(), data.size())) {
    throw Error(ErrorKind::ImageDecode, std::string("not a PNG: ") + desc.message);
  }
  desc.format = PNG_FORMAT_RGB;
  Image image(static_cast<int>(desc.width), static_cast<int>(desc.height));
  if (!png_image_finish_read(&desc, nullptr, image.bytes().data(), 0, nullptr)) {
    png_image_free(&desc);
    throw Error(ErrorKind::ImageDecode, std::string("png decode failed: ") + desc.message);
  }
  return image;
}

Image read_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

void write_png(const Image& image, const std::filesystem::path& path) {
  const auto bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::string base64_encode(std::span<const std::uint8_t> data) {
  constexpr int variant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_encoded_len(data.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), data.data(), data.size(), variant);
  out.resize(out.size() - 1);  // drop the terminator sodium counts in the length
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::vector<std::uint8_t> out(text.size() / 4 * 3 + 3);
  std::size_t len = 0;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), " \r\n", &len, nullptr,
                        sodium_base64_VARIANT_ORIGINAL) != 0) {
    throw Error(ErrorKind::ImageDecode, "invalid base64 payload");
  }
  out.resize(len);
  return out;
}

Image crop_element(const Image& screenshot, Rect bbox) {
  if (!bbox.has_positive_area()) {
    throw Error(ErrorKind::DegenerateBox, "bbox has no area");
  }
  if (bbox.left < 0 || bbox.top < 0 || bbox.right > screenshot.width() ||
      bbox.bottom > screenshot.height()) {
    throw Error(ErrorKind::OutOfBounds, "bbox exceeds image bounds");
  }
  Image out(bbox.width(), bbox.height());
  const auto src = screenshot.bytes();
  auto dst = out.bytes();
  const auto row_bytes = static_cast<std::size_t>(bbox.width()) * 3;
  for (int y = 0; y < bbox.height(); ++y) {
    const auto from = (static_cast<std::size_t>(bbox.top + y) * screenshot.width() + bbox.left) * 3;
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(from), row_bytes,
                dst.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(y) * row_bytes));
  }
  return out;
}

Image upscale_nearest(const Image& image, int factor) {
  Image out(image.width() * factor, image.height() * factor);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out.set(x, y, image.at(x / factor, y / factor));
    }
  }
  return out;
}

}  // namespace uiknow
