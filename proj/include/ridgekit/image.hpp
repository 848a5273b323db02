#pragma once
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ridgekit/error.hpp"

namespace ridgekit {

/// 8-bit single-channel raster, row-major. The currency of every pipeline stage.
struct GrayImage {
  int width = 0, height = 0;
  std::vector<std::uint8_t> data; // size width*height

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

  // Replicated-border read: coordinates clamp to the valid range.
  std::uint8_t at_clamped(int x, int y) const {
    if (x < 0) x = 0;
    if (x >= width) x = width - 1;
    if (y < 0) y = 0;
    if (y >= height) y = height - 1;
    return at(x, y);
  }

  bool same_size(const GrayImage& o) const { return width == o.width && height == o.height; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

/// Row-major interleaved RGB, 8-bit per channel.
struct RgbImage {
  int width = 0, height = 0;
  std::vector<std::uint8_t> data; // size 3*width*height

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(3) * w * h, 0) {}

  std::uint8_t* px(int x, int y) { return &data[3 * (static_cast<std::size_t>(y) * width + x)]; }
  const std::uint8_t* px(int x, int y) const {
    return &data[3 * (static_cast<std::size_t>(y) * width + x)];
  }
};

/// Unclamped real-valued raster for filter responses.
struct RealImage {
  int width = 0, height = 0;
  std::vector<double> data;

  RealImage() = default;
  RealImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.0) {}

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool same_size(const RealImage& o) const { return width == o.width && height == o.height; }
};

/// Rectangular region; may extend past image bounds (crop fills the excess).
struct Roi {
  int x0 = 0, y0 = 0;
  int width = 0, height = 0;
};

using LoadedImage = std::variant<GrayImage, RgbImage>;

/// Decodes PGM (P5), PPM (P6) or 8-bit PNG. Grayscale files yield GrayImage.
LoadedImage load_image(const std::string& path);

/// Writes binary PGM (P5), maxval 255. load_image(write_image(img)) is bit-exact.
void write_image(const GrayImage& img, const std::string& path);

/// Writes binary PPM (P6). Debug/plumbing helper.
void write_ppm(const RgbImage& img, const std::string& path);

/// Per-pixel luma: round(0.299 r + 0.587 g + 0.114 b), clamped to [0,255].
GrayImage to_grayscale(const RgbImage& img);

/// Exposure fusion of pre-aligned bracketed frames (>= 2, same dimensions).
/// Per-pixel well-exposedness weight w(v) = exp(-((v/255 - 0.5)^2) / (2*0.2^2));
/// output = round(sum w_i v_i / sum w_i), plain mean where sum w_i < 1e-9.
GrayImage hdr_merge(const std::vector<GrayImage>& frames);

/// Extracts a ROI; source pixels outside the image take `fill`.
GrayImage crop_roi(const GrayImage& img, const Roi& roi, std::uint8_t fill);

} // namespace ridgekit
