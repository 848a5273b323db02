#include "ridgekit/clahe.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace ridgekit {

Histogram histogram(const GrayImage& img) {
  Histogram h{};
  for (std::uint8_t v : img.data) ++h[v];
  return h;
}

IntensityLut equalize_tile(const Histogram& hist, double clip_limit, std::uint64_t tile_pixels) {
  if (tile_pixels < 1) throw ArgumentError("equalize_tile: empty tile");
  if (clip_limit < 1.0) throw ArgumentError("equalize_tile: clip_limit must be >= 1.0");

  const std::uint64_t ceiling =
      static_cast<std::uint64_t>(std::ceil(clip_limit * static_cast<double>(tile_pixels) / 256.0));

  std::uint64_t bins[256];
  std::uint64_t excess = 0;
  for (int v = 0; v < 256; ++v) {
    bins[v] = hist[v];
    if (bins[v] > ceiling) {
      excess += bins[v] - ceiling;
      bins[v] = ceiling;
    }
  }
  const std::uint64_t per_bin = excess / 256;
  const std::uint64_t remainder = excess % 256;
  for (int v = 0; v < 256; ++v) bins[v] += per_bin + (static_cast<std::uint64_t>(v) < remainder ? 1 : 0);

  IntensityLut lut{};
  std::uint64_t cdf = 0;
  for (int v = 0; v < 256; ++v) {
    cdf += bins[v];
    long mapped = std::lround(255.0 * static_cast<double>(cdf) / static_cast<double>(tile_pixels));
    if (mapped > 255) mapped = 255;
    lut[v] = static_cast<std::uint8_t>(mapped);
  }
  return lut;
}

GrayImage clahe(const GrayImage& img, const ClaheConfig& cfg) {
  const int cols = cfg.grid_cols, rows = cfg.grid_rows;
  if (cols < 1 || rows < 1) throw ArgumentError("clahe: grid must be at least 1x1");
  if (img.width < cols || img.height < rows)
    throw ArgumentError("clahe: image " + std::to_string(img.width) + "x" +
                        std::to_string(img.height) + " smaller than grid " + std::to_string(cols) +
                        "x" + std::to_string(rows) + "; use a smaller grid");

  const int tile_w = (img.width + cols - 1) / cols;
  const int tile_h = (img.height + rows - 1) / rows;

  std::vector<IntensityLut> luts(static_cast<std::size_t>(cols) * rows);
  std::vector<double> center_x(cols), center_y(rows);
  for (int tr = 0; tr < rows; ++tr) {
    const int y0 = tr * tile_h;
    const int y1 = std::min(y0 + tile_h, img.height);
    center_y[tr] = y0 + (y1 - y0 - 1) / 2.0;
    for (int tc = 0; tc < cols; ++tc) {
      const int x0 = tc * tile_w;
      const int x1 = std::min(x0 + tile_w, img.width);
      if (tr == 0) center_x[tc] = x0 + (x1 - x0 - 1) / 2.0;
      Histogram h{};
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) ++h[img.at(x, y)];
      const std::uint64_t pixels = static_cast<std::uint64_t>(x1 - x0) * (y1 - y0);
      luts[static_cast<std::size_t>(tr) * cols + tc] = equalize_tile(h, cfg.clip_limit, pixels);
    }
  }

  // Bracketing tile index + interpolation weight along one axis; clamps past the
  // outer tile centers.
  auto bracket = [](const std::vector<double>& centers, int coord, int& lo, int& hi, double& w) {
    const int n = static_cast<int>(centers.size());
    if (coord <= centers[0]) {
      lo = hi = 0;
      w = 0.0;
      return;
    }
    if (coord >= centers[n - 1]) {
      lo = hi = n - 1;
      w = 0.0;
      return;
    }
    lo = 0;
    while (lo + 1 < n && centers[lo + 1] <= coord) ++lo;
    hi = lo + 1;
    w = (coord - centers[lo]) / (centers[hi] - centers[lo]);
  };

  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    int ty0, ty1;
    double wy;
    bracket(center_y, y, ty0, ty1, wy);
    for (int x = 0; x < img.width; ++x) {
      int tx0, tx1;
      double wx;
      bracket(center_x, x, tx0, tx1, wx);
      const std::uint8_t v = img.at(x, y);
      const double a = luts[static_cast<std::size_t>(ty0) * cols + tx0][v];
      const double b = luts[static_cast<std::size_t>(ty0) * cols + tx1][v];
      const double c = luts[static_cast<std::size_t>(ty1) * cols + tx0][v];
      const double d = luts[static_cast<std::size_t>(ty1) * cols + tx1][v];
      const double blended = (1.0 - wy) * ((1.0 - wx) * a + wx * b) + wy * ((1.0 - wx) * c + wx * d);
      long q = std::lround(blended);
      if (q < 0) q = 0;
      if (q > 255) q = 255;
      out.at(x, y) = static_cast<std::uint8_t>(q);
    }
  }
  return out;
}

} // namespace ridgekit
