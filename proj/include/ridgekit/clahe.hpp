#pragma once
#include <array>
#include <cstdint>

#include "ridgekit/image.hpp"

namespace ridgekit {

struct ClaheConfig {
  int grid_cols = 8;
  int grid_rows = 8;
  double clip_limit = 2.0; // relative multiplier of the uniform bin height, >= 1.0
  // bin count is fixed at 256
};

using Histogram = std::array<std::uint32_t, 256>;
using IntensityLut = std::array<std::uint8_t, 256>;

/// bin[v] = number of pixels with intensity v.
Histogram histogram(const GrayImage& img);

/// Clipped-histogram equalization for one tile.
/// Bins are clipped at ceil(clip_limit * tile_pixels / 256); the clipped excess is
/// redistributed uniformly (integer part to every bin, remainder one-per-bin from
/// bin 0); LUT[v] = round(255 * CDF(v) / tile_pixels).
IntensityLut equalize_tile(const Histogram& hist, double clip_limit, std::uint64_t tile_pixels);

/// Contrast-limited adaptive histogram equalization. Tiles are
/// ceil(W/cols) x ceil(H/rows); each output pixel bilinearly blends the LUTs of
/// the up-to-4 nearest tile centers (clamping outside the outer centers).
GrayImage clahe(const GrayImage& img, const ClaheConfig& cfg);

} // namespace ridgekit
