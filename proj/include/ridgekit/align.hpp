#pragma once
#include "ridgekit/corepoint.hpp"
#include "ridgekit/image.hpp"

namespace ridgekit {

struct AlignConfig {
  int crop_width = 800;
  int crop_height = 700;
  bool mirror = true;             // camera-sourced images are flipped left-right
  std::uint8_t fill = 255;        // enhanced ridges are dark on light
  double target_ridge_period = 10.0;
};

/// Left-right flip: column x maps to width-1-x. Involution.
GrayImage mirror_horizontal(const GrayImage& img);

/// Fixed-size crop with the core at the exact center pixel (floor(w/2), floor(h/2));
/// out-of-bounds regions take cfg.fill.
GrayImage crop_about_core(const GrayImage& img, const CorePoint& core, const AlignConfig& cfg);

/// Dominant ridge period of the central region, from the autocorrelation of the
/// intensity profile projected across the dominant orientation. Returns 0 when
/// no periodic structure is found.
double estimate_ridge_period(const GrayImage& img);

/// Bilinear resample by target/estimated. A degenerate estimate (< 3 px or
/// > 50 px) skips scaling with a warning on stderr.
GrayImage prescale_to_ridge_period(const GrayImage& img, double estimated_period,
                                   double target_period);

} // namespace ridgekit
