#pragma once
#include <cstdint>
#include <vector>

#include "ridgekit/image.hpp"

namespace ridgekit {

/// Block grid of ridge orientations (angles identified modulo pi), with a
/// per-block coherence and foreground flag. cols = ceil(W/r), rows = ceil(H/r);
/// edge blocks may be partial.
struct OrientationField {
  int block_size = 16;
  int cols = 0, rows = 0;
  std::vector<double> theta_raw;    // [0, pi)
  std::vector<double> theta_smooth; // [0, pi)
  std::vector<double> coherence;    // [0, 1]
  std::vector<std::uint8_t> mask;   // 1 = foreground

  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * cols + col;
  }
  bool foreground(int col, int row) const { return mask[index(col, row)] != 0; }
  int block_center_x(int col) const { return col * block_size + block_size / 2; }
  int block_center_y(int row) const { return row * block_size + block_size / 2; }
};

/// Block-wise orientation from Sobel gradients:
/// theta_o = 0.5 * atan2(sum 2GxGy, sum (Gx^2 - Gy^2)) + pi/2, wrapped to [0, pi).
/// Blocks with negligible gradient energy get coherence 0 and a cleared mask bit.
OrientationField estimate_orientation(const GrayImage& img, int block_size);

/// Per-pass circular-mean smoothing over an n x n block neighborhood (foreground
/// blocks only), iterated `passes` times with an early stop once the largest
/// per-block change drops below 0.01 rad.
OrientationField smooth_orientation(const OrientationField& field, int passes = 2,
                                    int neighborhood = 3);

/// Per-block foreground flags: stddev >= threshold, then one majority-vote pass
/// (a block flips when at least 5 of its existing 8 neighbors disagree).
std::vector<std::uint8_t> segment_foreground(const GrayImage& img, int block_size,
                                             double std_threshold = 10.0);

/// Difference of two orientations in doubled-angle space, in [0, pi/2].
double orientation_distance(double a, double b);

} // namespace ridgekit
