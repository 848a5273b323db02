#include "ridgekit/orientation.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ridgekit {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_half_turn(double theta) {
  while (theta < 0.0) theta += kPi;
  while (theta >= kPi) theta -= kPi;
  return theta;
}

void sobel_at(const GrayImage& img, int x, int y, double& gx, double& gy) {
  const double p00 = img.at_clamped(x - 1, y - 1), p10 = img.at_clamped(x, y - 1),
               p20 = img.at_clamped(x + 1, y - 1);
  const double p01 = img.at_clamped(x - 1, y), p21 = img.at_clamped(x + 1, y);
  const double p02 = img.at_clamped(x - 1, y + 1), p12 = img.at_clamped(x, y + 1),
               p22 = img.at_clamped(x + 1, y + 1);
  gx = (p20 + 2.0 * p21 + p22) - (p00 + 2.0 * p01 + p02);
  gy = (p02 + 2.0 * p12 + p22) - (p00 + 2.0 * p10 + p20);
}

} // namespace

double orientation_distance(double a, double b) {
  double d = std::fabs(a - b);
  while (d > kPi) d -= kPi;
  return std::min(d, kPi - d);
}

OrientationField estimate_orientation(const GrayImage& img, int block_size) {
  if (block_size < 4)
    throw ArgumentError("estimate_orientation: block size must be >= 4, got " +
                        std::to_string(block_size));
  if (img.width < block_size || img.height < block_size)
    throw ArgumentError("estimate_orientation: image " + std::to_string(img.width) + "x" +
                        std::to_string(img.height) + " smaller than one " +
                        std::to_string(block_size) + "px block");

  OrientationField f;
  f.block_size = block_size;
  f.cols = (img.width + block_size - 1) / block_size;
  f.rows = (img.height + block_size - 1) / block_size;
  const std::size_t n = static_cast<std::size_t>(f.cols) * f.rows;
  f.theta_raw.assign(n, 0.0);
  f.theta_smooth.assign(n, 0.0);
  f.coherence.assign(n, 0.0);
  f.mask.assign(n, 1);

  for (int br = 0; br < f.rows; ++br) {
    const int y0 = br * block_size;
    const int y1 = std::min(y0 + block_size, img.height);
    for (int bc = 0; bc < f.cols; ++bc) {
      const int x0 = bc * block_size;
      const int x1 = std::min(x0 + block_size, img.width);

      double sum_cross = 0.0, sum_diff = 0.0, sum_energy = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          double gx, gy;
          sobel_at(img, x, y, gx, gy);
          sum_cross += 2.0 * gx * gy;
          sum_diff += gx * gx - gy * gy;
          sum_energy += gx * gx + gy * gy;
        }
      }

      const std::size_t idx = f.index(bc, br);
      f.theta_raw[idx] = wrap_half_turn(0.5 * std::atan2(sum_cross, sum_diff) + kPi / 2.0);
      if (sum_energy < 1e-9) {
        f.coherence[idx] = 0.0;
        f.mask[idx] = 0;
      } else {
        f.coherence[idx] = std::sqrt(sum_diff * sum_diff + sum_cross * sum_cross) / sum_energy;
      }
      f.theta_smooth[idx] = f.theta_raw[idx];
    }
  }
  return f;
}

OrientationField smooth_orientation(const OrientationField& field, int passes, int neighborhood) {
  if (neighborhood < 1 || neighborhood % 2 == 0)
    throw ArgumentError("smooth_orientation: neighborhood side must be odd");
  if (passes < 0) throw ArgumentError("smooth_orientation: passes must be >= 0");

  OrientationField out = field;
  const int reach = neighborhood / 2;
  std::vector<double> cur = field.theta_raw;
  std::vector<double> next(cur.size());

  for (int pass = 0; pass < passes; ++pass) {
    double max_change = 0.0;
    for (int br = 0; br < field.rows; ++br) {
      for (int bc = 0; bc < field.cols; ++bc) {
        const std::size_t idx = field.index(bc, br);
        if (!field.mask[idx]) {
          next[idx] = cur[idx];
          continue;
        }
        double ssum = 0.0, csum = 0.0;
        for (int dr = -reach; dr <= reach; ++dr) {
          const int r = br + dr;
          if (r < 0 || r >= field.rows) continue;
          for (int dc = -reach; dc <= reach; ++dc) {
            const int c = bc + dc;
            if (c < 0 || c >= field.cols) continue;
            const std::size_t nidx = field.index(c, r);
            if (!field.mask[nidx]) continue;
            ssum += std::sin(2.0 * cur[nidx]);
            csum += std::cos(2.0 * cur[nidx]);
          }
        }
        if (std::fabs(ssum) < 1e-12 && std::fabs(csum) < 1e-12) {
          // degenerate antipodal neighborhood
          next[idx] = cur[idx];
        } else {
          double theta = 0.5 * std::atan2(ssum, csum);
          while (theta < 0.0) theta += kPi;
          while (theta >= kPi) theta -= kPi;
          next[idx] = theta;
        }
        max_change = std::max(max_change, orientation_distance(next[idx], cur[idx]));
      }
    }
    cur.swap(next);
    if (max_change < 0.01) break;
  }

  out.theta_smooth = std::move(cur);
  return out;
}

std::vector<std::uint8_t> segment_foreground(const GrayImage& img, int block_size,
                                             double std_threshold) {
  if (block_size < 1) throw ArgumentError("segment_foreground: block size must be >= 1");
  const int cols = (img.width + block_size - 1) / block_size;
  const int rows = (img.height + block_size - 1) / block_size;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(cols) * rows, 0);

  for (int br = 0; br < rows; ++br) {
    const int y0 = br * block_size;
    const int y1 = std::min(y0 + block_size, img.height);
    for (int bc = 0; bc < cols; ++bc) {
      const int x0 = bc * block_size;
      const int x1 = std::min(x0 + block_size, img.width);
      double sum = 0.0, sum2 = 0.0;
      const double count = static_cast<double>(x1 - x0) * (y1 - y0);
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
          const double v = img.at(x, y);
          sum += v;
          sum2 += v * v;
        }
      const double mean = sum / count;
      const double var = std::max(0.0, sum2 / count - mean * mean);
      mask[static_cast<std::size_t>(br) * cols + bc] = (std::sqrt(var) >= std_threshold) ? 1 : 0;
    }
  }

  // One majority-vote pass over a snapshot.
  std::vector<std::uint8_t> voted = mask;
  for (int br = 0; br < rows; ++br) {
    for (int bc = 0; bc < cols; ++bc) {
      const std::uint8_t self = mask[static_cast<std::size_t>(br) * cols + bc];
      int disagree = 0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int r = br + dr, c = bc + dc;
          if (r < 0 || r >= rows || c < 0 || c >= cols) continue;
          if (mask[static_cast<std::size_t>(r) * cols + c] != self) ++disagree;
        }
      }
      if (disagree >= 5) voted[static_cast<std::size_t>(br) * cols + bc] = self ? 0 : 1;
    }
  }
  return voted;
}

} // namespace ridgekit
