#include "ridgekit/corepoint.hpp"

#include <cmath>
#include <numbers>

namespace ridgekit {

namespace {

constexpr double kPi = std::numbers::pi;

// Closed square path around a block, in increasing-angle order (consistent with
// atan2(dy, dx) in image coordinates).
constexpr int kRing[8][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};

double wrap_orientation_diff(double d) {
  while (d <= -kPi / 2.0) d += kPi;
  while (d > kPi / 2.0) d -= kPi;
  return d;
}

} // namespace

std::optional<double> poincare_index(const OrientationField& field, int col, int row) {
  if (col < 1 || row < 1 || col >= field.cols - 1 || row >= field.rows - 1) return std::nullopt;
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc)
      if (!field.foreground(col + dc, row + dr)) return std::nullopt;

  double total = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double a = field.theta_smooth[field.index(col + kRing[k][0], row + kRing[k][1])];
    const double b =
        field.theta_smooth[field.index(col + kRing[(k + 1) % 8][0], row + kRing[(k + 1) % 8][1])];
    total += wrap_orientation_diff(b - a);
  }

  const double turns = total / (2.0 * kPi);
  const double snapped = std::round(turns * 2.0) / 2.0;
  return (std::fabs(turns - snapped) <= 0.1) ? snapped : 0.0;
}

std::optional<CorePoint> detect_core(const OrientationField& field) {
  bool any_foreground = false;
  for (std::uint8_t m : field.mask) any_foreground |= (m != 0);
  if (!any_foreground) return std::nullopt;

  std::optional<CorePoint> best;
  for (int row = 1; row < field.rows - 1; ++row) {
    for (int col = 1; col < field.cols - 1; ++col) {
      const std::optional<double> idx = poincare_index(field, col, row);
      if (!idx || (*idx != 0.5 && *idx != 1.0)) continue;

      double coh = 0.0;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) coh += field.coherence[field.index(col + dc, row + dr)];
      coh /= 9.0;

      // Row-major scan: a strict comparison keeps the upper-left winner on ties.
      if (!best || coh > best->confidence) {
        CorePoint cp;
        cp.block_col = col;
        cp.block_row = row;
        cp.x = field.block_center_x(col);
        cp.y = field.block_center_y(row);
        cp.index_value = *idx;
        cp.confidence = coh;
        best = cp;
      }
    }
  }
  if (best) return best;

  // No singular point: fall back to the foreground centroid so alignment stays
  // possible (callers can tell by confidence 0).
  double sum_col = 0.0, sum_row = 0.0;
  int count = 0;
  for (int row = 0; row < field.rows; ++row)
    for (int col = 0; col < field.cols; ++col)
      if (field.foreground(col, row)) {
        sum_col += col;
        sum_row += row;
        ++count;
      }
  CorePoint cp;
  cp.block_col = static_cast<int>(std::lround(sum_col / count));
  cp.block_row = static_cast<int>(std::lround(sum_row / count));
  cp.x = field.block_center_x(cp.block_col);
  cp.y = field.block_center_y(cp.block_row);
  cp.index_value = 0.0;
  cp.confidence = 0.0;
  return cp;
}

} // namespace ridgekit
