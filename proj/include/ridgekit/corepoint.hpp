#pragma once
#include <optional>

#include "ridgekit/orientation.hpp"

namespace ridgekit {

struct CorePoint {
  int x = 0, y = 0;             // block-center pixel coordinates
  int block_col = 0, block_row = 0;
  double index_value = 0.0;     // Poincare index in turns (+0.5 core, -0.5 delta, +1.0 whorl)
  double confidence = 0.0;      // mean neighborhood coherence
};

/// Poincare index in turns at one block: sum of theta_smooth differences along
/// the closed 8-block square path, each wrapped to (-pi/2, pi/2], divided by
/// 2*pi and snapped to the nearest half-turn when within 0.1 (0 otherwise).
/// Blocks touching the grid border or a background block yield nullopt.
std::optional<double> poincare_index(const OrientationField& field, int col, int row);

/// Highest-confidence singular block with index +0.5 or +1.0; ties break toward
/// the upper-left. Without a candidate, falls back to the foreground centroid
/// (index 0, confidence 0). Empty foreground yields nullopt.
std::optional<CorePoint> detect_core(const OrientationField& field);

} // namespace ridgekit
