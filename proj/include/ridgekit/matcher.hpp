#pragma once
#include <vector>

#include "ridgekit/minutiae.hpp"

namespace ridgekit {

/// Intra-template pair feature: distance plus each minutia's angle relative to
/// the connecting segment. Invariant under rigid motion.
struct EdgeEntry {
  int i = 0, j = 0;    // minutia indices, i < j
  double dist = 0.0;   // <= d_max
  double beta1 = 0.0;  // angle of minutia i relative to segment i->j, (-pi, pi]
  double beta2 = 0.0;  // angle of minutia j relative to segment i->j, (-pi, pi]
};

struct MatcherConfig {
  double d_max = 150.0;          // px, edge table cutoff
  double tol_d = 8.0;            // px, pair-link distance tolerance
  double tol_a = 15.0 * 3.14159265358979323846 / 180.0; // rad, beta tolerance
  double rot_tol = 15.0 * 3.14159265358979323846 / 180.0; // rad, cluster rotation window
  double threshold = 0.4;        // decision on the normalized score
  std::size_t max_edges = 2000;  // per-template edge cap (shortest first)
  std::size_t max_links = 4000;  // candidate link cap (best first)
};

struct MatchResult {
  int score = 0;             // distinct minutia correspondences in the winning cluster
  double normalized = 0.0;   // score / min(n1, n2)
  bool decision = false;     // normalized >= threshold
};

/// One entry per unordered minutia pair within d_max, sorted by distance
/// ascending (ties by (i, j)).
std::vector<EdgeEntry> build_edge_table(const MinutiaTemplate& tpl, double d_max = 150.0);

/// Edge-table compatibility matching: candidate links pair edges whose
/// (dist, beta1, beta2) agree within tolerance; the cluster grows greedily
/// around the rotation estimate with the most support, keeping minutia
/// assignments injective. Symmetric in its arguments.
MatchResult match_templates(const MinutiaTemplate& a, const MinutiaTemplate& b,
                            const MatcherConfig& cfg = {});

} // namespace ridgekit
