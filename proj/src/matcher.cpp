#include "ridgekit/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ridgekit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTau = 2.0 * kPi;

double wrap_pi(double a) {
  while (a <= -kPi) a += kTau;
  while (a > kPi) a -= kTau;
  return a;
}

double circ_dist(double a, double b) { return std::fabs(wrap_pi(a - b)); }

struct Link {
  int ai, aj;  // minutia indices in A
  int bi, bj;  // matched minutia indices in B
  double rot;  // implied global rotation A -> B
  double q;    // feature disagreement, lower is better
};

} // namespace

std::vector<EdgeEntry> build_edge_table(const MinutiaTemplate& tpl, double d_max) {
  std::vector<EdgeEntry> table;
  const auto& ms = tpl.minutiae;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      const double dx = ms[j].x - ms[i].x, dy = ms[j].y - ms[i].y;
      const double d = std::hypot(dx, dy);
      if (d > d_max) continue;
      const double seg = std::atan2(dy, dx);
      EdgeEntry e;
      e.i = static_cast<int>(i);
      e.j = static_cast<int>(j);
      e.dist = d;
      e.beta1 = wrap_pi(ms[i].angle - seg);
      e.beta2 = wrap_pi(ms[j].angle - seg);
      table.push_back(e);
    }
  }
  std::sort(table.begin(), table.end(), [](const EdgeEntry& a, const EdgeEntry& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  return table;
}

namespace {

MatchResult match_ordered(const MinutiaTemplate& A, const MinutiaTemplate& B,
                          const MatcherConfig& cfg) {
  MatchResult res;
  const std::size_t na = A.minutiae.size(), nb = B.minutiae.size();
  if (na == 0 || nb == 0) return res;

  std::vector<EdgeEntry> ta = build_edge_table(A, cfg.d_max);
  std::vector<EdgeEntry> tb = build_edge_table(B, cfg.d_max);
  if (ta.size() > cfg.max_edges) ta.resize(cfg.max_edges);
  if (tb.size() > cfg.max_edges) tb.resize(cfg.max_edges);

  // Segment angles are needed for the rotation estimate but are not part of the
  // public edge entry; recompute them alongside each table.
  auto seg_angles = [](const MinutiaTemplate& t, const std::vector<EdgeEntry>& table) {
    std::vector<double> s(table.size());
    for (std::size_t k = 0; k < table.size(); ++k) {
      const Minutia& mi = t.minutiae[table[k].i];
      const Minutia& mj = t.minutiae[table[k].j];
      s[k] = std::atan2(static_cast<double>(mj.y - mi.y), static_cast<double>(mj.x - mi.x));
    }
    return s;
  };
  const std::vector<double> sa = seg_angles(A, ta);
  const std::vector<double> sb = seg_angles(B, tb);

  // tb is sorted by distance; only the window within tol_d of each A edge can link.
  std::vector<Link> links;
  std::size_t lo = 0;
  for (std::size_t ka = 0; ka < ta.size(); ++ka) {
    const EdgeEntry& ea = ta[ka];
    while (lo < tb.size() && tb[lo].dist < ea.dist - cfg.tol_d) ++lo;
    for (std::size_t kb = lo; kb < tb.size() && tb[kb].dist <= ea.dist + cfg.tol_d; ++kb) {
      const EdgeEntry& eb = tb[kb];
      const double dd = std::fabs(ea.dist - eb.dist);

      const double d1 = circ_dist(ea.beta1, eb.beta1);
      const double d2 = circ_dist(ea.beta2, eb.beta2);
      if (d1 <= cfg.tol_a && d2 <= cfg.tol_a) {
        links.push_back({ea.i, ea.j, eb.i, eb.j, wrap_pi(sb[kb] - sa[ka]),
                         dd / cfg.tol_d + (d1 + d2) / cfg.tol_a});
      }
      // Reversed endpoint assignment: traversing B's edge j->i flips its segment
      // by pi and swaps the betas.
      const double r1 = circ_dist(ea.beta1, wrap_pi(eb.beta2 + kPi));
      const double r2 = circ_dist(ea.beta2, wrap_pi(eb.beta1 + kPi));
      if (r1 <= cfg.tol_a && r2 <= cfg.tol_a) {
        links.push_back({ea.i, ea.j, eb.j, eb.i, wrap_pi(sb[kb] + kPi - sa[ka]),
                         dd / cfg.tol_d + (r1 + r2) / cfg.tol_a});
      }
    }
  }
  if (links.empty()) {
    res.normalized = 0.0;
    res.decision = res.normalized >= cfg.threshold;
    return res;
  }

  std::sort(links.begin(), links.end(), [](const Link& a, const Link& b) {
    if (a.q != b.q) return a.q < b.q;
    if (a.ai != b.ai) return a.ai < b.ai;
    if (a.aj != b.aj) return a.aj < b.aj;
    if (a.bi != b.bi) return a.bi < b.bi;
    return a.bj < b.bj;
  });
  if (links.size() > cfg.max_links) links.resize(cfg.max_links);

  // Seed: the link whose implied rotation has the most support.
  std::size_t seed = 0;
  int best_support = -1;
  for (std::size_t u = 0; u < links.size(); ++u) {
    int support = 0;
    for (const Link& v : links)
      if (circ_dist(links[u].rot, v.rot) <= cfg.rot_tol) ++support;
    if (support > best_support) {
      best_support = support;
      seed = u;
    }
  }
  const double rot0 = links[seed].rot;

  // The winning rotation band is anchored on its best-quality member, not on
  // the band maximizer itself (which may be a marginal spurious link).
  std::size_t anchor = seed;
  for (std::size_t u = 0; u < links.size(); ++u)
    if (circ_dist(links[u].rot, rot0) <= cfg.rot_tol) {
      anchor = u;
      break;
    }

  // Grow: rotation-consistent links join the cluster only by sharing an
  // existing minutia assignment (the web stays connected), with endpoint
  // assignments kept injective. Passes repeat until no link can chain on.
  std::vector<int> map_ab(na, -1), map_ba(nb, -1);
  const Link& s = links[anchor];
  map_ab[s.ai] = s.bi;
  map_ba[s.bi] = s.ai;
  map_ab[s.aj] = s.bj;
  map_ba[s.bj] = s.aj;
  auto compatible = [&](int a, int b) {
    return (map_ab[a] == -1 || map_ab[a] == b) && (map_ba[b] == -1 || map_ba[b] == a);
  };
  bool grew = true;
  while (grew) {
    grew = false;
    for (const Link& l : links) {
      if (circ_dist(l.rot, rot0) > cfg.rot_tol) continue;
      if (!compatible(l.ai, l.bi) || !compatible(l.aj, l.bj)) continue;
      const bool shares = (map_ab[l.ai] == l.bi) || (map_ab[l.aj] == l.bj);
      if (!shares) continue;
      if (map_ab[l.ai] == -1 || map_ab[l.aj] == -1) grew = true;
      map_ab[l.ai] = l.bi;
      map_ba[l.bi] = l.ai;
      map_ab[l.aj] = l.bj;
      map_ba[l.bj] = l.aj;
    }
  }

  int score = 0;
  for (int v : map_ab)
    if (v >= 0) ++score;
  res.score = score;
  res.normalized = static_cast<double>(score) / static_cast<double>(std::min(na, nb));
  res.decision = res.normalized >= cfg.threshold;
  return res;
}

} // namespace

MatchResult match_templates(const MinutiaTemplate& a, const MinutiaTemplate& b,
                            const MatcherConfig& cfg) {
  // Canonical argument order makes the greedy growth symmetric:
  // score(a, b) == score(b, a) exactly.
  const bool swap = (a.minutiae.size() < b.minutiae.size()) ||
                    (a.minutiae.size() == b.minutiae.size() &&
                     format_template(a) > format_template(b));
  return swap ? match_ordered(b, a, cfg) : match_ordered(a, b, cfg);
}

} // namespace ridgekit
