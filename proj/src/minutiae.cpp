#include "ridgekit/minutiae.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ridgekit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTau = 2.0 * kPi;

double wrap_full_turn(double a) {
  while (a < 0.0) a += kTau;
  while (a >= kTau) a -= kTau;
  return a;
}

double circular_distance(double a, double b) {
  double d = std::fabs(a - b);
  while (d > kTau) d -= kTau;
  return std::min(d, kTau - d);
}

} // namespace

BinaryImage binarize_adaptive(const GrayImage& img, int window) {
  if (window < 3 || window % 2 == 0)
    throw ArgumentError("binarize_adaptive: window must be odd and >= 3");
  const int r = window / 2;
  const int pw = img.width + 2 * r, ph = img.height + 2 * r;

  // Integral image over the replicated-border padding keeps windowed sums exact.
  std::vector<std::uint64_t> integral(static_cast<std::size_t>(pw + 1) * (ph + 1), 0);
  for (int y = 0; y < ph; ++y) {
    std::uint64_t row = 0;
    for (int x = 0; x < pw; ++x) {
      row += img.at_clamped(x - r, y - r);
      integral[static_cast<std::size_t>(y + 1) * (pw + 1) + (x + 1)] =
          integral[static_cast<std::size_t>(y) * (pw + 1) + (x + 1)] + row;
    }
  }

  const double area = static_cast<double>(window) * window;
  BinaryImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const int x1 = x, y1 = y;                    // padded window top-left
      const int x2 = x + window, y2 = y + window;  // padded window bottom-right (exclusive)
      const std::uint64_t sum =
          integral[static_cast<std::size_t>(y2) * (pw + 1) + x2] -
          integral[static_cast<std::size_t>(y1) * (pw + 1) + x2] -
          integral[static_cast<std::size_t>(y2) * (pw + 1) + x1] +
          integral[static_cast<std::size_t>(y1) * (pw + 1) + x1];
      const double mean = static_cast<double>(sum) / area;
      out.at(x, y) = (img.at(x, y) < mean - 2.0) ? 1 : 0;
    }
  }
  return out;
}

namespace {

// Neighborhood snapshot in P2..P9 order (N, NE, E, SE, S, SW, W, NW).
inline void ring_of(const BinaryImage& b, int x, int y, int p[8]) {
  p[0] = b.at_or0(x, y - 1);
  p[1] = b.at_or0(x + 1, y - 1);
  p[2] = b.at_or0(x + 1, y);
  p[3] = b.at_or0(x + 1, y + 1);
  p[4] = b.at_or0(x, y + 1);
  p[5] = b.at_or0(x - 1, y + 1);
  p[6] = b.at_or0(x - 1, y);
  p[7] = b.at_or0(x - 1, y - 1);
}

inline int connectivity_number(const int p[8]) {
  const int P2 = p[0], P3 = p[1], P4 = p[2], P5 = p[3], P6 = p[4], P7 = p[5], P8 = p[6],
            P9 = p[7];
  return ((!P2) & (P3 | P4)) + ((!P4) & (P5 | P6)) + ((!P6) & (P7 | P8)) + ((!P8) & (P9 | P2));
}

// One Guo-Hall sub-iteration over a snapshot; returns true if anything changed.
bool thin_subpass(BinaryImage& b, int sub) {
  const BinaryImage snap = b;
  bool changed = false;
  for (int y = 0; y < b.height; ++y) {
    for (int x = 0; x < b.width; ++x) {
      if (!snap.at(x, y)) continue;
      int p[8];
      ring_of(snap, x, y, p);
      const int P2 = p[0], P3 = p[1], P4 = p[2], P5 = p[3], P6 = p[4], P7 = p[5], P8 = p[6],
                P9 = p[7];
      const int C = connectivity_number(p);
      const int n1 = (P9 | P2) + (P3 | P4) + (P5 | P6) + (P7 | P8);
      const int n2 = (P2 | P3) + (P4 | P5) + (P6 | P7) + (P8 | P9);
      const int n = std::min(n1, n2);
      const int m = (sub == 0) ? ((P6 | P7 | (!P9)) & P8) : ((P2 | P3 | (!P5)) & P4);
      if (C == 1 && n >= 2 && n <= 3 && m == 0) {
        b.at(x, y) = 0;
        changed = true;
      }
    }
  }
  return changed;
}

// Removes leftover 2x2 ridge squares, deleting only simple points (C == 1,
// at least 2 neighbors) so connectivity is preserved.
bool squash_squares(BinaryImage& b) {
  bool changed = false;
  for (int y = 0; y + 1 < b.height; ++y) {
    for (int x = 0; x + 1 < b.width; ++x) {
      if (!(b.at(x, y) && b.at(x + 1, y) && b.at(x, y + 1) && b.at(x + 1, y + 1))) continue;
      const int cand[4][2] = {{x, y}, {x + 1, y}, {x, y + 1}, {x + 1, y + 1}};
      for (const auto& c : cand) {
        int p[8];
        ring_of(b, c[0], c[1], p);
        int neighbors = 0;
        for (int v : p) neighbors += v;
        if (connectivity_number(p) == 1 && neighbors >= 2) {
          b.at(c[0], c[1]) = 0;
          changed = true;
          break;
        }
      }
    }
  }
  return changed;
}

} // namespace

BinaryImage thin(const BinaryImage& binary) {
  BinaryImage skel = binary;
  bool cycle_changed = true;
  while (cycle_changed) {
    cycle_changed = false;
    bool pass_changed = true;
    while (pass_changed) {
      pass_changed = thin_subpass(skel, 0);
      pass_changed |= thin_subpass(skel, 1);
      cycle_changed |= pass_changed;
    }
    cycle_changed |= squash_squares(skel);
  }
  return skel;
}

namespace {

// Offsets matching ring_of's P2..P9 order.
constexpr int kRingOffsets[8][2] = {{0, -1}, {1, -1}, {1, 0},  {1, 1},
                                    {0, 1},  {-1, 1}, {-1, 0}, {-1, -1}};

// Directions of the maximal circular runs of ridge neighbors around a pixel.
std::vector<double> branch_directions(const int p[8]) {
  std::vector<double> dirs;
  int start = -1;
  for (int k = 0; k < 8; ++k)
    if (!p[k] && p[(k + 1) % 8]) {
      start = (k + 1) % 8;
      break;
    }
  if (start < 0) return dirs; // all-ridge or all-empty ring
  int k = start;
  do {
    if (p[k]) {
      double sx = 0.0, sy = 0.0;
      while (p[k]) {
        const double len = std::hypot(static_cast<double>(kRingOffsets[k][0]),
                                      static_cast<double>(kRingOffsets[k][1]));
        sx += kRingOffsets[k][0] / len;
        sy += kRingOffsets[k][1] / len;
        k = (k + 1) % 8;
      }
      dirs.push_back(std::atan2(sy, sx));
    } else {
      k = (k + 1) % 8;
    }
  } while (k != start);
  return dirs;
}

double lift_orientation(double theta_mod_pi, double toward) {
  const double a = wrap_full_turn(theta_mod_pi);
  const double b = wrap_full_turn(theta_mod_pi + kPi);
  return (circular_distance(a, toward) <= circular_distance(b, toward)) ? a : b;
}

} // namespace

MinutiaTemplate extract_minutiae(const BinaryImage& skeleton, const OrientationField& field) {
  MinutiaTemplate tpl;
  tpl.width = skeleton.width;
  tpl.height = skeleton.height;

  for (int y = 0; y < skeleton.height; ++y) {
    for (int x = 0; x < skeleton.width; ++x) {
      if (!skeleton.at(x, y)) continue;
      int p[8];
      ring_of(skeleton, x, y, p);
      int transitions = 0;
      for (int k = 0; k < 8; ++k) transitions += std::abs(p[k] - p[(k + 1) % 8]);
      const int cn = transitions / 2;
      if (cn != 1 && cn != 3) continue;

      const int bc = std::min(x / field.block_size, field.cols - 1);
      const int br = std::min(y / field.block_size, field.rows - 1);
      const double theta = field.theta_smooth[field.index(bc, br)];

      const std::vector<double> branches = branch_directions(p);
      double toward;
      if (cn == 1) {
        toward = branches.empty() ? 0.0 : branches[0];
      } else {
        // Fork bisector of the two closest branches, complemented: the lone
        // ridge's departing direction.
        double best = 1e9, bis = 0.0;
        for (std::size_t i = 0; i < branches.size(); ++i)
          for (std::size_t j = i + 1; j < branches.size(); ++j) {
            const double d = circular_distance(branches[i], branches[j]);
            if (d < best) {
              best = d;
              bis = std::atan2(std::sin(branches[i]) + std::sin(branches[j]),
                               std::cos(branches[i]) + std::cos(branches[j]));
            }
          }
        toward = wrap_full_turn(bis + kPi);
      }

      Minutia m;
      m.x = x;
      m.y = y;
      m.angle = lift_orientation(theta, wrap_full_turn(toward));
      m.kind = (cn == 1) ? MinutiaKind::Ending : MinutiaKind::Bifurcation;
      tpl.minutiae.push_back(m);
    }
  }

  std::sort(tpl.minutiae.begin(), tpl.minutiae.end(), [](const Minutia& a, const Minutia& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  return tpl;
}

MinutiaTemplate filter_minutiae(const MinutiaTemplate& tpl, const OrientationField& field,
                                int border_px, int merge_px) {
  MinutiaTemplate out;
  out.width = tpl.width;
  out.height = tpl.height;

  for (const Minutia& m : tpl.minutiae) {
    if (m.x < border_px || m.y < border_px || m.x >= tpl.width - border_px ||
        m.y >= tpl.height - border_px)
      continue;
    // Any background block within border_px disqualifies the minutia.
    const int bc0 = std::max(0, (m.x - border_px) / field.block_size);
    const int bc1 = std::min(field.cols - 1, (m.x + border_px) / field.block_size);
    const int br0 = std::max(0, (m.y - border_px) / field.block_size);
    const int br1 = std::min(field.rows - 1, (m.y + border_px) / field.block_size);
    bool near_background = false;
    for (int br = br0; br <= br1 && !near_background; ++br)
      for (int bc = bc0; bc <= bc1; ++bc)
        if (!field.foreground(bc, br)) {
          near_background = true;
          break;
        }
    if (!near_background) out.minutiae.push_back(m);
  }

  std::sort(out.minutiae.begin(), out.minutiae.end(), [](const Minutia& a, const Minutia& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });

  const double cx = tpl.width / 2.0, cy = tpl.height / 2.0;
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < out.minutiae.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < out.minutiae.size(); ++j) {
        const double dx = out.minutiae[i].x - out.minutiae[j].x;
        const double dy = out.minutiae[i].y - out.minutiae[j].y;
        if (std::hypot(dx, dy) >= merge_px) continue;
        const double di = std::hypot(out.minutiae[i].x - cx, out.minutiae[i].y - cy);
        const double dj = std::hypot(out.minutiae[j].x - cx, out.minutiae[j].y - cy);
        out.minutiae.erase(out.minutiae.begin() +
                           static_cast<std::ptrdiff_t>(dj < di ? i : j));
        merged = true;
        break;
      }
    }
  }
  return out;
}

std::string format_template(const MinutiaTemplate& tpl) {
  std::vector<Minutia> sorted = tpl.minutiae;
  std::sort(sorted.begin(), sorted.end(), [](const Minutia& a, const Minutia& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });

  std::ostringstream os;
  os << "FPTEMPLATE v1\n";
  os << "size " << tpl.width << " " << tpl.height << "\n";
  char buf[64];
  for (const Minutia& m : sorted) {
    const double deg = wrap_full_turn(m.angle) * 180.0 / kPi;
    std::snprintf(buf, sizeof(buf), "%.4f", deg);
    os << "M " << m.x << " " << m.y << " " << buf << " "
       << (m.kind == MinutiaKind::Ending ? 'E' : 'B') << "\n";
  }
  return os.str();
}

void write_template(const MinutiaTemplate& tpl, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write: " + path);
  const std::string text = format_template(tpl);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("write failed: " + path);
}

MinutiaTemplate parse_template(std::istream& in, const std::string& origin) {
  MinutiaTemplate tpl;
  std::string line;
  int lineno = 0;

  auto fail = [&](const std::string& why) -> ParseError {
    return ParseError(origin + ":" + std::to_string(lineno) + ": " + why);
  };

  if (!std::getline(in, line)) throw fail("empty template");
  ++lineno;
  if (line != "FPTEMPLATE v1") throw fail("bad magic line '" + line + "'");

  if (!std::getline(in, line)) {
    ++lineno;
    throw fail("missing size line");
  }
  ++lineno;
  {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag >> tpl.width >> tpl.height) || tag != "size" || tpl.width < 1 ||
        tpl.height < 1)
      throw fail("bad size line '" + line + "'");
  }

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag, kind;
    Minutia m;
    double deg = 0.0;
    if (!(ls >> tag >> m.x >> m.y >> deg >> kind) || tag != "M")
      throw fail("bad minutia line '" + line + "'");
    if (kind == "E")
      m.kind = MinutiaKind::Ending;
    else if (kind == "B")
      m.kind = MinutiaKind::Bifurcation;
    else
      throw fail("bad minutia kind '" + kind + "'");
    m.angle = wrap_full_turn(deg * kPi / 180.0);
    tpl.minutiae.push_back(m);
  }
  return tpl;
}

MinutiaTemplate read_template(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  return parse_template(f, path);
}

} // namespace ridgekit
