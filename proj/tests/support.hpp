// Shared test fixtures: synthetic inputs and independent reference
// implementations ("oracles") that the library code is checked against.
// Everything here is deliberately written from the operation definitions,
// not by calling the code under test.
#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "ridgekit/image.hpp"
#include "ridgekit/minutiae.hpp"
#include "ridgekit/orientation.hpp"

namespace testkit {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// deterministic synthetic inputs
// ---------------------------------------------------------------------------

inline ridgekit::GrayImage random_gray(int w, int h, std::uint32_t seed) {
  ridgekit::GrayImage img(w, h);
  std::mt19937 rng(seed);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(rng() & 0xFF);
  return img;
}

// Sinusoidal stripes; theta is the stripe (ridge) direction, so intensity
// varies along theta + pi/2.
inline ridgekit::GrayImage stripe_image(int w, int h, double period, double theta,
                                        double amplitude = 100.0, double mean = 128.0) {
  ridgekit::GrayImage img(w, h);
  const double nx = std::cos(theta + kPi / 2.0), ny = std::sin(theta + kPi / 2.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double u = x * nx + y * ny;
      const double v = mean + amplitude * std::cos(2.0 * kPi * u / period);
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
    }
  return img;
}

// Concentric rings around (cx, cy): a synthetic whorl.
inline ridgekit::GrayImage ring_image(int w, int h, double cx, double cy, double period) {
  ridgekit::GrayImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double r = std::hypot(x - cx, y - cy);
      const double v = 128.0 + 100.0 * std::cos(2.0 * kPi * r / period);
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
    }
  return img;
}

// Ridge-pattern model: concentric rings plus phase dislocations. Every
// dislocation is a structural minutia that survives translation, contrast and
// noise changes, which makes genuine impressions repeatably matchable.
struct FingerModel {
  double cx = 0.0, cy = 0.0;
  double period = 10.0;
  struct Dislocation {
    double x, y;
    int sign;
  };
  std::vector<Dislocation> dislocations;
};

inline FingerModel random_finger(std::uint32_t seed, int w, int h, int n_dislocations = 16) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FingerModel f;
  f.cx = w / 2.0 + (unit(rng) - 0.5) * 20.0;
  f.cy = h / 2.0 + (unit(rng) - 0.5) * 20.0;
  f.period = 9.0 + unit(rng) * 2.0;
  for (int k = 0; k < n_dislocations; ++k) {
    const double ang = unit(rng) * 2.0 * kPi;
    const double rad = 18.0 + unit(rng) * 62.0;
    f.dislocations.push_back(
        {f.cx + rad * std::cos(ang), f.cy + rad * std::sin(ang), (rng() & 1) ? 1 : -1});
  }
  return f;
}

inline ridgekit::GrayImage render_finger(const FingerModel& f, int w, int h, double dx = 0.0,
                                         double dy = 0.0, double contrast = 100.0,
                                         double brightness = 128.0, std::uint32_t noise_seed = 1,
                                         double noise_amp = 6.0) {
  ridgekit::GrayImage img(w, h);
  std::mt19937 rng(noise_seed);
  std::uniform_real_distribution<double> noise(-noise_amp, noise_amp);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double px = x - dx, py = y - dy;
      double phase = 2.0 * kPi * std::hypot(px - f.cx, py - f.cy) / f.period;
      for (const auto& d : f.dislocations) phase += d.sign * std::atan2(py - d.y, px - d.x);
      const double v = brightness + contrast * std::cos(phase) + noise(rng);
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
    }
  return img;
}

// ---------------------------------------------------------------------------
// scalar / brute-force oracles
// ---------------------------------------------------------------------------

// Well-exposedness weighting applied per pixel, straight from the definition.
inline std::uint8_t oracle_hdr_pixel(const std::vector<std::uint8_t>& values) {
  double wsum = 0.0, acc = 0.0, plain = 0.0;
  for (std::uint8_t v : values) {
    const double d = v / 255.0 - 0.5;
    const double w = std::exp(-(d * d) / (2.0 * 0.2 * 0.2));
    wsum += w;
    acc += w * v;
    plain += v;
  }
  const double out = (wsum < 1e-9) ? plain / values.size() : acc / wsum;
  return static_cast<std::uint8_t>(std::lround(out));
}

// Quadruple-loop cross-correlation with center anchor and replicated borders.
inline ridgekit::RealImage oracle_convolve(const ridgekit::GrayImage& img,
                                           const std::vector<double>& kernel, int k) {
  const int a = k / 2;
  ridgekit::RealImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double sum = 0.0;
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) {
          int sx = x + i - a, sy = y + j - a;
          sx = std::clamp(sx, 0, img.width - 1);
          sy = std::clamp(sy, 0, img.height - 1);
          sum += static_cast<double>(img.at(sx, sy)) * kernel[static_cast<std::size_t>(j) * k + i];
        }
      out.at(x, y) = sum;
    }
  return out;
}

// Direct evaluation of the sampled Gabor grids (pre- and post-DC-removal).
struct OracleGabor {
  std::vector<double> cosine_raw; // before mean subtraction
  std::vector<double> cosine;     // after
  std::vector<double> sine;
};

inline OracleGabor oracle_gabor(int k, double theta, double freq, double variance,
                                double psi = 0.0, double gamma = 1.0, double B = 1.0,
                                double C = 1.0) {
  const int h = (k - 1) / 2;
  OracleGabor o;
  o.cosine_raw.resize(static_cast<std::size_t>(k) * k);
  o.sine.resize(static_cast<std::size_t>(k) * k);
  double mean = 0.0;
  for (int j = -h; j <= h; ++j)
    for (int i = -h; i <= h; ++i) {
      double r2;
      if (gamma == 1.0) {
        r2 = static_cast<double>(i) * i + static_cast<double>(j) * j;
      } else {
        const double a = i * std::cos(theta) + j * std::sin(theta);
        const double b = -i * std::sin(theta) + j * std::cos(theta);
        r2 = a * a + gamma * gamma * b * b;
      }
      const double g = std::exp(-r2 / (2.0 * variance));
      const double arg = 2.0 * kPi * freq * (i * std::cos(theta) + j * std::sin(theta)) + psi;
      const std::size_t idx = static_cast<std::size_t>(j + h) * k + (i + h);
      o.cosine_raw[idx] = B * g * std::cos(arg);
      o.sine[idx] = C * g * std::sin(arg);
      mean += o.cosine_raw[idx];
    }
  mean /= static_cast<double>(k) * k;
  o.cosine = o.cosine_raw;
  for (double& v : o.cosine) v -= mean;
  return o;
}

// Step-by-step clip / redistribute / CDF mapping for one tile.
inline std::array<std::uint8_t, 256> oracle_equalize(const std::array<std::uint32_t, 256>& hist,
                                                     double clip_limit,
                                                     std::uint64_t tile_pixels) {
  const auto ceiling = static_cast<std::uint64_t>(
      std::ceil(clip_limit * static_cast<double>(tile_pixels) / 256.0));
  std::array<std::uint64_t, 256> bins{};
  std::uint64_t excess = 0;
  for (int v = 0; v < 256; ++v) {
    if (hist[v] > ceiling) {
      excess += hist[v] - ceiling;
      bins[v] = ceiling;
    } else {
      bins[v] = hist[v];
    }
  }
  for (int v = 0; v < 256; ++v) bins[v] += excess / 256;
  for (std::uint64_t v = 0; v < excess % 256; ++v) bins[v] += 1;

  std::array<std::uint8_t, 256> lut{};
  std::uint64_t cdf = 0;
  for (int v = 0; v < 256; ++v) {
    cdf += bins[v];
    lut[v] = static_cast<std::uint8_t>(std::min<long>(
        255, std::lround(255.0 * static_cast<double>(cdf) / static_cast<double>(tile_pixels))));
  }
  return lut;
}

// Plain (unclipped) per-tile equalization.
inline std::array<std::uint8_t, 256> oracle_equalize_plain(
    const std::array<std::uint32_t, 256>& hist, std::uint64_t tile_pixels) {
  std::array<std::uint8_t, 256> lut{};
  std::uint64_t cdf = 0;
  for (int v = 0; v < 256; ++v) {
    cdf += hist[v];
    lut[v] = static_cast<std::uint8_t>(std::min<long>(
        255, std::lround(255.0 * static_cast<double>(cdf) / static_cast<double>(tile_pixels))));
  }
  return lut;
}

// Whole-pipeline CLAHE reference at tiny scale: per-tile LUTs (from the given
// per-tile LUT function) blended per pixel between tile centers.
template <typename LutFn>
ridgekit::GrayImage oracle_clahe(const ridgekit::GrayImage& img, int cols, int rows,
                                 LutFn make_lut) {
  const int tw = (img.width + cols - 1) / cols;
  const int th = (img.height + rows - 1) / rows;
  std::vector<std::array<std::uint8_t, 256>> luts;
  std::vector<double> cx(cols), cy(rows);
  for (int tr = 0; tr < rows; ++tr) {
    for (int tc = 0; tc < cols; ++tc) {
      const int x0 = tc * tw, x1 = std::min(x0 + tw, img.width);
      const int y0 = tr * th, y1 = std::min(y0 + th, img.height);
      std::array<std::uint32_t, 256> hist{};
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) ++hist[img.at(x, y)];
      luts.push_back(make_lut(hist, static_cast<std::uint64_t>(x1 - x0) * (y1 - y0)));
      cx[tc] = x0 + (x1 - x0 - 1) / 2.0;
      cy[tr] = y0 + (y1 - y0 - 1) / 2.0;
    }
  }
  auto axis = [](const std::vector<double>& centers, int coord, int& lo, int& hi, double& w) {
    const int n = static_cast<int>(centers.size());
    lo = hi = 0;
    w = 0.0;
    if (coord <= centers[0]) return;
    if (coord >= centers[n - 1]) {
      lo = hi = n - 1;
      return;
    }
    while (lo + 1 < n && centers[lo + 1] <= coord) ++lo;
    hi = lo + 1;
    w = (coord - centers[lo]) / (centers[hi] - centers[lo]);
  };
  ridgekit::GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      int lx, hx, ly, hy;
      double wx, wy;
      axis(cx, x, lx, hx, wx);
      axis(cy, y, ly, hy, wy);
      const std::uint8_t v = img.at(x, y);
      const double top = (1.0 - wx) * luts[static_cast<std::size_t>(ly) * cols + lx][v] +
                         wx * luts[static_cast<std::size_t>(ly) * cols + hx][v];
      const double bot = (1.0 - wx) * luts[static_cast<std::size_t>(hy) * cols + lx][v] +
                         wx * luts[static_cast<std::size_t>(hy) * cols + hx][v];
      out.at(x, y) = static_cast<std::uint8_t>(
          std::clamp<long>(std::lround((1.0 - wy) * top + wy * bot), 0, 255));
    }
  return out;
}

// One smoothing pass evaluated straight from the circular-mean formula over an
// n x n neighborhood; background blocks neither update nor contribute.
inline std::vector<double> oracle_smooth_pass(const std::vector<double>& theta,
                                              const std::vector<std::uint8_t>& mask, int cols,
                                              int rows, int n) {
  const int reach = n / 2;
  std::vector<double> out(theta.size());
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
      if (!mask[idx]) {
        out[idx] = theta[idx];
        continue;
      }
      double s = 0.0, co = 0.0;
      for (int dr = -reach; dr <= reach; ++dr)
        for (int dc = -reach; dc <= reach; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
          const std::size_t nidx = static_cast<std::size_t>(rr) * cols + cc;
          if (!mask[nidx]) continue;
          s += std::sin(2.0 * theta[nidx]);
          co += std::cos(2.0 * theta[nidx]);
        }
      if (std::fabs(s) < 1e-12 && std::fabs(co) < 1e-12) {
        out[idx] = theta[idx];
      } else {
        double t = 0.5 * std::atan2(s, co);
        while (t < 0.0) t += kPi;
        while (t >= kPi) t -= kPi;
        out[idx] = t;
      }
    }
  return out;
}

// Windowed local mean with replicated borders, straight from the definition.
inline double oracle_window_mean(const ridgekit::GrayImage& img, int x, int y, int window) {
  const int r = window / 2;
  double sum = 0.0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      sum += img.at_clamped(x + dx, y + dy);
  return sum / (static_cast<double>(window) * window);
}

// Crossing number of one skeleton pixel, from the ring definition.
inline int oracle_crossing_number(const ridgekit::BinaryImage& b, int x, int y) {
  const int ring[8][2] = {{0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}};
  int total = 0;
  for (int k = 0; k < 8; ++k) {
    const int a = b.at_or0(x + ring[k][0], y + ring[k][1]);
    const int c = b.at_or0(x + ring[(k + 1) % 8][0], y + ring[(k + 1) % 8][1]);
    total += std::abs(a - c);
  }
  return total / 2;
}

// Path sum of wrapped orientation differences around one block of a field.
inline double oracle_poincare_turns(const ridgekit::OrientationField& f, int col, int row) {
  const int ring[8][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
  double total = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double a = f.theta_smooth[f.index(col + ring[k][0], row + ring[k][1])];
    const double b =
        f.theta_smooth[f.index(col + ring[(k + 1) % 8][0], row + ring[(k + 1) % 8][1])];
    double d = b - a;
    while (d <= -kPi / 2.0) d += kPi;
    while (d > kPi / 2.0) d -= kPi;
    total += d;
  }
  return total / (2.0 * kPi);
}

// ---------------------------------------------------------------------------
// synthetic orientation fields and templates
// ---------------------------------------------------------------------------

template <typename ThetaFn>
ridgekit::OrientationField make_field(int cols, int rows, int block_size, ThetaFn theta_at) {
  ridgekit::OrientationField f;
  f.block_size = block_size;
  f.cols = cols;
  f.rows = rows;
  const std::size_t n = static_cast<std::size_t>(cols) * rows;
  f.theta_raw.resize(n);
  f.theta_smooth.resize(n);
  f.coherence.assign(n, 0.8);
  f.mask.assign(n, 1);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double t = theta_at(c, r);
      while (t < 0.0) t += kPi;
      while (t >= kPi) t -= kPi;
      f.theta_raw[f.index(c, r)] = t;
      f.theta_smooth[f.index(c, r)] = t;
    }
  return f;
}

// theta = 0.5 * sign * atan2(y - y0, x - x0) evaluated at block centers; a
// +1 sign plants a core (+0.5 turns), -1 a delta (-0.5).
inline ridgekit::OrientationField singularity_field(int cols, int rows, int block_size,
                                                    double x0, double y0, int sign) {
  return make_field(cols, rows, block_size, [&](int c, int r) {
    const double x = c * block_size + block_size / 2;
    const double y = r * block_size + block_size / 2;
    return 0.5 * sign * std::atan2(y - y0, x - x0);
  });
}

inline ridgekit::MinutiaTemplate spread_template(int n, std::uint32_t seed, int w = 300,
                                                 int h = 300) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ridgekit::MinutiaTemplate tpl;
  tpl.width = w;
  tpl.height = h;
  for (int k = 0; k < n; ++k) {
    const double ang = 2.0 * kPi * k / n + unit(rng) * 0.3;
    const double rad = 40.0 + unit(rng) * 25.0;
    ridgekit::Minutia m;
    m.x = static_cast<int>(std::lround(w / 2.0 + rad * std::cos(ang)));
    m.y = static_cast<int>(std::lround(h / 2.0 + rad * std::sin(ang)));
    m.angle = unit(rng) * 2.0 * kPi;
    m.kind = (rng() & 1) ? ridgekit::MinutiaKind::Ending : ridgekit::MinutiaKind::Bifurcation;
    tpl.minutiae.push_back(m);
  }
  return tpl;
}

inline ridgekit::MinutiaTemplate uniform_template(int n, std::uint32_t seed, int w = 300,
                                                  int h = 300) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ridgekit::MinutiaTemplate tpl;
  tpl.width = w;
  tpl.height = h;
  for (int k = 0; k < n; ++k) {
    ridgekit::Minutia m;
    m.x = 10 + static_cast<int>(unit(rng) * (w - 20));
    m.y = 10 + static_cast<int>(unit(rng) * (h - 20));
    m.angle = unit(rng) * 2.0 * kPi;
    m.kind = (rng() & 1) ? ridgekit::MinutiaKind::Ending : ridgekit::MinutiaKind::Bifurcation;
    tpl.minutiae.push_back(m);
  }
  return tpl;
}

// Rigid motion: rotate about the template center, then translate.
inline ridgekit::MinutiaTemplate rigid_transform(const ridgekit::MinutiaTemplate& tpl, double dx,
                                                 double dy, double rot_rad) {
  ridgekit::MinutiaTemplate out;
  out.width = tpl.width;
  out.height = tpl.height;
  const double cx = tpl.width / 2.0, cy = tpl.height / 2.0;
  const double c = std::cos(rot_rad), s = std::sin(rot_rad);
  for (const ridgekit::Minutia& m : tpl.minutiae) {
    const double rx = m.x - cx, ry = m.y - cy;
    ridgekit::Minutia t = m;
    t.x = static_cast<int>(std::lround(cx + rx * c - ry * s + dx));
    t.y = static_cast<int>(std::lround(cy + rx * s + ry * c + dy));
    double a = m.angle + rot_rad;
    while (a < 0.0) a += 2.0 * kPi;
    while (a >= 2.0 * kPi) a -= 2.0 * kPi;
    t.angle = a;
    out.minutiae.push_back(t);
  }
  return out;
}

inline double circular_pi_distance(double a, double b) {
  double d = std::fabs(a - b);
  while (d > kPi) d -= kPi;
  return std::min(d, kPi - d);
}

} // namespace testkit
