#include "ridgekit/align.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <vector>

namespace ridgekit {

GrayImage mirror_horizontal(const GrayImage& img) {
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) out.at(x, y) = img.at(img.width - 1 - x, y);
  return out;
}

GrayImage crop_about_core(const GrayImage& img, const CorePoint& core, const AlignConfig& cfg) {
  if (cfg.crop_width < 1 || cfg.crop_height < 1)
    throw ArgumentError("crop_about_core: crop dimensions must be >= 1");
  GrayImage out(cfg.crop_width, cfg.crop_height, cfg.fill);
  const int ox = core.x - cfg.crop_width / 2;
  const int oy = core.y - cfg.crop_height / 2;
  for (int y = 0; y < cfg.crop_height; ++y) {
    const int sy = oy + y;
    if (sy < 0 || sy >= img.height) continue;
    for (int x = 0; x < cfg.crop_width; ++x) {
      const int sx = ox + x;
      if (sx < 0 || sx >= img.width) continue;
      out.at(x, y) = img.at(sx, sy);
    }
  }
  return out;
}

double estimate_ridge_period(const GrayImage& img) {
  // Central square region, projected onto the axis the intensity varies along.
  const int side = std::min({img.width, img.height, 128});
  if (side < 8) return 0.0;
  const int x0 = (img.width - side) / 2;
  const int y0 = (img.height - side) / 2;

  double sum_cross = 0.0, sum_diff = 0.0;
  for (int y = y0 + 1; y < y0 + side - 1; ++y) {
    for (int x = x0 + 1; x < x0 + side - 1; ++x) {
      const double gx = (img.at(x + 1, y - 1) + 2.0 * img.at(x + 1, y) + img.at(x + 1, y + 1)) -
                        (img.at(x - 1, y - 1) + 2.0 * img.at(x - 1, y) + img.at(x - 1, y + 1));
      const double gy = (img.at(x - 1, y + 1) + 2.0 * img.at(x, y + 1) + img.at(x + 1, y + 1)) -
                        (img.at(x - 1, y - 1) + 2.0 * img.at(x, y - 1) + img.at(x + 1, y - 1));
      sum_cross += 2.0 * gx * gy;
      sum_diff += gx * gx - gy * gy;
    }
  }
  // Normal to the ridges; intensity oscillates along this direction.
  const double normal = 0.5 * std::atan2(sum_cross, sum_diff);
  const double cn = std::cos(normal), sn = std::sin(normal);

  const int max_lag = 50;
  std::vector<double> profile_sum(2 * side + 1, 0.0);
  std::vector<int> profile_cnt(2 * side + 1, 0);
  const double cx = x0 + side / 2.0, cy = y0 + side / 2.0;
  for (int y = y0; y < y0 + side; ++y) {
    for (int x = x0; x < x0 + side; ++x) {
      const double u = (x - cx) * cn + (y - cy) * sn;
      const int bin = static_cast<int>(std::lround(u)) + side;
      if (bin < 0 || bin > 2 * side) continue;
      profile_sum[bin] += img.at(x, y);
      profile_cnt[bin] += 1;
    }
  }

  std::vector<double> profile;
  for (std::size_t i = 0; i < profile_sum.size(); ++i)
    if (profile_cnt[i] > 0) profile.push_back(profile_sum[i] / profile_cnt[i]);
  if (static_cast<int>(profile.size()) < 2 * 3 + 1) return 0.0;

  double mean = 0.0;
  for (double v : profile) mean += v;
  mean /= static_cast<double>(profile.size());
  for (double& v : profile) v -= mean;

  double norm = 0.0;
  for (double v : profile) norm += v * v;
  if (norm < 1e-9) return 0.0;

  const int lag_hi = std::min<int>(max_lag, static_cast<int>(profile.size()) / 2);
  auto autocorr = [&](int lag) {
    double corr = 0.0;
    for (std::size_t i = 0; i + lag < profile.size(); ++i) corr += profile[i] * profile[i + lag];
    return corr / norm;
  };

  // Skip the zero-lag shoulder: any smooth profile correlates at tiny lags, so
  // the peak only counts after the autocorrelation first dips below zero.
  int dip = 0;
  for (int lag = 1; lag <= lag_hi; ++lag)
    if (autocorr(lag) < 0.0) {
      dip = lag;
      break;
    }
  if (dip == 0) return 0.0;

  int best_lag = 0;
  double best_corr = 0.0;
  for (int lag = std::max(3, dip + 1); lag <= lag_hi; ++lag) {
    const double corr = autocorr(lag);
    if (corr > best_corr) {
      best_corr = corr;
      best_lag = lag;
    }
  }
  return (best_corr > 0.2) ? static_cast<double>(best_lag) : 0.0;
}

GrayImage prescale_to_ridge_period(const GrayImage& img, double estimated_period,
                                   double target_period) {
  if (target_period <= 0.0) throw ArgumentError("prescale: target period must be > 0");
  if (estimated_period < 3.0 || estimated_period > 50.0) {
    std::cerr << "ridgekit: warning: degenerate ridge period estimate " << estimated_period
              << " px, scaling skipped\n";
    return img;
  }
  if (estimated_period == target_period) return img;

  const double s = target_period / estimated_period;
  const int out_w = std::max<int>(1, static_cast<int>(std::lround(img.width * s)));
  const int out_h = std::max<int>(1, static_cast<int>(std::lround(img.height * s)));

  GrayImage out(out_w, out_h);
  const double inv = 1.0 / s;
  for (int y = 0; y < out_h; ++y) {
    const double sy = (y + 0.5) * inv - 0.5;
    const int y_lo = static_cast<int>(std::floor(sy));
    const double fy = sy - y_lo;
    for (int x = 0; x < out_w; ++x) {
      const double sx = (x + 0.5) * inv - 0.5;
      const int x_lo = static_cast<int>(std::floor(sx));
      const double fx = sx - x_lo;
      const double v00 = img.at_clamped(x_lo, y_lo), v10 = img.at_clamped(x_lo + 1, y_lo);
      const double v01 = img.at_clamped(x_lo, y_lo + 1), v11 = img.at_clamped(x_lo + 1, y_lo + 1);
      const double v = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) +
                       fy * ((1.0 - fx) * v01 + fx * v11);
      long q = std::lround(v);
      if (q < 0) q = 0;
      if (q > 255) q = 255;
      out.at(x, y) = static_cast<std::uint8_t>(q);
    }
  }
  return out;
}

} // namespace ridgekit
