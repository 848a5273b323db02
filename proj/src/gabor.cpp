#include "ridgekit/gabor.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

namespace ridgekit {

namespace {
constexpr double kPi = std::numbers::pi;
}

GaborKernel make_kernel(const GaborParams& params) {
  if (params.size < 3 || params.size % 2 == 0)
    throw ArgumentError("make_kernel: size must be odd and >= 3, got " +
                        std::to_string(params.size));
  if (params.freq <= 0.0) throw ArgumentError("make_kernel: freq must be > 0");
  if (params.variance <= 0.0) throw ArgumentError("make_kernel: variance must be > 0");
  if (params.gamma <= 0.0) throw ArgumentError("make_kernel: gamma must be > 0");

  const int k = params.size;
  const int h = (k - 1) / 2;
  const double ct = std::cos(params.theta), st = std::sin(params.theta);

  GaborKernel kern;
  kern.params = params;
  kern.cosine.resize(static_cast<std::size_t>(k) * k);
  kern.sine.resize(static_cast<std::size_t>(k) * k);

  double mean = 0.0;
  for (int j = -h; j <= h; ++j) {
    for (int i = -h; i <= h; ++i) {
      double r2;
      if (params.gamma == 1.0) {
        r2 = static_cast<double>(i) * i + static_cast<double>(j) * j;
      } else {
        const double a = i * ct + j * st;  // along the wave
        const double b = -i * st + j * ct; // across it
        r2 = a * a + params.gamma * params.gamma * b * b;
      }
      const double g = std::exp(-r2 / (2.0 * params.variance));
      const double arg = 2.0 * kPi * params.freq * (i * ct + j * st) + params.psi;
      const std::size_t idx = static_cast<std::size_t>(j + h) * k + (i + h);
      kern.cosine[idx] = params.norm_b * g * std::cos(arg);
      kern.sine[idx] = params.norm_c * g * std::sin(arg);
      mean += kern.cosine[idx];
    }
  }
  mean /= static_cast<double>(k) * k;
  for (double& v : kern.cosine) v -= mean; // DC removal
  return kern;
}

KernelBank make_bank(int size, double freq, double variance) {
  KernelBank bank;
  bank.kernels.reserve(16);
  for (int m = 0; m < 16; ++m) {
    GaborParams p;
    p.size = size;
    p.freq = freq;
    p.variance = variance;
    p.theta = m * kPi / 16.0;
    bank.kernels.push_back(make_kernel(p));
  }
  return bank;
}

namespace {

// Rows [y0, y1) of the response. The accumulation order (kernel row, then
// column) is fixed so the interior fast path and the clamped border path give
// identical floating-point results for any partitioning.
void convolve_rows(const GrayImage& img, const std::vector<double>& kernel, int k, int y0, int y1,
                   RealImage& out) {
  const int w = img.width, hgt = img.height;
  const int a = k / 2;
  for (int y = y0; y < y1; ++y) {
    const bool row_interior = (y >= a && y + a < hgt);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      if (row_interior && x >= a && x + a < w) {
        const std::uint8_t* base = &img.data[static_cast<std::size_t>(y - a) * w + (x - a)];
        for (int j = 0; j < k; ++j) {
          const std::uint8_t* src = base + static_cast<std::size_t>(j) * w;
          const double* kr = &kernel[static_cast<std::size_t>(j) * k];
          for (int i = 0; i < k; ++i) acc += kr[i] * src[i];
        }
      } else {
        for (int j = 0; j < k; ++j) {
          const double* kr = &kernel[static_cast<std::size_t>(j) * k];
          for (int i = 0; i < k; ++i) acc += kr[i] * img.at_clamped(x + i - a, y + j - a);
        }
      }
      out.at(x, y) = acc;
    }
  }
}

} // namespace

RealImage convolve(const GrayImage& img, const std::vector<double>& kernel, int kernel_size) {
  if (kernel_size < 1 || static_cast<std::size_t>(kernel_size) * kernel_size != kernel.size())
    throw ArgumentError("convolve: kernel grid is not kernel_size x kernel_size");
  if (kernel_size > img.width || kernel_size > img.height)
    throw ArgumentError("convolve: kernel side " + std::to_string(kernel_size) +
                        " exceeds image " + std::to_string(img.width) + "x" +
                        std::to_string(img.height));
  RealImage out(img.width, img.height);
  convolve_rows(img, kernel, kernel_size, 0, img.height, out);
  return out;
}

std::vector<RealImage> convolve_parallel(const GrayImage& img, const KernelBank& bank,
                                         int threads) {
  if (threads < 1) throw ArgumentError("convolve_parallel: threads must be >= 1");
  if (bank.kernels.empty()) throw ArgumentError("convolve_parallel: empty kernel bank");
  for (const GaborKernel& kern : bank.kernels)
    if (kern.size() > img.width || kern.size() > img.height)
      throw ArgumentError("convolve_parallel: kernel side " + std::to_string(kern.size()) +
                          " exceeds image " + std::to_string(img.width) + "x" +
                          std::to_string(img.height));

  const int n = static_cast<int>(bank.kernels.size());
  std::vector<RealImage> out;
  out.reserve(n);
  for (int m = 0; m < n; ++m) out.emplace_back(img.width, img.height);

  // Work units: (kernel, row band). Whole output pixels never split across
  // workers, so scheduling cannot change any summation order.
  struct Task {
    int kernel, y0, y1;
  };
  constexpr int kBandRows = 32;
  std::vector<Task> tasks;
  for (int m = 0; m < n; ++m)
    for (int y = 0; y < img.height; y += kBandRows)
      tasks.push_back({m, y, std::min(y + kBandRows, img.height)});

  auto run_task = [&](const Task& t) {
    convolve_rows(img, bank.kernels[t.kernel].cosine, bank.kernels[t.kernel].size(), t.y0, t.y1,
                  out[t.kernel]);
  };

  if (threads == 1) {
    for (const Task& t : tasks) run_task(t);
    return out;
  }

  std::atomic<std::size_t> next{0};
  const int workers = std::min<std::size_t>(threads, tasks.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int wi = 0; wi < workers; ++wi) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t idx = next.fetch_add(1);
        if (idx >= tasks.size()) return;
        run_task(tasks[idx]);
      }
    });
  }
  for (std::thread& th : pool) th.join();
  return out;
}

GrayImage fuse_responses(const std::vector<RealImage>& responses) {
  if (responses.empty()) throw ArgumentError("fuse_responses: empty response list");
  for (const RealImage& r : responses)
    if (!r.same_size(responses[0]))
      throw DimensionError("fuse_responses: mismatched response dimensions");

  const std::size_t n = responses[0].data.size();
  std::vector<double> fused(n);
  for (std::size_t i = 0; i < n; ++i) {
    double m = responses[0].data[i];
    for (std::size_t r = 1; r < responses.size(); ++r) m = std::max(m, responses[r].data[i]);
    fused[i] = m;
  }

  double lo = fused[0], hi = fused[0];
  for (double v : fused) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  GrayImage out(responses[0].width, responses[0].height);
  if (hi - lo < 1e-12) {
    for (std::uint8_t& v : out.data) v = 128;
    return out;
  }
  const double scale = 255.0 / (hi - lo);
  for (std::size_t i = 0; i < n; ++i) {
    long v = std::lround((fused[i] - lo) * scale);
    if (v < 0) v = 0;
    if (v > 255) v = 255;
    out.data[i] = static_cast<std::uint8_t>(v);
  }
  return out;
}

} // namespace ridgekit
