#pragma once
#include <vector>

#include "ridgekit/image.hpp"

namespace ridgekit {

struct GaborParams {
  int size = 21;          // odd kernel side length, >= 3
  double theta = 0.0;     // orientation, radians
  double freq = 0.1;      // texture frequency, cycles/pixel
  double variance = 16.0; // Gaussian spread term in the exponent denominator (px^2)
  double psi = 0.0;       // phase offset, radians
  double gamma = 1.0;     // spatial aspect ratio
  double norm_b = 1.0;    // cosine normalizing factor
  double norm_c = 1.0;    // sine normalizing factor
};

/// Sampled cosine/sine kernel grids. Entry (i,j), i,j in [-(k-1)/2, +(k-1)/2],
/// lives at row (j + h), column (i + h). The cosine grid is mean-subtracted so
/// constant regions produce zero response.
struct GaborKernel {
  GaborParams params;
  std::vector<double> cosine; // size k*k
  std::vector<double> sine;   // size k*k

  int size() const { return params.size; }
  int half() const { return (params.size - 1) / 2; }
  double cos_at(int i, int j) const {
    return cosine[static_cast<std::size_t>(j + half()) * params.size + (i + half())];
  }
  double sin_at(int i, int j) const {
    return sine[static_cast<std::size_t>(j + half()) * params.size + (i + half())];
  }
};

/// 16 kernels at theta = m*pi/16, m = 0..15, sharing size/freq/variance.
struct KernelBank {
  std::vector<GaborKernel> kernels;
};

GaborKernel make_kernel(const GaborParams& params);
KernelBank make_bank(int size, double freq, double variance);

/// Cross-correlation with the anchor at the kernel center; out-of-bounds source
/// pixels use replicated-border extension. Output is unclamped.
RealImage convolve(const GrayImage& img, const std::vector<double>& kernel, int kernel_size);

/// Convolves the bank's cosine grids. Bit-identical to the sequential loop for
/// any thread count: each output pixel is computed wholly by one worker.
std::vector<RealImage> convolve_parallel(const GrayImage& img, const KernelBank& bank,
                                         int threads);

/// Per-pixel maximum of the responses, rescaled affinely to [0,255]
/// (a constant response maps to all-128).
GrayImage fuse_responses(const std::vector<RealImage>& responses);

} // namespace ridgekit
