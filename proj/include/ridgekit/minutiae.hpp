#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ridgekit/image.hpp"
#include "ridgekit/orientation.hpp"

namespace ridgekit {

/// 0/1 raster (1 = ridge).
struct BinaryImage {
  int width = 0, height = 0;
  std::vector<std::uint8_t> data;

  BinaryImage() = default;
  BinaryImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  // Out-of-range reads are background.
  std::uint8_t at_or0(int x, int y) const {
    return (x < 0 || y < 0 || x >= width || y >= height) ? 0 : at(x, y);
  }
};

enum class MinutiaKind { Ending, Bifurcation };

/// Angle convention: 0 along +x, counter-clockwise positive, y axis down; [0, 2pi).
struct Minutia {
  int x = 0, y = 0;
  double angle = 0.0;
  MinutiaKind kind = MinutiaKind::Ending;
};

struct MinutiaTemplate {
  int width = 0, height = 0;
  std::vector<Minutia> minutiae;
};

/// Pixel is ridge iff its intensity is below the windowed local mean minus 2
/// (replicated borders).
BinaryImage binarize_adaptive(const GrayImage& img, int window = 25);

/// Two-subcycle thinning iterated to a fixed point; the skeleton is 8-connected,
/// one pixel wide (no 2x2 all-ridge square) and preserves component connectivity.
BinaryImage thin(const BinaryImage& binary);

/// Crossing-number sweep over a 1-px skeleton. CN=1 yields an ending, CN=3 a
/// bifurcation; the angle is the block orientation lifted to the departing-ridge
/// half (endings) or the fork bisector's complement (bifurcations).
MinutiaTemplate extract_minutiae(const BinaryImage& skeleton, const OrientationField& field);

/// Drops minutiae within border_px of the image edge or a background block, then
/// repeatedly merges pairs closer than merge_px (keeping the one nearer the
/// image center; scan order ascending y then x).
MinutiaTemplate filter_minutiae(const MinutiaTemplate& tpl, const OrientationField& field,
                                int border_px = 10, int merge_px = 5);

/// Text template format (UTF-8, LF):
///   FPTEMPLATE v1
///   size <width> <height>
///   M <x> <y> <angle_deg:%.4f> <E|B>
/// Minutiae sorted by y then x; serialization is byte-stable under round trips.
std::string format_template(const MinutiaTemplate& tpl);
void write_template(const MinutiaTemplate& tpl, const std::string& path);
MinutiaTemplate read_template(const std::string& path);
MinutiaTemplate parse_template(std::istream& in, const std::string& origin);

} // namespace ridgekit
