#include "ridgekit/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ridgekit {

namespace {

// Reads one whitespace-separated header token, skipping '#' comment lines.
std::string next_token(std::istream& is) {
  std::string tok;
  int c;
  while ((c = is.peek()) != EOF) {
    if (c == '#') {
      std::string line;
      std::getline(is, line);
      continue;
    }
    if (std::isspace(c)) {
      is.get();
      continue;
    }
    break;
  }
  while ((c = is.peek()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(is.get()));
  return tok;
}

int parse_dim(const std::string& tok, const char* what, const std::string& path) {
  if (tok.empty()) throw FormatError("truncated header (" + std::string(what) + "): " + path);
  try {
    int v = std::stoi(tok);
    if (v < 1) throw FormatError(std::string("invalid ") + what + " '" + tok + "': " + path);
    return v;
  } catch (const std::logic_error&) {
    throw FormatError(std::string("invalid ") + what + " '" + tok + "': " + path);
  }
}

LoadedImage load_pnm(std::ifstream& f, const std::string& magic, const std::string& path) {
  const bool color = (magic == "P6");
  const int w = parse_dim(next_token(f), "width", path);
  const int h = parse_dim(next_token(f), "height", path);
  const std::string maxval = next_token(f);
  if (maxval != "255")
    throw FormatError("unsupported maxval '" + maxval + "' (only 255): " + path);
  f.get(); // single whitespace byte after the header

  const std::size_t n = static_cast<std::size_t>(w) * h * (color ? 3 : 1);
  std::vector<std::uint8_t> bytes(n);
  f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(f.gcount()) != n)
    throw FormatError("truncated " + magic + " pixel data (expected " + std::to_string(n) +
                      " bytes): " + path);

  if (color) {
    RgbImage img(w, h);
    img.data = std::move(bytes);
    return img;
  }
  GrayImage img(w, h);
  img.data = std::move(bytes);
  return img;
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* fp = nullptr;
  ~PngReader() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

LoadedImage load_png(const std::string& path) {
  PngReader r;
  r.fp = std::fopen(path.c_str(), "rb");
  if (!r.fp) throw IoError("cannot open: " + path);
  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  r.info = png_create_info_struct(r.png);
  if (!r.png || !r.info) throw IoError("libpng init failed: " + path);
  if (setjmp(png_jmpbuf(r.png))) throw FormatError("PNG decode failed: " + path);

  png_init_io(r.png, r.fp);
  png_read_info(r.png, r.info);

  const int bit_depth = png_get_bit_depth(r.png, r.info);
  const int color_type = png_get_color_type(r.png, r.info);
  if (bit_depth == 16)
    throw FormatError("unsupported PNG bit depth 16 (only 8-bit): " + path);

  // Normalize to 8-bit gray or RGB.
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
  if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
  png_set_strip_alpha(r.png);
  png_read_update_info(r.png, r.info);

  const int w = static_cast<int>(png_get_image_width(r.png, r.info));
  const int h = static_cast<int>(png_get_image_height(r.png, r.info));
  const int channels = png_get_channels(r.png, r.info);
  if (channels != 1 && channels != 3)
    throw FormatError("unsupported PNG channel count " + std::to_string(channels) + ": " + path);

  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * channels);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[y] = bytes.data() + static_cast<std::size_t>(y) * w * channels;
  png_read_image(r.png, rows.data());
  png_read_end(r.png, nullptr);

  if (channels == 1) {
    GrayImage img(w, h);
    img.data = std::move(bytes);
    return img;
  }
  RgbImage img(w, h);
  img.data = std::move(bytes);
  return img;
}

} // namespace

LoadedImage load_image(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  char sig[2] = {0, 0};
  f.read(sig, 2);
  if (f.gcount() == 2 && sig[0] == 'P' && (sig[1] == '5' || sig[1] == '6')) {
    return load_pnm(f, std::string("P") + sig[1], path);
  }
  if (f.gcount() == 2 && static_cast<unsigned char>(sig[0]) == 0x89 && sig[1] == 'P') {
    f.close();
    return load_png(path);
  }
  std::string header(sig, static_cast<std::size_t>(std::max<std::streamsize>(f.gcount(), 0)));
  throw FormatError("unsupported format (header '" + header + "'): " + path);
}

void write_image(const GrayImage& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write: " + path);
  f << "P5\n" << img.width << " " << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.data.data()),
          static_cast<std::streamsize>(img.data.size()));
  if (!f) throw IoError("write failed: " + path);
}

void write_ppm(const RgbImage& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write: " + path);
  f << "P6\n" << img.width << " " << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.data.data()),
          static_cast<std::streamsize>(img.data.size()));
  if (!f) throw IoError("write failed: " + path);
}

GrayImage to_grayscale(const RgbImage& img) {
  GrayImage out(img.width, img.height);
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] +
                     0.114 * img.data[3 * i + 2];
    long v = std::lround(y);
    if (v < 0) v = 0;
    if (v > 255) v = 255;
    out.data[i] = static_cast<std::uint8_t>(v);
  }
  return out;
}

GrayImage hdr_merge(const std::vector<GrayImage>& frames) {
  if (frames.size() < 2)
    throw ArgumentError("hdr_merge needs at least 2 frames, got " + std::to_string(frames.size()));
  for (std::size_t k = 1; k < frames.size(); ++k)
    if (!frames[k].same_size(frames[0]))
      throw DimensionError("hdr_merge frame " + std::to_string(k) + " is " +
                           std::to_string(frames[k].width) + "x" + std::to_string(frames[k].height) +
                           ", expected " + std::to_string(frames[0].width) + "x" +
                           std::to_string(frames[0].height));

  // Well-exposedness weights: Gaussian around mid-gray, sigma 0.2 in [0,1] units.
  double weight[256];
  for (int v = 0; v < 256; ++v) {
    const double d = v / 255.0 - 0.5;
    weight[v] = std::exp(-(d * d) / (2.0 * 0.2 * 0.2));
  }

  GrayImage out(frames[0].width, frames[0].height);
  const std::size_t n = out.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    double wsum = 0.0, acc = 0.0, plain = 0.0;
    for (const GrayImage& fr : frames) {
      const std::uint8_t v = fr.data[i];
      wsum += weight[v];
      acc += weight[v] * v;
      plain += v;
    }
    const double value = (wsum < 1e-9) ? plain / static_cast<double>(frames.size()) : acc / wsum;
    out.data[i] = static_cast<std::uint8_t>(std::lround(value));
  }
  return out;
}

GrayImage crop_roi(const GrayImage& img, const Roi& roi, std::uint8_t fill) {
  if (roi.width < 1 || roi.height < 1)
    throw ArgumentError("crop_roi needs a non-empty ROI");
  GrayImage out(roi.width, roi.height, fill);
  for (int y = 0; y < roi.height; ++y) {
    const int sy = roi.y0 + y;
    if (sy < 0 || sy >= img.height) continue;
    for (int x = 0; x < roi.width; ++x) {
      const int sx = roi.x0 + x;
      if (sx < 0 || sx >= img.width) continue;
      out.at(x, y) = img.at(sx, sy);
    }
  }
  return out;
}

} // namespace ridgekit
