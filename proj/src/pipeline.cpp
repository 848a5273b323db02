#include "ridgekit/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "ridgekit/align.hpp"
#include "ridgekit/clahe.hpp"
#include "ridgekit/corepoint.hpp"
#include "ridgekit/gabor.hpp"

namespace ridgekit {

namespace {

template <typename F>
auto stage(const char* name, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(std::string(name) + ": " + e.what());
  }
}

class DebugDumper {
 public:
  explicit DebugDumper(const std::string& dir) : dir_(dir) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }
  bool enabled() const { return !dir_.empty(); }

  void dump(const std::string& tag, const GrayImage& img) {
    if (!enabled()) return;
    char prefix[8];
    std::snprintf(prefix, sizeof(prefix), "%02d_", counter_++);
    write_image(img, dir_ + "/" + prefix + tag + ".pgm");
  }

  void dump_real(const std::string& tag, const RealImage& img) {
    if (!enabled()) return;
    double lo = img.data.empty() ? 0.0 : img.data[0], hi = lo;
    for (double v : img.data) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    GrayImage g(img.width, img.height, 128);
    if (hi - lo >= 1e-12)
      for (std::size_t i = 0; i < img.data.size(); ++i)
        g.data[i] = static_cast<std::uint8_t>(std::lround(255.0 * (img.data[i] - lo) / (hi - lo)));
    dump(tag, g);
  }

  // Orientation lines over a dimmed copy, plus a crosshair at the core.
  void dump_orientation(const std::string& tag, const GrayImage& base,
                        const OrientationField& field, const CorePoint* core) {
    if (!enabled()) return;
    GrayImage g(base.width, base.height);
    for (std::size_t i = 0; i < base.data.size(); ++i)
      g.data[i] = static_cast<std::uint8_t>(128 + base.data[i] / 2);
    const double half = field.block_size * 0.4;
    for (int br = 0; br < field.rows; ++br) {
      for (int bc = 0; bc < field.cols; ++bc) {
        if (!field.foreground(bc, br)) continue;
        const double theta = field.theta_smooth[field.index(bc, br)];
        const double cx = field.block_center_x(bc), cy = field.block_center_y(br);
        for (double t = -half; t <= half; t += 0.5) {
          const int x = static_cast<int>(std::lround(cx + t * std::cos(theta)));
          const int y = static_cast<int>(std::lround(cy + t * std::sin(theta)));
          if (x >= 0 && y >= 0 && x < g.width && y < g.height) g.at(x, y) = 0;
        }
      }
    }
    if (core) {
      for (int d = -6; d <= 6; ++d) {
        if (core->x + d >= 0 && core->x + d < g.width && core->y >= 0 && core->y < g.height)
          g.at(core->x + d, core->y) = 255;
        if (core->y + d >= 0 && core->y + d < g.height && core->x >= 0 && core->x < g.width)
          g.at(core->x, core->y + d) = 255;
      }
    }
    dump(tag, g);
  }

  void dump_minutiae(const std::string& tag, const GrayImage& base, const MinutiaTemplate& tpl) {
    if (!enabled()) return;
    GrayImage g = base;
    for (const Minutia& m : tpl.minutiae) {
      for (int d = -3; d <= 3; ++d) {
        if (m.x + d >= 0 && m.x + d < g.width) g.at(m.x + d, m.y) = 0;
        if (m.y + d >= 0 && m.y + d < g.height) g.at(m.x, m.y + d) = 0;
      }
    }
    dump(tag, g);
  }

 private:
  std::string dir_;
  int counter_ = 0;
};

// Mirrors a detected core into the flipped image's own block grid.
CorePoint mirror_core(const CorePoint& core, const OrientationField& field) {
  CorePoint out = core;
  out.block_col = field.cols - 1 - core.block_col;
  out.x = field.block_center_x(out.block_col);
  return out;
}

OrientationField analyze_orientation(const GrayImage& img, const PipelineConfig& cfg) {
  OrientationField field = estimate_orientation(img, cfg.block_size);
  const std::vector<std::uint8_t> seg =
      segment_foreground(img, cfg.block_size, cfg.std_threshold);
  for (std::size_t i = 0; i < field.mask.size(); ++i) field.mask[i] &= seg[i];
  return smooth_orientation(field, cfg.smooth_passes);
}

} // namespace

std::string PipelineConfig::describe() const {
  std::ostringstream os;
  os << "sensor=" << sensor << " kernel_size=" << kernel_size << " threads=" << threads
     << " clahe=" << clahe_cols << "x" << clahe_rows << " clip_limit=" << clip_limit
     << " block_size=" << block_size << " smooth_passes=" << smooth_passes
     << " crop=" << crop_width << "x" << crop_height << " mirror=" << mirror
     << " prescale=" << prescale << " freq=" << freq << " variance=" << variance
     << " fill=" << fill;
  return os.str();
}

MinutiaTemplate run_pipeline_frames(const std::vector<GrayImage>& frames,
                                    const PipelineConfig& cfg) {
  if (frames.empty()) throw ArgumentError("pipeline: no input frames");
  if (frames.size() > 9)
    throw ArgumentError("pipeline: at most 9 exposure frames supported, got " +
                        std::to_string(frames.size()));
  DebugDumper dbg(cfg.debug_dir);

  GrayImage img = (frames.size() >= 2)
                      ? stage("hdr_merge", [&] { return hdr_merge(frames); })
                      : frames[0];
  dbg.dump("input", img);

  img = stage("clahe", [&] {
    ClaheConfig cc{cfg.clahe_cols, cfg.clahe_rows, cfg.clip_limit};
    return clahe(img, cc);
  });
  dbg.dump("clahe", img);

  if (cfg.prescale_enabled()) {
    img = stage("prescale", [&] {
      const double period = estimate_ridge_period(img);
      return prescale_to_ridge_period(img, period, cfg.target_ridge_period);
    });
    dbg.dump("prescaled", img);
  }

  const KernelBank bank =
      stage("gabor", [&] { return make_bank(cfg.kernel_size, cfg.freq, cfg.variance); });
  const std::vector<RealImage> responses =
      stage("gabor", [&] { return convolve_parallel(img, bank, cfg.threads); });
  if (dbg.enabled()) {
    for (std::size_t m = 0; m < responses.size(); ++m) {
      char tag[32];
      std::snprintf(tag, sizeof(tag), "response_%02zu", m);
      dbg.dump_real(tag, responses[m]);
    }
  }
  GrayImage enhanced = stage("gabor", [&] { return fuse_responses(responses); });
  dbg.dump("fused", enhanced);

  const OrientationField field =
      stage("orientation", [&] { return analyze_orientation(enhanced, cfg); });
  const auto core_opt = stage("corepoint", [&] { return detect_core(field); });
  if (!core_opt) throw Error("corepoint: empty foreground, no anchor for alignment");
  CorePoint core = *core_opt;
  if (dbg.enabled())
    std::fprintf(stderr, "core: (%d,%d) block (%d,%d) index %+.1f confidence %.3f\n", core.x,
                 core.y, core.block_col, core.block_row, core.index_value, core.confidence);
  dbg.dump_orientation("orientation", enhanced, field, &core);

  if (cfg.mirror_enabled()) {
    enhanced = stage("mirror", [&] { return mirror_horizontal(enhanced); });
    core = mirror_core(core, field);
    dbg.dump("mirrored", enhanced);
  }

  AlignConfig ac;
  ac.crop_width = cfg.crop_width;
  ac.crop_height = cfg.crop_height;
  ac.fill = static_cast<std::uint8_t>(cfg.fill);
  const GrayImage cropped = stage("crop", [&] { return crop_about_core(enhanced, core, ac); });
  dbg.dump("cropped", cropped);

  const BinaryImage binary =
      stage("binarize", [&] { return binarize_adaptive(cropped, cfg.binarize_window); });
  if (dbg.enabled()) {
    GrayImage g(binary.width, binary.height);
    for (std::size_t i = 0; i < binary.data.size(); ++i) g.data[i] = binary.data[i] ? 0 : 255;
    dbg.dump("binary", g);
  }

  const BinaryImage skeleton = stage("thin", [&] { return thin(binary); });
  if (dbg.enabled()) {
    GrayImage g(skeleton.width, skeleton.height);
    for (std::size_t i = 0; i < skeleton.data.size(); ++i) g.data[i] = skeleton.data[i] ? 0 : 255;
    dbg.dump("skeleton", g);
  }

  // The skeleton lives in crop coordinates; extraction needs a matching field.
  const OrientationField crop_field =
      stage("orientation", [&] { return analyze_orientation(cropped, cfg); });
  MinutiaTemplate tpl =
      stage("extract", [&] { return extract_minutiae(skeleton, crop_field); });
  tpl = stage("filter", [&] {
    return filter_minutiae(tpl, crop_field, cfg.border_px, cfg.merge_px);
  });
  dbg.dump_minutiae("minutiae", cropped, tpl);
  return tpl;
}

MinutiaTemplate run_pipeline(const std::vector<std::string>& inputs, const PipelineConfig& cfg) {
  std::vector<GrayImage> frames;
  frames.reserve(inputs.size());
  for (const std::string& path : inputs) {
    LoadedImage li = stage("load", [&] { return load_image(path); });
    if (std::holds_alternative<GrayImage>(li))
      frames.push_back(std::move(std::get<GrayImage>(li)));
    else
      frames.push_back(to_grayscale(std::get<RgbImage>(li)));
  }
  return run_pipeline_frames(frames, cfg);
}

void run_pipeline_to_file(const std::vector<std::string>& inputs, const PipelineConfig& cfg,
                          const std::string& out_path) {
  const MinutiaTemplate tpl = run_pipeline(inputs, cfg);
  stage("write_template", [&] {
    write_template(tpl, out_path);
    return 0;
  });
}

} // namespace ridgekit
