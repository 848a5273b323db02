#pragma once
#include <string>
#include <vector>

#include "ridgekit/image.hpp"
#include "ridgekit/minutiae.hpp"

namespace ridgekit {

/// Full per-image pipeline configuration. CLI flags override config-file values,
/// which override these defaults.
struct PipelineConfig {
  std::string sensor = "optical"; // "camera" | "optical"
  int kernel_size = 21;
  int threads = 1;
  int clahe_cols = 8, clahe_rows = 8;
  double clip_limit = 2.0;
  int block_size = 16;
  int smooth_passes = 2;
  double std_threshold = 10.0;
  int crop_width = 800, crop_height = 700;
  std::string mirror = "auto";   // "on" | "off" | "auto" (auto: on for camera)
  int fill = 255;
  double freq = 0.1;
  double variance = 16.0;
  std::string prescale = "off";  // "on" | "off" | "auto" (auto: on for camera)
  double target_ridge_period = 10.0;
  int binarize_window = 25;
  int border_px = 10;
  int merge_px = 5;
  std::string debug_dir;         // dump numbered intermediates when non-empty

  bool mirror_enabled() const {
    return mirror == "on" || (mirror == "auto" && sensor == "camera");
  }
  bool prescale_enabled() const {
    return prescale == "on" || (prescale == "auto" && sensor == "camera");
  }
  std::string describe() const;
};

/// Runs the staged pipeline on pre-loaded grayscale frames (2-9 frames are
/// exposure-merged first). Errors carry the failing stage's name.
MinutiaTemplate run_pipeline_frames(const std::vector<GrayImage>& frames,
                                    const PipelineConfig& cfg);

/// File-path front end: loads each input (RGB inputs are converted to
/// grayscale), then runs run_pipeline_frames.
MinutiaTemplate run_pipeline(const std::vector<std::string>& inputs, const PipelineConfig& cfg);

void run_pipeline_to_file(const std::vector<std::string>& inputs, const PipelineConfig& cfg,
                          const std::string& out_path);

} // namespace ridgekit
