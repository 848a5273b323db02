#include <filesystem>
#include <random>

#include "doctest.h"
#include "ridgekit/align.hpp"
#include "ridgekit/pipeline.hpp"
#include "support.hpp"

using namespace ridgekit;
namespace fs = std::filesystem;

namespace {

PipelineConfig fast_config() {
  PipelineConfig cfg;
  cfg.kernel_size = 9;
  cfg.variance = 8.0;
  cfg.crop_width = 160;
  cfg.crop_height = 160;
  cfg.threads = 1;
  return cfg;
}

GrayImage test_finger(double dx = 0.0, double dy = 0.0, std::uint32_t noise_seed = 1) {
  static const testkit::FingerModel model = testkit::random_finger(321, 256, 256);
  return testkit::render_finger(model, 256, 256, dx, dy, 100.0, 128.0, noise_seed, 5.0);
}

} // namespace

TEST_CASE("run_pipeline_frames produces a usable template") {
  const MinutiaTemplate tpl = run_pipeline_frames({test_finger()}, fast_config());
  CHECK(tpl.width == 160);
  CHECK(tpl.height == 160);
  CHECK(tpl.minutiae.size() >= 4);
}

TEST_CASE("pipeline output is deterministic across runs and thread counts") {
  PipelineConfig cfg = fast_config();
  const MinutiaTemplate once = run_pipeline_frames({test_finger()}, cfg);
  const MinutiaTemplate again = run_pipeline_frames({test_finger()}, cfg);
  CHECK(format_template(once) == format_template(again));

  cfg.threads = 4;
  const MinutiaTemplate threaded = run_pipeline_frames({test_finger()}, cfg);
  CHECK(format_template(threaded) == format_template(once));
}

TEST_CASE("exposure brackets merge into a single template") {
  std::vector<GrayImage> frames;
  for (int k = 0; k < 5; ++k) {
    GrayImage f = test_finger(0.0, 0.0, 10 + k);
    // exposure jitter
    for (auto& v : f.data)
      v = static_cast<std::uint8_t>(std::clamp(static_cast<int>(v) + (k - 2) * 12, 0, 255));
    frames.push_back(std::move(f));
  }
  const MinutiaTemplate tpl = run_pipeline_frames(frames, fast_config());
  CHECK(tpl.minutiae.size() >= 4);

  CHECK_THROWS_AS(run_pipeline_frames({}, fast_config()), ArgumentError);
  CHECK_THROWS_AS(run_pipeline_frames(std::vector<GrayImage>(10, test_finger()), fast_config()),
                  ArgumentError);
}

TEST_CASE("a pre-mirrored input with the flag toggled gives the identical template") {
  const GrayImage img = test_finger();
  PipelineConfig plain = fast_config();
  plain.mirror = "off";
  PipelineConfig flipped = fast_config();
  flipped.mirror = "on";
  const MinutiaTemplate a = run_pipeline_frames({img}, plain);
  const MinutiaTemplate b = run_pipeline_frames({mirror_horizontal(img)}, flipped);
  CHECK(format_template(a) == format_template(b));
}

TEST_CASE("debug dumps never change the template") {
  const fs::path dir = fs::temp_directory_path() / "ridgekit_tests" / "debug";
  fs::remove_all(dir);
  PipelineConfig cfg = fast_config();
  const MinutiaTemplate without = run_pipeline_frames({test_finger()}, cfg);
  cfg.debug_dir = dir.string();
  const MinutiaTemplate with = run_pipeline_frames({test_finger()}, cfg);
  CHECK(format_template(with) == format_template(without));
  int pgm_count = 0;
  for (const auto& de : fs::directory_iterator(dir))
    if (de.path().extension() == ".pgm") ++pgm_count;
  CHECK(pgm_count >= 8); // every stage dumped, numbered
}

TEST_CASE("stage errors carry the stage name") {
  CHECK_THROWS_WITH_AS(run_pipeline({"/nonexistent/img.pgm"}, fast_config()),
                       doctest::Contains("load:"), Error);

  PipelineConfig cfg = fast_config();
  cfg.kernel_size = 999; // larger than the image
  CHECK_THROWS_WITH_AS(run_pipeline_frames({test_finger()}, cfg), doctest::Contains("gabor:"),
                       Error);
}

TEST_CASE("run_pipeline_to_file writes a loadable template") {
  const fs::path dir = fs::temp_directory_path() / "ridgekit_tests";
  fs::create_directories(dir);
  const fs::path img_path = dir / "finger.pgm";
  const fs::path tpl_path = dir / "finger.fpt";
  write_image(test_finger(), img_path.string());
  run_pipeline_to_file({img_path.string()}, fast_config(), tpl_path.string());
  const MinutiaTemplate tpl = read_template(tpl_path.string());
  CHECK(tpl.width == 160);
  CHECK(tpl.minutiae.size() >= 4);
}

TEST_CASE("prescale stage resamples coarse ridge patterns before filtering") {
  // ring center far off-canvas: the visible pattern is near-straight
  // period-20 stripes, which the projection estimator can measure
  testkit::FingerModel coarse;
  coarse.cx = -320.0;
  coarse.cy = 128.0;
  coarse.period = 20.0;
  std::mt19937 rng(5005);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    // outside the central estimation window so the stripes there stay periodic
    const double x = 24.0 + unit(rng) * 208.0;
    const double y = (k % 2 == 0) ? 24.0 + unit(rng) * 32.0 : 200.0 + unit(rng) * 32.0;
    coarse.dislocations.push_back({x, y, (rng() & 1) ? 1 : -1});
  }
  const GrayImage img = testkit::render_finger(coarse, 256, 256);

  PipelineConfig cfg = fast_config();
  cfg.prescale = "on";
  const MinutiaTemplate resampled = run_pipeline_frames({img}, cfg);
  CHECK(resampled.width == 160);
  CHECK(resampled.minutiae.size() >= 1);

  // a whorl centered in the estimation window has no single dominant
  // orientation; the degenerate estimate skips scaling and the pipeline
  // still completes
  testkit::FingerModel whorl = testkit::random_finger(55, 256, 256, 10);
  whorl.period = 20.0;
  const MinutiaTemplate skipped =
      run_pipeline_frames({testkit::render_finger(whorl, 256, 256)}, cfg);
  CHECK(skipped.width == 160);

  // auto mode keys off the sensor type
  cfg.prescale = "auto";
  CHECK_FALSE(cfg.prescale_enabled());
  cfg.sensor = "camera";
  CHECK(cfg.prescale_enabled());
}

TEST_CASE("camera sensor enables mirroring through the auto mode") {
  PipelineConfig cfg;
  cfg.sensor = "camera";
  CHECK(cfg.mirror_enabled());
  cfg.sensor = "optical";
  CHECK_FALSE(cfg.mirror_enabled());
  cfg.mirror = "on";
  CHECK(cfg.mirror_enabled());
  CHECK(cfg.describe().find("kernel_size=21") != std::string::npos);
}
