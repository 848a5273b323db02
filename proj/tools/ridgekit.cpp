// ridgekit: finger-photo to fingerprint-template pipeline, matcher and
// evaluation harness.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "ridgekit/align.hpp"
#include "ridgekit/clahe.hpp"
#include "ridgekit/eval.hpp"
#include "ridgekit/matcher.hpp"
#include "ridgekit/pipeline.hpp"

namespace rk = ridgekit;
namespace fs = std::filesystem;

namespace {

constexpr const char* kFooter =
    "Input formats: binary PGM (P5), binary PPM (P6), 8-bit PNG.\n"
    "FVC datasets ship as TIFF; convert once before use, e.g.:\n"
    "  for f in *.tif; do convert \"$f\" \"${f%.tif}.pgm\"; done   (ImageMagick)\n";

std::pair<int, int> parse_pair(const std::string& text, char sep, const char* what) {
  const std::size_t pos = text.find(sep);
  if (pos == std::string::npos || pos == 0 || pos + 1 >= text.size())
    throw rk::ArgumentError(std::string("malformed ") + what + " '" + text + "'");
  try {
    std::size_t u1 = 0, u2 = 0;
    const int a = std::stoi(text.substr(0, pos), &u1);
    const int b = std::stoi(text.substr(pos + 1), &u2);
    if (u1 != pos || u2 != text.size() - pos - 1 || a < 1 || b < 1)
      throw rk::ArgumentError(std::string("malformed ") + what + " '" + text + "'");
    return {a, b};
  } catch (const std::logic_error&) {
    throw rk::ArgumentError(std::string("malformed ") + what + " '" + text + "'");
  }
}

struct PipelineFlags {
  rk::PipelineConfig cfg;
  std::string clahe_grid = "8x8";
  std::string crop = "800x700";
  std::string config_path;

  void attach(CLI::App* cmd, bool with_crop = true) {
    cmd->add_option("--sensor", cfg.sensor, "Input source: camera or optical")
        ->check(CLI::IsMember({"camera", "optical"}))
        ->capture_default_str();
    cmd->add_option("--kernel-size", cfg.kernel_size, "Gabor kernel side (odd)")
        ->capture_default_str();
    cmd->add_option("--threads", cfg.threads, "Convolution worker threads")
        ->capture_default_str();
    cmd->add_option("--clahe-grid", clahe_grid, "CLAHE tile grid, CxR")->capture_default_str();
    cmd->add_option("--clip-limit", cfg.clip_limit, "CLAHE clip limit (>= 1.0)")
        ->capture_default_str();
    cmd->add_option("--block-size", cfg.block_size, "Orientation block size, px")
        ->capture_default_str();
    cmd->add_option("--smooth-passes", cfg.smooth_passes, "Orientation smoothing passes")
        ->capture_default_str();
    cmd->add_option("--freq", cfg.freq, "Gabor frequency, cycles/px")->capture_default_str();
    cmd->add_option("--variance", cfg.variance, "Gabor Gaussian spread, px^2")
        ->capture_default_str();
    if (with_crop) {
      cmd->add_option("--crop", crop, "Core-centered crop, WxH")->capture_default_str();
      cmd->add_option("--mirror", cfg.mirror, "Left-right flip: on, off or auto")
          ->check(CLI::IsMember({"on", "off", "auto"}))
          ->capture_default_str();
      cmd->add_option("--fill", cfg.fill, "Crop fill intensity")->check(CLI::Range(0, 255))
          ->capture_default_str();
      cmd->add_option("--prescale", cfg.prescale,
                      "Resample to the target ridge period: on, off or auto")
          ->check(CLI::IsMember({"on", "off", "auto"}))
          ->capture_default_str();
      cmd->add_option("--target-period", cfg.target_ridge_period,
                      "Target ridge period after prescale, px")
          ->capture_default_str();
    }
    cmd->add_option("--debug-dir", cfg.debug_dir, "Dump numbered stage images here");
    cmd->add_option("--config", config_path,
                    "key=value file applied before the command line (flags win)");
  }

  rk::PipelineConfig resolve() {
    auto [c, r] = parse_pair(clahe_grid, 'x', "--clahe-grid");
    cfg.clahe_cols = c;
    cfg.clahe_rows = r;
    auto [w, h] = parse_pair(crop, 'x', "--crop");
    cfg.crop_width = w;
    cfg.crop_height = h;
    return cfg;
  }
};

rk::GrayImage load_gray(const std::string& path) {
  rk::LoadedImage li = rk::load_image(path);
  if (std::holds_alternative<rk::GrayImage>(li)) return std::get<rk::GrayImage>(li);
  return rk::to_grayscale(std::get<rk::RgbImage>(li));
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw rk::IoError("cannot write: " + path);
  f << text;
}

// Expands `--config FILE` into `--key=value` tokens inserted right after the
// subcommand name. Every option takes the last occurrence, so explicit
// command-line flags override the file, which overrides the built-in defaults.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);

  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      break;
    }
  }
  if (config_path.empty()) return args;

  std::ifstream f(config_path);
  if (!f) throw rk::IoError("cannot open config file: " + config_path);
  std::vector<std::string> expanded;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == first)
      throw rk::ParseError(config_path + ":" + std::to_string(lineno) +
                           ": expected key=value, got '" + line + "'");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t\r");
      return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "config")
      throw rk::ParseError(config_path + ": config files cannot nest 'config'");
    expanded.push_back("--" + key + "=" + value);
  }

  // insert after the subcommand token (the first non-flag argument)
  std::vector<std::string> merged;
  bool inserted = false;
  for (const std::string& a : args) {
    merged.push_back(a);
    if (!inserted && !a.empty() && a[0] != '-') {
      merged.insert(merged.end(), expanded.begin(), expanded.end());
      inserted = true;
    }
  }
  return merged;
}

// Deterministic ridge-like test image for benchmarking without a dataset.
rk::GrayImage synthetic_bench_image(int side) {
  rk::GrayImage img(side, side);
  std::mt19937 rng(12345);
  std::uniform_int_distribution<int> jitter(-6, 6);
  const double cx = side / 2.0, cy = side / 2.0;
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) {
      const double r = std::hypot(x - cx, y - cy);
      const double v = 128.0 + 90.0 * std::cos(2.0 * 3.14159265358979 * r / 10.0);
      int q = static_cast<int>(std::lround(v)) + jitter(rng);
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp(q, 0, 255));
    }
  return img;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"ridgekit - smartphone finger-photo enhancement, fingerprint template "
               "extraction and matching"};
  app.require_subcommand(1);
  app.footer(kFooter);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  // pipeline
  auto* cmd_pipeline = app.add_subcommand(
      "pipeline", "Run the full enhancement + extraction pipeline on 1-9 frames");
  std::vector<std::string> pipeline_inputs;
  std::string pipeline_out;
  PipelineFlags pipeline_flags;
  cmd_pipeline->add_option("inputs", pipeline_inputs, "Input image(s); 2-9 are HDR-merged")
      ->required()
      ->expected(-1);
  cmd_pipeline->add_option("--out", pipeline_out, "Output template path")->required();
  pipeline_flags.attach(cmd_pipeline);

  // hdr-merge
  auto* cmd_hdr = app.add_subcommand("hdr-merge", "Fuse 2-9 bracketed exposures into one PGM");
  std::vector<std::string> hdr_inputs;
  std::string hdr_out;
  cmd_hdr->add_option("inputs", hdr_inputs, "Bracketed frames")->required()->expected(-1);
  cmd_hdr->add_option("--out", hdr_out, "Output PGM path")->required();

  // enhance
  auto* cmd_enhance = app.add_subcommand("enhance", "Apply CLAHE to one image");
  std::string enhance_in, enhance_out, enhance_grid = "8x8";
  double enhance_clip = 2.0;
  cmd_enhance->add_option("input", enhance_in, "Input image")->required();
  cmd_enhance->add_option("--out", enhance_out, "Output PGM path")->required();
  cmd_enhance->add_option("--clahe-grid", enhance_grid, "Tile grid, CxR")->capture_default_str();
  cmd_enhance->add_option("--clip-limit", enhance_clip, "Clip limit (>= 1.0)")
      ->capture_default_str();

  // extract
  auto* cmd_extract = app.add_subcommand(
      "extract", "Extract a minutia template from an already enhanced/aligned image");
  std::string extract_in, extract_out;
  PipelineFlags extract_flags;
  cmd_extract->add_option("input", extract_in, "Enhanced ridge image")->required();
  cmd_extract->add_option("--out", extract_out, "Output template path")->required();
  extract_flags.attach(cmd_extract, /*with_crop=*/false);

  // match
  auto* cmd_match = app.add_subcommand("match", "Match two templates");
  std::string match_a, match_b;
  double match_threshold = 0.4;
  cmd_match->add_option("a", match_a, "First template (.fpt)")->required();
  cmd_match->add_option("b", match_b, "Second template (.fpt)")->required();
  cmd_match->add_option("--threshold", match_threshold, "Decision threshold on the normalized score")
      ->capture_default_str();

  // evaluate
  auto* cmd_eval = app.add_subcommand("evaluate", "FVC-protocol evaluation over a dataset");
  std::string eval_db, eval_out;
  int eval_max_fingers = 0;
  PipelineFlags eval_flags;
  cmd_eval->add_option("--db", eval_db, "Dataset directory (<finger>_<impression>.pgm)")
      ->required();
  cmd_eval->add_option("--out", eval_out, "Report directory (roc.csv, summary.txt)")->required();
  cmd_eval->add_option("--max-fingers", eval_max_fingers, "Limit to the first N fingers (0 = all)")
      ->capture_default_str();
  eval_flags.attach(cmd_eval);

  // sweep-kernel
  auto* cmd_sweepk = app.add_subcommand("sweep-kernel", "Mean genuine score per kernel size");
  std::string sweepk_db, sweepk_out;
  std::vector<int> sweepk_sizes = {15, 19, 21, 35};
  int sweepk_max_fingers = 10;
  PipelineFlags sweepk_flags;
  cmd_sweepk->add_option("--db", sweepk_db, "Dataset directory")->required();
  cmd_sweepk->add_option("--sizes", sweepk_sizes, "Odd kernel sizes")->delimiter(',')
      ->capture_default_str();
  cmd_sweepk->add_option("--max-fingers", sweepk_max_fingers, "Subset cap")
      ->capture_default_str();
  cmd_sweepk->add_option("--out", sweepk_out, "CSV path (default stdout)");
  sweepk_flags.attach(cmd_sweepk);

  // sweep-crop
  auto* cmd_sweepc = app.add_subcommand("sweep-crop", "Mean genuine score per crop size");
  std::string sweepc_db, sweepc_out;
  std::vector<std::string> sweepc_dims = {"400x350", "800x700", "1200x1050"};
  int sweepc_max_fingers = 10;
  PipelineFlags sweepc_flags;
  cmd_sweepc->add_option("--db", sweepc_db, "Dataset directory")->required();
  cmd_sweepc->add_option("--dims", sweepc_dims, "Crop dimensions, WxH")->delimiter(',')
      ->capture_default_str();
  cmd_sweepc->add_option("--max-fingers", sweepc_max_fingers, "Subset cap")
      ->capture_default_str();
  cmd_sweepc->add_option("--out", sweepc_out, "CSV path (default stdout)");
  sweepc_flags.attach(cmd_sweepc, /*with_crop=*/false);

  // bench-threads
  auto* cmd_bench = app.add_subcommand(
      "bench-threads", "Time the 16-kernel bank per thread count (bit-identity asserted)");
  std::string bench_image, bench_out;
  int bench_side = 1024, bench_kernel = 21;
  double bench_freq = 0.1, bench_variance = 16.0;
  std::vector<int> bench_counts = {1, 2, 3, 4, 5, 6, 7, 8};
  cmd_bench->add_option("--image", bench_image, "Benchmark image (default: synthetic)");
  cmd_bench->add_option("--size", bench_side, "Synthetic image side, px")->capture_default_str();
  cmd_bench->add_option("--kernel-size", bench_kernel, "Gabor kernel side (odd)")
      ->capture_default_str();
  cmd_bench->add_option("--freq", bench_freq, "Gabor frequency")->capture_default_str();
  cmd_bench->add_option("--variance", bench_variance, "Gabor Gaussian spread")
      ->capture_default_str();
  cmd_bench->add_option("--threads", bench_counts, "Thread counts to time")->delimiter(',')
      ->capture_default_str();
  cmd_bench->add_option("--out", bench_out, "CSV path (default stdout)");

  try {
    std::vector<std::string> args = expand_config_args(argc, argv);
    std::reverse(args.begin(), args.end()); // CLI11 consumes args back to front
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ridgekit: error: %s\n", e.what());
    return 2;
  }

  try {
    if (*cmd_pipeline) {
      rk::run_pipeline_to_file(pipeline_inputs, pipeline_flags.resolve(), pipeline_out);
      return 0;
    }

    if (*cmd_hdr) {
      if (hdr_inputs.size() < 2 || hdr_inputs.size() > 9)
        throw rk::ArgumentError("hdr-merge expects 2-9 frames, got " +
                                std::to_string(hdr_inputs.size()));
      std::vector<rk::GrayImage> frames;
      for (const std::string& p : hdr_inputs) frames.push_back(load_gray(p));
      rk::write_image(rk::hdr_merge(frames), hdr_out);
      return 0;
    }

    if (*cmd_enhance) {
      auto [c, r] = parse_pair(enhance_grid, 'x', "--clahe-grid");
      rk::ClaheConfig cc{c, r, enhance_clip};
      rk::write_image(rk::clahe(load_gray(enhance_in), cc), enhance_out);
      return 0;
    }

    if (*cmd_extract) {
      const rk::PipelineConfig cfg = extract_flags.resolve();
      const rk::GrayImage img = load_gray(extract_in);
      rk::OrientationField field = rk::estimate_orientation(img, cfg.block_size);
      const auto seg = rk::segment_foreground(img, cfg.block_size, cfg.std_threshold);
      for (std::size_t i = 0; i < field.mask.size(); ++i) field.mask[i] &= seg[i];
      field = rk::smooth_orientation(field, cfg.smooth_passes);
      const rk::BinaryImage skel = rk::thin(rk::binarize_adaptive(img, cfg.binarize_window));
      rk::MinutiaTemplate tpl = rk::extract_minutiae(skel, field);
      tpl = rk::filter_minutiae(tpl, field, cfg.border_px, cfg.merge_px);
      rk::write_template(tpl, extract_out);
      return 0;
    }

    if (*cmd_match) {
      rk::MatcherConfig mcfg;
      mcfg.threshold = match_threshold;
      const rk::MatchResult res =
          rk::match_templates(rk::read_template(match_a), rk::read_template(match_b), mcfg);
      std::printf("score=%d normalized=%.4f decision=%s\n", res.score, res.normalized,
                  res.decision ? "match" : "nomatch");
      return res.decision ? 0 : 1;
    }

    if (*cmd_eval) {
      const rk::PipelineConfig cfg = eval_flags.resolve();
      const rk::ScoreSet scores = rk::fvc_protocol(eval_db, cfg, {}, eval_max_fingers);
      rk::EvalReport report = rk::compute_roc(scores);
      report.metadata = cfg.describe();
      fs::create_directories(eval_out);
      write_text(eval_out + "/roc.csv", rk::roc_csv(report));
      std::ostringstream summary;
      summary << "genuine_comparisons " << scores.genuine.size() << "\n"
              << "impostor_comparisons " << scores.impostor.size() << "\n";
      char line[96];
      std::snprintf(line, sizeof(line), "eer %.6f\neer_threshold %.4f\n", report.eer,
                    report.eer_threshold);
      summary << line << "config " << report.metadata << "\n";
      write_text(eval_out + "/summary.txt", summary.str());
      std::printf("EER %.2f%% over %zu genuine / %zu impostor comparisons; report in %s\n",
                  100.0 * report.eer, scores.genuine.size(), scores.impostor.size(),
                  eval_out.c_str());
      return 0;
    }

    if (*cmd_sweepk) {
      write_text(sweepk_out, rk::sweep_kernel_csv(sweepk_db, sweepk_sizes, sweepk_flags.resolve(),
                                                  {}, sweepk_max_fingers));
      return 0;
    }

    if (*cmd_sweepc) {
      write_text(sweepc_out, rk::sweep_crop_csv(sweepc_db, sweepc_dims, sweepc_flags.resolve(),
                                                {}, sweepc_max_fingers));
      return 0;
    }

    if (*cmd_bench) {
      const rk::GrayImage img =
          bench_image.empty() ? synthetic_bench_image(bench_side) : load_gray(bench_image);
      const rk::KernelBank bank = rk::make_bank(bench_kernel, bench_freq, bench_variance);
      write_text(bench_out, rk::bench_csv(rk::bench_threads(img, bank, bench_counts)));
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ridgekit: error: %s\n", e.what());
    return 2;
  }
  return 2;
}
