#pragma once
#include <string>
#include <utility>
#include <vector>

#include "ridgekit/gabor.hpp"
#include "ridgekit/matcher.hpp"
#include "ridgekit/pipeline.hpp"

namespace ridgekit {

struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

struct RocPoint {
  double threshold = 0.0;
  double far = 0.0; // fraction of impostor scores >= threshold
  double frr = 0.0; // fraction of genuine scores < threshold
};

struct EvalReport {
  std::vector<RocPoint> roc;
  double eer = 0.0;
  double eer_threshold = 0.0;
  std::string metadata;
};

/// One dataset image, parsed from `<finger>_<impression>.<ext>`.
struct FvcEntry {
  int finger = 0;
  int impression = 0;
  std::string path;
};

struct FvcPairs {
  std::vector<std::pair<std::size_t, std::size_t>> genuine;  // indices into the entry list
  std::vector<std::pair<std::size_t, std::size_t>> impostor;
};

/// Scans a directory for PGM/PPM/PNG files named `<finger>_<impression>.<ext>`,
/// sorted by (finger, impression). Unparsable names are skipped with a warning;
/// an empty result is an error.
std::vector<FvcEntry> scan_fvc_dir(const std::string& db_dir);

/// FVC comparison plan: genuine = all unordered impression pairs within each
/// finger; impostor = first impression of each finger against every other
/// (each unordered pair once). Requires >= 2 fingers with >= 2 impressions each.
FvcPairs enumerate_fvc_pairs(const std::vector<FvcEntry>& entries);

/// Runs the configured pipeline on every image, then matches per the FVC plan.
/// max_fingers > 0 keeps only the first that many fingers.
ScoreSet fvc_protocol(const std::string& db_dir, const PipelineConfig& cfg,
                      const MatcherConfig& mcfg = {}, int max_fingers = 0);

/// FAR/FRR over thresholds 0.00..1.00 step 0.01, EER by linear interpolation at
/// the crossing. Monotonicity of both curves is checked on every call.
EvalReport compute_roc(const ScoreSet& scores);

std::string roc_csv(const EvalReport& report);

/// Mean genuine score per kernel size, CSV `size,mean_score` sorted by size.
/// Even sizes are rejected.
std::string sweep_kernel_csv(const std::string& db_dir, const std::vector<int>& sizes,
                             PipelineConfig cfg, const MatcherConfig& mcfg = {},
                             int max_fingers = 10);

/// Mean genuine score per crop dimension ("WxH" entries), CSV `dims,mean_score`.
std::string sweep_crop_csv(const std::string& db_dir, const std::vector<std::string>& dims,
                           PipelineConfig cfg, const MatcherConfig& mcfg = {},
                           int max_fingers = 10);

struct BenchRow {
  int threads = 0;
  double wall_ms = 0.0;
};

/// Times the full kernel bank per thread count (3 repetitions, median), after
/// asserting every output bit-identical to the 1-thread run.
std::vector<BenchRow> bench_threads(const GrayImage& img, const KernelBank& bank,
                                    const std::vector<int>& thread_counts);

std::string bench_csv(const std::vector<BenchRow>& rows);

} // namespace ridgekit
