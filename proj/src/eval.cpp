#include "ridgekit/eval.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

namespace ridgekit {

namespace fs = std::filesystem;

std::vector<FvcEntry> scan_fvc_dir(const std::string& db_dir) {
  if (!fs::is_directory(db_dir)) throw IoError("not a directory: " + db_dir);

  std::vector<FvcEntry> entries;
  for (const auto& de : fs::directory_iterator(db_dir)) {
    if (!de.is_regular_file()) continue;
    const std::string ext = de.path().extension().string();
    if (ext != ".pgm" && ext != ".ppm" && ext != ".png") continue;
    const std::string stem = de.path().stem().string();
    const std::size_t sep = stem.find('_');
    bool ok = sep != std::string::npos && sep > 0 && sep + 1 < stem.size();
    FvcEntry e;
    if (ok) {
      try {
        std::size_t used1 = 0, used2 = 0;
        e.finger = std::stoi(stem.substr(0, sep), &used1);
        e.impression = std::stoi(stem.substr(sep + 1), &used2);
        ok = used1 == sep && used2 == stem.size() - sep - 1;
      } catch (const std::logic_error&) {
        ok = false;
      }
    }
    if (!ok) {
      std::cerr << "ridgekit: warning: skipping unparsable filename "
                << de.path().filename().string() << " (expected <finger>_<impression>" << ext
                << ")\n";
      continue;
    }
    e.path = de.path().string();
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw ArgumentError("no dataset images found in " + db_dir);
  std::sort(entries.begin(), entries.end(), [](const FvcEntry& a, const FvcEntry& b) {
    return a.finger != b.finger ? a.finger < b.finger : a.impression < b.impression;
  });
  return entries;
}

FvcPairs enumerate_fvc_pairs(const std::vector<FvcEntry>& entries) {
  std::map<int, std::vector<std::size_t>> by_finger;
  for (std::size_t k = 0; k < entries.size(); ++k) by_finger[entries[k].finger].push_back(k);

  if (by_finger.size() < 2)
    throw ArgumentError("FVC protocol needs at least 2 fingers, got " +
                        std::to_string(by_finger.size()));
  for (const auto& [finger, idx] : by_finger)
    if (idx.size() < 2)
      throw ArgumentError("FVC protocol needs at least 2 impressions per finger; finger " +
                          std::to_string(finger) + " has " + std::to_string(idx.size()));

  FvcPairs pairs;
  for (const auto& [finger, idx] : by_finger)
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) pairs.genuine.emplace_back(idx[a], idx[b]);

  // entries are sorted, so idx.front() is each finger's first impression
  std::vector<std::size_t> firsts;
  for (const auto& [finger, idx] : by_finger) firsts.push_back(idx.front());
  for (std::size_t a = 0; a < firsts.size(); ++a)
    for (std::size_t b = a + 1; b < firsts.size(); ++b)
      pairs.impostor.emplace_back(firsts[a], firsts[b]);
  return pairs;
}

namespace {

std::vector<FvcEntry> cap_fingers(std::vector<FvcEntry> entries, int max_fingers) {
  if (max_fingers <= 0) return entries;
  std::vector<FvcEntry> kept;
  int fingers_seen = 0, last = INT_MIN;
  for (FvcEntry& e : entries) {
    if (e.finger != last) {
      ++fingers_seen;
      last = e.finger;
    }
    if (fingers_seen > max_fingers) break;
    kept.push_back(std::move(e));
  }
  return kept;
}

ScoreSet score_entries(const std::vector<FvcEntry>& entries, const PipelineConfig& cfg,
                       const MatcherConfig& mcfg) {
  const FvcPairs pairs = enumerate_fvc_pairs(entries);

  std::vector<MinutiaTemplate> templates(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k)
    templates[k] = run_pipeline({entries[k].path}, cfg);

  ScoreSet scores;
  scores.genuine.reserve(pairs.genuine.size());
  scores.impostor.reserve(pairs.impostor.size());
  for (const auto& [a, b] : pairs.genuine)
    scores.genuine.push_back(match_templates(templates[a], templates[b], mcfg).normalized);
  for (const auto& [a, b] : pairs.impostor)
    scores.impostor.push_back(match_templates(templates[a], templates[b], mcfg).normalized);
  return scores;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

} // namespace

ScoreSet fvc_protocol(const std::string& db_dir, const PipelineConfig& cfg,
                      const MatcherConfig& mcfg, int max_fingers) {
  const std::vector<FvcEntry> entries = cap_fingers(scan_fvc_dir(db_dir), max_fingers);
  return score_entries(entries, cfg, mcfg);
}

EvalReport compute_roc(const ScoreSet& scores) {
  if (scores.genuine.empty()) throw ArgumentError("compute_roc: no genuine scores");
  if (scores.impostor.empty()) throw ArgumentError("compute_roc: no impostor scores");

  EvalReport report;
  report.roc.reserve(101);
  const double ng = static_cast<double>(scores.genuine.size());
  const double ni = static_cast<double>(scores.impostor.size());
  for (int k = 0; k <= 100; ++k) {
    const double t = k / 100.0;
    int accepts = 0, rejects = 0;
    for (double s : scores.impostor) accepts += (s >= t) ? 1 : 0;
    for (double s : scores.genuine) rejects += (s < t) ? 1 : 0;
    report.roc.push_back({t, accepts / ni, rejects / ng});
  }

  for (std::size_t k = 1; k < report.roc.size(); ++k) {
    if (report.roc[k].far > report.roc[k - 1].far + 1e-12)
      throw Error("compute_roc: FAR is not non-increasing");
    if (report.roc[k].frr + 1e-12 < report.roc[k - 1].frr)
      throw Error("compute_roc: FRR is not non-decreasing");
  }

  // First threshold where FAR falls to or below FRR; interpolate between the
  // bracketing grid points when they cross strictly.
  std::size_t k = 0;
  while (k < report.roc.size() && report.roc[k].far > report.roc[k].frr) ++k;
  if (k >= report.roc.size()) {
    report.eer = report.roc.back().far;
    report.eer_threshold = report.roc.back().threshold;
  } else if (k == 0 || report.roc[k].far == report.roc[k].frr) {
    report.eer = report.roc[k].far;
    report.eer_threshold = report.roc[k].threshold;
  } else {
    const RocPoint& p1 = report.roc[k - 1];
    const RocPoint& p2 = report.roc[k];
    const double gap1 = p1.far - p1.frr; // > 0
    const double gap2 = p2.frr - p2.far; // > 0
    const double lambda = gap1 / (gap1 + gap2);
    report.eer = p1.far + lambda * (p2.far - p1.far);
    report.eer_threshold = p1.threshold + lambda * (p2.threshold - p1.threshold);
  }
  return report;
}

std::string roc_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "threshold,far,frr\n";
  char buf[96];
  for (const RocPoint& p : report.roc) {
    std::snprintf(buf, sizeof(buf), "%.2f,%.6f,%.6f\n", p.threshold, p.far, p.frr);
    os << buf;
  }
  return os.str();
}

std::string sweep_kernel_csv(const std::string& db_dir, const std::vector<int>& sizes,
                             PipelineConfig cfg, const MatcherConfig& mcfg, int max_fingers) {
  if (sizes.empty()) throw ArgumentError("sweep_kernel: empty size list");
  for (int s : sizes)
    if (s % 2 == 0)
      throw ArgumentError("sweep_kernel: kernel sizes must be odd, got " + std::to_string(s));

  std::vector<int> sorted = sizes;
  std::sort(sorted.begin(), sorted.end());
  const std::vector<FvcEntry> entries = cap_fingers(scan_fvc_dir(db_dir), max_fingers);

  std::ostringstream os;
  os << "size,mean_score\n";
  char buf[64];
  for (int s : sorted) {
    cfg.kernel_size = s;
    const ScoreSet scores = score_entries(entries, cfg, mcfg);
    std::snprintf(buf, sizeof(buf), "%d,%.6f\n", s, mean_of(scores.genuine));
    os << buf;
  }
  return os.str();
}

std::string sweep_crop_csv(const std::string& db_dir, const std::vector<std::string>& dims,
                           PipelineConfig cfg, const MatcherConfig& mcfg, int max_fingers) {
  if (dims.empty()) throw ArgumentError("sweep_crop: empty dimension list");

  struct Dim {
    int w, h;
    std::string text;
  };
  std::vector<Dim> parsed;
  for (const std::string& d : dims) {
    const std::size_t sep = d.find('x');
    bool ok = sep != std::string::npos && sep > 0 && sep + 1 < d.size();
    int w = 0, h = 0;
    if (ok) {
      try {
        std::size_t u1 = 0, u2 = 0;
        w = std::stoi(d.substr(0, sep), &u1);
        h = std::stoi(d.substr(sep + 1), &u2);
        ok = u1 == sep && u2 == d.size() - sep - 1 && w >= 1 && h >= 1;
      } catch (const std::logic_error&) {
        ok = false;
      }
    }
    if (!ok) throw ArgumentError("sweep_crop: malformed dimensions '" + d + "' (expected WxH)");
    parsed.push_back({w, h, d});
  }
  std::sort(parsed.begin(), parsed.end(), [](const Dim& a, const Dim& b) {
    const long long aa = static_cast<long long>(a.w) * a.h, bb = static_cast<long long>(b.w) * b.h;
    if (aa != bb) return aa < bb;
    return a.w < b.w;
  });

  const std::vector<FvcEntry> entries = cap_fingers(scan_fvc_dir(db_dir), max_fingers);

  std::ostringstream os;
  os << "dims,mean_score\n";
  char buf[96];
  for (const Dim& d : parsed) {
    cfg.crop_width = d.w;
    cfg.crop_height = d.h;
    const ScoreSet scores = score_entries(entries, cfg, mcfg);
    std::snprintf(buf, sizeof(buf), "%s,%.6f\n", d.text.c_str(), mean_of(scores.genuine));
    os << buf;
  }
  return os.str();
}

std::vector<BenchRow> bench_threads(const GrayImage& img, const KernelBank& bank,
                                    const std::vector<int>& thread_counts) {
  if (img.width < 512 || img.height < 512)
    throw ArgumentError("bench_threads: image must be at least 512x512 for meaningful timing");
  if (thread_counts.empty()) throw ArgumentError("bench_threads: empty thread-count list");

  const std::vector<RealImage> reference = convolve_parallel(img, bank, 1);
  auto identical = [&](const std::vector<RealImage>& out) {
    if (out.size() != reference.size()) return false;
    for (std::size_t m = 0; m < out.size(); ++m)
      if (std::memcmp(out[m].data.data(), reference[m].data.data(),
                      reference[m].data.size() * sizeof(double)) != 0)
        return false;
    return true;
  };

  std::vector<BenchRow> rows;
  for (int t : thread_counts) {
    double times[3];
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const std::vector<RealImage> out = convolve_parallel(img, bank, t);
      const auto t1 = std::chrono::steady_clock::now();
      times[rep] = std::chrono::duration<double, std::milli>(t1 - t0).count();
      if (!identical(out))
        throw Error("bench_threads: output at " + std::to_string(t) +
                    " threads differs from the 1-thread run (determinism bug)");
    }
    std::sort(times, times + 3);
    rows.push_back({t, times[1]});
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "threads,wall_ms\n";
  char buf[64];
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.3f\n", r.threads, r.wall_ms);
    os << buf;
  }
  return os.str();
}

} // namespace ridgekit
