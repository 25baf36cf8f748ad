#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "driftgate/commit.hpp"

namespace driftgate {

enum class DelayKind { log_normal, exponential, fixed };

// Time from a defective commit to the bug-fixing commit that exposes it.
struct FixDelayDist {
  DelayKind kind = DelayKind::log_normal;
  double mean_days = 30.0;
  double dispersion = 1.0;  // sigma of log-delay for log_normal; unused otherwise
};

// Concept shift: from at_index onward, classes are centered on new means.
struct DriftPoint {
  std::size_t at_index = 0;
  Features clean_mean{};
  Features defect_mean{};
};

struct SynthSpec {
  std::size_t n_instances = 20000;
  double defect_rate = 0.3;
  FixDelayDist fix_delay{};
  std::vector<DriftPoint> drift_points;
  double inter_arrival_mean_s = 86400.0 / 9.1;
  std::int64_t start_time = 1600000000;
  Features clean_mean{};  // all zero
  Features defect_mean = default_defect_mean();
  double feature_sigma = 1.0;

  static Features default_defect_mean();
};

struct StreamStats {
  std::size_t total = 0;
  double defect_fraction = 0.0;
  double commits_per_day = 0.0;
  double bug_fixes_per_day = 0.0;
  std::int64_t span_start = 0;
  std::int64_t span_end = 0;
  // True when the stream spans zero seconds; the *_per_day fields then hold
  // raw counts instead of rates.
  bool degenerate_span = false;
};

CommitStream load_commit_stream(const std::string& path);
void write_commit_stream(const CommitStream& stream, const std::string& path);

// Drops every instance with commit_time > span_end - cutoff_s. The span
// anchor survives truncation, so applying the same cutoff twice is a no-op.
CommitStream truncate_tail(const CommitStream& stream, std::int64_t cutoff_s);

CommitStream synth_stream(const SynthSpec& spec, std::uint64_t seed);

StreamStats stream_stats(const CommitStream& stream);

}  // namespace driftgate
