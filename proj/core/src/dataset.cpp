#include "driftgate/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "driftgate/error.hpp"
#include "driftgate/format.hpp"
#include "driftgate/rng.hpp"

namespace driftgate {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::string csv_header() {
  std::string h = "id,commit_time";
  for (const char* name : kFeatureNames) {
    h += ',';
    h += name;
  }
  h += ",label,fix_time";
  return h;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

CommitStream load_commit_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::io_error, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    raise(ErrorKind::missing_column, "empty file, expected header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> expected = split_row(csv_header());
  const std::vector<std::string> got = split_row(line);
  for (const std::string& col : expected)
    if (std::find(got.begin(), got.end(), col) == got.end())
      raise(ErrorKind::missing_column, "header lacks column '" + col + "'");
  if (got != expected)
    raise(ErrorKind::missing_column,
          "header columns out of order; expected '" + csv_header() + "'");

  CommitStream stream;
  stream.source_name = path;

  std::int64_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const std::vector<std::string> f = split_row(line);
    if (f.size() != expected.size())
      raise(ErrorKind::bad_field,
            "expected " + std::to_string(expected.size()) + " fields, got " +
                std::to_string(f.size()),
            row);

    CommitInstance c;
    if (!parse_int(f[0], c.id)) raise(ErrorKind::bad_field, "bad id '" + f[0] + "'", row);
    if (!parse_int(f[1], c.commit_time))
      raise(ErrorKind::bad_field, "bad commit_time '" + f[1] + "'", row);
    for (int i = 0; i < kFeatureCount; ++i) {
      const std::string& field = f[static_cast<std::size_t>(2 + i)];
      double v = 0.0;
      if (!parse_double(field, v))
        raise(ErrorKind::bad_field,
              std::string("bad ") + kFeatureNames[static_cast<std::size_t>(i)] +
                  " '" + field + "'",
              row);
      if (!std::isfinite(v))
        raise(ErrorKind::non_finite,
              std::string("feature ") + kFeatureNames[static_cast<std::size_t>(i)] +
                  " is not finite",
              row);
      c.features[static_cast<std::size_t>(i)] = v;
    }
    const std::string& label = f[2 + kFeatureCount];
    if (label == "0") {
      c.true_label = Label::clean;
    } else if (label == "1") {
      c.true_label = Label::defect;
    } else {
      raise(ErrorKind::bad_field, "bad label '" + label + "'", row);
    }
    const std::string& fix = f[3 + kFeatureCount];
    if (!fix.empty()) {
      std::int64_t t = 0;
      if (!parse_int(fix, t)) raise(ErrorKind::bad_field, "bad fix_time '" + fix + "'", row);
      c.fix_time = t;
    }
    stream.instances.push_back(c);
  }

  if (stream.instances.empty())
    raise(ErrorKind::empty_stream, "no data rows in " + path);
  stream.span_end = stream.instances.back().commit_time;
  // Tolerate ties; reject regressions before full validation for a precise row.
  validate_stream(stream);
  return stream;
}

void write_commit_stream(const CommitStream& stream, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::io_error, "cannot write " + path);
  out << csv_header() << '\n';
  for (const CommitInstance& c : stream.instances) {
    out << c.id << ',' << c.commit_time;
    for (double v : c.features) out << ',' << format_double(v);
    out << ',' << (c.true_label == Label::defect ? '1' : '0') << ',';
    if (c.fix_time) out << *c.fix_time;
    out << '\n';
  }
  if (!out) raise(ErrorKind::io_error, "write failed for " + path);
}

CommitStream truncate_tail(const CommitStream& stream, std::int64_t cutoff_s) {
  if (cutoff_s < 0) raise(ErrorKind::bad_config, "cutoff must be >= 0");
  if (stream.instances.empty())
    raise(ErrorKind::empty_stream, "cannot truncate an empty stream");

  const std::int64_t threshold = stream.span_end - cutoff_s;
  CommitStream out;
  out.source_name = stream.source_name;
  out.span_end = stream.span_end;
  for (const CommitInstance& c : stream.instances)
    if (c.commit_time <= threshold) out.instances.push_back(c);
  if (out.instances.empty())
    raise(ErrorKind::empty_result, "tail cutoff removed every instance");
  return out;
}

Features SynthSpec::default_defect_mean() {
  Features m{};
  m[3] = 1.0;  // entropy
  m[4] = 1.0;  // la
  m[5] = 1.0;  // ld
  m[8] = 1.0;  // ndev
  return m;
}

CommitStream synth_stream(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.n_instances == 0) raise(ErrorKind::bad_config, "n_instances must be > 0");
  if (!(spec.defect_rate > 0.0) || !(spec.defect_rate < 1.0))
    raise(ErrorKind::bad_config, "defect_rate must be in (0, 1)");
  if (!(spec.fix_delay.mean_days > 0.0))
    raise(ErrorKind::bad_config, "fix delay mean must be > 0");
  if (!(spec.inter_arrival_mean_s > 0.0))
    raise(ErrorKind::bad_config, "inter-arrival mean must be > 0");
  if (!(spec.feature_sigma > 0.0))
    raise(ErrorKind::bad_config, "feature sigma must be > 0");
  for (std::size_t i = 1; i < spec.drift_points.size(); ++i)
    if (spec.drift_points[i].at_index <= spec.drift_points[i - 1].at_index)
      raise(ErrorKind::bad_config, "drift points must have increasing indices");

  SplitMix64 rng(seed);
  CommitStream stream;
  stream.source_name = "synth";
  stream.instances.reserve(spec.n_instances);

  Features clean_mean = spec.clean_mean;
  Features defect_mean = spec.defect_mean;
  std::size_t next_drift = 0;

  double now = static_cast<double>(spec.start_time);
  for (std::size_t i = 0; i < spec.n_instances; ++i) {
    while (next_drift < spec.drift_points.size() &&
           spec.drift_points[next_drift].at_index <= i) {
      clean_mean = spec.drift_points[next_drift].clean_mean;
      defect_mean = spec.drift_points[next_drift].defect_mean;
      ++next_drift;
    }
    now += rng.exponential(spec.inter_arrival_mean_s);

    CommitInstance c;
    c.id = static_cast<std::int64_t>(i);
    c.commit_time = static_cast<std::int64_t>(std::floor(now));
    c.true_label =
        rng.next_u01() < spec.defect_rate ? Label::defect : Label::clean;
    const Features& mean =
        c.true_label == Label::defect ? defect_mean : clean_mean;
    for (int f = 0; f < kFeatureCount; ++f)
      c.features[static_cast<std::size_t>(f)] =
          rng.normal(mean[static_cast<std::size_t>(f)], spec.feature_sigma);
    if (c.true_label == Label::defect) {
      double delay_days = 0.0;
      switch (spec.fix_delay.kind) {
        case DelayKind::log_normal:
          delay_days = rng.log_normal(spec.fix_delay.mean_days,
                                      spec.fix_delay.dispersion);
          break;
        case DelayKind::exponential:
          delay_days = rng.exponential(spec.fix_delay.mean_days);
          break;
        case DelayKind::fixed:
          delay_days = spec.fix_delay.mean_days;
          break;
      }
      c.fix_time = c.commit_time + static_cast<std::int64_t>(std::llround(
                                       delay_days * kSecondsPerDay));
    }
    stream.instances.push_back(c);
  }

  stream.span_end = stream.instances.back().commit_time;
  validate_stream(stream);
  return stream;
}

StreamStats stream_stats(const CommitStream& stream) {
  if (stream.instances.empty())
    raise(ErrorKind::empty_stream, "stream_stats needs a non-empty stream");

  StreamStats s;
  s.total = stream.instances.size();
  std::size_t defects = 0;
  for (const CommitInstance& c : stream.instances)
    if (c.true_label == Label::defect) ++defects;
  s.defect_fraction = static_cast<double>(defects) / static_cast<double>(s.total);
  s.span_start = stream.instances.front().commit_time;
  s.span_end = stream.instances.back().commit_time;

  const double span_days =
      static_cast<double>(s.span_end - s.span_start) / kSecondsPerDay;
  if (span_days > 0.0) {
    s.commits_per_day = static_cast<double>(s.total) / span_days;
    s.bug_fixes_per_day = static_cast<double>(defects) / span_days;
  } else {
    s.degenerate_span = true;
    s.commits_per_day = static_cast<double>(s.total);
    s.bug_fixes_per_day = static_cast<double>(defects);
  }
  return s;
}

}  // namespace driftgate
