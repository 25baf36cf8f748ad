#include "driftgate/commit.hpp"

#include <cmath>
#include <unordered_set>

#include "driftgate/error.hpp"

namespace driftgate {

const std::array<const char*, kFeatureCount> kFeatureNames = {
    "ns",       "nd",   "nf",  "entropy", "la",  "ld",   "lt",
    "fix_flag", "ndev", "age", "nuc",     "exp", "rexp", "sexp"};

void validate_stream(const CommitStream& stream) {
  if (stream.instances.empty())
    raise(ErrorKind::empty_stream, "commit stream has no instances");

  std::unordered_set<std::int64_t> seen_ids;
  seen_ids.reserve(stream.instances.size());
  std::int64_t prev_time = stream.instances.front().commit_time;

  for (std::size_t i = 0; i < stream.instances.size(); ++i) {
    const CommitInstance& c = stream.instances[i];
    const std::int64_t row = static_cast<std::int64_t>(i) + 1;

    if (c.commit_time < prev_time)
      raise(ErrorKind::unsorted_timestamps,
            "commit_time decreases at id " + std::to_string(c.id), row);
    prev_time = c.commit_time;

    if (!seen_ids.insert(c.id).second)
      raise(ErrorKind::duplicate_id, "duplicate commit id " + std::to_string(c.id),
            row);

    for (int f = 0; f < kFeatureCount; ++f)
      if (!std::isfinite(c.features[static_cast<std::size_t>(f)]))
        raise(ErrorKind::non_finite,
              std::string("feature ") + kFeatureNames[static_cast<std::size_t>(f)] +
                  " is not finite",
              row);

    const bool is_defect = c.true_label == Label::defect;
    if (is_defect != c.fix_time.has_value())
      raise(ErrorKind::label_fix_mismatch,
            is_defect ? "defect without fix_time" : "clean commit with fix_time",
            row);
    if (c.fix_time && *c.fix_time < c.commit_time)
      raise(ErrorKind::fix_before_commit,
            "fix_time precedes commit_time for id " + std::to_string(c.id), row);
  }

  if (stream.span_end < stream.instances.back().commit_time)
    raise(ErrorKind::bad_field, "span_end precedes the last commit");
}

}  // namespace driftgate
