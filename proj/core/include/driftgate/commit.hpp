#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace driftgate {

inline constexpr int kFeatureCount = 14;

// Change-level metrics in canonical column order.
extern const std::array<const char*, kFeatureCount> kFeatureNames;

using Features = std::array<double, kFeatureCount>;

enum class Label : std::uint8_t { clean = 0, defect = 1 };

constexpr Label other(Label l) {
  return l == Label::clean ? Label::defect : Label::clean;
}

constexpr const char* to_string(Label l) {
  return l == Label::clean ? "clean" : "defect";
}

struct CommitInstance {
  std::int64_t id = 0;
  std::int64_t commit_time = 0;  // unix seconds
  Features features{};
  Label true_label = Label::clean;
  // Present iff true_label == defect: when the defect was fixed.
  std::optional<std::int64_t> fix_time;
};

struct CommitStream {
  std::vector<CommitInstance> instances;
  std::string source_name;
  // End of the observation window. Loaders and generators set it to the last
  // commit time; tail truncation keeps the original anchor so repeated
  // truncations measure from the same point.
  std::int64_t span_end = 0;

  bool empty() const { return instances.empty(); }
  std::size_t size() const { return instances.size(); }
};

// Enforces the stream invariants (sorted times, unique ids, finite features,
// fix_time present exactly for defects and never before the commit).
// Throws Error with a 1-based row index on the first violation.
void validate_stream(const CommitStream& stream);

}  // namespace driftgate
