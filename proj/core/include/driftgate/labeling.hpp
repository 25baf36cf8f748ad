#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <unordered_set>
#include <vector>

#include "driftgate/commit.hpp"
#include "driftgate/learners_base.hpp"
#include "driftgate/rng.hpp"

namespace driftgate {

enum class LabelingMode { ideal, non_hitl, hitl };

const char* to_string(LabelingMode mode);
bool labeling_mode_from_string(const std::string& text, LabelingMode& out);

inline constexpr std::int64_t kSecondsPerDay = 86400;
// Sentinel for an unbounded BFC waiting window.
inline constexpr std::int64_t kForever = INT64_MAX;

struct LabelingConfig {
  LabelingMode mode = LabelingMode::hitl;
  std::int64_t w_qa = 7 * kSecondsPerDay;
  std::int64_t w_bfc = 15 * kSecondsPerDay;
  // SQA verdicts are ground truth by default; the knob exists for
  // sensitivity studies.
  double sqa_error_rate = 0.0;
};

void validate(const LabelingConfig& cfg);

enum class LabelSource { sqa, bfc_fix, bfc_timeout, ideal };

const char* to_string(LabelSource source);

struct ObservedLabel {
  std::int64_t commit_id = 0;
  Label label = Label::clean;
  std::int64_t available_time = 0;
  LabelSource source = LabelSource::ideal;
};

enum class QueueSide { positive, negative };

struct PendingEntry {
  std::int64_t commit_id = 0;
  Label routing_prediction = Label::clean;
  std::int64_t due_time = 0;
  QueueSide queue = QueueSide::negative;
  ObservedLabel label;  // resolved outcome, revealed at due_time
};

std::int64_t saturating_add(std::int64_t a, std::int64_t b);

// Resolves what label a commit will receive and when. Needs rng only when
// sqa_error_rate > 0 routes through a fallible inspector.
ObservedLabel schedule_label(const CommitInstance& commit,
                             Label routing_prediction,
                             const LabelingConfig& cfg,
                             SplitMix64* rng = nullptr);

PendingEntry make_pending(const CommitInstance& commit,
                          Label routing_prediction, const LabelingConfig& cfg,
                          SplitMix64* rng = nullptr);

// Per-fold discrete-event queue over the simulated timeline: predicted
// positives wait on SQA, the rest wait on a bug-fixing commit or time out.
class LabelDelayEngine {
 public:
  LabelDelayEngine(LabelingConfig cfg, std::uint64_t seed);

  void submit(const CommitInstance& commit, Label routing_prediction);
  void push_pending(const PendingEntry& entry);

  // All labels with available_time <= now, ordered by (time, commit_id).
  // now must not decrease across calls.
  std::vector<ObservedLabel> due_labels(std::int64_t now);
  std::vector<ObservedLabel> drain_all();

  std::size_t pending_count() const { return pending_.size(); }
  const LabelingConfig& config() const { return cfg_; }

 private:
  LabelingConfig cfg_;
  SplitMix64 rng_;
  std::map<std::pair<std::int64_t, std::int64_t>, ObservedLabel> pending_;
  std::unordered_set<std::int64_t> seen_;
  std::int64_t last_now_ = INT64_MIN;
};

struct NoiseRates {
  double overall = 0.0;
  double on_defects = 0.0;
};

// Fraction of observed labels that disagree with ground truth.
NoiseRates label_noise_rate(std::span<const ObservedLabel> labels,
                            const CommitStream& truth);

}  // namespace driftgate
