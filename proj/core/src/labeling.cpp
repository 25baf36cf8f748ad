#include "driftgate/labeling.hpp"

#include <string>
#include <unordered_map>

#include "driftgate/error.hpp"

namespace driftgate {

const char* to_string(LabelingMode mode) {
  switch (mode) {
    case LabelingMode::ideal: return "ideal";
    case LabelingMode::non_hitl: return "non_hitl";
    case LabelingMode::hitl: return "hitl";
  }
  return "unknown";
}

bool labeling_mode_from_string(const std::string& text, LabelingMode& out) {
  for (LabelingMode m :
       {LabelingMode::ideal, LabelingMode::non_hitl, LabelingMode::hitl}) {
    if (text == to_string(m)) {
      out = m;
      return true;
    }
  }
  return false;
}

const char* to_string(LabelSource source) {
  switch (source) {
    case LabelSource::sqa: return "sqa";
    case LabelSource::bfc_fix: return "bfc_fix";
    case LabelSource::bfc_timeout: return "bfc_timeout";
    case LabelSource::ideal: return "ideal";
  }
  return "unknown";
}

void validate(const LabelingConfig& cfg) {
  if (cfg.w_qa < 0) raise(ErrorKind::bad_config, "w_qa must be >= 0");
  if (cfg.w_bfc < 0) raise(ErrorKind::bad_config, "w_bfc must be >= 0");
  if (cfg.sqa_error_rate < 0.0 || cfg.sqa_error_rate > 1.0)
    raise(ErrorKind::bad_config, "sqa_error_rate must be in [0, 1]");
}

std::int64_t saturating_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out))
    return b > 0 ? INT64_MAX : INT64_MIN;
  return out;
}

ObservedLabel schedule_label(const CommitInstance& commit,
                             Label routing_prediction,
                             const LabelingConfig& cfg, SplitMix64* rng) {
  validate(cfg);
  ObservedLabel out;
  out.commit_id = commit.id;

  if (cfg.mode == LabelingMode::ideal) {
    out.label = commit.true_label;
    out.available_time = commit.commit_time;
    out.source = LabelSource::ideal;
    return out;
  }

  if (cfg.mode == LabelingMode::hitl && routing_prediction == Label::defect) {
    out.label = commit.true_label;
    if (cfg.sqa_error_rate > 0.0) {
      if (rng == nullptr)
        raise(ErrorKind::bad_config,
              "sqa_error_rate > 0 requires a generator");
      if (rng->next_u01() < cfg.sqa_error_rate) out.label = other(out.label);
    }
    out.available_time = saturating_add(commit.commit_time, cfg.w_qa);
    out.source = LabelSource::sqa;
    return out;
  }

  // BFC path: the fix reveals the defect if it lands inside the waiting
  // window; otherwise the commit times out and is (perhaps wrongly)
  // declared clean.
  const std::int64_t deadline = saturating_add(commit.commit_time, cfg.w_bfc);
  if (commit.true_label == Label::defect && commit.fix_time &&
      *commit.fix_time <= deadline) {
    out.label = Label::defect;
    out.available_time = *commit.fix_time;
    out.source = LabelSource::bfc_fix;
  } else {
    out.label = Label::clean;
    out.available_time = deadline;
    out.source = LabelSource::bfc_timeout;
  }
  return out;
}

PendingEntry make_pending(const CommitInstance& commit,
                          Label routing_prediction, const LabelingConfig& cfg,
                          SplitMix64* rng) {
  PendingEntry e;
  e.commit_id = commit.id;
  e.routing_prediction = routing_prediction;
  e.label = schedule_label(commit, routing_prediction, cfg, rng);
  e.due_time = e.label.available_time;
  e.queue = cfg.mode == LabelingMode::hitl && routing_prediction == Label::defect
                ? QueueSide::positive
                : QueueSide::negative;
  return e;
}

LabelDelayEngine::LabelDelayEngine(LabelingConfig cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed) {
  validate(cfg);
}

void LabelDelayEngine::push_pending(const PendingEntry& entry) {
  if (!seen_.insert(entry.commit_id).second)
    raise(ErrorKind::duplicate_commit,
          "commit " + std::to_string(entry.commit_id) + " already pending");
  pending_.emplace(std::make_pair(entry.due_time, entry.commit_id),
                   entry.label);
}

void LabelDelayEngine::submit(const CommitInstance& commit,
                              Label routing_prediction) {
  push_pending(make_pending(commit, routing_prediction, cfg_, &rng_));
}

std::vector<ObservedLabel> LabelDelayEngine::due_labels(std::int64_t now) {
  if (now < last_now_)
    raise(ErrorKind::clock_regression,
          "due_labels clock moved backwards to " + std::to_string(now));
  last_now_ = now;

  std::vector<ObservedLabel> out;
  auto it = pending_.begin();
  while (it != pending_.end() && it->first.first <= now) {
    out.push_back(it->second);
    it = pending_.erase(it);
  }
  return out;
}

std::vector<ObservedLabel> LabelDelayEngine::drain_all() {
  std::vector<ObservedLabel> out;
  out.reserve(pending_.size());
  for (const auto& [key, label] : pending_) out.push_back(label);
  pending_.clear();
  return out;
}

NoiseRates label_noise_rate(std::span<const ObservedLabel> labels,
                            const CommitStream& truth) {
  std::unordered_map<std::int64_t, Label> true_by_id;
  true_by_id.reserve(truth.instances.size());
  for (const CommitInstance& c : truth.instances)
    true_by_id.emplace(c.id, c.true_label);

  std::size_t total = 0, noisy = 0, defects = 0, noisy_defects = 0;
  for (const ObservedLabel& l : labels) {
    auto it = true_by_id.find(l.commit_id);
    if (it == true_by_id.end())
      raise(ErrorKind::unknown_commit,
            "label references unknown commit " + std::to_string(l.commit_id));
    ++total;
    const bool wrong = l.label != it->second;
    if (wrong) ++noisy;
    if (it->second == Label::defect) {
      ++defects;
      if (wrong) ++noisy_defects;
    }
  }

  NoiseRates rates;
  if (total > 0)
    rates.overall = static_cast<double>(noisy) / static_cast<double>(total);
  if (defects > 0)
    rates.on_defects =
        static_cast<double>(noisy_defects) / static_cast<double>(defects);
  return rates;
}

}  // namespace driftgate
