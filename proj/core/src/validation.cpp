#include "driftgate/validation.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

#include "driftgate/error.hpp"
#include "driftgate/parallel.hpp"
#include "driftgate/rng.hpp"

namespace driftgate {

namespace {

constexpr std::uint64_t kRolePickSalt = 0x726f6c65ULL;    // "role"
constexpr std::uint64_t kFoldLearnerSalt = 0x6c72ULL;     // "lr"
constexpr std::uint64_t kSqaRngSalt = 0x737161ULL;        // "sqa"

}  // namespace

const char* to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::cross: return "cross";
    case Strategy::split: return "split";
    case Strategy::bootstrap: return "bootstrap";
  }
  return "unknown";
}

bool strategy_from_string(const std::string& text, Strategy& out) {
  for (Strategy s : {Strategy::cross, Strategy::split, Strategy::bootstrap}) {
    if (text == to_string(s)) {
      out = s;
      return true;
    }
  }
  return false;
}

void validate(const ValidationConfig& cfg) {
  if (cfg.k < 2) raise(ErrorKind::bad_config, "fold count must be >= 2");
}

FoldRoles assign_roles(const ValidationConfig& cfg,
                       std::uint64_t instance_index) {
  validate(cfg);
  const auto k = static_cast<std::size_t>(cfg.k);
  FoldRoles roles;
  roles.train_weight.assign(k, 0);
  roles.is_test.assign(k, 0);

  switch (cfg.strategy) {
    case Strategy::cross: {
      const std::uint32_t test_fold =
          counter_below(hash_combine(cfg.seed, kRolePickSalt), instance_index,
                        0, static_cast<std::uint32_t>(cfg.k));
      for (std::size_t f = 0; f < k; ++f) roles.train_weight[f] = 1;
      roles.train_weight[test_fold] = 0;
      roles.is_test[test_fold] = 1;
      break;
    }
    case Strategy::split: {
      const std::uint32_t train_fold =
          counter_below(hash_combine(cfg.seed, kRolePickSalt), instance_index,
                        0, static_cast<std::uint32_t>(cfg.k));
      for (std::size_t f = 0; f < k; ++f) roles.is_test[f] = 1;
      roles.is_test[train_fold] = 0;
      roles.train_weight[train_fold] = 1;
      break;
    }
    case Strategy::bootstrap: {
      for (std::size_t f = 0; f < k; ++f) {
        const int w = counter_poisson(cfg.seed, f, instance_index, 1.0);
        roles.train_weight[f] = w;
        roles.is_test[f] = w == 0 ? 1 : 0;
      }
      break;
    }
  }
  return roles;
}

OverlapStats fold_overlap_stats(std::span<const FoldRoles> roles_log,
                                Strategy strategy) {
  if (roles_log.empty())
    raise(ErrorKind::empty_stream, "no role assignments logged");
  const std::size_t k = roles_log.front().train_weight.size();
  const double n = static_cast<double>(roles_log.size());

  std::vector<double> train_count(k, 0.0), test_count(k, 0.0);
  std::vector<std::vector<double>> joint(k, std::vector<double>(k, 0.0));
  for (const FoldRoles& roles : roles_log) {
    if (roles.train_weight.size() != k || roles.is_test.size() != k)
      raise(ErrorKind::trace_mismatch, "inconsistent fold counts in roles log");
    for (std::size_t i = 0; i < k; ++i) {
      if (roles.train_weight[i] > 0) train_count[i] += 1.0;
      if (roles.is_test[i]) test_count[i] += 1.0;
      for (std::size_t j = i + 1; j < k; ++j)
        if (roles.train_weight[i] > 0 && roles.train_weight[j] > 0)
          joint[i][j] += 1.0;
    }
  }

  OverlapStats out;
  for (std::size_t i = 0; i < k; ++i) {
    out.train_fraction += train_count[i] / n;
    out.test_fraction += test_count[i] / n;
  }
  out.train_fraction /= static_cast<double>(k);
  out.test_fraction /= static_cast<double>(k);

  double joint_sum = 0.0, containment_sum = 0.0;
  double pairs = 0.0, containment_pairs = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      joint_sum += joint[i][j] / n;
      pairs += 1.0;
      // Containment averaged over both orientations of the pair.
      for (auto [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
        if (train_count[a] > 0.0) {
          containment_sum += joint[std::min(a, b)][std::max(a, b)] / train_count[a];
          containment_pairs += 1.0;
        }
      }
    }
  }
  if (pairs > 0.0) out.pairwise_joint = joint_sum / pairs;
  if (containment_pairs > 0.0)
    out.pairwise_containment = containment_sum / containment_pairs;
  out.pairwise_overlap = strategy == Strategy::bootstrap
                             ? out.pairwise_joint
                             : out.pairwise_containment;
  return out;
}

std::uint64_t stream_fingerprint(const CommitStream& stream) {
  std::uint64_t h = mix64(stream.instances.size());
  for (const CommitInstance& c : stream.instances) {
    h = hash_combine(h, static_cast<std::uint64_t>(c.id));
    h = hash_combine(h, static_cast<std::uint64_t>(c.commit_time));
    h = hash_combine(h, c.true_label == Label::defect ? 1u : 0u);
  }
  return h;
}

std::vector<double> RunTrace::final_fold_gmean() const {
  std::vector<double> out;
  out.reserve(final_by_fold.size());
  for (const MetricSnapshot& m : final_by_fold) out.push_back(m.gmean);
  return out;
}

double RunTrace::final_mean_gmean() const {
  if (final_by_fold.empty()) return 0.0;
  double sum = 0.0;
  for (const MetricSnapshot& m : final_by_fold) sum += m.gmean;
  return sum / static_cast<double>(final_by_fold.size());
}

namespace {

std::vector<std::int64_t> checkpoint_positions(std::size_t n, int checkpoints) {
  std::vector<std::int64_t> out;
  if (checkpoints < 1) raise(ErrorKind::bad_config, "checkpoints must be >= 1");
  for (int j = 1; j <= checkpoints; ++j) {
    const auto pos = static_cast<std::int64_t>(
        (static_cast<std::uint64_t>(j) * n) / static_cast<std::uint64_t>(checkpoints));
    const std::int64_t clamped = std::max<std::int64_t>(pos, 1);
    if (out.empty() || clamped > out.back()) out.push_back(clamped);
  }
  if (!out.empty()) out.back() = static_cast<std::int64_t>(n);
  return out;
}

struct FoldResult {
  std::vector<EvalEvent> events;
  std::vector<double> gmean_by_commit;
  std::vector<double> checkpoint_gmean;
  std::vector<TestOutcome> outcomes;
  MetricSnapshot final_metrics;
};

struct FoldPendingInfo {
  Label predicted = Label::clean;
  bool is_test = false;
  int train_weight = 0;
  std::int64_t position = 0;
  Features features{};
};

}  // namespace

RunTrace run_prequential(const CommitStream& stream,
                         const LearnerFactory& factory,
                         std::uint64_t learner_seed,
                         const ValidationConfig& validation,
                         const LabelingConfig& labeling, double alpha,
                         int checkpoints, const RunOptions& options) {
  validate_stream(stream);
  validate(validation);
  validate(labeling);
  if (!(alpha > 0.0) || alpha > 1.0)
    raise(ErrorKind::bad_config, "fading factor must be in (0, 1]");

  const std::size_t n = stream.instances.size();
  const auto k = static_cast<std::size_t>(validation.k);
  const std::vector<std::int64_t> cps = checkpoint_positions(n, checkpoints);

  // Role assignment is shared across folds (the strategies are coupled per
  // instance), so precompute it once.
  std::vector<FoldRoles> roles(n);
  for (std::size_t i = 0; i < n; ++i) roles[i] = assign_roles(validation, i);

  std::vector<FoldResult> results(k);
  parallel_for(k, options.threads, [&](std::size_t f) {
    FoldResult& res = results[f];
    std::unique_ptr<Learner> learner =
        factory(hash_combine(hash_combine(learner_seed, kFoldLearnerSalt), f));
    LabelDelayEngine engine(
        labeling,
        hash_combine(hash_combine(validation.seed, kSqaRngSalt), f));
    FadingConfusion confusion(alpha);
    std::unordered_map<std::int64_t, FoldPendingInfo> pending;
    pending.reserve(1024);
    res.gmean_by_commit.reserve(n);

    std::size_t next_cp = 0;
    auto handle_label = [&](const ObservedLabel& label,
                            std::int64_t commit_index) {
      const auto it = pending.find(label.commit_id);
      if (it == pending.end())
        raise(ErrorKind::unknown_commit,
              "label for commit never submitted: " +
                  std::to_string(label.commit_id));
      const FoldPendingInfo info = it->second;
      pending.erase(it);

      if (info.is_test) {
        confusion.update(info.predicted, label.label);
        if (options.record_outcomes)
          res.outcomes.push_back({info.position, info.predicted, label.label});
      }
      if (options.record_events)
        res.events.push_back({commit_index, label.available_time,
                              static_cast<int>(f), confusion.metrics()});
      if (info.train_weight > 0)
        learner->train(info.features, label.label, info.train_weight);
    };

    for (std::size_t i = 0; i < n; ++i) {
      const CommitInstance& c = stream.instances[i];
      const auto position = static_cast<std::int64_t>(i) + 1;

      for (const ObservedLabel& label : engine.due_labels(c.commit_time))
        handle_label(label, position);

      const Prediction pred = learner->predict(c.features);
      const FoldRoles& r = roles[i];
      pending.emplace(c.id, FoldPendingInfo{pred.label, r.is_test[f] != 0,
                                            r.train_weight[f], position,
                                            c.features});
      engine.submit(c, pred.label);

      const MetricSnapshot snap = confusion.metrics();
      res.gmean_by_commit.push_back(snap.gmean);
      if (next_cp < cps.size() && position == cps[next_cp]) {
        res.checkpoint_gmean.push_back(snap.gmean);
        ++next_cp;
      }
    }

    for (const ObservedLabel& label : engine.drain_all())
      handle_label(label, static_cast<std::int64_t>(n));
    if (!pending.empty())
      raise(ErrorKind::trace_mismatch, "pending labels not conserved");
    res.final_metrics = confusion.metrics();
  });

  RunTrace trace;
  trace.n = n;
  trace.k = validation.k;
  trace.alpha = alpha;
  trace.pairing_hash = hash_combine(
      hash_combine(
          hash_combine(hash_combine(stream_fingerprint(stream),
                                    static_cast<std::uint64_t>(validation.strategy)),
                       static_cast<std::uint64_t>(validation.k)),
          validation.seed),
      hash_combine(std::bit_cast<std::uint64_t>(alpha),
                   static_cast<std::uint64_t>(cps.size())));

  // Deterministic merge: events grouped by commit index, folds in order.
  if (options.record_events) {
    std::size_t total = 0;
    for (const FoldResult& r : results) total += r.events.size();
    trace.events.reserve(total);
    std::vector<std::size_t> cursor(k, 0);
    for (std::int64_t i = 1; i <= static_cast<std::int64_t>(n); ++i) {
      for (std::size_t f = 0; f < k; ++f) {
        const auto& ev = results[f].events;
        std::size_t& c = cursor[f];
        while (c < ev.size() && ev[c].commit_index == i)
          trace.events.push_back(ev[c++]);
      }
    }
  }

  trace.mean_gmean_by_commit.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t f = 0; f < k; ++f) sum += results[f].gmean_by_commit[i];
    trace.mean_gmean_by_commit[i] = sum / static_cast<double>(k);
  }

  trace.checkpoints.reserve(cps.size());
  for (std::size_t j = 0; j < cps.size(); ++j) {
    CheckpointRow row;
    row.commit_index = cps[j];
    row.fold_gmean.reserve(k);
    for (std::size_t f = 0; f < k; ++f)
      row.fold_gmean.push_back(results[f].checkpoint_gmean[j]);
    trace.checkpoints.push_back(std::move(row));
  }

  if (options.record_outcomes) {
    trace.outcomes_by_fold.reserve(k);
    for (FoldResult& r : results)
      trace.outcomes_by_fold.push_back(std::move(r.outcomes));
  }
  trace.final_by_fold.reserve(k);
  for (const FoldResult& r : results)
    trace.final_by_fold.push_back(r.final_metrics);
  return trace;
}

RunTrace run_prequential(const CommitStream& stream,
                         const LearnerConfig& learner,
                         const ValidationConfig& validation,
                         const LabelingConfig& labeling, double alpha,
                         int checkpoints, const RunOptions& options) {
  return run_prequential(stream, learner_factory(learner), learner.seed,
                         validation, labeling, alpha, checkpoints, options);
}

}  // namespace driftgate
