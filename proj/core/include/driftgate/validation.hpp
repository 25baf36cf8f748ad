#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driftgate/commit.hpp"
#include "driftgate/labeling.hpp"
#include "driftgate/learners.hpp"
#include "driftgate/prequential.hpp"

namespace driftgate {

enum class Strategy { cross, split, bootstrap };

const char* to_string(Strategy strategy);
bool strategy_from_string(const std::string& text, Strategy& out);

struct ValidationConfig {
  Strategy strategy = Strategy::bootstrap;
  int k = 10;
  std::uint64_t seed = 0;
};

void validate(const ValidationConfig& cfg);

// Role of each of the k folds for one arriving instance.
struct FoldRoles {
  std::vector<int> train_weight;
  std::vector<char> is_test;
};

// Deterministic in (cfg.seed, instance_index); fold draws are counter-based
// so any execution order reproduces the same assignment.
FoldRoles assign_roles(const ValidationConfig& cfg,
                       std::uint64_t instance_index);

struct OverlapStats {
  double train_fraction = 0.0;
  double test_fraction = 0.0;
  // Overlap in the convention the strategy is usually quoted in:
  // shared-train fraction of a fold's train set for cross/split, shared
  // fraction of the whole stream for bootstrap. Both raw ratios included.
  double pairwise_overlap = 0.0;
  double pairwise_joint = 0.0;
  double pairwise_containment = 0.0;
};

OverlapStats fold_overlap_stats(std::span<const FoldRoles> roles_log,
                                Strategy strategy);

struct EvalEvent {
  std::int64_t commit_index = 0;  // 1-based arrival position being processed
  std::int64_t sim_time = 0;      // when the label became available
  int fold = 0;
  MetricSnapshot metrics;
};

// One evaluated (commit, fold) pair, for cross-run outcome pairing.
struct TestOutcome {
  std::int64_t position = 0;  // 1-based arrival position of the labeled commit
  Label predicted = Label::clean;
  Label observed = Label::clean;
};

struct CheckpointRow {
  std::int64_t commit_index = 0;
  std::vector<double> fold_gmean;
};

struct RunTrace {
  std::vector<EvalEvent> events;
  // Cross-fold mean fading G-mean current at each arrival (index i-1 for
  // commit position i).
  std::vector<double> mean_gmean_by_commit;
  std::vector<CheckpointRow> checkpoints;
  std::vector<std::vector<TestOutcome>> outcomes_by_fold;
  // Metrics after every pending label has been drained and evaluated.
  std::vector<MetricSnapshot> final_by_fold;
  std::size_t n = 0;
  int k = 0;
  double alpha = 0.99;
  // Identifies (stream, validation strategy/seed, alpha, checkpoint layout);
  // equal hashes mean two traces are fold-pairable.
  std::uint64_t pairing_hash = 0;

  std::vector<double> final_fold_gmean() const;
  double final_mean_gmean() const;
};

struct RunOptions {
  int threads = 1;
  bool record_events = true;
  bool record_outcomes = true;
};

std::uint64_t stream_fingerprint(const CommitStream& stream);

RunTrace run_prequential(const CommitStream& stream,
                         const LearnerFactory& factory,
                         std::uint64_t learner_seed,
                         const ValidationConfig& validation,
                         const LabelingConfig& labeling, double alpha,
                         int checkpoints, const RunOptions& options = {});

RunTrace run_prequential(const CommitStream& stream, const LearnerConfig& learner,
                         const ValidationConfig& validation,
                         const LabelingConfig& labeling, double alpha,
                         int checkpoints, const RunOptions& options = {});

}  // namespace driftgate
