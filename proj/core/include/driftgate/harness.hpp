#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driftgate/stats.hpp"
#include "driftgate/validation.hpp"

namespace driftgate {

struct ValidityPoint {
  std::int64_t commit_index = 0;
  double e_ideal = 0.0;
  double e_nonideal = 0.0;
  double v = 1.0;
};

struct ValidityTrace {
  std::vector<ValidityPoint> points;
  double final_v = 1.0;
};

// V = 1 - |E_ideal - E_nonideal| per commit arrival, where E is the
// cross-fold mean fading G-mean. Both traces must be fold-pairable.
ValidityTrace evaluation_validity(const RunTrace& ideal,
                                  const RunTrace& nonideal);

enum class SweepAxis { qa, bfc };

const char* to_string(SweepAxis axis);

struct SweepRow {
  double days = 0.0;
  double final_v = 0.0;
};

struct SweepTable {
  SweepAxis varied = SweepAxis::qa;
  double fixed_days = 0.0;
  std::vector<SweepRow> rows;
};

// One evaluation-validity run per grid point of the varied axis; the fixed
// axis grid must hold exactly one value. Grids are in days.
SweepTable waiting_time_sweep(const CommitStream& stream,
                              std::span<const double> grid_qa_days,
                              std::span<const double> grid_bfc_days,
                              SweepAxis fixed_axis, const LearnerConfig& learner,
                              const ValidationConfig& validation,
                              LabelingMode mode, double alpha, int checkpoints,
                              int threads = 1);

struct TestErrorRates {
  TestKind test = TestKind::mcnemar;
  double reject_nochange = 0.0;  // Type I rate
  double reject_noise_a = 0.0;   // power at the first noise level
  double reject_noise_b = 0.0;
  std::int64_t trials = 0;       // Bernoulli trials behind each rate
};

struct ErrorRateReport {
  TestErrorRates mcnemar;
  TestErrorRates wilcoxon;
  TestErrorRates sign;
  int repetitions = 0;
  double significance = 0.05;
  double noise_a = 0.05;
  double noise_b = 0.10;
  double mcnemar_alpha = 1.0;
};

double rate_stderr(double rate, std::int64_t trials);

// Monte Carlo Type I / Type II rates for the three tests. Per repetition:
// two seeds of the same randomized learner (no-change probe) and seed-matched
// runs against noise-filtered variants (change probes), all under ideal
// labeling so outcome pairs align exactly. Wilcoxon and sign pool the
// checkpoint-by-fold G-means into one test per repetition; McNemar tests each
// (repetition, fold) outcome pairing. mcnemar_alpha = 1 accumulates plain
// counts; < 1 fades them like the metrics.
ErrorRateReport type_error_experiment(const CommitStream& stream,
                                      const LearnerConfig& learner,
                                      const ValidationConfig& validation,
                                      double alpha, int reps,
                                      std::span<const double> noise_levels,
                                      double significance = 0.05,
                                      double mcnemar_alpha = 1.0,
                                      int checkpoints = 10, int threads = 1);

struct ComparePoint {
  std::int64_t commit_index = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  TestResult wilcoxon;
};

struct CompareTrace {
  std::vector<ComparePoint> points;
  std::uint64_t pairing_hash = 0;
};

// Wilcoxon on the k paired fold G-means at every monitoring checkpoint.
CompareTrace compare_traces(const RunTrace& a, const RunTrace& b,
                            double significance = 0.05);

CompareTrace compare_runs(const CommitStream& stream,
                          const LearnerConfig& learner_a,
                          const LabelingConfig& labeling_a,
                          const LearnerConfig& learner_b,
                          const LabelingConfig& labeling_b,
                          const ValidationConfig& validation, double alpha,
                          int checkpoints, double significance = 0.05,
                          int threads = 1);

struct ResampleRow {
  std::string config;
  double r1 = 0.0;
  double fpr = 0.0;
  double gmean = 0.0;
};

// Bare tree plus the four resampling ensembles under the given labeling;
// reports final cross-fold mean R1/FPR/G-mean per configuration.
std::vector<ResampleRow> resampling_study(const CommitStream& stream,
                                          const LearnerConfig& base_tree,
                                          const ValidationConfig& validation,
                                          const LabelingConfig& labeling,
                                          double alpha, int threads = 1);

}  // namespace driftgate
