#include "driftgate/harness.hpp"

#include <algorithm>
#include <cmath>

#include "driftgate/error.hpp"
#include "driftgate/parallel.hpp"
#include "driftgate/rng.hpp"

namespace driftgate {

namespace {

constexpr std::uint64_t kRepValidationSalt = 0x76726570ULL;  // "vrep"
constexpr std::uint64_t kRepLearnerSalt = 0x6c726570ULL;     // "lrep"

void require_pairable(const RunTrace& a, const RunTrace& b) {
  if (a.pairing_hash != b.pairing_hash || a.k != b.k || a.n != b.n)
    raise(ErrorKind::trace_mismatch,
          "traces come from different streams or fold layouts");
}

PairedObservations pooled_checkpoint_gmeans(const RunTrace& a,
                                            const RunTrace& b) {
  PairedObservations pairs;
  for (std::size_t j = 0; j < a.checkpoints.size(); ++j)
    for (int f = 0; f < a.k; ++f)
      pairs.push_back(a.checkpoints[j].fold_gmean[static_cast<std::size_t>(f)],
                      b.checkpoints[j].fold_gmean[static_cast<std::size_t>(f)]);
  return pairs;
}

// Paired McNemar over one fold's outcomes, walked in stream order.
TestResult fold_mcnemar(const std::vector<TestOutcome>& first,
                        const std::vector<TestOutcome>& second, double alpha,
                        double significance) {
  if (first.size() != second.size())
    raise(ErrorKind::trace_mismatch, "fold outcome counts differ");
  McNemarState state(alpha);
  for (std::size_t i = 0; i < first.size(); ++i) {
    const TestOutcome& x = first[i];
    const TestOutcome& y = second[i];
    if (x.position != y.position || x.observed != y.observed)
      raise(ErrorKind::trace_mismatch, "fold outcomes are not aligned");
    state.update(x.predicted == x.observed, y.predicted == y.observed);
  }
  return state.test(significance);
}

}  // namespace

ValidityTrace evaluation_validity(const RunTrace& ideal,
                                  const RunTrace& nonideal) {
  require_pairable(ideal, nonideal);
  ValidityTrace trace;
  trace.points.reserve(ideal.n);
  for (std::size_t i = 0; i < ideal.n; ++i) {
    ValidityPoint p;
    p.commit_index = static_cast<std::int64_t>(i) + 1;
    p.e_ideal = ideal.mean_gmean_by_commit[i];
    p.e_nonideal = nonideal.mean_gmean_by_commit[i];
    p.v = 1.0 - std::fabs(p.e_ideal - p.e_nonideal);
    trace.points.push_back(p);
  }
  trace.final_v = trace.points.empty() ? 1.0 : trace.points.back().v;
  return trace;
}

const char* to_string(SweepAxis axis) {
  return axis == SweepAxis::qa ? "qa" : "bfc";
}

SweepTable waiting_time_sweep(const CommitStream& stream,
                              std::span<const double> grid_qa_days,
                              std::span<const double> grid_bfc_days,
                              SweepAxis fixed_axis, const LearnerConfig& learner,
                              const ValidationConfig& validation,
                              LabelingMode mode, double alpha, int checkpoints,
                              int threads) {
  if (grid_qa_days.empty() || grid_bfc_days.empty())
    raise(ErrorKind::bad_config, "sweep grids must be non-empty");
  const std::span<const double> fixed_grid =
      fixed_axis == SweepAxis::qa ? grid_qa_days : grid_bfc_days;
  const std::span<const double> varied_grid =
      fixed_axis == SweepAxis::qa ? grid_bfc_days : grid_qa_days;
  if (fixed_grid.size() != 1)
    raise(ErrorKind::bad_config, "the fixed axis takes exactly one value");
  if (mode == LabelingMode::ideal)
    raise(ErrorKind::bad_config, "sweep needs a non-ideal labeling mode");

  SweepTable table;
  table.varied = fixed_axis == SweepAxis::qa ? SweepAxis::bfc : SweepAxis::qa;
  table.fixed_days = fixed_grid[0];

  LabelingConfig ideal_cfg;
  ideal_cfg.mode = LabelingMode::ideal;
  const RunOptions opts{threads, false, false};
  const RunTrace ideal =
      run_prequential(stream, learner, validation, ideal_cfg, alpha,
                      checkpoints, opts);

  auto to_seconds = [](double days) {
    if (days < 0.0) raise(ErrorKind::bad_config, "waiting times must be >= 0");
    return static_cast<std::int64_t>(std::llround(days * kSecondsPerDay));
  };

  table.rows.resize(varied_grid.size());
  for (std::size_t g = 0; g < varied_grid.size(); ++g) {
    LabelingConfig cfg;
    cfg.mode = mode;
    cfg.w_qa = to_seconds(table.varied == SweepAxis::qa ? varied_grid[g]
                                                        : table.fixed_days);
    cfg.w_bfc = to_seconds(table.varied == SweepAxis::bfc ? varied_grid[g]
                                                          : table.fixed_days);
    const RunTrace nonideal = run_prequential(stream, learner, validation, cfg,
                                              alpha, checkpoints, opts);
    table.rows[g] = {varied_grid[g],
                     evaluation_validity(ideal, nonideal).final_v};
  }
  return table;
}

double rate_stderr(double rate, std::int64_t trials) {
  if (trials <= 0) return 0.0;
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

ErrorRateReport type_error_experiment(const CommitStream& stream,
                                      const LearnerConfig& learner,
                                      const ValidationConfig& validation,
                                      double alpha, int reps,
                                      std::span<const double> noise_levels,
                                      double significance, double mcnemar_alpha,
                                      int checkpoints, int threads) {
  if (!is_randomized(learner))
    raise(ErrorKind::non_randomized_learner,
          "the no-change probe needs a seed-sensitive learner");
  if (reps < 1) raise(ErrorKind::bad_config, "reps must be >= 1");
  if (noise_levels.size() != 3 || noise_levels[0] != 0.0 ||
      !(noise_levels[1] > 0.0) || !(noise_levels[2] > noise_levels[1]) ||
      noise_levels[2] > 1.0)
    raise(ErrorKind::bad_config,
          "noise levels must be {0, a, b} with 0 < a < b <= 1");

  // Ideal labeling keeps the evaluated (commit, fold) outcomes of paired
  // runs in lockstep, which the per-fold McNemar pairing relies on.
  LabelingConfig ideal_cfg;
  ideal_cfg.mode = LabelingMode::ideal;

  struct RepOutcome {
    // Per probe (0: no-change, 1: noise a, 2: noise b).
    std::array<bool, 3> wilcoxon_reject{};
    std::array<bool, 3> sign_reject{};
    std::array<std::vector<bool>, 3> mcnemar_rejects;
  };
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(reps));

  parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    ValidationConfig vcfg = validation;
    vcfg.seed = hash_combine(hash_combine(validation.seed, kRepValidationSalt), r);
    const std::uint64_t s1 =
        hash_combine(hash_combine(learner.seed, kRepLearnerSalt), 2 * r);
    const std::uint64_t s2 =
        hash_combine(hash_combine(learner.seed, kRepLearnerSalt), 2 * r + 1);

    const RunOptions opts{1, false, true};
    auto run_with = [&](std::uint64_t seed, double noise_p) {
      LearnerConfig cfg = learner;
      cfg.seed = seed;
      cfg.noise_p = noise_p;
      return run_prequential(stream, cfg, vcfg, ideal_cfg, alpha, checkpoints,
                             opts);
    };

    const RunTrace base = run_with(s1, 0.0);
    const std::array<RunTrace, 3> others = {run_with(s2, 0.0),
                                            run_with(s1, noise_levels[1]),
                                            run_with(s1, noise_levels[2])};

    RepOutcome& out = outcomes[r];
    for (std::size_t probe = 0; probe < 3; ++probe) {
      const RunTrace& other = others[probe];
      require_pairable(base, other);
      const PairedObservations pairs = pooled_checkpoint_gmeans(base, other);
      out.wilcoxon_reject[probe] =
          wilcoxon_signed_rank(pairs, significance).reject;
      out.sign_reject[probe] = sign_test(pairs, significance).reject;
      out.mcnemar_rejects[probe].reserve(static_cast<std::size_t>(base.k));
      for (int f = 0; f < base.k; ++f)
        out.mcnemar_rejects[probe].push_back(
            fold_mcnemar(base.outcomes_by_fold[static_cast<std::size_t>(f)],
                         other.outcomes_by_fold[static_cast<std::size_t>(f)],
                         mcnemar_alpha, significance)
                .reject);
    }
  });

  ErrorRateReport report;
  report.repetitions = reps;
  report.significance = significance;
  report.noise_a = noise_levels[1];
  report.noise_b = noise_levels[2];
  report.mcnemar_alpha = mcnemar_alpha;
  report.mcnemar.test = TestKind::mcnemar;
  report.wilcoxon.test = TestKind::wilcoxon;
  report.sign.test = TestKind::sign;

  std::array<double, 3> wilcoxon_hits{}, sign_hits{}, mcnemar_hits{};
  std::int64_t mcnemar_trials = 0;
  for (const RepOutcome& out : outcomes) {
    for (std::size_t probe = 0; probe < 3; ++probe) {
      wilcoxon_hits[probe] += out.wilcoxon_reject[probe] ? 1.0 : 0.0;
      sign_hits[probe] += out.sign_reject[probe] ? 1.0 : 0.0;
      for (bool reject : out.mcnemar_rejects[probe])
        mcnemar_hits[probe] += reject ? 1.0 : 0.0;
    }
    mcnemar_trials += static_cast<std::int64_t>(out.mcnemar_rejects[0].size());
  }

  const double n_reps = static_cast<double>(reps);
  report.wilcoxon.trials = reps;
  report.sign.trials = reps;
  report.mcnemar.trials = mcnemar_trials;
  report.wilcoxon.reject_nochange = wilcoxon_hits[0] / n_reps;
  report.wilcoxon.reject_noise_a = wilcoxon_hits[1] / n_reps;
  report.wilcoxon.reject_noise_b = wilcoxon_hits[2] / n_reps;
  report.sign.reject_nochange = sign_hits[0] / n_reps;
  report.sign.reject_noise_a = sign_hits[1] / n_reps;
  report.sign.reject_noise_b = sign_hits[2] / n_reps;
  const double n_mc = static_cast<double>(std::max<std::int64_t>(mcnemar_trials, 1));
  report.mcnemar.reject_nochange = mcnemar_hits[0] / n_mc;
  report.mcnemar.reject_noise_a = mcnemar_hits[1] / n_mc;
  report.mcnemar.reject_noise_b = mcnemar_hits[2] / n_mc;
  return report;
}

CompareTrace compare_traces(const RunTrace& a, const RunTrace& b,
                            double significance) {
  require_pairable(a, b);
  if (a.checkpoints.size() != b.checkpoints.size())
    raise(ErrorKind::trace_mismatch, "checkpoint layouts differ");

  CompareTrace trace;
  trace.pairing_hash = a.pairing_hash;
  trace.points.reserve(a.checkpoints.size());
  for (std::size_t j = 0; j < a.checkpoints.size(); ++j) {
    const CheckpointRow& ra = a.checkpoints[j];
    const CheckpointRow& rb = b.checkpoints[j];
    if (ra.commit_index != rb.commit_index)
      raise(ErrorKind::trace_mismatch, "checkpoint positions differ");
    ComparePoint p;
    p.commit_index = ra.commit_index;
    PairedObservations pairs;
    for (int f = 0; f < a.k; ++f) {
      const auto fi = static_cast<std::size_t>(f);
      pairs.push_back(ra.fold_gmean[fi], rb.fold_gmean[fi]);
      p.mean_a += ra.fold_gmean[fi];
      p.mean_b += rb.fold_gmean[fi];
    }
    p.mean_a /= static_cast<double>(a.k);
    p.mean_b /= static_cast<double>(a.k);
    p.wilcoxon = wilcoxon_signed_rank(pairs, significance);
    trace.points.push_back(p);
  }
  return trace;
}

CompareTrace compare_runs(const CommitStream& stream,
                          const LearnerConfig& learner_a,
                          const LabelingConfig& labeling_a,
                          const LearnerConfig& learner_b,
                          const LabelingConfig& labeling_b,
                          const ValidationConfig& validation, double alpha,
                          int checkpoints, double significance, int threads) {
  const RunOptions opts{threads, false, false};
  const RunTrace a = run_prequential(stream, learner_a, validation, labeling_a,
                                     alpha, checkpoints, opts);
  const RunTrace b = run_prequential(stream, learner_b, validation, labeling_b,
                                     alpha, checkpoints, opts);
  return compare_traces(a, b, significance);
}

std::vector<ResampleRow> resampling_study(const CommitStream& stream,
                                          const LearnerConfig& base_tree,
                                          const ValidationConfig& validation,
                                          const LabelingConfig& labeling,
                                          double alpha, int threads) {
  struct Config {
    const char* name;
    LearnerKind kind;
    int rate;
  };
  const Config configs[] = {
      {"hoeffding_tree", LearnerKind::hoeffding_tree, 1},
      {"under_over_bagging_1", LearnerKind::under_over_bagging, 1},
      {"under_over_bagging_2", LearnerKind::under_over_bagging, 2},
      {"rus_boost_1", LearnerKind::rus_boost, 1},
      {"rus_boost_2", LearnerKind::rus_boost, 2},
  };

  std::vector<ResampleRow> rows(std::size(configs));
  const RunOptions opts{threads, false, false};
  for (std::size_t i = 0; i < std::size(configs); ++i) {
    LearnerConfig cfg = base_tree;
    cfg.kind = configs[i].kind;
    cfg.ensemble.resample_rate = configs[i].rate;
    const RunTrace trace = run_prequential(stream, cfg, validation, labeling,
                                           alpha, 10, opts);
    ResampleRow row;
    row.config = configs[i].name;
    const double k = static_cast<double>(trace.final_by_fold.size());
    for (const MetricSnapshot& m : trace.final_by_fold) {
      row.r1 += m.r1 / k;
      row.fpr += m.fpr / k;
      row.gmean += m.gmean / k;
    }
    rows[i] = std::move(row);
  }
  return rows;
}

}  // namespace driftgate
