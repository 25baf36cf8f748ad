// Acceptance gate: eight end-to-end criteria, one pass/fail line each.
// Exit code is the number of failed criteria.
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "driftgate/dataset.hpp"
#include "driftgate/harness.hpp"
#include "driftgate/labeling.hpp"
#include "driftgate/prequential.hpp"
#include "driftgate/rng.hpp"
#include "driftgate/stats.hpp"
#include "driftgate/validation.hpp"

namespace dg = driftgate;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  bool ok = true;
  std::ostringstream note;

  void expect(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (note.tellp() > 0) note << "; ";
    note << what;
  }
  void info(const std::string& what) {
    if (note.tellp() > 0) note << "; ";
    note << what;
  }
};

int g_failures = 0;

template <class Fn>
void run_criterion(int number, const std::string& title, Fn&& body) {
  Criterion c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.expect(false, std::string("exception: ") + e.what());
  }
  std::cout << "criterion " << number << " (" << title << "): "
            << (c.ok ? "PASS" : "FAIL");
  const std::string detail = c.note.str();
  if (!detail.empty()) std::cout << " [" << detail << "]";
  std::cout << std::endl;
  if (!c.ok) ++g_failures;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

fs::path work_dir() {
  static fs::path dir = [] {
    std::random_device rd;
    auto p = fs::temp_directory_path() /
             ("driftgate-acceptance-" + std::to_string(rd()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& env, const std::string& args) {
  const std::string log = (work_dir() / "cli.log").string();
  const std::string cmd =
      env + " " + std::string(DRIFTGATE_BIN) + " " + args + " >" + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

dg::LearnerConfig tree_config(std::uint64_t seed) {
  dg::LearnerConfig cfg;
  cfg.kind = dg::LearnerKind::hoeffding_tree;
  cfg.seed = seed;
  return cfg;
}

dg::ValidationConfig bootstrap10(std::uint64_t seed) {
  dg::ValidationConfig cfg;
  cfg.strategy = dg::Strategy::bootstrap;
  cfg.k = 10;
  cfg.seed = seed;
  return cfg;
}

dg::LabelingConfig labeling(dg::LabelingMode mode) {
  dg::LabelingConfig cfg;  // W_QA = 7d, W_BFC = 15d
  cfg.mode = mode;
  return cfg;
}

// --------------------------------------------------------------------------
// 1. Fading metrics with alpha = 1 equal brute-force recomputation.

void criterion_fading(Criterion& c) {
  dg::SplitMix64 rng(2024);
  dg::FadingConfusion fading(1.0);
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double max_diff = 0.0;
  bool flags_ok = true;
  for (int i = 0; i < 10000; ++i) {
    const dg::Label pred =
        rng.next_u01() < 0.5 ? dg::Label::defect : dg::Label::clean;
    const dg::Label obs =
        rng.next_u01() < 0.3 ? dg::Label::defect : dg::Label::clean;
    fading.update(pred, obs);
    if (obs == dg::Label::defect)
      (pred == dg::Label::defect ? tp : fn) += 1;
    else
      (pred == dg::Label::clean ? tn : fp) += 1;

    const dg::MetricSnapshot m = fading.metrics();
    const double pos = static_cast<double>(tp + fn);
    const double neg = static_cast<double>(tn + fp);
    flags_ok = flags_ok && m.r1_defined == (pos > 0) &&
               m.r0_defined == (neg > 0) && m.fpr_defined == (neg > 0) &&
               m.gmean_defined == (pos > 0 && neg > 0);
    if (pos > 0)
      max_diff = std::max(max_diff, std::abs(m.r1 - static_cast<double>(tp) / pos));
    if (neg > 0) {
      max_diff = std::max(max_diff, std::abs(m.r0 - static_cast<double>(tn) / neg));
      max_diff = std::max(max_diff, std::abs(m.fpr - static_cast<double>(fp) / neg));
    }
    if (pos > 0 && neg > 0)
      max_diff = std::max(
          max_diff, std::abs(m.gmean - std::sqrt((static_cast<double>(tn) / neg) *
                                                 (static_cast<double>(tp) / pos))));
  }
  c.expect(flags_ok, "defined flags disagree with raw counts");
  c.expect(max_diff < 1e-9, "max deviation " + fmt(max_diff));
  c.info("max |fading - brute force| = " + fmt(max_diff));
}

// --------------------------------------------------------------------------
// 2. Fold-role fractions and overlaps for the three strategies.

void criterion_fold_table(Criterion& c) {
  const std::size_t n = 100000;
  auto stats_for = [&](dg::Strategy s) {
    dg::ValidationConfig cfg;
    cfg.strategy = s;
    cfg.k = 10;
    cfg.seed = 2025;
    std::vector<dg::FoldRoles> log;
    log.reserve(n);
    for (std::size_t i = 0; i < n; ++i) log.push_back(dg::assign_roles(cfg, i));
    return dg::fold_overlap_stats(log, s);
  };

  const dg::OverlapStats boot = stats_for(dg::Strategy::bootstrap);
  c.expect(std::abs(boot.train_fraction - 0.632) <= 0.01,
           "bootstrap train fraction " + fmt(boot.train_fraction));
  c.expect(std::abs(boot.test_fraction - 0.368) <= 0.01,
           "bootstrap test fraction " + fmt(boot.test_fraction));
  c.expect(std::abs(boot.pairwise_overlap - 0.40) <= 0.02,
           "bootstrap overlap " + fmt(boot.pairwise_overlap));

  const dg::OverlapStats cross = stats_for(dg::Strategy::cross);
  c.expect(std::abs(cross.pairwise_overlap - 8.0 / 9.0) <= 0.01,
           "cross overlap " + fmt(cross.pairwise_overlap));

  const dg::OverlapStats split = stats_for(dg::Strategy::split);
  c.expect(split.pairwise_overlap == 0.0,
           "split overlap " + fmt(split.pairwise_overlap));

  c.info("bootstrap " + fmt(boot.train_fraction) + "/" +
         fmt(boot.test_fraction) + "/" + fmt(boot.pairwise_overlap) +
         ", cross " + fmt(cross.pairwise_overlap));
}

// --------------------------------------------------------------------------
// 3. Closed-form oracles for the three statistical tests.

void criterion_stat_oracles(Criterion& c) {
  const dg::TestResult mc = dg::mcnemar_test(30.0, 10.0);
  c.expect(mc.statistic == 10.0, "mcnemar statistic " + fmt(mc.statistic));
  c.expect(std::abs(mc.p_value - 0.001565) < 1e-6,
           "mcnemar p " + fmt(mc.p_value));

  dg::PairedObservations all_pos;
  for (int i = 0; i < 10; ++i) all_pos.push_back(0.0, 1.0 + i);
  const dg::TestResult sg = dg::sign_test(all_pos);
  c.expect(sg.p_value == 0.001953125, "sign p " + fmt(sg.p_value));

  dg::SplitMix64 rng(7);
  int agree = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    dg::PairedObservations pairs;
    for (int i = 0; i < 10; ++i)
      pairs.push_back(rng.normal(0.0, 1.0), rng.normal(0.15, 1.0));
    const dg::TestResult exact =
        dg::wilcoxon_signed_rank(pairs, 0.05, dg::WilcoxonMode::exact);
    const dg::TestResult normal =
        dg::wilcoxon_signed_rank(pairs, 0.05, dg::WilcoxonMode::normal_approx);
    if (exact.reject == normal.reject) ++agree;
  }
  c.expect(agree >= 950,
           "exact/normal agreement " + fmt(agree) + "/" + fmt(trials));
  c.info("mcnemar p " + fmt(mc.p_value) + ", wilcoxon agreement " +
         fmt(agree / static_cast<double>(trials)));
}

// --------------------------------------------------------------------------
// 4. Type I / power ordering of the paired tests on a stationary stream.

void criterion_type_errors(Criterion& c) {
  dg::SynthSpec spec;
  spec.n_instances = 20000;
  const dg::CommitStream stream = dg::synth_stream(spec, 1);

  dg::LearnerConfig learner;
  learner.kind = dg::LearnerKind::poisson_bagging;
  learner.seed = 1;

  const std::vector<double> noise{0.0, 0.05, 0.1};
  const dg::ErrorRateReport report = dg::type_error_experiment(
      stream, learner, bootstrap10(1), 0.99, 50, noise, 0.05, 1.0, 10, 1);

  c.expect(report.wilcoxon.reject_nochange <= 0.10,
           "wilcoxon type I " + fmt(report.wilcoxon.reject_nochange));
  c.expect(report.wilcoxon.reject_noise_b >= 0.90,
           "wilcoxon power at 0.1 noise " + fmt(report.wilcoxon.reject_noise_b));
  c.expect(report.mcnemar.reject_nochange > report.wilcoxon.reject_nochange,
           "mcnemar type I " + fmt(report.mcnemar.reject_nochange) +
               " not above wilcoxon " + fmt(report.wilcoxon.reject_nochange));
  c.info("type I mcnemar " + fmt(report.mcnemar.reject_nochange) +
         " vs wilcoxon " + fmt(report.wilcoxon.reject_nochange) +
         ", wilcoxon power " + fmt(report.wilcoxon.reject_noise_b));
}

// --------------------------------------------------------------------------
// 5. Human-reviewed labeling beats pure bug-fix waiting on late-fix streams.

double defect_noise_rate(const dg::CommitStream& stream,
                         const std::vector<dg::Label>& predictions,
                         dg::LabelingMode mode,
                         std::set<std::int64_t>* noisy_ids) {
  dg::LabelDelayEngine engine(labeling(mode), 99);
  for (std::size_t i = 0; i < stream.instances.size(); ++i)
    engine.submit(stream.instances[i], predictions[i]);
  const std::vector<dg::ObservedLabel> labels = engine.drain_all();

  std::int64_t defects = 0, wrong = 0;
  for (const dg::ObservedLabel& l : labels) {
    const dg::CommitInstance& truth =
        stream.instances[static_cast<std::size_t>(l.commit_id - 1)];
    if (truth.true_label != dg::Label::defect) continue;
    ++defects;
    if (l.label != truth.true_label) {
      ++wrong;
      noisy_ids->insert(l.commit_id);
    }
  }
  return defects > 0 ? static_cast<double>(wrong) / static_cast<double>(defects)
                     : 0.0;
}

void criterion_hitl(Criterion& c) {
  dg::SynthSpec spec;
  spec.n_instances = 4000;
  const dg::CommitStream stream = dg::synth_stream(spec, 77);

  std::int64_t defects = 0, late = 0;
  for (const dg::CommitInstance& inst : stream.instances) {
    if (inst.true_label != dg::Label::defect) continue;
    ++defects;
    if (*inst.fix_time - inst.commit_time > 15 * dg::kSecondsPerDay) ++late;
  }
  const double late_frac =
      static_cast<double>(late) / static_cast<double>(defects);
  c.expect(late_frac >= 0.40, "only " + fmt(late_frac) + " late fixes");

  // (a) With matched predictions, the SQA queue can only remove noise.
  dg::SplitMix64 coin(123);
  std::vector<dg::Label> predictions;
  predictions.reserve(stream.instances.size());
  for (std::size_t i = 0; i < stream.instances.size(); ++i)
    predictions.push_back(coin.next_u01() < 0.5 ? dg::Label::defect
                                                : dg::Label::clean);
  std::set<std::int64_t> hitl_noisy, non_hitl_noisy;
  const double hitl_rate = defect_noise_rate(stream, predictions,
                                             dg::LabelingMode::hitl, &hitl_noisy);
  const double non_hitl_rate = defect_noise_rate(
      stream, predictions, dg::LabelingMode::non_hitl, &non_hitl_noisy);
  c.expect(hitl_rate < non_hitl_rate,
           "on-defect noise hitl " + fmt(hitl_rate) + " vs non-hitl " +
               fmt(non_hitl_rate));
  c.expect(std::includes(non_hitl_noisy.begin(), non_hitl_noisy.end(),
                         hitl_noisy.begin(), hitl_noisy.end()),
           "hitl noisy set escapes the non-hitl noisy set");

  // (b) Evaluation validity, both modes against the same ideal run.
  const dg::LearnerConfig learner = tree_config(5);
  const dg::ValidationConfig validation = bootstrap10(5);
  dg::RunOptions options{1, false, false};
  const dg::RunTrace ideal =
      dg::run_prequential(stream, learner, validation,
                          labeling(dg::LabelingMode::ideal), 0.99, 10, options);
  const dg::RunTrace hitl =
      dg::run_prequential(stream, learner, validation,
                          labeling(dg::LabelingMode::hitl), 0.99, 10, options);
  const dg::RunTrace non_hitl = dg::run_prequential(
      stream, learner, validation, labeling(dg::LabelingMode::non_hitl), 0.99,
      10, options);
  const double v_hitl = dg::evaluation_validity(ideal, hitl).final_v;
  const double v_non_hitl = dg::evaluation_validity(ideal, non_hitl).final_v;
  c.expect(v_hitl >= v_non_hitl,
           "V hitl " + fmt(v_hitl) + " < V non-hitl " + fmt(v_non_hitl));

  // (c) Final G-mean advantage with a significant paired test, per seed.
  int wins = 0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    const std::uint64_t seed = 100 + static_cast<std::uint64_t>(r);
    dg::SynthSpec rep_spec;
    rep_spec.n_instances = 4000;
    const dg::CommitStream rep_stream = dg::synth_stream(rep_spec, seed);
    const dg::CompareTrace trace = dg::compare_runs(
        rep_stream, tree_config(seed), labeling(dg::LabelingMode::non_hitl),
        tree_config(seed), labeling(dg::LabelingMode::hitl), bootstrap10(seed),
        0.99, 10, 0.05, 1);
    if (trace.points.empty()) continue;
    const dg::ComparePoint& last = trace.points.back();
    if (last.mean_b >= last.mean_a && last.wilcoxon.p_value < 0.05 &&
        last.wilcoxon.direction == +1)
      ++wins;
  }
  c.expect(wins >= 14, "hitl significantly ahead in only " + fmt(wins) + "/20");
  c.info("late fixes " + fmt(late_frac) + ", noise " + fmt(hitl_rate) + " vs " +
         fmt(non_hitl_rate) + ", V " + fmt(v_hitl) + " vs " + fmt(v_non_hitl) +
         ", wins " + fmt(wins) + "/20");
}

// --------------------------------------------------------------------------
// 6. Resampling ensembles trade false alarms for recall against the tree.

void criterion_resampling(Criterion& c) {
  dg::SynthSpec spec;
  spec.n_instances = 2000;
  const dg::CommitStream stream = dg::synth_stream(spec, 42);

  const std::vector<dg::ResampleRow> rows = dg::resampling_study(
      stream, tree_config(42), bootstrap10(42),
      labeling(dg::LabelingMode::hitl), 0.99, 1);
  if (rows.size() != 5 || rows[0].config != "hoeffding_tree") {
    c.expect(false, "unexpected study layout");
    return;
  }
  const dg::ResampleRow& tree = rows[0];
  int fpr_up = 0, r1_up = 0;
  std::ostringstream table;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].fpr > tree.fpr) ++fpr_up;
    if (rows[i].r1 > tree.r1) ++r1_up;
    table << (i > 1 ? " " : "") << rows[i].config << " r1 " << fmt(rows[i].r1)
          << " fpr " << fmt(rows[i].fpr);
  }
  c.expect(fpr_up == 4, "only " + fmt(fpr_up) + "/4 raised FPR");
  c.expect(r1_up >= 3, "only " + fmt(r1_up) + "/4 raised R1");
  c.info("tree r1 " + fmt(tree.r1) + " fpr " + fmt(tree.fpr) + "; " +
         table.str());
}

// --------------------------------------------------------------------------
// 7. Byte-identical reruns, independent of the worker-thread count.

void criterion_determinism(Criterion& c) {
  const fs::path base = work_dir();
  const std::string sim_args = "simulate --n 400 --seed 21 --mode hitl --folds 5";
  const std::string cmp_args =
      "compare --n 300 --seed 22 --mode hitl --folds 5 --learner-b majority "
      "--checkpoints 4";

  struct Job {
    std::string name, env, args;
  };
  const std::vector<Job> jobs = {
      {"sim-t1", "DRIFTGATE_THREADS=1", sim_args},
      {"sim-t8", "DRIFTGATE_THREADS=8", sim_args},
      {"sim-t8-again", "DRIFTGATE_THREADS=8", sim_args},
      {"cmp-t1", "DRIFTGATE_THREADS=1", cmp_args},
      {"cmp-t8", "DRIFTGATE_THREADS=8", cmp_args},
  };
  for (const Job& job : jobs) {
    const int code =
        run_cli(job.env, job.args + " --out " + (base / job.name).string());
    c.expect(code == 0, job.name + " exited with " + fmt(code));
  }
  if (!c.ok) return;

  auto same = [&](const std::string& a, const std::string& b,
                  const std::vector<std::string>& files) {
    for (const std::string& f : files) {
      const std::string lhs = read_file(base / a / f);
      c.expect(!lhs.empty(), a + "/" + f + " is empty");
      c.expect(lhs == read_file(base / b / f), a + " and " + b +
                   " differ in " + f);
    }
  };
  const std::vector<std::string> sim_files{
      "config.json", "metrics.csv", "checkpoints.csv", "summary.json",
      "gmean.svg"};
  same("sim-t1", "sim-t8", sim_files);
  same("sim-t8", "sim-t8-again", sim_files);
  const std::vector<std::string> cmp_files{
      "config.json", "compare.csv", "tests.csv", "gmean.svg", "pvalue.svg"};
  same("cmp-t1", "cmp-t8", cmp_files);
  c.info("5 runs, all tracked outputs byte-identical across thread counts");
}

// --------------------------------------------------------------------------
// 8. Four-commit stream traced by hand, matched cell for cell.

dg::CommitInstance hand_commit(std::int64_t id, std::int64_t t, dg::Label label,
                               std::int64_t fix = -1) {
  dg::CommitInstance commit;
  commit.id = id;
  commit.commit_time = t;
  commit.true_label = label;
  if (fix >= 0) commit.fix_time = fix;
  return commit;
}

void criterion_hand_simulation(Criterion& c) {
  dg::CommitStream stream;
  stream.instances = {hand_commit(1, 100, dg::Label::clean),
                      hand_commit(2, 200, dg::Label::defect, 250),
                      hand_commit(3, 300, dg::Label::defect, 350),
                      hand_commit(4, 400, dg::Label::clean)};
  stream.span_end = 400;

  dg::ValidationConfig validation;
  validation.strategy = dg::Strategy::cross;
  validation.k = 2;
  validation.seed = 9;  // sends ids 1,3 to fold 0 and ids 2,4 to fold 1

  dg::LearnerFactory factory = [](std::uint64_t) {
    return std::unique_ptr<dg::Learner>(new dg::MajorityClass());
  };
  const dg::RunTrace trace =
      dg::run_prequential(stream, factory, 0, validation,
                          labeling(dg::LabelingMode::ideal), 1.0, 4);

  c.expect(trace.n == 4 && trace.k == 2, "wrong trace shape");

  struct Expect {
    std::int64_t index, time;
    int fold;
    double r0, r1, fpr, gmean;
    unsigned mask;
  };
  const Expect want[8] = {
      {2, 100, 0, 1, 0, 0, 0, 5u},  {2, 100, 1, 0, 0, 0, 0, 0u},
      {3, 200, 0, 1, 0, 0, 0, 5u},  {3, 200, 1, 0, 0, 0, 0, 2u},
      {4, 300, 0, 1, 1, 0, 1, 15u}, {4, 400, 0, 1, 1, 0, 1, 15u},
      {4, 300, 1, 0, 0, 0, 0, 2u},  {4, 400, 1, 0, 0, 1, 0, 15u},
  };
  if (trace.events.size() != 8) {
    c.expect(false, "expected 8 events, got " + fmt(trace.events.size()));
    return;
  }
  for (int i = 0; i < 8; ++i) {
    const dg::EvalEvent& e = trace.events[static_cast<std::size_t>(i)];
    const Expect& w = want[i];
    c.expect(e.commit_index == w.index && e.sim_time == w.time &&
                 e.fold == w.fold && e.metrics.r0 == w.r0 &&
                 e.metrics.r1 == w.r1 && e.metrics.fpr == w.fpr &&
                 e.metrics.gmean == w.gmean &&
                 e.metrics.defined_mask() == w.mask,
             "event " + fmt(i) + " deviates from the hand trace");
  }
  c.expect(trace.mean_gmean_by_commit == std::vector<double>{0, 0, 0, 0.5},
           "running mean G-mean deviates");
  c.expect(trace.checkpoints.size() == 4 &&
               trace.checkpoints[3].fold_gmean ==
                   std::vector<double>{1.0, 0.0},
           "checkpoint G-means deviate");
  c.expect(trace.final_by_fold.size() == 2 &&
               trace.final_by_fold[0].gmean == 1.0 &&
               trace.final_by_fold[0].defined_mask() == 15u &&
               trace.final_by_fold[1].gmean == 0.0 &&
               trace.final_by_fold[1].fpr == 1.0,
           "final fold metrics deviate");
  c.expect(trace.final_mean_gmean() == 0.5, "final mean G-mean deviates");
  c.info("8 events, checkpoints, and finals all exact");
}

}  // namespace

int main() {
  run_criterion(1, "fading metrics equal brute-force recomputation",
                criterion_fading);
  run_criterion(2, "fold-role fractions and overlaps", criterion_fold_table);
  run_criterion(3, "statistical-test oracles", criterion_stat_oracles);
  run_criterion(4, "type I/power ordering of the paired tests",
                criterion_type_errors);
  run_criterion(5, "human-reviewed labeling beats bug-fix-only labeling",
                criterion_hitl);
  run_criterion(6, "resampling raises recall at the cost of false alarms",
                criterion_resampling);
  run_criterion(7, "byte-identical deterministic reruns",
                criterion_determinism);
  run_criterion(8, "hand-simulated four-commit trace", criterion_hand_simulation);

  if (g_failures == 0)
    std::cout << "all 8 criteria passed" << std::endl;
  else
    std::cout << g_failures << " criteria failed" << std::endl;
  return g_failures;
}
