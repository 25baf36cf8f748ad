#include "driftgate/harness.hpp"

#include <cmath>
#include <memory>
#include <vector>

#include "driftgate/dataset.hpp"
#include "driftgate/error.hpp"
#include "doctest.h"

namespace dg = driftgate;

namespace {

dg::CommitInstance make(std::int64_t id, std::int64_t t, dg::Label label,
                        std::int64_t fix = -1) {
  dg::CommitInstance c;
  c.id = id;
  c.commit_time = t;
  c.true_label = label;
  if (fix >= 0) c.fix_time = fix;
  return c;
}

dg::ValidationConfig vcfg(dg::Strategy s, int k, std::uint64_t seed) {
  dg::ValidationConfig cfg;
  cfg.strategy = s;
  cfg.k = k;
  cfg.seed = seed;
  return cfg;
}

dg::LearnerFactory majority_factory() {
  return [](std::uint64_t) {
    return std::unique_ptr<dg::Learner>(new dg::MajorityClass());
  };
}

template <class F>
dg::Error expect_error(F&& fn) {
  try {
    fn();
  } catch (const dg::Error& e) {
    return e;
  }
  throw std::runtime_error("expected a driftgate::Error");
}

}  // namespace

TEST_CASE("validity is one when the traces agree, and tracks the gap") {
  dg::RunTrace a, b;
  a.n = b.n = 3;
  a.k = b.k = 2;
  a.pairing_hash = b.pairing_hash = 42;
  a.mean_gmean_by_commit = {0.2, 0.5, 0.8};
  b.mean_gmean_by_commit = {0.2, 0.7, 0.9};

  const dg::ValidityTrace v = dg::evaluation_validity(a, b);
  REQUIRE(v.points.size() == 3);
  CHECK(v.points[0].commit_index == 1);
  CHECK(v.points[0].v == 1.0);
  CHECK(v.points[1].v == doctest::Approx(0.8));
  CHECK(v.points[2].v == doctest::Approx(0.9));
  CHECK(v.points[1].e_ideal == 0.5);
  CHECK(v.points[1].e_nonideal == 0.7);
  CHECK(v.final_v == doctest::Approx(0.9));

  const dg::ValidityTrace self = dg::evaluation_validity(a, a);
  for (const dg::ValidityPoint& p : self.points) CHECK(p.v == 1.0);
  CHECK(self.final_v == 1.0);

  b.pairing_hash = 43;
  CHECK(expect_error([&] { dg::evaluation_validity(a, b); }).kind() ==
        dg::ErrorKind::trace_mismatch);
}

TEST_CASE("zero waiting windows with instant fixes reproduce ideal labels") {
  dg::CommitStream stream;
  for (std::int64_t i = 0; i < 60; ++i) {
    const bool defect = i % 3 == 0;
    auto c = make(i, 1000 + i * 500,
                  defect ? dg::Label::defect : dg::Label::clean,
                  defect ? 1000 + i * 500 : -1);
    c.features[0] = defect ? 1.0 : -1.0;
    stream.instances.push_back(c);
  }
  stream.span_end = stream.instances.back().commit_time;

  dg::LabelingConfig ideal;
  ideal.mode = dg::LabelingMode::ideal;
  dg::LabelingConfig instant;
  instant.mode = dg::LabelingMode::non_hitl;
  instant.w_qa = 0;
  instant.w_bfc = 0;

  const auto validation = vcfg(dg::Strategy::bootstrap, 3, 7);
  const dg::RunTrace ti = dg::run_prequential(stream, majority_factory(), 0,
                                              validation, ideal, 0.99, 5);
  const dg::RunTrace tn = dg::run_prequential(stream, majority_factory(), 0,
                                              validation, instant, 0.99, 5);
  const dg::ValidityTrace v = dg::evaluation_validity(ti, tn);
  for (const dg::ValidityPoint& p : v.points) CHECK(p.v == 1.0);
  CHECK(v.final_v == 1.0);
}

TEST_CASE("waiting-time sweep varies one axis and scores validity") {
  dg::SynthSpec spec;
  spec.n_instances = 600;
  spec.fix_delay.mean_days = 10.0;
  const dg::CommitStream stream = dg::synth_stream(spec, 13);

  dg::LearnerConfig learner;  // hoeffding tree
  const auto validation = vcfg(dg::Strategy::bootstrap, 5, 3);
  const double qa_grid[] = {7.0};
  const double bfc_grid[] = {1.0, 60.0};

  const dg::SweepTable table = dg::waiting_time_sweep(
      stream, qa_grid, bfc_grid, dg::SweepAxis::qa, learner, validation,
      dg::LabelingMode::non_hitl, 0.99, 5);

  CHECK(table.varied == dg::SweepAxis::bfc);
  CHECK(table.fixed_days == 7.0);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].days == 1.0);
  CHECK(table.rows[1].days == 60.0);
  for (const dg::SweepRow& r : table.rows) {
    CHECK(r.final_v >= 0.0);
    CHECK(r.final_v <= 1.0);
  }
  // A one-day waiting window silently mislabels nearly every defect; a
  // sixty-day window reveals almost all of them.
  CHECK(table.rows[1].final_v > table.rows[0].final_v);
}

TEST_CASE("sweep input contract") {
  dg::SynthSpec spec;
  spec.n_instances = 30;
  const dg::CommitStream stream = dg::synth_stream(spec, 1);
  dg::LearnerConfig learner;
  learner.kind = dg::LearnerKind::majority;
  const auto validation = vcfg(dg::Strategy::cross, 2, 1);
  const double one[] = {7.0};
  const double two[] = {1.0, 3.0};
  const double none[] = {7.0};
  const double negative[] = {-1.0};

  CHECK(expect_error([&] {
          dg::waiting_time_sweep(stream, std::span<const double>{}, one,
                                 dg::SweepAxis::qa, learner, validation,
                                 dg::LabelingMode::non_hitl, 0.99, 3);
        }).kind() == dg::ErrorKind::bad_config);
  CHECK(expect_error([&] {
          dg::waiting_time_sweep(stream, two, two, dg::SweepAxis::qa, learner,
                                 validation, dg::LabelingMode::non_hitl, 0.99,
                                 3);
        }).kind() == dg::ErrorKind::bad_config);
  CHECK(expect_error([&] {
          dg::waiting_time_sweep(stream, one, two, dg::SweepAxis::qa, learner,
                                 validation, dg::LabelingMode::ideal, 0.99, 3);
        }).kind() == dg::ErrorKind::bad_config);
  CHECK(expect_error([&] {
          dg::waiting_time_sweep(stream, none, negative, dg::SweepAxis::qa,
                                 learner, validation,
                                 dg::LabelingMode::non_hitl, 0.99, 3);
        }).kind() == dg::ErrorKind::bad_config);
}

TEST_CASE("rate_stderr is the binomial standard error") {
  CHECK(dg::rate_stderr(0.5, 100) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(dg::rate_stderr(0.0, 10) == 0.0);
  CHECK(dg::rate_stderr(0.3, 0) == 0.0);
}

TEST_CASE("type error experiment guards its inputs") {
  dg::SynthSpec spec;
  spec.n_instances = 40;
  spec.fix_delay.mean_days = 2.0;
  const dg::CommitStream stream = dg::synth_stream(spec, 4);
  const auto validation = vcfg(dg::Strategy::bootstrap, 3, 1);

  dg::LearnerConfig fixed_learner;  // deterministic tree
  const double levels[] = {0.0, 0.05, 0.10};
  CHECK(expect_error([&] {
          dg::type_error_experiment(stream, fixed_learner, validation, 0.99, 2,
                                    levels);
        }).kind() == dg::ErrorKind::non_randomized_learner);

  dg::LearnerConfig bagging;
  bagging.kind = dg::LearnerKind::poisson_bagging;
  bagging.ensemble.n_models = 2;
  const double missing_zero[] = {0.05, 0.10, 0.2};
  const double unordered[] = {0.0, 0.10, 0.05};
  const double pair_only[] = {0.0, 0.05};
  CHECK(expect_error([&] {
          dg::type_error_experiment(stream, bagging, validation, 0.99, 2,
                                    missing_zero);
        }).kind() == dg::ErrorKind::bad_config);
  CHECK(expect_error([&] {
          dg::type_error_experiment(stream, bagging, validation, 0.99, 2,
                                    unordered);
        }).kind() == dg::ErrorKind::bad_config);
  CHECK(expect_error([&] {
          dg::type_error_experiment(stream, bagging, validation, 0.99, 2,
                                    pair_only);
        }).kind() == dg::ErrorKind::bad_config);
  CHECK(expect_error([&] {
          dg::type_error_experiment(stream, bagging, validation, 0.99, 0,
                                    levels);
        }).kind() == dg::ErrorKind::bad_config);
}

TEST_CASE("type error experiment bookkeeping") {
  dg::SynthSpec spec;
  spec.n_instances = 150;
  spec.fix_delay.mean_days = 2.0;
  const dg::CommitStream stream = dg::synth_stream(spec, 6);

  dg::LearnerConfig bagging;
  bagging.kind = dg::LearnerKind::poisson_bagging;
  bagging.ensemble.n_models = 3;
  const double levels[] = {0.0, 0.3, 0.6};

  const dg::ErrorRateReport report = dg::type_error_experiment(
      stream, bagging, vcfg(dg::Strategy::bootstrap, 3, 2), 0.99, 3, levels,
      0.05, 1.0, 4);

  CHECK(report.repetitions == 3);
  CHECK(report.noise_a == 0.3);
  CHECK(report.noise_b == 0.6);
  CHECK(report.mcnemar_alpha == 1.0);
  CHECK(report.wilcoxon.trials == 3);
  CHECK(report.sign.trials == 3);
  CHECK(report.mcnemar.trials == 9);  // reps x folds
  for (const dg::TestErrorRates* rates :
       {&report.mcnemar, &report.wilcoxon, &report.sign}) {
    for (double r : {rates->reject_nochange, rates->reject_noise_a,
                     rates->reject_noise_b}) {
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
  }
  CHECK(report.mcnemar.test == dg::TestKind::mcnemar);
  CHECK(report.wilcoxon.test == dg::TestKind::wilcoxon);
  CHECK(report.sign.test == dg::TestKind::sign);
}

TEST_CASE("comparing a run against itself never rejects") {
  dg::SynthSpec spec;
  spec.n_instances = 300;
  const dg::CommitStream stream = dg::synth_stream(spec, 15);
  dg::LearnerConfig tree;
  dg::LabelingConfig ideal;
  ideal.mode = dg::LabelingMode::ideal;

  const dg::CompareTrace trace =
      dg::compare_runs(stream, tree, ideal, tree, ideal,
                       vcfg(dg::Strategy::cross, 10, 4), 0.99, 5);
  REQUIRE(trace.points.size() == 5);
  for (const dg::ComparePoint& p : trace.points) {
    CHECK(p.mean_a == p.mean_b);
    CHECK(p.wilcoxon.p_value == 1.0);
    CHECK_FALSE(p.wilcoxon.reject);
    CHECK(p.wilcoxon.n_effective == 0);
  }
  CHECK(trace.points.back().commit_index == 300);
}

TEST_CASE("comparison flags a noise-handicapped twin") {
  dg::SynthSpec spec;
  spec.n_instances = 800;
  const dg::CommitStream stream = dg::synth_stream(spec, 16);
  dg::LearnerConfig tree;
  dg::LearnerConfig noisy = tree;
  noisy.noise_p = 0.4;
  dg::LabelingConfig ideal;
  ideal.mode = dg::LabelingMode::ideal;

  const dg::CompareTrace trace =
      dg::compare_runs(stream, tree, ideal, noisy, ideal,
                       vcfg(dg::Strategy::cross, 10, 4), 0.99, 5);
  const dg::ComparePoint& last = trace.points.back();
  CHECK(last.mean_a > last.mean_b);
  CHECK(last.wilcoxon.reject);
  CHECK(last.wilcoxon.direction == -1);
  CHECK(last.wilcoxon.p_value < 0.05);
}

TEST_CASE("mismatched traces refuse to compare") {
  dg::SynthSpec spec;
  spec.n_instances = 80;
  const dg::CommitStream stream = dg::synth_stream(spec, 18);
  dg::LabelingConfig ideal;
  ideal.mode = dg::LabelingMode::ideal;

  const dg::RunTrace a = dg::run_prequential(
      stream, majority_factory(), 0, vcfg(dg::Strategy::cross, 3, 1), ideal,
      0.99, 4);
  const dg::RunTrace b = dg::run_prequential(
      stream, majority_factory(), 0, vcfg(dg::Strategy::cross, 3, 2), ideal,
      0.99, 4);
  CHECK(expect_error([&] { dg::compare_traces(a, b); }).kind() ==
        dg::ErrorKind::trace_mismatch);
}

TEST_CASE("resampling study reports the five standard configurations") {
  dg::SynthSpec spec;
  spec.n_instances = 400;
  spec.fix_delay.mean_days = 8.0;
  const dg::CommitStream stream = dg::synth_stream(spec, 42);

  dg::LearnerConfig tree;
  dg::LabelingConfig hitl;  // hitl(7, 15) defaults
  const auto rows = dg::resampling_study(stream, tree,
                                         vcfg(dg::Strategy::bootstrap, 3, 5),
                                         hitl, 0.99);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].config == "hoeffding_tree");
  CHECK(rows[1].config == "under_over_bagging_1");
  CHECK(rows[2].config == "under_over_bagging_2");
  CHECK(rows[3].config == "rus_boost_1");
  CHECK(rows[4].config == "rus_boost_2");
  for (const dg::ResampleRow& r : rows) {
    for (double m : {r.r1, r.fpr, r.gmean}) {
      CHECK(m >= 0.0);
      CHECK(m <= 1.0);
    }
  }
}
