#include <benchmark/benchmark.h>

#include <vector>

#include "driftgate/dataset.hpp"
#include "driftgate/hoeffding_tree.hpp"
#include "driftgate/labeling.hpp"
#include "driftgate/prequential.hpp"
#include "driftgate/rng.hpp"
#include "driftgate/stats.hpp"
#include "driftgate/validation.hpp"

namespace dg = driftgate;

namespace {

struct Sample {
  dg::Features x;
  dg::Label y;
};

std::vector<Sample> make_samples(std::size_t n, std::uint64_t seed) {
  dg::SplitMix64 rng(seed);
  std::vector<Sample> samples(n);
  for (Sample& s : samples) {
    s.y = rng.next_u01() < 0.3 ? dg::Label::defect : dg::Label::clean;
    const double shift = s.y == dg::Label::defect ? 1.0 : 0.0;
    for (double& v : s.x) v = rng.normal(shift, 1.0);
  }
  return samples;
}

void BM_fading_confusion_update(benchmark::State& state) {
  const auto samples = make_samples(4096, 1);
  dg::FadingConfusion metrics(0.99);
  std::size_t i = 0;
  for (auto _ : state) {
    const Sample& s = samples[i++ & 4095];
    metrics.update(s.y, s.y == dg::Label::defect ? dg::Label::clean : s.y);
    benchmark::DoNotOptimize(metrics.tp());
  }
}
BENCHMARK(BM_fading_confusion_update);

void BM_hoeffding_train(benchmark::State& state) {
  const auto samples = make_samples(4096, 2);
  dg::HoeffdingTree tree;
  std::size_t i = 0;
  for (auto _ : state) {
    const Sample& s = samples[i++ & 4095];
    tree.train(s.x, s.y, 1);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_hoeffding_train);

void BM_hoeffding_predict(benchmark::State& state) {
  const auto samples = make_samples(4096, 3);
  dg::HoeffdingTree tree;
  for (const Sample& s : samples) tree.train(s.x, s.y, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    const Sample& s = samples[i++ & 4095];
    benchmark::DoNotOptimize(tree.predict(s.x));
  }
}
BENCHMARK(BM_hoeffding_predict);

void BM_split_check(benchmark::State& state) {
  const auto samples = make_samples(512, 4);
  dg::HoeffdingLeafStats stats;
  for (const Sample& s : samples) stats.update(s.x, s.y, 1.0);
  const dg::HoeffdingConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(dg::hoeffding_split_check(stats, cfg));
}
BENCHMARK(BM_split_check);

void BM_assign_roles_bootstrap(benchmark::State& state) {
  dg::ValidationConfig cfg;
  cfg.strategy = dg::Strategy::bootstrap;
  cfg.k = 10;
  cfg.seed = 5;
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(dg::assign_roles(cfg, i++));
}
BENCHMARK(BM_assign_roles_bootstrap);

void BM_wilcoxon_exact_n20(benchmark::State& state) {
  dg::SplitMix64 rng(6);
  dg::PairedObservations pairs;
  for (int i = 0; i < 20; ++i)
    pairs.push_back(rng.normal(0.0, 1.0), rng.normal(0.2, 1.0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        dg::wilcoxon_signed_rank(pairs, 0.05, dg::WilcoxonMode::exact));
}
BENCHMARK(BM_wilcoxon_exact_n20);

void BM_label_engine_hitl(benchmark::State& state) {
  dg::SynthSpec spec;
  spec.n_instances = 4096;
  const dg::CommitStream stream = dg::synth_stream(spec, 7);
  dg::LabelingConfig cfg;  // hitl, 7d/15d
  auto engine = std::make_unique<dg::LabelDelayEngine>(cfg, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    if (i == stream.instances.size()) {
      state.PauseTiming();
      engine = std::make_unique<dg::LabelDelayEngine>(cfg, 1);
      i = 0;
      state.ResumeTiming();
    }
    const dg::CommitInstance& commit = stream.instances[i++];
    benchmark::DoNotOptimize(engine->due_labels(commit.commit_time));
    engine->submit(commit, i & 1 ? dg::Label::defect : dg::Label::clean);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_label_engine_hitl);

void BM_prequential_run(benchmark::State& state) {
  dg::SynthSpec spec;
  spec.n_instances = 1000;
  const dg::CommitStream stream = dg::synth_stream(spec, 9);
  dg::LearnerConfig learner;  // hoeffding tree
  learner.seed = 9;
  dg::ValidationConfig validation;
  validation.k = static_cast<int>(state.range(0));
  validation.seed = 9;
  dg::LabelingConfig labeling;  // hitl, 7d/15d
  dg::RunOptions options{1, false, false};
  for (auto _ : state)
    benchmark::DoNotOptimize(dg::run_prequential(
        stream, learner, validation, labeling, 0.99, 10, options));
  state.SetItemsProcessed(state.iterations() * 1000 * state.range(0));
}
BENCHMARK(BM_prequential_run)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
