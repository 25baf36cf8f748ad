#include "driftgate/hoeffding_tree.hpp"

#include <cmath>

#include "driftgate/error.hpp"
#include "driftgate/rng.hpp"
#include "doctest.h"

namespace dg = driftgate;

namespace {

dg::Features only_x0(double v) {
  dg::Features x{};
  x[0] = v;
  return x;
}

// Two-feature, perfectly separated classes; everything else constant.
void feed_separable(dg::HoeffdingLeafStats& stats, double weight_per_class) {
  dg::Features clean{};
  clean[0] = -2.0;
  clean[1] = -2.0;
  dg::Features defect{};
  defect[0] = 2.0;
  defect[1] = 2.0;
  stats.update(clean, dg::Label::clean, weight_per_class);
  stats.update(defect, dg::Label::defect, weight_per_class);
}

}  // namespace

TEST_CASE("hoeffding_bound matches the closed form") {
  CHECK(std::abs(dg::hoeffding_bound(1.0, 1e-7, 200.0) - 0.200736740850786) <
        1e-12);
  CHECK(dg::hoeffding_bound(2.0, 1e-7, 200.0) ==
        doctest::Approx(2.0 * dg::hoeffding_bound(1.0, 1e-7, 200.0)));

  double prev = dg::hoeffding_bound(1.0, 1e-7, 10.0);
  for (double n : {100.0, 1000.0, 1e6, 1e9}) {
    const double e = dg::hoeffding_bound(1.0, 1e-7, n);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(dg::hoeffding_bound(1.0, 1e-7, 1e9) < 0.001);

  CHECK_THROWS_AS(dg::hoeffding_bound(1.0, 0.0, 10.0), dg::Error);
  CHECK_THROWS_AS(dg::hoeffding_bound(1.0, 1.0, 10.0), dg::Error);
  CHECK_THROWS_AS(dg::hoeffding_bound(1.0, 0.5, 0.0), dg::Error);
}

TEST_CASE("binary_entropy in bits") {
  CHECK(dg::binary_entropy(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dg::binary_entropy(5.0, 0.0) == 0.0);
  CHECK(dg::binary_entropy(0.0, 0.0) == 0.0);
  CHECK(std::abs(dg::binary_entropy(1.0, 3.0) - 0.8112781244591328) < 1e-12);
  CHECK(dg::binary_entropy(2.0, 7.0) == dg::binary_entropy(7.0, 2.0));
}

TEST_CASE("GaussianEstimator tracks weighted moments") {
  dg::GaussianEstimator g;
  for (double x : {1.0, 2.0, 3.0}) g.update(x, 1.0);
  CHECK(g.weight() == 3.0);
  CHECK(g.mean() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(g.variance() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(g.cdf(2.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.pdf(1.0) == doctest::Approx(g.pdf(3.0)).epsilon(1e-12));

  dg::GaussianEstimator one, three;
  one.update(5.0, 3.0);
  for (int i = 0; i < 3; ++i) three.update(5.0, 1.0);
  CHECK(one == three);

  dg::GaussianEstimator untouched, zeroed;
  zeroed.update(9.0, 0.0);
  zeroed.update(9.0, -1.0);
  CHECK(zeroed == untouched);

  dg::GaussianEstimator point;
  point.update(5.0, 2.0);
  CHECK(point.variance() == 0.0);
  CHECK(point.cdf(4.9) == 0.0);
  CHECK(point.cdf(5.0) == 1.0);
  CHECK(point.cdf(5.1) == 1.0);
}

TEST_CASE("leaf stats are linear in the weight and track ranges") {
  dg::HoeffdingLeafStats once, thrice;
  dg::Features x = only_x0(1.5);
  x[7] = -4.0;
  once.update(x, dg::Label::defect, 3.0);
  for (int i = 0; i < 3; ++i) thrice.update(x, dg::Label::defect, 1.0);
  CHECK(once == thrice);
  CHECK(once.class_weight(dg::Label::defect) == 3.0);
  CHECK(once.class_weight(dg::Label::clean) == 0.0);
  CHECK(once.total_weight() == 3.0);

  dg::HoeffdingLeafStats ranges;
  ranges.update(only_x0(-1.0), dg::Label::clean, 1.0);
  ranges.update(only_x0(2.0), dg::Label::defect, 1.0);
  CHECK(ranges.min_seen(0) == -1.0);
  CHECK(ranges.max_seen(0) == 2.0);
  CHECK(ranges.min_seen(5) == 0.0);
  CHECK(ranges.max_seen(5) == 0.0);

  dg::HoeffdingLeafStats untouched, zeroed;
  zeroed.update(x, dg::Label::clean, 0.0);
  CHECK(zeroed == untouched);
  CHECK_FALSE(untouched.any_seen());
}

TEST_CASE("split check separates a clean concept and reports the margin") {
  // Only feature 0 is informative, so the runner-up gain stays at zero and
  // the margin clears the bound.
  dg::HoeffdingLeafStats stats;
  stats.update(only_x0(-2.0), dg::Label::clean, 150.0);
  stats.update(only_x0(2.0), dg::Label::defect, 150.0);
  const dg::HoeffdingConfig cfg;
  const dg::SplitDecision d = dg::hoeffding_split_check(stats, cfg);
  CHECK(d.should_split);
  CHECK(d.attribute == 0);
  CHECK(d.split_point > -2.0);
  CHECK(d.split_point < 2.0);
  CHECK(d.gain_best == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d.epsilon ==
        doctest::Approx(dg::hoeffding_bound(1.0, cfg.delta, 300.0)));
  CHECK(d.left_class_weight[0] == doctest::Approx(150.0));
  CHECK(d.left_class_weight[1] == doctest::Approx(0.0));
  CHECK(d.right_class_weight[1] == doctest::Approx(150.0));
}

TEST_CASE("tie threshold forces a decision between equal attributes") {
  dg::HoeffdingLeafStats stats;
  feed_separable(stats, 500000.0);  // features 0 and 1 tie at gain 1

  dg::HoeffdingConfig tie;
  tie.tie_threshold = 0.05;
  dg::SplitDecision d = dg::hoeffding_split_check(stats, tie);
  CHECK(d.gain_best == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d.gain_second == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d.epsilon < 0.05);
  CHECK(d.should_split);

  dg::HoeffdingConfig strict;
  strict.tie_threshold = 0.0;
  d = dg::hoeffding_split_check(stats, strict);
  CHECK_FALSE(d.should_split);
}

TEST_CASE("no split without evidence") {
  dg::HoeffdingLeafStats empty;
  dg::SplitDecision d = dg::hoeffding_split_check(empty, {});
  CHECK_FALSE(d.should_split);
  CHECK(d.attribute == -1);

  // Identical feature values in both classes leave nothing to split on.
  dg::HoeffdingLeafStats flat;
  flat.update(only_x0(1.0), dg::Label::clean, 1000.0);
  flat.update(only_x0(1.0), dg::Label::defect, 1000.0);
  d = dg::hoeffding_split_check(flat, {});
  CHECK_FALSE(d.should_split);
  CHECK(d.gain_best == 0.0);
}

TEST_CASE("tree stays a leaf through the grace period, then splits") {
  dg::HoeffdingTree tree;
  dg::SplitMix64 rng(1);
  auto sample = [&](dg::Label y) {
    dg::Features x{};
    x[0] = rng.normal(y == dg::Label::defect ? 2.0 : -2.0, 0.1);
    return x;
  };
  for (int i = 0; i < 150; ++i) {
    const dg::Label y = i % 2 == 0 ? dg::Label::clean : dg::Label::defect;
    tree.train(sample(y), y, 1);
  }
  CHECK(tree.node_count() == 1);
  CHECK(tree.depth() == 0);
  for (int i = 0; i < 50; ++i) {
    const dg::Label y = i % 2 == 0 ? dg::Label::clean : dg::Label::defect;
    tree.train(sample(y), y, 1);
  }
  CHECK(tree.node_count() == 3);
  CHECK(tree.depth() == 1);

  // Fresh children answer from the split's seeded class masses.
  CHECK(tree.leaf_stats(only_x0(-3.0)).total_weight() == 0.0);
  CHECK(tree.predict(only_x0(-3.0)).label == dg::Label::clean);
  CHECK(tree.predict(only_x0(3.0)).label == dg::Label::defect);
}

TEST_CASE("untrained tree predicts clean with zero score") {
  dg::HoeffdingTree tree;
  const dg::Prediction p = tree.predict(only_x0(4.0));
  CHECK(p.label == dg::Label::clean);
  CHECK(p.score == 0.0);
}

TEST_CASE("immature leaves answer with class frequencies") {
  dg::HoeffdingTree tree;
  for (int i = 0; i < 3; ++i) tree.train(only_x0(1.0), dg::Label::defect, 1);
  tree.train(only_x0(1.0), dg::Label::clean, 1);
  const dg::Prediction p = tree.predict(only_x0(0.0));
  CHECK(p.score == 0.75);
  CHECK(p.label == dg::Label::defect);
}

TEST_CASE("mature single leaf switches to naive Bayes") {
  dg::HoeffdingTree tree({1e-7, 200.0, 0.0});
  dg::SplitMix64 rng(2);
  for (int i = 0; i < 300; ++i) {
    const dg::Label y = i % 2 == 0 ? dg::Label::clean : dg::Label::defect;
    dg::Features x{};
    x[0] = rng.normal(y == dg::Label::defect ? 0.2 : -0.2, 1.0);
    tree.train(x, y, 1);
  }
  CHECK(tree.node_count() == 1);  // overlap keeps the gain under the bound
  const dg::Prediction neg = tree.predict(only_x0(-3.0));
  const dg::Prediction pos = tree.predict(only_x0(3.0));
  CHECK(neg.label == dg::Label::clean);
  CHECK(pos.label == dg::Label::defect);
  CHECK(neg.score < 0.5);
  CHECK(pos.score > 0.5);
}

TEST_CASE("training weight three equals three unit updates") {
  dg::HoeffdingTree a, b;
  dg::Features x = only_x0(0.5);  // dyadic, so the moment updates stay exact
  a.train(x, dg::Label::defect, 3);
  for (int i = 0; i < 3; ++i) b.train(x, dg::Label::defect, 1);
  CHECK(a.leaf_stats(x) == b.leaf_stats(x));

  a.train(x, dg::Label::clean, 0);
  CHECK(a.leaf_stats(x).class_weight(dg::Label::clean) == 0.0);
  CHECK_THROWS_AS(a.train(x, dg::Label::clean, -1), dg::Error);
}

TEST_CASE("tree learns a separable stream almost perfectly") {
  dg::HoeffdingTree tree;
  dg::SplitMix64 rng(3);
  auto draw = [&](dg::Label y) {
    dg::Features x{};
    x[0] = rng.normal(y == dg::Label::defect ? 1.0 : -1.0, 0.25);
    for (int f = 1; f < dg::kFeatureCount; ++f)
      x[static_cast<std::size_t>(f)] = rng.normal(0.0, 1.0);
    return x;
  };
  for (int i = 0; i < 2000; ++i) {
    const dg::Label y = rng.next_u01() < 0.4 ? dg::Label::defect : dg::Label::clean;
    tree.train(draw(y), y, 1);
  }
  int agree = 0;
  for (int i = 0; i < 500; ++i) {
    const dg::Label y = rng.next_u01() < 0.4 ? dg::Label::defect : dg::Label::clean;
    if (tree.predict(draw(y)).label == y) ++agree;
  }
  CHECK(agree >= 495);
  CHECK(tree.node_count() >= 3);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(dg::HoeffdingTree({0.0, 200.0, 0.05}), dg::Error);
  CHECK_THROWS_AS(dg::HoeffdingTree({1e-7, 0.5, 0.05}), dg::Error);
  CHECK_THROWS_AS(dg::HoeffdingTree({1e-7, 200.0, -0.1}), dg::Error);
}
