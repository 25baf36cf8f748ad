#pragma once

#include <memory>

#include "driftgate/commit.hpp"
#include "driftgate/learners_base.hpp"

namespace driftgate {

struct HoeffdingConfig {
  double delta = 1e-7;
  double grace_period = 200.0;
  double tie_threshold = 0.05;
};

// Weighted online mean/variance (Welford), plus Gaussian pdf/cdf readouts.
class GaussianEstimator {
 public:
  void update(double x, double weight);

  double weight() const { return weight_; }
  double mean() const { return mean_; }
  double variance() const;
  double stddev() const;
  double pdf(double x) const;
  // Probability mass below x under the fitted normal.
  double cdf(double x) const;

  bool operator==(const GaussianEstimator&) const = default;

 private:
  double weight_ = 0.0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Sufficient statistics kept at a leaf: per-class weights, per-class
// per-feature Gaussians, and per-feature observed ranges.
class HoeffdingLeafStats {
 public:
  void update(const Features& x, Label y, double weight);

  double total_weight() const { return class_weight_[0] + class_weight_[1]; }
  double class_weight(Label y) const {
    return class_weight_[static_cast<std::size_t>(y)];
  }
  const GaussianEstimator& feature_stats(Label y, int feature) const {
    return feature_stats_[static_cast<std::size_t>(y)]
                         [static_cast<std::size_t>(feature)];
  }
  double min_seen(int feature) const {
    return min_seen_[static_cast<std::size_t>(feature)];
  }
  double max_seen(int feature) const {
    return max_seen_[static_cast<std::size_t>(feature)];
  }
  bool any_seen() const { return total_weight() > 0.0; }

  bool operator==(const HoeffdingLeafStats&) const = default;

 private:
  std::array<double, 2> class_weight_{0.0, 0.0};
  std::array<std::array<GaussianEstimator, kFeatureCount>, 2> feature_stats_{};
  Features min_seen_{};
  Features max_seen_{};
};

struct SplitDecision {
  int attribute = -1;
  double split_point = 0.0;
  double gain_best = 0.0;
  double gain_second = 0.0;
  double epsilon = 0.0;
  bool should_split = false;
  // Class weights routed to each side at the chosen split; used to seed the
  // children so fresh leaves predict sensibly before they see data.
  std::array<double, 2> left_class_weight{0.0, 0.0};
  std::array<double, 2> right_class_weight{0.0, 0.0};
};

double hoeffding_bound(double range, double delta, double n);
// Entropy in bits of a two-class weight vector (defines R = 1).
double binary_entropy(double w_clean, double w_defect);

// Evaluates candidate binary splits (10 equally spaced cut points per
// feature inside the observed range, class mass split by the per-class
// Gaussians) and applies the Hoeffding/tie criterion.
SplitDecision hoeffding_split_check(const HoeffdingLeafStats& stats,
                                    const HoeffdingConfig& cfg);

class HoeffdingTree : public Learner {
 public:
  explicit HoeffdingTree(HoeffdingConfig cfg = {});
  ~HoeffdingTree() override;

  Prediction predict(const Features& x) override;
  void train(const Features& x, Label y, int weight) override;

  const HoeffdingLeafStats& leaf_stats(const Features& x) const;
  std::size_t node_count() const;
  int depth() const;

 private:
  struct Node;
  std::unique_ptr<Node> root_;
  HoeffdingConfig cfg_;
};

}  // namespace driftgate
