#include "driftgate/hoeffding_tree.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "driftgate/error.hpp"

namespace driftgate {

namespace {

constexpr double kLog2 = 0.69314718055994530941723212145818;
constexpr double kMinStddev = 1e-9;
constexpr int kSplitCandidates = 10;

double safe_log2(double x) { return std::log(x) / kLog2; }

}  // namespace

void GaussianEstimator::update(double x, double weight) {
  if (weight <= 0.0) return;
  weight_ += weight;
  const double delta = x - mean_;
  mean_ += weight * delta / weight_;
  m2_ += weight * delta * (x - mean_);
}

double GaussianEstimator::variance() const {
  return weight_ > 0.0 ? std::max(m2_ / weight_, 0.0) : 0.0;
}

double GaussianEstimator::stddev() const { return std::sqrt(variance()); }

double GaussianEstimator::pdf(double x) const {
  const double sd = std::max(stddev(), kMinStddev);
  const double z = (x - mean_) / sd;
  return std::exp(-0.5 * z * z) / (sd * 2.5066282746310005024157652848110);
}

double GaussianEstimator::cdf(double x) const {
  const double sd = stddev();
  if (sd <= kMinStddev) return x >= mean_ ? 1.0 : 0.0;
  return 0.5 * std::erfc(-(x - mean_) / (sd * 1.4142135623730950488));
}

void HoeffdingLeafStats::update(const Features& x, Label y, double weight) {
  if (weight <= 0.0) return;
  const bool first = !any_seen();
  class_weight_[static_cast<std::size_t>(y)] += weight;
  for (int f = 0; f < kFeatureCount; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    feature_stats_[static_cast<std::size_t>(y)][fi].update(x[fi], weight);
    if (first || x[fi] < min_seen_[fi]) min_seen_[fi] = x[fi];
    if (first || x[fi] > max_seen_[fi]) max_seen_[fi] = x[fi];
  }
}

double hoeffding_bound(double range, double delta, double n) {
  if (!(delta > 0.0) || delta >= 1.0)
    raise(ErrorKind::bad_config, "hoeffding delta must be in (0, 1)");
  if (!(n > 0.0)) raise(ErrorKind::domain_error, "hoeffding bound needs n > 0");
  return std::sqrt(range * range * std::log(1.0 / delta) / (2.0 * n));
}

double binary_entropy(double w_clean, double w_defect) {
  const double total = w_clean + w_defect;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double w : {w_clean, w_defect}) {
    if (w > 0.0) {
      const double p = w / total;
      h -= p * safe_log2(p);
    }
  }
  return h;
}

SplitDecision hoeffding_split_check(const HoeffdingLeafStats& stats,
                                    const HoeffdingConfig& cfg) {
  SplitDecision d;
  const double total = stats.total_weight();
  if (total <= 0.0) return d;

  const double parent_entropy =
      binary_entropy(stats.class_weight(Label::clean),
                     stats.class_weight(Label::defect));
  d.epsilon = hoeffding_bound(1.0, cfg.delta, total);

  // Best gain per attribute; the Hoeffding comparison is between the two
  // best attributes.
  double best = 0.0, second = 0.0;
  for (int f = 0; f < kFeatureCount; ++f) {
    const double lo = stats.min_seen(f);
    const double hi = stats.max_seen(f);
    if (!(hi > lo)) continue;

    double attr_gain = 0.0;
    double attr_point = 0.0;
    std::array<double, 2> attr_left{0.0, 0.0};
    for (int i = 1; i <= kSplitCandidates; ++i) {
      const double t =
          lo + (hi - lo) * static_cast<double>(i) / (kSplitCandidates + 1);
      std::array<double, 2> left{0.0, 0.0};
      std::array<double, 2> right{0.0, 0.0};
      for (Label y : {Label::clean, Label::defect}) {
        const auto yi = static_cast<std::size_t>(y);
        const double wy = stats.class_weight(y);
        if (wy <= 0.0) continue;
        const double frac = stats.feature_stats(y, f).cdf(t);
        left[yi] = wy * frac;
        right[yi] = wy * (1.0 - frac);
      }
      const double wl = left[0] + left[1];
      const double wr = right[0] + right[1];
      if (wl <= 0.0 || wr <= 0.0) continue;
      const double child =
          (wl * binary_entropy(left[0], left[1]) +
           wr * binary_entropy(right[0], right[1])) /
          total;
      const double gain = parent_entropy - child;
      if (gain > attr_gain) {
        attr_gain = gain;
        attr_point = t;
        attr_left = left;
      }
    }

    if (attr_gain > best) {
      second = best;
      best = attr_gain;
      d.attribute = f;
      d.split_point = attr_point;
      d.left_class_weight = attr_left;
      d.right_class_weight = {stats.class_weight(Label::clean) - attr_left[0],
                              stats.class_weight(Label::defect) - attr_left[1]};
    } else if (attr_gain > second) {
      second = attr_gain;
    }
  }

  d.gain_best = best;
  d.gain_second = second;
  d.should_split =
      best > 0.0 && (best - second > d.epsilon || d.epsilon < cfg.tie_threshold);
  return d;
}

struct HoeffdingTree::Node {
  // Internal node fields; a node is a leaf iff left is null.
  int attribute = -1;
  double split_point = 0.0;
  std::unique_ptr<Node> left;
  std::unique_ptr<Node> right;

  HoeffdingLeafStats stats;
  // Class weights seeded from the parent split; folded into predictions
  // until the leaf accumulates its own evidence.
  std::array<double, 2> seed_weight{0.0, 0.0};
  double weight_at_last_check = 0.0;

  bool is_leaf() const { return left == nullptr; }

  const Node* route(const Features& x) const {
    return x[static_cast<std::size_t>(attribute)] <= split_point ? left.get()
                                                                 : right.get();
  }
  Node* route(const Features& x) {
    return x[static_cast<std::size_t>(attribute)] <= split_point ? left.get()
                                                                 : right.get();
  }

  double combined_class_weight(Label y) const {
    return stats.class_weight(y) + seed_weight[static_cast<std::size_t>(y)];
  }
};

HoeffdingTree::HoeffdingTree(HoeffdingConfig cfg) : cfg_(cfg) {
  if (!(cfg.delta > 0.0) || cfg.delta >= 1.0)
    raise(ErrorKind::bad_config, "hoeffding delta must be in (0, 1)");
  if (cfg.grace_period < 1.0)
    raise(ErrorKind::bad_config, "grace_period must be >= 1");
  if (cfg.tie_threshold < 0.0)
    raise(ErrorKind::bad_config, "tie_threshold must be >= 0");
  root_ = std::make_unique<Node>();
}

HoeffdingTree::~HoeffdingTree() = default;

Prediction HoeffdingTree::predict(const Features& x) {
  const Node* node = root_.get();
  while (!node->is_leaf()) node = node->route(x);

  const double w_clean = node->combined_class_weight(Label::clean);
  const double w_defect = node->combined_class_weight(Label::defect);
  const double total = w_clean + w_defect;
  if (total <= 0.0) return {Label::clean, 0.0};

  // Naive Bayes at mature leaves, class frequencies otherwise.
  if (node->stats.total_weight() >= cfg_.grace_period && w_clean > 0.0 &&
      w_defect > 0.0) {
    double log_post[2] = {
        std::log(node->combined_class_weight(Label::clean) / total),
        std::log(node->combined_class_weight(Label::defect) / total)};
    for (int f = 0; f < kFeatureCount; ++f) {
      const auto fi = static_cast<std::size_t>(f);
      const GaussianEstimator& gc = node->stats.feature_stats(Label::clean, f);
      const GaussianEstimator& gd = node->stats.feature_stats(Label::defect, f);
      // A feature counts only when both classes have evidence for it;
      // otherwise a class holding bare seed weight would skip every
      // likelihood factor and outscore one paying all of them.
      if (gc.weight() <= 0.0 || gd.weight() <= 0.0) continue;
      log_post[0] += std::log(
          std::max(gc.pdf(x[fi]), std::numeric_limits<double>::min()));
      log_post[1] += std::log(
          std::max(gd.pdf(x[fi]), std::numeric_limits<double>::min()));
    }
    const double m = std::max(log_post[0], log_post[1]);
    const double e0 = std::exp(log_post[0] - m);
    const double e1 = std::exp(log_post[1] - m);
    return prediction_from_score(e1 / (e0 + e1));
  }
  return prediction_from_score(w_defect / total);
}

void HoeffdingTree::train(const Features& x, Label y, int weight) {
  if (weight < 0) raise(ErrorKind::domain_error, "train weight must be >= 0");
  if (weight == 0) return;

  Node* node = root_.get();
  while (!node->is_leaf()) node = node->route(x);
  node->stats.update(x, y, static_cast<double>(weight));

  const double seen = node->stats.total_weight();
  if (seen < cfg_.grace_period ||
      seen - node->weight_at_last_check < cfg_.grace_period)
    return;
  node->weight_at_last_check = seen;

  const SplitDecision d = hoeffding_split_check(node->stats, cfg_);
  if (!d.should_split) return;

  node->attribute = d.attribute;
  node->split_point = d.split_point;
  node->left = std::make_unique<Node>();
  node->right = std::make_unique<Node>();
  node->left->seed_weight = d.left_class_weight;
  node->right->seed_weight = d.right_class_weight;
  node->stats = HoeffdingLeafStats{};
}

const HoeffdingLeafStats& HoeffdingTree::leaf_stats(const Features& x) const {
  const Node* node = root_.get();
  while (!node->is_leaf()) node = node->route(x);
  return node->stats;
}

std::size_t HoeffdingTree::node_count() const {
  std::vector<const Node*> stack{root_.get()};
  std::size_t n = 0;
  while (!stack.empty()) {
    const Node* node = stack.back();
    stack.pop_back();
    ++n;
    if (!node->is_leaf()) {
      stack.push_back(node->left.get());
      stack.push_back(node->right.get());
    }
  }
  return n;
}

int HoeffdingTree::depth() const {
  struct Entry {
    const Node* node;
    int depth;
  };
  std::vector<Entry> stack{{root_.get(), 0}};
  int best = 0;
  while (!stack.empty()) {
    const Entry e = stack.back();
    stack.pop_back();
    best = std::max(best, e.depth);
    if (!e.node->is_leaf()) {
      stack.push_back({e.node->left.get(), e.depth + 1});
      stack.push_back({e.node->right.get(), e.depth + 1});
    }
  }
  return best;
}

}  // namespace driftgate
