#pragma once

#include <memory>
#include <vector>

#include "driftgate/hoeffding_tree.hpp"
#include "driftgate/learners_base.hpp"
#include "driftgate/rng.hpp"

namespace driftgate {

enum class LearnerKind {
  majority,
  gaussian_nb,
  hoeffding_tree,
  poisson_bagging,
  under_over_bagging,
  rus_boost,
  noise_filter,
};

const char* to_string(LearnerKind kind);
bool learner_kind_from_string(const std::string& text, LearnerKind& out);

struct EnsembleConfig {
  int n_models = 10;
  double lambda = 6.0;  // Poisson mean for online bagging
  int resample_rate = 1;
};

struct LearnerConfig {
  LearnerKind kind = LearnerKind::hoeffding_tree;
  HoeffdingConfig hoeffding{};
  EnsembleConfig ensemble{};
  // Probability of reversing a prediction. Applies to kind == noise_filter
  // (tree base) and, when > 0, wraps any other kind too.
  double noise_p = 0.0;
  // Online per-feature standardization in front of the base learner.
  bool standardize = false;
  std::uint64_t seed = 1;
};

void validate(const LearnerConfig& cfg);
// True when predictions depend on the seed (ensembles, active noise).
bool is_randomized(const LearnerConfig& cfg);

std::unique_ptr<Learner> make_learner(const LearnerConfig& cfg);
std::unique_ptr<Learner> make_learner(const LearnerConfig& cfg,
                                      std::uint64_t seed);
// Factory whose argument seed replaces cfg.seed.
LearnerFactory learner_factory(const LearnerConfig& cfg);

class MajorityClass : public Learner {
 public:
  Prediction predict(const Features& x) override;
  void train(const Features& x, Label y, int weight) override;
  double class_weight(Label y) const {
    return weight_[static_cast<std::size_t>(y)];
  }

 private:
  std::array<double, 2> weight_{0.0, 0.0};
};

class GaussianNaiveBayes : public Learner {
 public:
  Prediction predict(const Features& x) override;
  void train(const Features& x, Label y, int weight) override;

 private:
  std::array<double, 2> class_weight_{0.0, 0.0};
  std::array<std::array<GaussianEstimator, kFeatureCount>, 2> stats_{};
};

// Reverses the base prediction with probability p; training passes through.
class NoiseFilter : public Learner {
 public:
  NoiseFilter(std::unique_ptr<Learner> base, double p, std::uint64_t seed);

  Prediction predict(const Features& x) override;
  void train(const Features& x, Label y, int weight) override;

 private:
  std::unique_ptr<Learner> base_;
  double p_;
  SplitMix64 rng_;
};

std::unique_ptr<Learner> make_noise_filter(std::unique_ptr<Learner> base,
                                           double p, std::uint64_t seed);

// Online bagging: each member trains with weight ~ Poisson(lambda) from its
// own generator; prediction is a majority vote.
class PoissonBagging : public Learner {
 public:
  PoissonBagging(const LearnerFactory& base, int n_models, double lambda,
                 std::uint64_t seed, bool pin_draws_to_one = false);

  Prediction predict(const Features& x) override;
  void train(const Features& x, Label y, int weight) override;

 private:
  struct Member {
    std::unique_ptr<Learner> learner;
    SplitMix64 rng;
  };
  std::vector<Member> members_;
  double lambda_;
  bool pin_draws_to_one_;
};

// Bagging with class-dependent rates: member m undersamples the clean class
// at (m+1)/M and oversamples defects so the effective defect:clean training
// weight tracks resample_rate.
class UnderOverBagging : public Learner {
 public:
  UnderOverBagging(const LearnerFactory& base, int n_models, int resample_rate,
                   std::uint64_t seed);

  Prediction predict(const Features& x) override;
  void train(const Features& x, Label y, int weight) override;

  // Accumulated expected training weight per class across members.
  double trained_weight(Label y) const {
    return trained_weight_[static_cast<std::size_t>(y)];
  }

 private:
  struct Member {
    std::unique_ptr<Learner> learner;
    SplitMix64 rng;
  };
  std::vector<Member> members_;
  double rate_;
  std::array<double, 2> seen_{0.0, 0.0};
  std::array<double, 2> trained_weight_{0.0, 0.0};
};

// Online boosting over sequential members with clean-class undersampling.
// Weight-update constants follow the standard online-boosting scheme
// (correct: lambda /= 2(1-eps); wrong: lambda /= 2 eps; vote weight
// log((1-eps)/eps)). The clean-class sampling factor is normalized by the
// realized boosting weights per class so the effective defect:clean training
// weight tracks resample_rate rather than drifting with member error rates.
class RusBoost : public Learner {
 public:
  RusBoost(const LearnerFactory& base, int n_models, int resample_rate,
           std::uint64_t seed);

  Prediction predict(const Features& x) override;
  void train(const Features& x, Label y, int weight) override;

  double trained_weight(Label y) const {
    return trained_weight_[static_cast<std::size_t>(y)];
  }

 private:
  double member_error(std::size_t m) const;

  struct Member {
    std::unique_ptr<Learner> learner;
    SplitMix64 rng;
    double lambda_correct = 0.0;
    double lambda_wrong = 0.0;
  };
  std::vector<Member> members_;
  double rate_;
  std::array<double, 2> seen_{0.0, 0.0};
  // Mean (over instances of each class) of the summed unscaled boosting
  // weights, used to normalize the clean sampling factor.
  std::array<double, 2> boost_sum_mean_{0.0, 0.0};
  std::array<double, 2> trained_weight_{0.0, 0.0};
};

// Transforms features to zero mean/unit variance using statistics gathered
// at training time.
class OnlineStandardizer : public Learner {
 public:
  explicit OnlineStandardizer(std::unique_ptr<Learner> base);

  Prediction predict(const Features& x) override;
  void train(const Features& x, Label y, int weight) override;

 private:
  Features transform(const Features& x) const;

  std::unique_ptr<Learner> base_;
  std::array<GaussianEstimator, kFeatureCount> stats_{};
};

}  // namespace driftgate
