#include "driftgate/learners.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "driftgate/error.hpp"

namespace driftgate {

namespace {

constexpr std::uint64_t kNoiseSalt = 0x6e6f697365ULL;       // "noise"
constexpr std::uint64_t kEnsembleSalt = 0x656e73ULL;        // "ens"
constexpr double kMinBoostError = 1e-10;

void check_weight(int weight) {
  if (weight < 0) raise(ErrorKind::domain_error, "train weight must be >= 0");
}

}  // namespace

const char* to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::majority: return "majority";
    case LearnerKind::gaussian_nb: return "gaussian_nb";
    case LearnerKind::hoeffding_tree: return "hoeffding_tree";
    case LearnerKind::poisson_bagging: return "poisson_bagging";
    case LearnerKind::under_over_bagging: return "under_over_bagging";
    case LearnerKind::rus_boost: return "rus_boost";
    case LearnerKind::noise_filter: return "noise_filter";
  }
  return "unknown";
}

bool learner_kind_from_string(const std::string& text, LearnerKind& out) {
  for (LearnerKind k :
       {LearnerKind::majority, LearnerKind::gaussian_nb,
        LearnerKind::hoeffding_tree, LearnerKind::poisson_bagging,
        LearnerKind::under_over_bagging, LearnerKind::rus_boost,
        LearnerKind::noise_filter}) {
    if (text == to_string(k)) {
      out = k;
      return true;
    }
  }
  return false;
}

void validate(const LearnerConfig& cfg) {
  if (!(cfg.hoeffding.delta > 0.0) || cfg.hoeffding.delta >= 1.0)
    raise(ErrorKind::bad_config, "hoeffding delta must be in (0, 1)");
  if (cfg.hoeffding.grace_period < 1.0)
    raise(ErrorKind::bad_config, "grace_period must be >= 1");
  if (cfg.hoeffding.tie_threshold < 0.0)
    raise(ErrorKind::bad_config, "tie_threshold must be >= 0");
  if (cfg.ensemble.n_models < 1)
    raise(ErrorKind::bad_config, "n_models must be >= 1");
  if (!(cfg.ensemble.lambda > 0.0))
    raise(ErrorKind::bad_config, "poisson lambda must be > 0");
  if (cfg.ensemble.resample_rate != 1 && cfg.ensemble.resample_rate != 2)
    raise(ErrorKind::bad_config, "resample_rate must be 1 or 2");
  if (cfg.noise_p < 0.0 || cfg.noise_p > 1.0)
    raise(ErrorKind::bad_config, "noise_p must be in [0, 1]");
}

bool is_randomized(const LearnerConfig& cfg) {
  switch (cfg.kind) {
    case LearnerKind::poisson_bagging:
    case LearnerKind::under_over_bagging:
    case LearnerKind::rus_boost:
      return true;
    case LearnerKind::noise_filter:
      return cfg.noise_p > 0.0;
    default:
      return cfg.noise_p > 0.0;
  }
}

std::unique_ptr<Learner> make_learner(const LearnerConfig& cfg,
                                      std::uint64_t seed) {
  validate(cfg);
  LearnerFactory tree = [hoeffding = cfg.hoeffding](std::uint64_t) {
    return std::unique_ptr<Learner>(new HoeffdingTree(hoeffding));
  };

  std::unique_ptr<Learner> base;
  switch (cfg.kind) {
    case LearnerKind::majority:
      base = std::make_unique<MajorityClass>();
      break;
    case LearnerKind::gaussian_nb:
      base = std::make_unique<GaussianNaiveBayes>();
      break;
    case LearnerKind::hoeffding_tree:
    case LearnerKind::noise_filter:
      base = std::make_unique<HoeffdingTree>(cfg.hoeffding);
      break;
    case LearnerKind::poisson_bagging:
      base = std::make_unique<PoissonBagging>(
          tree, cfg.ensemble.n_models, cfg.ensemble.lambda,
          hash_combine(seed, kEnsembleSalt));
      break;
    case LearnerKind::under_over_bagging:
      base = std::make_unique<UnderOverBagging>(
          tree, cfg.ensemble.n_models, cfg.ensemble.resample_rate,
          hash_combine(seed, kEnsembleSalt));
      break;
    case LearnerKind::rus_boost:
      base = std::make_unique<RusBoost>(
          tree, cfg.ensemble.n_models, cfg.ensemble.resample_rate,
          hash_combine(seed, kEnsembleSalt));
      break;
  }

  if (cfg.standardize)
    base = std::make_unique<OnlineStandardizer>(std::move(base));
  if (cfg.kind == LearnerKind::noise_filter || cfg.noise_p > 0.0)
    base = make_noise_filter(std::move(base), cfg.noise_p,
                             hash_combine(seed, kNoiseSalt));
  return base;
}

std::unique_ptr<Learner> make_learner(const LearnerConfig& cfg) {
  return make_learner(cfg, cfg.seed);
}

LearnerFactory learner_factory(const LearnerConfig& cfg) {
  validate(cfg);
  return [cfg](std::uint64_t seed) { return make_learner(cfg, seed); };
}

Prediction MajorityClass::predict(const Features&) {
  const double total = weight_[0] + weight_[1];
  if (total <= 0.0) return {Label::clean, 0.0};
  return prediction_from_score(weight_[1] / total);
}

void MajorityClass::train(const Features&, Label y, int weight) {
  check_weight(weight);
  weight_[static_cast<std::size_t>(y)] += weight;
}

Prediction GaussianNaiveBayes::predict(const Features& x) {
  const double total = class_weight_[0] + class_weight_[1];
  if (total <= 0.0) return {Label::clean, 0.0};
  if (class_weight_[0] <= 0.0 || class_weight_[1] <= 0.0)
    return prediction_from_score(class_weight_[1] / total);

  double log_post[2];
  for (std::size_t yi = 0; yi < 2; ++yi) {
    double lp = std::log(class_weight_[yi] / total);
    for (int f = 0; f < kFeatureCount; ++f) {
      const GaussianEstimator& g = stats_[yi][static_cast<std::size_t>(f)];
      if (g.weight() > 0.0)
        lp += std::log(std::max(g.pdf(x[static_cast<std::size_t>(f)]),
                                std::numeric_limits<double>::min()));
    }
    log_post[yi] = lp;
  }
  const double m = std::max(log_post[0], log_post[1]);
  const double e0 = std::exp(log_post[0] - m);
  const double e1 = std::exp(log_post[1] - m);
  return prediction_from_score(e1 / (e0 + e1));
}

void GaussianNaiveBayes::train(const Features& x, Label y, int weight) {
  check_weight(weight);
  if (weight == 0) return;
  const auto yi = static_cast<std::size_t>(y);
  class_weight_[yi] += weight;
  for (int f = 0; f < kFeatureCount; ++f)
    stats_[yi][static_cast<std::size_t>(f)].update(
        x[static_cast<std::size_t>(f)], weight);
}

NoiseFilter::NoiseFilter(std::unique_ptr<Learner> base, double p,
                         std::uint64_t seed)
    : base_(std::move(base)), p_(p), rng_(seed) {
  if (p < 0.0 || p > 1.0) raise(ErrorKind::bad_config, "noise p must be in [0, 1]");
}

Prediction NoiseFilter::predict(const Features& x) {
  Prediction pred = base_->predict(x);
  if (p_ > 0.0 && rng_.next_u01() < p_) {
    pred.label = other(pred.label);
    pred.score = 1.0 - pred.score;
    // A base score of exactly 0.5 flips to 0.5; nudge below the threshold so
    // the label/score contract still holds for the clean label.
    if (pred.label == Label::clean && pred.score >= kDecisionThreshold)
      pred.score = std::nextafter(kDecisionThreshold, 0.0);
  }
  return pred;
}

void NoiseFilter::train(const Features& x, Label y, int weight) {
  base_->train(x, y, weight);
}

std::unique_ptr<Learner> make_noise_filter(std::unique_ptr<Learner> base,
                                           double p, std::uint64_t seed) {
  return std::make_unique<NoiseFilter>(std::move(base), p, seed);
}

PoissonBagging::PoissonBagging(const LearnerFactory& base, int n_models,
                               double lambda, std::uint64_t seed,
                               bool pin_draws_to_one)
    : lambda_(lambda), pin_draws_to_one_(pin_draws_to_one) {
  if (n_models < 1) raise(ErrorKind::bad_config, "n_models must be >= 1");
  if (!(lambda > 0.0)) raise(ErrorKind::bad_config, "lambda must be > 0");
  members_.reserve(static_cast<std::size_t>(n_models));
  for (int m = 0; m < n_models; ++m) {
    const std::uint64_t member_seed =
        hash_combine(seed, static_cast<std::uint64_t>(m));
    members_.push_back({base(member_seed), SplitMix64(member_seed)});
  }
}

Prediction PoissonBagging::predict(const Features& x) {
  double votes = 0.0;
  for (Member& m : members_)
    if (m.learner->predict(x).label == Label::defect) votes += 1.0;
  return prediction_from_score(votes / static_cast<double>(members_.size()));
}

void PoissonBagging::train(const Features& x, Label y, int weight) {
  check_weight(weight);
  if (weight == 0) return;
  for (Member& m : members_) {
    int k = 0;
    for (int rep = 0; rep < weight; ++rep)
      k += pin_draws_to_one_ ? 1 : m.rng.poisson(lambda_);
    m.learner->train(x, y, k);
  }
}

UnderOverBagging::UnderOverBagging(const LearnerFactory& base, int n_models,
                                   int resample_rate, std::uint64_t seed)
    : rate_(static_cast<double>(resample_rate)) {
  if (n_models < 1) raise(ErrorKind::bad_config, "n_models must be >= 1");
  if (resample_rate != 1 && resample_rate != 2)
    raise(ErrorKind::bad_config, "resample_rate must be 1 or 2");
  members_.reserve(static_cast<std::size_t>(n_models));
  for (int m = 0; m < n_models; ++m) {
    const std::uint64_t member_seed =
        hash_combine(seed, static_cast<std::uint64_t>(m));
    members_.push_back({base(member_seed), SplitMix64(member_seed)});
  }
}

Prediction UnderOverBagging::predict(const Features& x) {
  double votes = 0.0;
  for (Member& m : members_)
    if (m.learner->predict(x).label == Label::defect) votes += 1.0;
  return prediction_from_score(votes / static_cast<double>(members_.size()));
}

void UnderOverBagging::train(const Features& x, Label y, int weight) {
  check_weight(weight);
  if (weight == 0) return;
  seen_[static_cast<std::size_t>(y)] += weight;
  const double n_clean = std::max(seen_[0], 1.0);
  const double n_defect = std::max(seen_[1], 1.0);
  const double n_members = static_cast<double>(members_.size());

  for (std::size_t m = 0; m < members_.size(); ++m) {
    // Member m keeps a fraction a of the clean stream and oversamples
    // defects by the inverse class ratio times the target rate.
    const double a = static_cast<double>(m + 1) / n_members;
    const double lambda = y == Label::defect
                              ? a * rate_ * n_clean / n_defect
                              : a;
    int k = 0;
    for (int rep = 0; rep < weight; ++rep)
      k += members_[m].rng.poisson(lambda);
    trained_weight_[static_cast<std::size_t>(y)] += weight * lambda;
    members_[m].learner->train(x, y, k);
  }
}

RusBoost::RusBoost(const LearnerFactory& base, int n_models, int resample_rate,
                   std::uint64_t seed)
    : rate_(static_cast<double>(resample_rate)) {
  if (n_models < 1) raise(ErrorKind::bad_config, "n_models must be >= 1");
  if (resample_rate != 1 && resample_rate != 2)
    raise(ErrorKind::bad_config, "resample_rate must be 1 or 2");
  members_.reserve(static_cast<std::size_t>(n_models));
  for (int m = 0; m < n_models; ++m) {
    const std::uint64_t member_seed =
        hash_combine(seed, static_cast<std::uint64_t>(m));
    members_.push_back({base(member_seed), SplitMix64(member_seed)});
  }
}

double RusBoost::member_error(std::size_t m) const {
  const double total = members_[m].lambda_correct + members_[m].lambda_wrong;
  if (total <= 0.0) return 0.5;
  const double eps = members_[m].lambda_wrong / total;
  return std::min(std::max(eps, kMinBoostError), 1.0 - kMinBoostError);
}

Prediction RusBoost::predict(const Features& x) {
  double score_defect = 0.0;
  double total = 0.0;
  for (std::size_t m = 0; m < members_.size(); ++m) {
    const double eps = member_error(m);
    const double vote = std::max(std::log((1.0 - eps) / eps), 0.0);
    if (vote <= 0.0) continue;
    total += vote;
    if (members_[m].learner->predict(x).label == Label::defect)
      score_defect += vote;
  }
  if (total <= 0.0) {
    // No member has earned a vote yet; fall back to an unweighted vote.
    double votes = 0.0;
    for (Member& m : members_)
      if (m.learner->predict(x).label == Label::defect) votes += 1.0;
    return prediction_from_score(votes / static_cast<double>(members_.size()));
  }
  return prediction_from_score(score_defect / total);
}

void RusBoost::train(const Features& x, Label y, int weight) {
  check_weight(weight);
  if (weight == 0) return;
  const auto yi = static_cast<std::size_t>(y);
  seen_[yi] += weight;

  // Clean instances are undersampled; the factor is normalized by realized
  // per-class boosting weight so defect:clean effective weight tracks rate_.
  const double kappa_defect = std::max(boost_sum_mean_[1], kMinBoostError);
  const double kappa_clean = std::max(boost_sum_mean_[0], kMinBoostError);
  double sampling = 1.0;
  if (y == Label::clean && seen_[0] > 0.0 && seen_[1] > 0.0) {
    sampling = (seen_[1] * kappa_defect) / (rate_ * seen_[0] * kappa_clean);
    sampling = std::min(sampling, 1.0);
  }

  double lambda = static_cast<double>(weight);
  double boost_sum = 0.0;
  for (std::size_t m = 0; m < members_.size(); ++m) {
    boost_sum += lambda;
    const int k = members_[m].rng.poisson(lambda * sampling);
    trained_weight_[yi] += lambda * sampling;
    const bool correct =
        members_[m].learner->predict(x).label == y;
    members_[m].learner->train(x, y, k);
    if (correct)
      members_[m].lambda_correct += lambda;
    else
      members_[m].lambda_wrong += lambda;
    const double eps = member_error(m);
    lambda *= correct ? 1.0 / (2.0 * (1.0 - eps)) : 1.0 / (2.0 * eps);
    lambda = std::min(lambda, 1e6);
  }

  // Track the mean unscaled boosting mass each class generates.
  const double n = seen_[yi];
  boost_sum_mean_[yi] +=
      (boost_sum / static_cast<double>(weight) - boost_sum_mean_[yi]) *
      (static_cast<double>(weight) / n);
}

OnlineStandardizer::OnlineStandardizer(std::unique_ptr<Learner> base)
    : base_(std::move(base)) {}

Features OnlineStandardizer::transform(const Features& x) const {
  Features out = x;
  for (int f = 0; f < kFeatureCount; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    const GaussianEstimator& g = stats_[fi];
    if (g.weight() > 0.0) {
      const double sd = g.stddev();
      out[fi] = sd > 0.0 ? (x[fi] - g.mean()) / sd : x[fi] - g.mean();
    }
  }
  return out;
}

Prediction OnlineStandardizer::predict(const Features& x) {
  return base_->predict(transform(x));
}

void OnlineStandardizer::train(const Features& x, Label y, int weight) {
  check_weight(weight);
  if (weight == 0) return;
  for (int f = 0; f < kFeatureCount; ++f)
    stats_[static_cast<std::size_t>(f)].update(x[static_cast<std::size_t>(f)],
                                               weight);
  base_->train(transform(x), y, weight);
}

}  // namespace driftgate
