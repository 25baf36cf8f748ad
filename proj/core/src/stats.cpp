#include "driftgate/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace driftgate {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;

struct Diffs {
  std::vector<double> values;  // nonzero differences y - x
};

Diffs nonzero_differences(const PairedObservations& pairs) {
  if (pairs.x.size() != pairs.y.size())
    raise(ErrorKind::domain_error, "paired observations have unequal lengths");
  if (pairs.x.empty())
    raise(ErrorKind::domain_error, "paired observations are empty");
  Diffs d;
  d.values.reserve(pairs.x.size());
  for (std::size_t i = 0; i < pairs.x.size(); ++i) {
    const double xi = pairs.x[i];
    const double yi = pairs.y[i];
    if (!std::isfinite(xi) || !std::isfinite(yi))
      raise(ErrorKind::domain_error, "paired observations must be finite");
    const double diff = yi - xi;
    if (diff != 0.0) d.values.push_back(diff);
  }
  return d;
}

// Average ranks of |d|, ties sharing the mean of their rank range.
std::vector<double> average_ranks(const std::vector<double>& diffs) {
  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(diffs[a]) < std::fabs(diffs[b]);
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n &&
           std::fabs(diffs[order[j + 1]]) == std::fabs(diffs[order[i]]))
      ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

// Null distribution of 2*W+ via subset-sum counting over doubled ranks
// (doubling keeps average ranks integral). Counts fit in a double exactly
// for n <= 25 (2^25 subsets < 2^53).
double exact_two_sided_p(const std::vector<double>& ranks, double t_statistic) {
  std::int64_t total = 0;
  std::vector<std::int64_t> doubled(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    doubled[i] = std::llround(2.0 * ranks[i]);
    total += doubled[i];
  }
  std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
  count[0] = 1.0;
  for (std::int64_t r : doubled)
    for (std::int64_t s = total; s >= r; --s)
      count[static_cast<std::size_t>(s)] += count[static_cast<std::size_t>(s - r)];

  const double n_subsets = std::ldexp(1.0, static_cast<int>(ranks.size()));
  const std::int64_t bound = std::llround(2.0 * t_statistic);
  double tail = 0.0;
  for (std::int64_t s = 0; s <= bound && s <= total; ++s)
    tail += count[static_cast<std::size_t>(s)];
  return std::min(1.0, 2.0 * tail / n_subsets);
}

}  // namespace

const char* to_string(TestKind kind) {
  switch (kind) {
    case TestKind::mcnemar: return "mcnemar";
    case TestKind::wilcoxon: return "wilcoxon";
    case TestKind::sign: return "sign";
  }
  return "unknown";
}

double chi2_df1_upper_tail(double x) {
  if (x < 0.0 || !std::isfinite(x))
    raise(ErrorKind::domain_error, "chi-squared input must be finite and >= 0");
  // For one degree of freedom the upper tail reduces to erfc(sqrt(x/2)).
  return std::erfc(std::sqrt(0.5 * x));
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double standard_normal_upper_tail(double z) {
  return 0.5 * std::erfc(z / kSqrt2);
}

double binomial_half_lower_tail(std::int64_t n, std::int64_t k) {
  if (n < 0) raise(ErrorKind::domain_error, "binomial n must be >= 0");
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  // term_i = C(n, i) / 2^n, accumulated in extended precision.
  long double term = std::pow(0.5L, static_cast<long double>(n));
  long double sum = term;
  for (std::int64_t i = 0; i < k; ++i) {
    term *= static_cast<long double>(n - i) / static_cast<long double>(i + 1);
    sum += term;
  }
  return static_cast<double>(std::min(sum, 1.0L));
}

TestResult mcnemar_test(double a, double b, double significance) {
  if (a < 0.0 || b < 0.0 || !std::isfinite(a) || !std::isfinite(b))
    raise(ErrorKind::domain_error, "McNemar counts must be finite and >= 0");
  TestResult r;
  r.test = TestKind::mcnemar;
  r.significance = significance;
  const double total = a + b;
  if (total > 0.0) {
    r.statistic = (a - b) * (a - b) / total;
    r.p_value = chi2_df1_upper_tail(r.statistic);
  } else {
    r.statistic = 0.0;
    r.p_value = 1.0;  // no disagreement, no evidence
  }
  r.n_effective = std::llround(total);
  r.direction = a > b ? 1 : (a < b ? -1 : 0);
  r.reject = r.p_value < significance;
  return r;
}

TestResult wilcoxon_signed_rank(const PairedObservations& pairs,
                                double significance, WilcoxonMode mode) {
  const Diffs d = nonzero_differences(pairs);
  TestResult r;
  r.test = TestKind::wilcoxon;
  r.significance = significance;
  r.n_effective = static_cast<std::int64_t>(d.values.size());
  if (d.values.empty()) return r;  // all ties: statistic 0, p 1

  const std::vector<double> ranks = average_ranks(d.values);
  double w_plus = 0.0, w_minus = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i)
    (d.values[i] > 0.0 ? w_plus : w_minus) += ranks[i];
  r.statistic = std::min(w_plus, w_minus);
  r.direction = w_plus > w_minus ? 1 : (w_plus < w_minus ? -1 : 0);

  const double n = static_cast<double>(d.values.size());
  if (mode == WilcoxonMode::exact) {
    if (d.values.size() > 25)
      raise(ErrorKind::domain_error, "exact Wilcoxon limited to n <= 25");
    r.p_value = exact_two_sided_p(ranks, r.statistic);
  } else {
    const double mu = n * (n + 1.0) / 4.0;
    const double sigma = std::sqrt(n * (n + 1.0) * (2.0 * n + 1.0) / 24.0);
    const double z = (r.statistic + 0.5 - mu) / sigma;
    r.p_value = std::min(1.0, 2.0 * standard_normal_cdf(z));
  }
  r.reject = r.p_value < significance;
  return r;
}

TestResult sign_test(const PairedObservations& pairs, double significance) {
  const Diffs d = nonzero_differences(pairs);
  TestResult r;
  r.test = TestKind::sign;
  r.significance = significance;
  const std::int64_t n = static_cast<std::int64_t>(d.values.size());
  r.n_effective = n;
  if (n == 0) return r;

  std::int64_t plus = 0;
  for (double v : d.values)
    if (v > 0.0) ++plus;
  const std::int64_t minus = n - plus;
  r.statistic = static_cast<double>(plus);
  r.direction = plus > minus ? 1 : (plus < minus ? -1 : 0);
  const double lower = binomial_half_lower_tail(n, std::min(plus, minus));
  r.p_value = std::min(1.0, 2.0 * lower);
  r.reject = r.p_value < significance;
  return r;
}

McNemarState::McNemarState(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    raise(ErrorKind::bad_config, "fading factor must be in (0, 1]");
}

void McNemarState::update(bool first_correct, bool second_correct) {
  a_ *= alpha_;
  b_ *= alpha_;
  if (!first_correct && second_correct) a_ += 1.0;
  if (first_correct && !second_correct) b_ += 1.0;
}

TestResult McNemarState::test(double significance) const {
  return mcnemar_test(a_, b_, significance);
}

}  // namespace driftgate
