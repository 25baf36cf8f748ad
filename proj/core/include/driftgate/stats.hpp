#pragma once

#include <cstdint>
#include <vector>

#include "driftgate/error.hpp"

namespace driftgate {

enum class TestKind { mcnemar, wilcoxon, sign };

const char* to_string(TestKind kind);

struct TestResult {
  TestKind test = TestKind::mcnemar;
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
  std::int64_t n_effective = 0;
  // +1 when the evidence favors the second algorithm (y), -1 the first, 0 none.
  int direction = 0;
  double significance = 0.05;
};

// Paired per-fold observations (x_i from algorithm 1, y_i from algorithm 2).
struct PairedObservations {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return x.size(); }
  void push_back(double xi, double yi) {
    x.push_back(xi);
    y.push_back(yi);
  }
};

// chi^2 = (A-B)^2/(A+B); A and B may be fading (fractional) counts.
TestResult mcnemar_test(double a, double b, double significance = 0.05);

enum class WilcoxonMode { normal_approx, exact };

// Signed-rank test on y - x; zero differences dropped, average ranks on ties,
// T = min(W+, W-). normal_approx matches the usual large-sample two-sided
// p with continuity correction; exact mode enumerates the null distribution
// (n <= 25) for cross-checks.
TestResult wilcoxon_signed_rank(const PairedObservations& pairs,
                                double significance = 0.05,
                                WilcoxonMode mode = WilcoxonMode::normal_approx);

// Exact two-sided binomial sign test; zero differences excluded.
TestResult sign_test(const PairedObservations& pairs,
                     double significance = 0.05);

// Streaming McNemar counts: A = first wrong & second right, B = symmetric.
// Counts fade with the metric fading factor (alpha = 1 gives cumulative).
class McNemarState {
 public:
  explicit McNemarState(double alpha = 0.99);

  void update(bool first_correct, bool second_correct);
  double a() const { return a_; }
  double b() const { return b_; }
  TestResult test(double significance = 0.05) const;

 private:
  double alpha_;
  double a_ = 0.0;
  double b_ = 0.0;
};

// Numeric backends.
double chi2_df1_upper_tail(double x);
double standard_normal_cdf(double z);
double standard_normal_upper_tail(double z);
// P(X <= k) for X ~ Binomial(n, 1/2), exact in extended precision.
double binomial_half_lower_tail(std::int64_t n, std::int64_t k);

}  // namespace driftgate
