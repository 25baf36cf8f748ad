#pragma once

#include <cmath>

#include "driftgate/commit.hpp"
#include "driftgate/error.hpp"

namespace driftgate {

// Fading average of a 0/1 (or real) sequence: S <- x + a*S, N <- 1 + a*N,
// estimate S/N. With a = 1 this is the plain running mean.
struct FadingEstimator {
  double alpha = 1.0;
  double sum = 0.0;
  double weight = 0.0;

  FadingEstimator() = default;
  explicit FadingEstimator(double a) : alpha(a) {
    if (!(a > 0.0) || a > 1.0)
      raise(ErrorKind::bad_config, "fading factor must be in (0, 1]");
  }

  void update(double x) {
    sum = x + alpha * sum;
    weight = 1.0 + alpha * weight;
  }

  bool defined() const { return weight > 0.0; }
  double value() const { return defined() ? sum / weight : 0.0; }
};

struct MetricSnapshot {
  double r0 = 0.0;     // specificity (recall on clean)
  double r1 = 0.0;     // sensitivity (recall on defect)
  double fpr = 0.0;    // 1 - r0
  double gmean = 0.0;  // sqrt(r0 * r1)
  bool r0_defined = false;
  bool r1_defined = false;
  bool fpr_defined = false;
  bool gmean_defined = false;

  // Bit i set when metric i is defined, in (r0, r1, fpr, gmean) order.
  unsigned defined_mask() const {
    return (r0_defined ? 1u : 0u) | (r1_defined ? 2u : 0u) |
           (fpr_defined ? 4u : 0u) | (gmean_defined ? 8u : 0u);
  }
};

// Confusion-matrix cells with exponential fading, updated test-then-train
// style one prediction at a time. Every update decays all four cells and
// adds 1 to the matching one, so the cells stay mutually comparable and the
// usual ratios read off directly.
class FadingConfusion {
 public:
  explicit FadingConfusion(double alpha = 0.99) : alpha_(alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
      raise(ErrorKind::bad_config, "fading factor must be in (0, 1]");
  }

  void update(Label predicted, Label observed) {
    tp_ *= alpha_;
    fp_ *= alpha_;
    tn_ *= alpha_;
    fn_ *= alpha_;
    if (observed == Label::defect)
      (predicted == Label::defect ? tp_ : fn_) += 1.0;
    else
      (predicted == Label::clean ? tn_ : fp_) += 1.0;
  }

  double alpha() const { return alpha_; }
  double tp() const { return tp_; }
  double fp() const { return fp_; }
  double tn() const { return tn_; }
  double fn() const { return fn_; }

  MetricSnapshot metrics() const {
    MetricSnapshot m;
    const double pos = tp_ + fn_;
    const double neg = tn_ + fp_;
    if (pos > 0.0) {
      m.r1 = tp_ / pos;
      m.r1_defined = true;
    }
    if (neg > 0.0) {
      m.r0 = tn_ / neg;
      m.fpr = fp_ / neg;
      m.r0_defined = true;
      m.fpr_defined = true;
    }
    if (m.r0_defined && m.r1_defined) {
      m.gmean = std::sqrt(m.r0 * m.r1);
      m.gmean_defined = true;
    }
    return m;
  }

 private:
  double alpha_;
  double tp_ = 0.0, fp_ = 0.0, tn_ = 0.0, fn_ = 0.0;
};

}  // namespace driftgate
