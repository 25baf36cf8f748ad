#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "driftgate/commit.hpp"

namespace driftgate {

inline constexpr double kDecisionThreshold = 0.5;

struct Prediction {
  Label label = Label::clean;
  double score = 0.0;  // estimated probability of defect
};

inline Prediction prediction_from_score(double score_defect) {
  return {score_defect >= kDecisionThreshold ? Label::defect : Label::clean,
          score_defect};
}

// An online classifier driven test-then-train. predict may advance internal
// generators (noise filter, ensembles), hence non-const.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual Prediction predict(const Features& x) = 0;
  virtual void train(const Features& x, Label y, int weight) = 0;
};

// Builds a fresh learner from a seed; folds and ensemble members use this to
// own independent, reproducible instances.
using LearnerFactory =
    std::function<std::unique_ptr<Learner>(std::uint64_t seed)>;

}  // namespace driftgate
