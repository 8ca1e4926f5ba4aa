#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "regionq/oracle.hpp"

namespace regionq {

struct LabeledPoint {
  Eigen::VectorXd x;
  Sign y = Sign::Positive;
};

struct MaxMarginModel {
  Eigen::VectorXd weights;              // unit norm
  double margin = 0.0;                  // min_i y_i (w . x_i); +inf for empty input
  std::vector<std::size_t> support_ids; // indices into the input attaining the margin
};

class NonSeparable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hard-margin homogeneous separator maximizing min_i y_i (w . x_i) over unit w.
// Solved exactly as the minimum-norm point of conv{y_i x_i} (Wolfe's method).
// Empty input yields e_1.
MaxMarginModel max_margin_fit(const std::vector<LabeledPoint>& labeled, std::size_t dim);

// Maintains the max-margin fit of a growing labeled set, refitting only when a
// new point lands inside the current margin.
class IncrementalMaxMargin {
 public:
  explicit IncrementalMaxMargin(std::size_t dim);
  Sign predict(const Eigen::VectorXd& x) const;
  void add(const Eigen::VectorXd& x, Sign y);
  const MaxMarginModel& model() const { return model_; }
  std::size_t refits() const { return refits_; }

 private:
  std::size_t dim_;
  std::vector<LabeledPoint> data_;
  MaxMarginModel model_;
  std::size_t refits_ = 0;
};

// Self-directed pass over S in the given order; `feedback(id)` reveals the
// true label after each prediction. Returns the number of mistakes.
std::size_t self_directed_pass(const PointSet& s, const std::vector<std::size_t>& order,
                               const std::function<Sign(std::size_t)>& feedback);

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed);

struct SdlLearnReport {
  LearnResult result;
  std::size_t mistakes_fixed = 0;  // restarts of the pass
};

SdlLearnReport randomized_svm_learn(const PointSet& s, Oracle& oracle, std::uint64_t perm_seed);

}  // namespace regionq
