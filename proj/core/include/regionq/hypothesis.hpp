#pragma once

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "regionq/types.hpp"

namespace regionq {

// Closed intervals, sorted and disjoint. Endpoints may be infinite.
struct UnionOfIntervals {
  std::vector<std::pair<double, double>> intervals;
};

// Product of closed per-coordinate ranges; bounds may be infinite.
struct AxisBox {
  std::vector<std::pair<double, double>> bounds;
};

// Homogeneous halfspace: positive iff w.x >= 0.
struct Halfspace {
  std::vector<double> w;
};

// Explicit labels on a finite list of points; any other point gets `fallback`.
class PointLabeling {
 public:
  PointLabeling(const PointSet& points, const std::vector<Sign>& labels, Sign fallback);
  Sign evaluate(PointView x) const;
  std::size_t dim() const { return points_.dim(); }
  const PointSet& points() const { return points_; }
  const std::vector<Sign>& labels() const { return labels_; }
  Sign fallback() const { return fallback_; }

 private:
  PointSet points_;  // sorted lexicographically
  std::vector<Sign> labels_;
  Sign fallback_;
};

using Hypothesis =
    std::variant<UnionOfIntervals, AxisBox, Halfspace, std::shared_ptr<const PointLabeling>>;

Sign evaluate(const Hypothesis& h, PointView x);
std::vector<Sign> evaluate_all(const Hypothesis& h, const PointSet& s);

// Ambient dimension of a hypothesis, or 0 when it accepts any dimension.
std::size_t hypothesis_dim(const Hypothesis& h);

Hypothesis make_point_labeling(const PointSet& points, const std::vector<Sign>& labels,
                               Sign fallback = Sign::Negative);

}  // namespace regionq
