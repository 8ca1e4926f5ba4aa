#pragma once

#include <optional>

#include "regionq/hypothesis.hpp"
#include "regionq/oracle.hpp"

namespace regionq {

struct SignedAxis {
  std::size_t coord = 0;
  bool positive = true;  // +e_i when true, -e_i otherwise
};

// Boundary of the sample along the signed axis, as a coordinate value. For +e_i
// every sample point with x_i above the result is negative; for -e_i every
// point below it. nullopt means the whole sample is negative.
std::optional<double> find_boundary(const PointSet& s, SignedAxis axis, Oracle& oracle);

struct BoxLearnReport {
  LearnResult result;
  std::optional<AxisBox> estimate;  // nullopt when some search found no positive point
};

BoxLearnReport label_box(const PointSet& s, Oracle& oracle);

}  // namespace regionq
