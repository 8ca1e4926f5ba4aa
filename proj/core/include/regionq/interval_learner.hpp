#pragma once

#include <vector>

#include "regionq/oracle.hpp"

namespace regionq {

struct FindLeftResult {
  std::size_t i_star = 0;  // length of the longest pure prefix, 1-based
  Sign y = Sign::Positive;
};

// `sorted` holds scalar points in ascending order (ties in id order).
FindLeftResult find_left(const std::vector<double>& sorted, Oracle& oracle);

struct IntervalBlock {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  Sign y = Sign::Positive;
};

struct IntervalLearnReport {
  LearnResult result;
  std::vector<IntervalBlock> blocks;  // labeled prefixes, in removal order
};

IntervalLearnReport label_k_intervals(const PointSet& s, Oracle& oracle);

}  // namespace regionq
