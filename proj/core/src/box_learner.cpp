#include "regionq/box_learner.hpp"

#include <algorithm>

namespace regionq {

std::optional<double> find_boundary(const PointSet& s, SignedAxis axis, Oracle& oracle) {
  if (s.empty()) throw std::invalid_argument("find_boundary needs a non-empty sample");
  if (axis.coord >= s.dim()) throw DimensionMismatch(axis.coord + 1, s.dim());

  // Work in the projected coordinate t = w.x, so the search is always over
  // upper sets {t >= v}. Duplicate values collapse to one candidate.
  std::vector<double> t;
  t.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) t.push_back(axis.positive ? s[i][axis.coord] : -s[i][axis.coord]);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());

  auto upper_set_negative = [&](double v) {
    AxisHalfspace h = axis.positive ? AxisHalfspace{axis.coord, Sense::GreaterEq, v}
                                    : AxisHalfspace{axis.coord, Sense::LessEq, -v};
    return oracle.answer(h, Sign::Negative);
  };

  if (upper_set_negative(t.front())) return std::nullopt;
  std::size_t lo = 0, hi = t.size() - 1;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo + 1) / 2;
    if (upper_set_negative(t[mid])) hi = mid - 1;
    else lo = mid;
  }
  return axis.positive ? t[lo] : -t[lo];
}

BoxLearnReport label_box(const PointSet& s, Oracle& oracle) {
  BoxLearnReport report;
  auto& res = report.result;
  res.transcript_begin = oracle.queries_answered();
  const std::size_t d = s.dim();
  AxisBox box;
  box.bounds.resize(d);
  bool all_negative = false;
  for (std::size_t i = 0; i < d; ++i) {
    auto upper = find_boundary(s, {i, true}, oracle);
    auto lower = find_boundary(s, {i, false}, oracle);
    ++res.rounds;
    if (!upper || !lower) {
      all_negative = true;
      continue;
    }
    box.bounds[i] = {*lower, *upper};
  }
  if (!all_negative) report.estimate = box;
  res.predictions.resize(s.size());
  for (std::size_t id = 0; id < s.size(); ++id)
    res.predictions[id] = all_negative ? Sign::Negative : evaluate(box, s[id]);
  res.queries_used = oracle.queries_answered() - res.transcript_begin;
  return report;
}

}  // namespace regionq
