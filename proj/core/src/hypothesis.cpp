#include "regionq/hypothesis.hpp"

#include <algorithm>
#include <numeric>

namespace regionq {

PointLabeling::PointLabeling(const PointSet& points, const std::vector<Sign>& labels, Sign fallback)
    : points_(points.dim()), fallback_(fallback) {
  if (points.size() != labels.size()) throw std::invalid_argument("PointLabeling: label count mismatch");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lex_less(points[a], points[b]); });
  labels_.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto p = points[order[i]];
    if (i > 0 && same_point(p, points[order[i - 1]])) {
      if (labels[order[i]] != labels[order[i - 1]])
        throw std::invalid_argument("PointLabeling: duplicate point with conflicting labels");
      continue;
    }
    points_.push_back(p);
    labels_.push_back(labels[order[i]]);
  }
}

Sign PointLabeling::evaluate(PointView x) const {
  std::size_t lo = 0, hi = points_.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (lex_less(points_[mid], x)) lo = mid + 1;
    else hi = mid;
  }
  if (lo < points_.size() && same_point(points_[lo], x)) return labels_[lo];
  return fallback_;
}

namespace {

struct Evaluator {
  PointView x;

  Sign operator()(const UnionOfIntervals& u) const {
    if (x.size() != 1) throw DimensionMismatch(1, x.size());
    for (const auto& [a, b] : u.intervals)
      if (a <= x[0] && x[0] <= b) return Sign::Positive;
    return Sign::Negative;
  }
  Sign operator()(const AxisBox& box) const {
    if (x.size() != box.bounds.size()) throw DimensionMismatch(box.bounds.size(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < box.bounds[i].first || x[i] > box.bounds[i].second) return Sign::Negative;
    return Sign::Positive;
  }
  Sign operator()(const Halfspace& h) const {
    if (x.size() != h.w.size()) throw DimensionMismatch(h.w.size(), x.size());
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += h.w[i] * x[i];
    return sign_of(dot);
  }
  Sign operator()(const std::shared_ptr<const PointLabeling>& p) const {
    if (x.size() != p->dim()) throw DimensionMismatch(p->dim(), x.size());
    return p->evaluate(x);
  }
};

}  // namespace

Sign evaluate(const Hypothesis& h, PointView x) { return std::visit(Evaluator{x}, h); }

std::vector<Sign> evaluate_all(const Hypothesis& h, const PointSet& s) {
  std::vector<Sign> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = evaluate(h, s[i]);
  return out;
}

std::size_t hypothesis_dim(const Hypothesis& h) {
  struct {
    std::size_t operator()(const UnionOfIntervals&) const { return 1; }
    std::size_t operator()(const AxisBox& b) const { return b.bounds.size(); }
    std::size_t operator()(const Halfspace& w) const { return w.w.size(); }
    std::size_t operator()(const std::shared_ptr<const PointLabeling>& p) const { return p->dim(); }
  } v;
  return std::visit(v, h);
}

Hypothesis make_point_labeling(const PointSet& points, const std::vector<Sign>& labels, Sign fallback) {
  return std::make_shared<const PointLabeling>(points, labels, fallback);
}

}  // namespace regionq
