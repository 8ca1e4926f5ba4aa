#include "regionq/types.hpp"

#include <algorithm>

namespace regionq {

Sign parse_sign(int v) {
  if (v == 1) return Sign::Positive;
  if (v == -1) return Sign::Negative;
  throw std::invalid_argument("label must be +1 or -1, got " + std::to_string(v));
}

bool lex_less(PointView a, PointView b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool same_point(PointView a, PointView b) { return std::equal(a.begin(), a.end(), b.begin(), b.end()); }

PointSet::PointSet(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("PointSet dimension must be at least 1");
}

PointSet::PointSet(std::size_t dim, std::vector<double> flat) : PointSet(dim) {
  if (flat.size() % dim != 0) throw std::invalid_argument("flat coordinate count not divisible by dim");
  data_ = std::move(flat);
}

PointSet PointSet::from_points(const std::vector<Point>& pts) {
  if (pts.empty()) throw std::invalid_argument("from_points needs at least one point to fix the dimension");
  PointSet s(pts.front().size());
  for (const auto& p : pts) s.push_back(p);
  return s;
}

PointSet PointSet::from_scalars(const std::vector<double>& values) { return PointSet(1, values); }

Point PointSet::point(std::size_t id) const {
  auto v = (*this)[id];
  return Point(v.begin(), v.end());
}

void PointSet::push_back(PointView p) {
  if (dim_ == 0) {
    if (p.empty()) throw std::invalid_argument("points must have dimension at least 1");
    dim_ = p.size();
  }
  if (p.size() != dim_) throw DimensionMismatch(dim_, p.size());
  data_.insert(data_.end(), p.begin(), p.end());
}

PointSet PointSet::subset(const std::vector<std::size_t>& ids) const {
  PointSet out(dim_);
  out.data_.reserve(ids.size() * dim_);
  for (auto id : ids) out.push_back((*this)[id]);
  return out;
}

bool LearnResult::complete() const {
  return std::all_of(predictions.begin(), predictions.end(), [](const auto& p) { return p.has_value(); });
}

DimensionMismatch::DimensionMismatch(std::size_t expected, std::size_t got)
    : std::invalid_argument("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                            std::to_string(got)) {}

}  // namespace regionq
