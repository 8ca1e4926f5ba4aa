#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace regionq {

// A binary label. Stored as -1 / +1 so it can be multiplied into dot products.
enum class Sign : int { Negative = -1, Positive = 1 };

constexpr int to_int(Sign s) { return static_cast<int>(s); }
constexpr Sign flip(Sign s) { return s == Sign::Positive ? Sign::Negative : Sign::Positive; }
constexpr Sign sign_from_int(int v) { return v >= 0 ? Sign::Positive : Sign::Negative; }
// Zero is classified as positive, matching the closed halfspace convention.
constexpr Sign sign_of(double v) { return v >= 0.0 ? Sign::Positive : Sign::Negative; }
Sign parse_sign(int v);

using Point = std::vector<double>;
using PointView = std::span<const double>;

bool lex_less(PointView a, PointView b);
bool same_point(PointView a, PointView b);

// Finite ordered collection of points with stable ids 0..n-1. Points are stored
// contiguously, row-major.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim);
  PointSet(std::size_t dim, std::vector<double> flat);
  static PointSet from_points(const std::vector<Point>& pts);
  static PointSet from_scalars(const std::vector<double>& values);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const { return size() == 0; }

  PointView operator[](std::size_t id) const { return {data_.data() + id * dim_, dim_}; }
  double scalar(std::size_t id) const { return data_[id * dim_]; }
  Point point(std::size_t id) const;

  void push_back(PointView p);
  PointSet subset(const std::vector<std::size_t>& ids) const;
  const std::vector<double>& flat() const { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// Per-id predictions. Entries are empty for points a learner did not label.
struct LearnResult {
  std::vector<std::optional<Sign>> predictions;
  std::size_t queries_used = 0;
  std::size_t rounds = 0;
  std::size_t transcript_begin = 0;  // first transcript index produced by the run

  bool complete() const;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got);
};

}  // namespace regionq
