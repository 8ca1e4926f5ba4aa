#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "regionq/hypothesis.hpp"
#include "regionq/types.hpp"

namespace regionq {

enum class Sense { GreaterEq, LessEq };

// Closed interval in the lexicographic order of points. For scalars this is the
// usual [lo, hi].
struct Interval {
  Point lo;
  Point hi;
  Interval(Point lo_, Point hi_);
  Interval(double lo_, double hi_) : Interval(Point{lo_}, Point{hi_}) {}
};

struct AxisHalfspace {
  std::size_t coord = 0;
  Sense sense = Sense::GreaterEq;
  double threshold = 0.0;
};

struct PolytopeRow {
  std::vector<double> weight;
  double offset = 0.0;
  Sense sense = Sense::GreaterEq;  // weight.x >= offset, or <=
};

struct HalfspacePolytope {
  std::size_t dim = 0;
  std::vector<PolytopeRow> rows;
  bool restricted_to_unit_sphere = false;

  // A polytope containing no point at all.
  static HalfspacePolytope nothing(std::size_t dim);
  bool contains_point(const double* x) const;
};

// Subspace V (orthonormal columns of `basis`, d x k) and an invertible map A.
// The transformed coordinates of x in V are basis^T A x / |A x|.
struct LinearMap {
  Eigen::MatrixXd transform;  // d x d
  Eigen::MatrixXd basis;      // d x k

  std::size_t ambient_dim() const { return static_cast<std::size_t>(transform.rows()); }
  std::size_t sub_dim() const { return static_cast<std::size_t>(basis.cols()); }
  bool in_subspace(PointView x) const;
  // Returns false when x is outside V or A x vanishes.
  bool image(PointView x, Eigen::VectorXd& out) const;
};

struct TransformedPolytope {
  std::shared_ptr<const LinearMap> map;
  HalfspacePolytope inner;  // over R^k, k = map->sub_dim()
  std::optional<Point> anchor;
};

struct HypothesisPositiveSet {
  Hypothesis hypothesis;
  Sign sign = Sign::Positive;
  std::optional<Interval> interval;
};

class FiniteSet {
 public:
  explicit FiniteSet(const std::vector<Point>& pts);
  explicit FiniteSet(PointSet pts);
  bool contains_point(PointView x) const;
  const PointSet& points() const { return *points_; }
  std::size_t size() const { return points_->size(); }

 private:
  std::shared_ptr<const PointSet> points_;  // sorted, deduplicated
};

using RegionDescriptor = std::variant<Interval, AxisHalfspace, HalfspacePolytope,
                                      TransformedPolytope, HypothesisPositiveSet, FiniteSet>;

// Throws DimensionMismatch when x does not have the region's ambient dimension.
bool contains(const RegionDescriptor& region, PointView x);
bool region_intersects_sample(const RegionDescriptor& region, const PointSet& s);

// Membership masks over at most 32 probe points.
using MembershipMask = std::uint32_t;

struct ShatterWitness {
  std::vector<std::size_t> subset;           // probe ids
  std::vector<std::size_t> witness_regions;  // one region per dichotomy, indexed by bitmask
};

// Largest k <= max_k such that some k-subset of the probes is shattered.
int empirical_vc_dimension(const std::vector<RegionDescriptor>& family, const PointSet& probes,
                           int max_k);
// Generator form: `emit` is called once per region of the family.
int empirical_vc_dimension(
    const std::function<void(const std::function<void(const RegionDescriptor&)>&)>& generate,
    const PointSet& probes, int max_k);
int empirical_vc_dimension_masks(const std::vector<MembershipMask>& masks, std::size_t n_probes,
                                 int max_k);
std::optional<ShatterWitness> find_shattered_subset(const std::vector<MembershipMask>& masks,
                                                    std::size_t n_probes, int k);
std::vector<MembershipMask> membership_masks(const std::vector<RegionDescriptor>& family,
                                             const PointSet& probes);

// Every closed interval with endpoints at probe values (one-dimensional probes).
std::vector<RegionDescriptor> interval_family(const PointSet& probes);
// Every axis halfspace with threshold at a probe coordinate, both senses.
std::vector<RegionDescriptor> axis_halfspace_family(const PointSet& probes);

}  // namespace regionq
