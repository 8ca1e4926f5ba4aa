#include "regionq/regions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

namespace regionq {

namespace {
constexpr double kSubspaceTol = 1e-9;
constexpr double kSphereTol = 1e-9;
}  // namespace

Interval::Interval(Point lo_, Point hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) throw DimensionMismatch(lo.size(), hi.size());
  if (lo.empty()) throw std::invalid_argument("Interval endpoints must be non-empty");
  if (lex_less(hi, lo)) throw std::invalid_argument("Interval requires lo <= hi");
}

HalfspacePolytope HalfspacePolytope::nothing(std::size_t dim) {
  HalfspacePolytope p;
  p.dim = dim;
  p.rows.push_back(PolytopeRow{std::vector<double>(dim, 0.0), 1.0, Sense::GreaterEq});
  return p;
}

bool HalfspacePolytope::contains_point(const double* x) const {
  if (restricted_to_unit_sphere) {
    double n2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) n2 += x[i] * x[i];
    if (std::abs(std::sqrt(n2) - 1.0) > kSphereTol) return false;
  }
  for (const auto& r : rows) {
    double dot = 0.0;
    for (std::size_t i = 0; i < dim; ++i) dot += r.weight[i] * x[i];
    if (r.sense == Sense::GreaterEq ? dot < r.offset : dot > r.offset) return false;
  }
  return true;
}

bool LinearMap::in_subspace(PointView x) const {
  Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd coeffs = basis.transpose() * v;
  double resid = (v - basis * coeffs).norm();
  return resid <= kSubspaceTol * std::max(v.norm(), 1e-300);
}

bool LinearMap::image(PointView x, Eigen::VectorXd& out) const {
  if (!in_subspace(x)) return false;
  Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd ax = transform * v;
  double n = ax.norm();
  if (!(n > 0.0)) return false;
  out = basis.transpose() * ax / n;
  return true;
}

FiniteSet::FiniteSet(const std::vector<Point>& pts)
    : FiniteSet(pts.empty() ? PointSet() : PointSet::from_points(pts)) {}

FiniteSet::FiniteSet(PointSet pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return lex_less(pts[a], pts[b]); });
  PointSet sorted = pts.dim() == 0 ? PointSet() : PointSet(pts.dim());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && same_point(pts[order[i]], pts[order[i - 1]])) continue;
    sorted.push_back(pts[order[i]]);
  }
  points_ = std::make_shared<const PointSet>(std::move(sorted));
}

bool FiniteSet::contains_point(PointView x) const {
  const auto& p = *points_;
  if (p.empty()) return false;
  if (x.size() != p.dim()) throw DimensionMismatch(p.dim(), x.size());
  std::size_t lo = 0, hi = p.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (lex_less(p[mid], x)) lo = mid + 1;
    else hi = mid;
  }
  return lo < p.size() && same_point(p[lo], x);
}

namespace {

bool in_interval(const Interval& iv, PointView x) {
  if (x.size() != iv.lo.size()) throw DimensionMismatch(iv.lo.size(), x.size());
  return !lex_less(x, iv.lo) && !lex_less(iv.hi, x);
}

struct Contains {
  PointView x;

  bool operator()(const Interval& iv) const { return in_interval(iv, x); }
  bool operator()(const AxisHalfspace& h) const {
    if (h.coord >= x.size()) throw DimensionMismatch(h.coord + 1, x.size());
    double v = x[h.coord];
    return h.sense == Sense::GreaterEq ? v >= h.threshold : v <= h.threshold;
  }
  bool operator()(const HalfspacePolytope& p) const {
    if (x.size() != p.dim) throw DimensionMismatch(p.dim, x.size());
    return p.contains_point(x.data());
  }
  bool operator()(const TransformedPolytope& t) const {
    if (x.size() != t.map->ambient_dim()) throw DimensionMismatch(t.map->ambient_dim(), x.size());
    if (t.anchor && same_point(*t.anchor, x)) return true;
    Eigen::VectorXd z;
    if (!t.map->image(x, z)) return false;
    return t.inner.contains_point(z.data());
  }
  bool operator()(const HypothesisPositiveSet& h) const {
    if (h.interval && !in_interval(*h.interval, x)) return false;
    return evaluate(h.hypothesis, x) == h.sign;
  }
  bool operator()(const FiniteSet& f) const { return f.contains_point(x); }
};

}  // namespace

bool contains(const RegionDescriptor& region, PointView x) { return std::visit(Contains{x}, region); }

bool region_intersects_sample(const RegionDescriptor& region, const PointSet& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (contains(region, s[i])) return true;
  return false;
}

std::vector<MembershipMask> membership_masks(const std::vector<RegionDescriptor>& family,
                                             const PointSet& probes) {
  if (probes.size() > 32) throw std::invalid_argument("at most 32 probe points are supported");
  std::vector<MembershipMask> masks;
  masks.reserve(family.size());
  for (const auto& r : family) {
    MembershipMask m = 0;
    for (std::size_t i = 0; i < probes.size(); ++i)
      if (contains(r, probes[i])) m |= MembershipMask{1} << i;
    masks.push_back(m);
  }
  return masks;
}

namespace {

bool shatters(const std::vector<MembershipMask>& patterns, MembershipMask subset, int k) {
  std::unordered_set<MembershipMask> traces;
  for (auto m : patterns) {
    traces.insert(m & subset);
    if (traces.size() == (std::size_t{1} << k)) return true;
  }
  return false;
}

// Shattered subsets of size k, built from shattered subsets of size k - 1
// (every subset of a shattered set is itself shattered).
std::vector<MembershipMask> grow(const std::vector<MembershipMask>& patterns,
                                 const std::vector<MembershipMask>& prev, std::size_t n, int k) {
  std::vector<MembershipMask> next;
  for (auto s : prev) {
    std::size_t start = s == 0 ? 0 : 32 - static_cast<std::size_t>(__builtin_clz(s));
    for (std::size_t i = start; i < n; ++i) {
      MembershipMask cand = s | (MembershipMask{1} << i);
      if (shatters(patterns, cand, k)) next.push_back(cand);
    }
  }
  return next;
}

std::vector<MembershipMask> unique_patterns(std::vector<MembershipMask> masks) {
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  return masks;
}

}  // namespace

int empirical_vc_dimension_masks(const std::vector<MembershipMask>& masks, std::size_t n_probes,
                                 int max_k) {
  if (n_probes > 20) throw std::invalid_argument("empirical_vc_dimension supports at most 20 probes");
  auto patterns = unique_patterns(masks);
  if (patterns.empty()) return 0;
  std::vector<MembershipMask> level{0};
  int best = 0;
  for (int k = 1; k <= max_k && k <= static_cast<int>(n_probes); ++k) {
    level = grow(patterns, level, n_probes, k);
    if (level.empty()) break;
    best = k;
  }
  return best;
}

std::optional<ShatterWitness> find_shattered_subset(const std::vector<MembershipMask>& masks,
                                                    std::size_t n_probes, int k) {
  auto patterns = unique_patterns(masks);
  std::vector<MembershipMask> level{0};
  for (int j = 1; j <= k && !level.empty(); ++j) level = grow(patterns, level, n_probes, j);
  if (level.empty() || patterns.empty()) return std::nullopt;
  MembershipMask chosen = level.front();
  ShatterWitness w;
  for (std::size_t i = 0; i < n_probes; ++i)
    if (chosen & (MembershipMask{1} << i)) w.subset.push_back(i);
  w.witness_regions.assign(std::size_t{1} << k, masks.size());
  for (std::size_t r = 0; r < masks.size(); ++r) {
    std::size_t code = 0;
    for (std::size_t b = 0; b < w.subset.size(); ++b)
      if (masks[r] & (MembershipMask{1} << w.subset[b])) code |= std::size_t{1} << b;
    if (w.witness_regions[code] == masks.size()) w.witness_regions[code] = r;
  }
  return w;
}

int empirical_vc_dimension(const std::vector<RegionDescriptor>& family, const PointSet& probes,
                           int max_k) {
  if (probes.size() > 20) throw std::invalid_argument("empirical_vc_dimension supports at most 20 probes");
  return empirical_vc_dimension_masks(membership_masks(family, probes), probes.size(), max_k);
}

int empirical_vc_dimension(
    const std::function<void(const std::function<void(const RegionDescriptor&)>&)>& generate,
    const PointSet& probes, int max_k) {
  if (probes.size() > 20) throw std::invalid_argument("empirical_vc_dimension supports at most 20 probes");
  std::set<MembershipMask> seen;
  generate([&](const RegionDescriptor& r) {
    MembershipMask m = 0;
    for (std::size_t i = 0; i < probes.size(); ++i)
      if (contains(r, probes[i])) m |= MembershipMask{1} << i;
    seen.insert(m);
  });
  return empirical_vc_dimension_masks({seen.begin(), seen.end()}, probes.size(), max_k);
}

std::vector<RegionDescriptor> interval_family(const PointSet& probes) {
  std::vector<double> values;
  for (std::size_t i = 0; i < probes.size(); ++i) values.push_back(probes.scalar(i));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<RegionDescriptor> out;
  for (std::size_t a = 0; a < values.size(); ++a)
    for (std::size_t b = a; b < values.size(); ++b) out.emplace_back(Interval(values[a], values[b]));
  return out;
}

std::vector<RegionDescriptor> axis_halfspace_family(const PointSet& probes) {
  std::vector<RegionDescriptor> out;
  for (std::size_t c = 0; c < probes.dim(); ++c) {
    std::vector<double> values;
    for (std::size_t i = 0; i < probes.size(); ++i) values.push_back(probes[i][c]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (double v : values) {
      out.emplace_back(AxisHalfspace{c, Sense::GreaterEq, v});
      out.emplace_back(AxisHalfspace{c, Sense::LessEq, v});
    }
  }
  return out;
}

}  // namespace regionq
