#include "regionq/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace regionq {

EmptyPolicy parse_empty_policy(const std::string& name) {
  if (name == "always_one") return EmptyPolicy::AlwaysOne;
  if (name == "always_zero") return EmptyPolicy::AlwaysZero;
  if (name == "seeded_random") return EmptyPolicy::SeededRandom;
  throw std::invalid_argument("unknown empty policy: " + name);
}

std::string to_string(EmptyPolicy p) {
  switch (p) {
    case EmptyPolicy::AlwaysOne: return "always_one";
    case EmptyPolicy::AlwaysZero: return "always_zero";
    case EmptyPolicy::SeededRandom: return "seeded_random";
  }
  return "seeded_random";
}

// Lookup structures over L. The lexicographic index is built eagerly; the
// per-coordinate and transform caches are filled on first use.
struct Oracle::Indexes {
  std::vector<std::size_t> lex;        // ids of L sorted lexicographically
  std::vector<std::size_t> lex_pos;    // prefix count of positives along `lex`
  struct Coord {
    std::vector<double> values;        // sorted coordinate values
    std::vector<std::size_t> pos;      // prefix count of positives
  };
  std::vector<std::optional<Coord>> coords;
  std::shared_ptr<const LinearMap> cached_map;
  std::vector<double> images;          // sub_dim() entries per point
  std::vector<char> has_image;
};

namespace {

// Tallies points of a region and stops as soon as one has the wrong label.
struct Tally {
  Sign z;
  bool any = false;
  bool impure = false;
  bool add(Sign label) {
    any = true;
    if (label != z) impure = true;
    return impure;
  }
};

}  // namespace

Oracle::Oracle(Hypothesis target, const PointSet& sample, PointSet labeling_domain, OracleOptions options)
    : target_(std::move(target)),
      domain_(std::move(labeling_domain)),
      options_(options),
      rng_(options.seed),
      index_(std::make_unique<Indexes>()) {
  if (domain_.empty()) throw std::invalid_argument("labeling domain must be non-empty");
  labels_ = evaluate_all(target_, domain_);
  auto& ix = *index_;
  ix.lex.resize(domain_.size());
  std::iota(ix.lex.begin(), ix.lex.end(), 0);
  std::stable_sort(ix.lex.begin(), ix.lex.end(),
                   [&](auto a, auto b) { return lex_less(domain_[a], domain_[b]); });
  ix.lex_pos.assign(domain_.size() + 1, 0);
  for (std::size_t i = 0; i < ix.lex.size(); ++i)
    ix.lex_pos[i + 1] = ix.lex_pos[i] + (labels_[ix.lex[i]] == Sign::Positive ? 1 : 0);
  ix.coords.resize(domain_.dim());
  if (sample.dim() != domain_.dim()) throw DimensionMismatch(domain_.dim(), sample.dim());
  for (std::size_t i = 0; i < sample.size(); ++i)
    if (!in_domain(sample[i]))
      throw std::invalid_argument("sample point " + std::to_string(i) + " is not in the labeling domain");
}

Oracle::Oracle(Hypothesis target, const PointSet& sample, OracleOptions options)
    : Oracle(std::move(target), sample, sample, options) {}

Oracle::~Oracle() = default;
Oracle::Oracle(Oracle&&) noexcept = default;
Oracle& Oracle::operator=(Oracle&&) noexcept = default;

bool Oracle::in_domain(PointView x) const {
  if (x.size() != domain_.dim()) return false;
  const auto& lex = index_->lex;
  auto it = std::lower_bound(lex.begin(), lex.end(), x,
                             [&](std::size_t id, PointView v) { return lex_less(domain_[id], v); });
  return it != lex.end() && same_point(domain_[*it], x);
}

std::optional<std::size_t> Oracle::remaining_budget() const {
  if (!options_.budget) return std::nullopt;
  return *options_.budget > transcript_.size() ? *options_.budget - transcript_.size() : 0;
}

bool Oracle::answer(const RegionQuery& q) {
  if (options_.budget && transcript_.size() >= *options_.budget) throw QueryBudgetExhausted();
  Evaluation e = evaluate(q);
  bool bit = e.answer;
  if (e.empty) {
    switch (options_.empty_policy) {
      case EmptyPolicy::AlwaysOne: bit = true; break;
      case EmptyPolicy::AlwaysZero: bit = false; break;
      case EmptyPolicy::SeededRandom: bit = (rng_() & 1U) != 0; break;
    }
  }
  transcript_.push_back(TranscriptEntry{q, bit, e.empty});
  return bit;
}

bool Oracle::peek(const RegionQuery& q) const {
  Evaluation e = evaluate(q);
  if (!e.empty) return e.answer;
  return options_.empty_policy != EmptyPolicy::AlwaysZero;
}

Sign Oracle::label_point(PointView x) {
  if (!in_domain(x)) throw std::invalid_argument("label_point: point is not in the labeling domain");
  return answer(FiniteSet(PointSet(x.size(), std::vector<double>(x.begin(), x.end()))), Sign::Positive)
             ? Sign::Positive
             : Sign::Negative;
}

Oracle::Evaluation Oracle::scan(const RegionQuery& q) const {
  Tally t{q.label};
  for (std::size_t i = 0; i < domain_.size(); ++i)
    if (contains(q.region, domain_[i]) && t.add(labels_[i])) break;
  return {t.any && !t.impure, !t.any};
}

Oracle::Evaluation Oracle::evaluate(const RegionQuery& q) const {
  auto& ix = *index_;
  const auto& lex = ix.lex;
  auto lex_range = [&](const Interval& iv) {
    if (iv.lo.size() != domain_.dim()) throw DimensionMismatch(domain_.dim(), iv.lo.size());
    auto lo = std::lower_bound(lex.begin(), lex.end(), PointView(iv.lo),
                               [&](std::size_t id, PointView v) { return lex_less(domain_[id], v); });
    auto hi = std::upper_bound(lo, lex.end(), PointView(iv.hi),
                               [&](PointView v, std::size_t id) { return lex_less(v, domain_[id]); });
    return std::pair<std::size_t, std::size_t>(lo - lex.begin(), hi - lex.begin());
  };
  auto from_counts = [&](std::size_t total, std::size_t positives) -> Evaluation {
    if (total == 0) return {false, true};
    std::size_t agree = q.label == Sign::Positive ? positives : total - positives;
    return {agree == total, false};
  };

  if (const auto* iv = std::get_if<Interval>(&q.region)) {
    auto [a, b] = lex_range(*iv);
    return from_counts(b - a, ix.lex_pos[b] - ix.lex_pos[a]);
  }
  if (const auto* h = std::get_if<AxisHalfspace>(&q.region)) {
    if (h->coord >= domain_.dim()) throw DimensionMismatch(h->coord + 1, domain_.dim());
    auto& slot = ix.coords[h->coord];
    if (!slot) {
      std::vector<std::size_t> ids(domain_.size());
      std::iota(ids.begin(), ids.end(), 0);
      std::stable_sort(ids.begin(), ids.end(),
                       [&](auto a, auto b) { return domain_[a][h->coord] < domain_[b][h->coord]; });
      Indexes::Coord c;
      c.values.reserve(ids.size());
      c.pos.assign(ids.size() + 1, 0);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        c.values.push_back(domain_[ids[i]][h->coord]);
        c.pos[i + 1] = c.pos[i] + (labels_[ids[i]] == Sign::Positive ? 1 : 0);
      }
      slot = std::move(c);
    }
    const auto& c = *slot;
    std::size_t a = 0, b = c.values.size();
    if (h->sense == Sense::GreaterEq)
      a = std::lower_bound(c.values.begin(), c.values.end(), h->threshold) - c.values.begin();
    else
      b = std::upper_bound(c.values.begin(), c.values.end(), h->threshold) - c.values.begin();
    return from_counts(b - a, c.pos[b] - c.pos[a]);
  }
  if (const auto* f = std::get_if<FiniteSet>(&q.region)) {
    Tally t{q.label};
    const auto& pts = f->points();
    if (!pts.empty() && pts.dim() != domain_.dim()) throw DimensionMismatch(domain_.dim(), pts.dim());
    for (std::size_t i = 0; i < pts.size() && !t.impure; ++i) {
      auto lo = std::lower_bound(lex.begin(), lex.end(), pts[i],
                                 [&](std::size_t id, PointView v) { return lex_less(domain_[id], v); });
      for (; lo != lex.end() && same_point(domain_[*lo], pts[i]); ++lo)
        if (t.add(labels_[*lo])) break;
    }
    return {t.any && !t.impure, !t.any};
  }
  if (const auto* hp = std::get_if<HypothesisPositiveSet>(&q.region)) {
    if (!hp->interval) return scan(q);
    auto [a, b] = lex_range(*hp->interval);
    Tally t{q.label};
    for (std::size_t p = a; p < b; ++p) {
      std::size_t id = lex[p];
      if (regionq::evaluate(hp->hypothesis, domain_[id]) == hp->sign && t.add(labels_[id])) break;
    }
    return {t.any && !t.impure, !t.any};
  }
  if (const auto* tp = std::get_if<TransformedPolytope>(&q.region)) {
    const auto& map = *tp->map;
    if (map.ambient_dim() != domain_.dim()) throw DimensionMismatch(domain_.dim(), map.ambient_dim());
    if (tp->inner.dim != map.sub_dim()) throw DimensionMismatch(map.sub_dim(), tp->inner.dim);
    std::size_t k = map.sub_dim();
    if (ix.cached_map != tp->map) {
      ix.cached_map = tp->map;
      ix.images.assign(domain_.size() * k, 0.0);
      ix.has_image.assign(domain_.size(), 0);
      Eigen::VectorXd z;
      for (std::size_t i = 0; i < domain_.size(); ++i) {
        if (!map.image(domain_[i], z)) continue;
        ix.has_image[i] = 1;
        std::copy(z.data(), z.data() + k, ix.images.begin() + static_cast<std::ptrdiff_t>(i * k));
      }
    }
    Tally t{q.label};
    for (std::size_t i = 0; i < domain_.size(); ++i) {
      bool in = (tp->anchor && same_point(*tp->anchor, domain_[i])) ||
                (ix.has_image[i] && tp->inner.contains_point(ix.images.data() + i * k));
      if (in && t.add(labels_[i])) break;
    }
    return {t.any && !t.impure, !t.any};
  }
  return scan(q);
}

}  // namespace regionq
