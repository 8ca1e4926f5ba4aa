#include "regionq/lower_bound.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

namespace regionq {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(master) ^ a) ^ (b * 0xd1342543de82ef95ULL));
}

std::size_t ground_size_for(std::size_t k) {
  double kd = static_cast<double>(k);
  return static_cast<std::size_t>(std::ceil(4.0 * kd * kd * std::log(4.0 * kd)));
}

std::size_t pairwise_intersection_max(const SetFamily& fam) {
  std::size_t best = 0;
  std::vector<std::size_t> tmp;
  for (std::size_t i = 0; i < fam.sets.size(); ++i)
    for (std::size_t j = i + 1; j < fam.sets.size(); ++j) {
      tmp.clear();
      std::set_intersection(fam.sets[i].begin(), fam.sets[i].end(), fam.sets[j].begin(), fam.sets[j].end(),
                            std::back_inserter(tmp));
      best = std::max(best, tmp.size());
    }
  return best;
}

SetFamily low_intersection_family(std::size_t k, std::size_t gamma, std::size_t n_target, std::uint64_t seed) {
  return low_intersection_family(k, gamma, n_target, seed, ground_size_for(k));
}

SetFamily low_intersection_family(std::size_t k, std::size_t gamma, std::size_t n_target, std::uint64_t seed,
                                  std::size_t ground_size) {
  if (k == 0 || gamma > k) throw std::invalid_argument("need k >= 1 and gamma <= k");
  if (ground_size < k) throw std::invalid_argument("ground set smaller than k");
  SetFamily fam{ground_size, k, gamma, {}};
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> count(ground_size, 0);
  std::vector<char> in_sample(ground_size, 0);
  // element -> kept sets containing it
  std::vector<std::vector<std::size_t>> owners(ground_size);
  const std::size_t cap = 1000 * std::max<std::size_t>(n_target, 1);

  for (std::size_t attempt = 0; attempt < cap && fam.sets.size() < n_target; ++attempt) {
    // Floyd's algorithm for a uniform k-subset.
    std::vector<std::size_t> sample;
    for (std::size_t j = ground_size - k; j < ground_size; ++j) {
      std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
      std::size_t pick = in_sample[t] ? j : t;
      in_sample[pick] = 1;
      sample.push_back(pick);
    }
    for (auto e : sample) in_sample[e] = 0;
    std::sort(sample.begin(), sample.end());

    std::vector<std::size_t> touched;
    bool ok = true;
    for (auto e : sample) {
      for (auto s : owners[e]) {
        if (count[s]++ == 0) touched.push_back(s);
        if (count[s] > gamma) ok = false;
      }
    }
    for (auto s : touched) count[s] = 0;
    if (!ok) continue;
    for (auto e : sample) owners[e].push_back(fam.sets.size());
    fam.sets.push_back(std::move(sample));
  }
  if (pairwise_intersection_max(fam) > gamma) throw std::logic_error("set family failed verification");
  if (fam.sets.size() < n_target)
    throw FamilyConstructionError("retry cap reached with " + std::to_string(fam.sets.size()) + " sets",
                                  std::move(fam));
  return fam;
}

Hypothesis SpikedFamily::hypothesis(std::size_t row) const {
  PointSet pts(1);
  std::vector<Sign> labels;
  for (std::size_t i = 0; i < base.size(); ++i) {
    pts.push_back(std::vector<double>{static_cast<double>(base[i])});
    labels.push_back(row == i + 1 ? Sign::Negative : Sign::Positive);
  }
  return make_point_labeling(pts, labels, Sign::Negative);
}

std::vector<Sign> SpikedFamily::labels(std::size_t row) const {
  std::vector<Sign> out(ground_size, Sign::Negative);
  for (std::size_t i = 0; i < base.size(); ++i)
    if (row != i + 1) out[base[i]] = Sign::Positive;
  return out;
}

PointSet ground_points(std::size_t ground_size) {
  std::vector<double> v(ground_size);
  for (std::size_t i = 0; i < ground_size; ++i) v[i] = static_cast<double>(i);
  return PointSet::from_scalars(v);
}

std::vector<std::size_t> ground_members(const RegionDescriptor& region, std::size_t ground_size) {
  std::vector<std::size_t> out;
  auto as_index = [&](double v) -> std::optional<std::size_t> {
    if (v < 0 || v >= static_cast<double>(ground_size) || v != std::floor(v)) return std::nullopt;
    return static_cast<std::size_t>(v);
  };
  if (const auto* f = std::get_if<FiniteSet>(&region)) {
    for (std::size_t i = 0; i < f->size(); ++i)
      if (auto id = as_index(f->points()[i][0])) out.push_back(*id);
    return out;  // FiniteSet keeps its points sorted
  }
  if (const auto* iv = std::get_if<Interval>(&region)) {
    double lo = std::max(0.0, std::ceil(iv->lo[0]));
    double hi = std::min(static_cast<double>(ground_size) - 1.0, std::floor(iv->hi[0]));
    for (double v = lo; v <= hi; v += 1.0) out.push_back(static_cast<std::size_t>(v));
    return out;
  }
  for (std::size_t i = 0; i < ground_size; ++i) {
    double v = static_cast<double>(i);
    if (contains(region, PointView(&v, 1))) out.push_back(i);
  }
  return out;
}

std::size_t select_uncovered_target(const SetFamily& fam, const std::vector<RegionDescriptor>& regions) {
  std::vector<char> witnessed(fam.sets.size(), 0);
  std::vector<std::vector<std::size_t>> owners(fam.ground_size);
  for (std::size_t i = 0; i < fam.sets.size(); ++i)
    for (auto e : fam.sets[i]) owners[e].push_back(i);
  for (const auto& r : regions) {
    auto m = ground_members(r, fam.ground_size);
    if (m.size() <= fam.gamma || m.size() > fam.k) continue;
    for (auto i : owners[m.front()])
      if (std::includes(fam.sets[i].begin(), fam.sets[i].end(), m.begin(), m.end())) witnessed[i] = 1;
  }
  for (std::size_t i = 0; i < fam.sets.size(); ++i)
    if (!witnessed[i]) return i;
  throw std::runtime_error("every set is witnessed by some query region");
}

namespace {

RegionDescriptor finite_of(const std::vector<std::size_t>& ids) {
  std::vector<double> v;
  for (auto id : ids) v.push_back(static_cast<double>(id));
  return FiniteSet(PointSet::from_scalars(v));
}

}  // namespace

std::vector<RegionDescriptor> lower_bound_query_family(const SetFamily& fam) {
  std::vector<RegionDescriptor> q;
  for (std::size_t i = 0; i + 1 < fam.sets.size(); ++i) q.push_back(finite_of(fam.sets[i]));
  const std::size_t chunk = std::max<std::size_t>(fam.gamma, 1);
  for (const auto& s : fam.sets) {
    for (std::size_t a = 0; a < s.size(); a += chunk)
      q.push_back(finite_of({s.begin() + static_cast<std::ptrdiff_t>(a),
                             s.begin() + static_cast<std::ptrdiff_t>(std::min(a + chunk, s.size()))}));
    if (chunk > 1)
      for (auto e : s) q.push_back(finite_of({e}));
  }
  return q;
}

std::vector<Sign> exhaustive_coverage_learner(Oracle& oracle, const SpikedFamily& fam,
                                              const std::vector<RegionDescriptor>& q) {
  std::vector<char> in_base(fam.ground_size, 0);
  for (auto e : fam.base) in_base[e] = 1;
  auto budget_left = [&] {
    auto r = oracle.remaining_budget();
    return !r || *r > 0;
  };

  struct Candidate {
    std::size_t region;
    std::vector<std::size_t> members;  // members inside C*
  };
  std::vector<Candidate> inside, single;
  std::vector<std::optional<std::size_t>> singleton_of(fam.ground_size);
  for (std::size_t r = 0; r < q.size(); ++r) {
    auto m = ground_members(q[r], fam.ground_size);
    if (m.empty()) continue;
    std::vector<std::size_t> hit;
    for (auto e : m)
      if (in_base[e]) hit.push_back(e);
    if (hit.size() == m.size()) {
      if (m.size() == 1 && !singleton_of[m[0]]) singleton_of[m[0]] = r;
      inside.push_back({r, hit});
    } else if (hit.size() == 1) {
      single.push_back({r, hit});
    }
  }
  std::stable_sort(inside.begin(), inside.end(),
                   [](const auto& a, const auto& b) { return a.members.size() > b.members.size(); });

  std::optional<std::size_t> flipped;
  std::vector<char> covered(fam.ground_size, 0);
  std::optional<std::vector<std::size_t>> suspect;
  for (const auto& c : inside) {
    if (suspect || !budget_left()) break;
    if (std::none_of(c.members.begin(), c.members.end(), [&](auto e) { return !covered[e]; })) continue;
    for (auto e : c.members) covered[e] = 1;
    if (!oracle.answer(q[c.region], Sign::Positive)) suspect = c.members;
  }
  if (suspect) {
    if (suspect->size() == 1) flipped = suspect->front();
    for (std::size_t i = 0; !flipped && i < suspect->size(); ++i) {
      auto e = (*suspect)[i];
      if (i + 1 == suspect->size()) {
        flipped = e;  // every other member answered clean
      } else if (singleton_of[e] && budget_left()) {
        if (!oracle.answer(q[*singleton_of[e]], Sign::Positive)) flipped = e;
      } else {
        break;
      }
    }
  } else {
    for (const auto& c : single) {
      if (!budget_left()) break;
      auto e = c.members.front();
      if (covered[e]) continue;
      covered[e] = 1;
      if (oracle.answer(q[c.region], Sign::Negative)) {
        flipped = e;
        break;
      }
    }
  }

  std::vector<Sign> out(fam.ground_size, Sign::Negative);
  for (auto e : fam.base) out[e] = Sign::Positive;
  if (flipped) out[*flipped] = Sign::Negative;
  return out;
}

namespace {

bool answer_under(const std::vector<std::size_t>& members, Sign z, const std::vector<char>& in_base,
                  std::optional<std::size_t> flip) {
  for (auto e : members) {
    Sign label = in_base[e] && e != flip ? Sign::Positive : Sign::Negative;
    if (label != z) return false;
  }
  return true;
}

}  // namespace

std::vector<char> coverage(const std::vector<TranscriptEntry>& transcript, const SpikedFamily& fam) {
  std::vector<char> in_base(fam.ground_size, 0);
  for (auto e : fam.base) in_base[e] = 1;
  std::vector<char> covered(fam.ground_size, 0);
  for (const auto& t : transcript) {
    auto m = ground_members(t.query.region, fam.ground_size);
    std::vector<std::size_t> hit;
    for (auto e : m)
      if (in_base[e]) hit.push_back(e);
    if (!m.empty() && hit.size() == m.size()) {
      for (auto e : hit) covered[e] = 1;
    } else if (hit.size() == 1) {
      covered[hit.front()] = 1;
    }
  }
  return covered;
}

bool replay_indistinguishable(const std::vector<TranscriptEntry>& transcript, const SpikedFamily& fam,
                              std::size_t x) {
  std::vector<char> in_base(fam.ground_size, 0);
  for (auto e : fam.base) in_base[e] = 1;
  for (const auto& t : transcript) {
    auto m = ground_members(t.query.region, fam.ground_size);
    if (m.empty()) continue;  // both hypotheses see the same policy answer
    if (answer_under(m, t.query.label, in_base, std::nullopt) != answer_under(m, t.query.label, in_base, x))
      return false;
  }
  return true;
}

LowerBoundReport run_lower_bound_experiment(const CoverageLearner& learner, const std::vector<RegionDescriptor>& q,
                                            const SetFamily& fam, std::size_t trials, std::size_t budget,
                                            std::uint64_t seed) {
  LowerBoundReport rep;
  rep.target = select_uncovered_target(fam, q);
  rep.trials = trials;
  SpikedFamily spiked{fam.ground_size, fam.sets[rep.target]};
  PointSet ground = ground_points(fam.ground_size);
  std::size_t errors = 0;

  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(derive_seed(seed, trial));
    std::size_t row = std::uniform_int_distribution<std::size_t>(0, spiked.rows() - 1)(rng);
    OracleOptions opts;
    opts.seed = derive_seed(seed, trial, 1);
    opts.budget = budget;
    Oracle oracle(spiked.hypothesis(row), ground, opts);
    std::vector<Sign> out;
    try {
      out = learner(oracle, spiked, q);
    } catch (const QueryBudgetExhausted&) {
      out = spiked.labels(0);
    }
    if (out != spiked.labels(row)) ++errors;

    auto cov = coverage(oracle.transcript(), spiked);
    std::size_t covered = 0;
    for (auto e : spiked.base) {
      if (cov[e]) {
        ++covered;
        continue;
      }
      ++rep.replay_checks;
      if (!replay_indistinguishable(oracle.transcript(), spiked, e)) rep.replay_ok = false;
    }
    rep.covered_per_trial.push_back(covered);
    ++rep.coverage_histogram[covered];
  }
  rep.error_frequency = trials == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(trials);
  return rep;
}

}  // namespace regionq
