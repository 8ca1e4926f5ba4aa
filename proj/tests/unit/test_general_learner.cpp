#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "regionq/general_learner.hpp"
#include "regionq/harness.hpp"
#include "reference_oracles.hpp"
#include "test_util.hpp"

namespace regionq {
namespace {

constexpr Sign P = Sign::Positive;
constexpr Sign N = Sign::Negative;

HypothesisTable five_thresholds() {
  return HypothesisTable({{P, P, P, P}, {N, P, P, P}, {N, N, P, P}, {N, N, N, P}, {N, N, N, N}});
}

std::vector<std::size_t> identity(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

std::size_t rounds_bound(std::size_t h) {
  return static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(h)) / std::log(1.5)));
}

TEST(HypothesisTable, RejectsDuplicateAndRaggedRows) {
  EXPECT_THROW(HypothesisTable({{P, N}, {P, N}}), std::invalid_argument);
  EXPECT_THROW(HypothesisTable({{P, N}, {P}}), std::invalid_argument);
}

TEST(HypothesisTable, CsvRoundTripWithAndWithoutHeader) {
  auto t = five_thresholds();
  std::stringstream buf;
  write_table_csv(buf, t);
  auto back = read_table_csv(buf);
  ASSERT_EQ(back.size(), t.size());
  for (std::size_t r = 0; r < t.size(); ++r) EXPECT_EQ(back.row(r), t.row(r));
  std::istringstream with_header("0,1,2\n1,-1,1\n-1,-1,1\n");
  auto h = read_table_csv(with_header);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h.row(0), (std::vector<Sign>{P, N, P}));
}

TEST(HypothesisTable, WideRowsSpanWords) {
  std::vector<Sign> a(130, P), b(130, P);
  b[129] = N;
  HypothesisTable t({a, b});
  EXPECT_EQ(t.at(1, 129), N);
  EXPECT_EQ(t.find_row(b), 1u);
  EXPECT_EQ(t.filter({1}).row(0), b);
}

TEST(BalancedPrefix, FiveThresholds) {
  auto t = five_thresholds();
  auto bp = find_balanced_prefix(t, identity(4));
  EXPECT_EQ(bp.i_star, 2u);
  EXPECT_EQ(t.at(bp.rep, 0), N);
  EXPECT_EQ(t.at(bp.rep, 1), N);
  EXPECT_EQ(bp.agreeing.size(), 3u);
}

TEST(BalancedPrefix, TwoRowsSplitAtFirstPoint) {
  HypothesisTable t({{P, N, N}, {N, N, N}});
  auto bp = find_balanced_prefix(t, identity(3));
  EXPECT_EQ(bp.i_star, 1u);
  EXPECT_EQ(bp.agreeing.size(), 1u);
}

TEST(BalancedPrefix, RequiresTwoRows) {
  HypothesisTable t({{P, N}});
  EXPECT_THROW(find_balanced_prefix(t, identity(2)), std::invalid_argument);
}

TEST(BalancedPrefix, GuaranteeOnRandomTables) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t width = 3 + rng() % 20;
    std::set<std::vector<Sign>> rows;
    const std::size_t want = 2 + rng() % 40;
    for (std::size_t tries = 0; rows.size() < want && tries < 1000; ++tries) {
      std::vector<Sign> r(width);
      for (auto& s : r) s = rng() % 2 ? P : N;
      rows.insert(r);
    }
    if (rows.size() < 2) continue;
    HypothesisTable t(std::vector<std::vector<Sign>>(rows.begin(), rows.end()));
    auto order = identity(width);
    std::shuffle(order.begin(), order.end(), rng);
    auto bp = find_balanced_prefix(t, order);
    // Count agreeing rows directly from the table.
    std::size_t agree = 0;
    for (std::size_t r = 0; r < t.size(); ++r) {
      bool ok = true;
      for (std::size_t i = 0; i < bp.i_star; ++i) ok = ok && t.at(r, order[i]) == t.at(bp.rep, order[i]);
      agree += ok;
    }
    const double h = static_cast<double>(t.size());
    EXPECT_EQ(agree, bp.agreeing.size());
    EXPECT_GE(3.0 * static_cast<double>(agree), h);
    EXPECT_LE(3.0 * static_cast<double>(agree), 2.0 * h);
  }
}

TEST(GeneralLearn, SingleRowNeedsNoQueries) {
  PointSet s = PointSet::from_scalars({1, 2, 3});
  HypothesisTable t({{P, N, P}});
  Oracle o(make_point_labeling(s, {P, N, P}), s);
  auto rep = general_query_learn(s, t, o);
  EXPECT_EQ(rep.result.queries_used, 0u);
  EXPECT_EQ(testing::predicted(rep.result), (std::vector<Sign>{P, N, P}));
}

TEST(GeneralLearn, FiveThresholds) {
  PointSet s = PointSet::from_scalars({1, 2, 3, 4});
  auto t = five_thresholds();
  for (auto policy : {EmptyPolicy::AlwaysOne, EmptyPolicy::AlwaysZero, EmptyPolicy::SeededRandom}) {
    OracleOptions opts;
    opts.empty_policy = policy;
    Oracle o(UnionOfIntervals{{{2.5, INFINITY}}}, s, opts);
    auto rep = general_query_learn(s, t, o);
    EXPECT_EQ(testing::predicted(rep.result), (std::vector<Sign>{N, N, P, P}));
    EXPECT_LE(rep.result.queries_used, 8u);
    EXPECT_EQ(rep.result.queries_used, o.queries_answered());
  }
}

TEST(GeneralLearn, RequiresLabelingDomainEqualToSample) {
  PointSet s = PointSet::from_scalars({1, 2, 3, 4});
  PointSet l = PointSet::from_scalars({1, 2, 3, 4, 5});
  Oracle o(UnionOfIntervals{}, s, l);
  EXPECT_THROW(general_query_learn(s, five_thresholds(), o), std::invalid_argument);
}

// Every round keeps one nonempty side of the split, so a target outside the
// table is not detected: the learner settles on some row of the table.
TEST(GeneralLearn, TargetOutsideTableEndsOnATableRow) {
  PointSet s = PointSet::from_scalars({1, 2, 3});
  HypothesisTable t({{P, P, P}, {N, N, N}, {N, P, P}});
  Oracle o(make_point_labeling(s, {P, N, P}), s);
  auto rep = general_query_learn(s, t, o);
  EXPECT_TRUE(t.find_row(testing::predicted(rep.result)).has_value());
  EXPECT_EQ(rep.version_space_sizes.back(), 1u);
}

// Random tables with a random target row; every round is checked.
TEST(GeneralLearn, ShrinkConsistencyAndBudgetOnRandomTables) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng() % 40;
    PointSet s = testing::random_points(rng, n, trial % 3 == 0 ? 2 : 1);
    std::set<std::vector<Sign>> rows;
    const std::size_t want = 2 + rng() % 300;
    for (std::size_t tries = 0; rows.size() < want && tries < 5000; ++tries) {
      std::vector<Sign> r(n);
      for (auto& v : r) v = rng() % 3 ? P : N;
      rows.insert(r);
    }
    HypothesisTable t(std::vector<std::vector<Sign>>(rows.begin(), rows.end()));
    const std::size_t target = rng() % t.size();
    OracleOptions opts;
    opts.empty_policy = static_cast<EmptyPolicy>(trial % 3);
    opts.seed = trial;
    Oracle o(make_point_labeling(s, t.row(target)), s, opts);
    auto rep = general_query_learn(s, t, o);
    EXPECT_EQ(testing::predicted(rep.result), t.row(target));
    const auto& sizes = rep.version_space_sizes;
    ASSERT_FALSE(sizes.empty());
    EXPECT_EQ(sizes.front(), t.size());
    EXPECT_EQ(sizes.back(), 1u);
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) EXPECT_LE(3 * sizes[i + 1], 2 * sizes[i]);
    EXPECT_LE(rep.result.rounds, rounds_bound(t.size()));
    EXPECT_LE(rep.result.queries_used, 2 * rounds_bound(t.size()));
  }
}

TEST(GeneralLearn, InducedQueryFamilyVcWithinBound) {
  // Threshold family (VC 1): regions [a, b] intersected with {g = s}, g a threshold or its complement.
  PointSet probes = PointSet::from_scalars({1, 2, 3, 4, 5, 6});
  std::vector<RegionDescriptor> family;
  for (std::size_t j = 0; j <= probes.size(); ++j) {
    Hypothesis g = UnionOfIntervals{j < probes.size() ? std::vector<std::pair<double, double>>{{j + 1.0, INFINITY}}
                                                      : std::vector<std::pair<double, double>>{}};
    for (auto sign : {P, N})
      for (std::size_t a = 0; a < probes.size(); ++a)
        for (std::size_t b = a; b < probes.size(); ++b)
          family.push_back(HypothesisPositiveSet{g, sign, Interval(a + 1.0, b + 1.0)});
  }
  EXPECT_LE(empirical_vc_dimension(family, probes, 6), 6);
}

using testing::brute_teaching_depth;

TEST(TeachingTree, SingleHypothesisIsALeaf) {
  TeachingInstance inst{HypothesisTable({{P, N}}), PointSet::from_scalars({1, 2}), {}, {{0, P}}};
  EXPECT_EQ(teaching_tree_depth(inst), 0);
}

TEST(TeachingTree, OneSingletonSplit) {
  TeachingInstance inst{HypothesisTable({{P, N}, {P, P}}), PointSet::from_scalars({1, 2}),
                        {{Interval(2.0, 2.0), P}}, {{0, P}, {1, N}}};
  EXPECT_EQ(teaching_tree_depth(inst), 1);
}

TEST(TeachingTree, ThresholdsWithPrefixQueries) {
  PointSet s = PointSet::from_scalars({1, 2, 3});
  HypothesisTable h({{P, P, P}, {N, P, P}, {N, N, P}, {N, N, N}});
  std::vector<RegionQuery> q;
  for (double b : {1.0, 2.0, 3.0})
    for (auto z : {P, N}) q.push_back({Interval(1.0, b), z});
  for (std::size_t row = 0; row < h.size(); ++row) {
    std::map<std::size_t, Sign> f;
    for (std::size_t i = 0; i < 3; ++i) f[i] = h.at(row, i);
    TeachingInstance inst{h, s, q, f};
    EXPECT_EQ(teaching_tree_depth(inst), brute_teaching_depth(inst)) << "row " << row;
  }
}

TEST(TeachingTree, UnseparableReturnsNullopt) {
  TeachingInstance inst{HypothesisTable({{P, N}, {P, P}}), PointSet::from_scalars({1, 2}),
                        {{Interval(1.0, 1.0), P}}, {{1, N}}};
  EXPECT_EQ(teaching_tree_depth(inst), std::nullopt);
}

TEST(TeachingTree, RandomTinyInstancesMatchBruteForce) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + rng() % 3;
    PointSet s = testing::random_points(rng, n, 1);
    std::set<std::vector<Sign>> rows;
    for (int tries = 0; rows.size() < 2 + rng() % 7 && tries < 200; ++tries) {
      std::vector<Sign> r(n);
      for (auto& v : r) v = rng() % 2 ? P : N;
      rows.insert(r);
    }
    HypothesisTable h(std::vector<std::vector<Sign>>(rows.begin(), rows.end()));
    std::vector<RegionQuery> q;
    const std::size_t nq = 1 + rng() % 8;
    for (std::size_t i = 0; i < nq; ++i) {
      double a = s.scalar(rng() % n), b = s.scalar(rng() % n);
      if (b < a) std::swap(a, b);
      q.push_back({Interval(a, b), rng() % 2 ? P : N});
    }
    std::map<std::size_t, Sign> f;
    const auto& pick = h.row(rng() % h.size());
    for (std::size_t i = 0; i < n; ++i)
      if (rng() % 2) f[i] = pick[i];
    TeachingInstance inst{h, s, q, f};
    EXPECT_EQ(teaching_tree_depth(inst), brute_teaching_depth(inst)) << "trial " << trial;
  }
}

TEST(TeachingTree, RejectsLargeInstances) {
  std::vector<std::vector<Sign>> rows;
  for (int r = 0; r < 17; ++r) {
    std::vector<Sign> row(5);
    for (int i = 0; i < 5; ++i) row[i] = (r >> i) & 1 ? P : N;
    rows.push_back(row);
  }
  TeachingInstance inst{HypothesisTable(rows), PointSet::from_scalars({1, 2, 3, 4, 5}), {}, {}};
  EXPECT_THROW(teaching_tree_depth(inst), std::invalid_argument);
}

TEST(ThresholdTable, SizeIsNPlusOne) {
  PointSet s = PointSet::from_scalars({0.3, 0.1, 0.2});
  auto t = threshold_table(s);
  ASSERT_EQ(t.size(), 4u);
  // Enumerate thresholds between sorted points by hand.
  std::set<std::vector<Sign>> expect{{P, P, P}, {P, N, P}, {P, N, N}, {N, N, N}};
  std::set<std::vector<Sign>> got;
  for (std::size_t r = 0; r < t.size(); ++r) got.insert(t.row(r));
  EXPECT_EQ(got, expect);
}

}  // namespace
}  // namespace regionq
