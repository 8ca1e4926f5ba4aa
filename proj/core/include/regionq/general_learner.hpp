#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "regionq/oracle.hpp"
#include "regionq/types.hpp"

namespace regionq {

// Explicit finite family of distinct labelings of S (one row per hypothesis),
// stored bit-packed. Immutable; filtering returns a new table.
class HypothesisTable {
 public:
  HypothesisTable() = default;
  explicit HypothesisTable(const std::vector<std::vector<Sign>>& rows);

  std::size_t size() const { return rows_; }
  std::size_t width() const { return width_; }
  Sign at(std::size_t row, std::size_t col) const {
    return (bits_[row * words_ + col / 64] >> (col % 64)) & 1U ? Sign::Positive : Sign::Negative;
  }
  std::vector<Sign> row(std::size_t r) const;
  std::uint64_t word(std::size_t row, std::size_t w) const { return bits_[row * words_ + w]; }
  std::size_t words_per_row() const { return words_; }

  HypothesisTable filter(const std::vector<std::size_t>& keep) const;
  HypothesisTable permute_columns(const std::vector<std::size_t>& order) const;
  std::optional<std::size_t> find_row(const std::vector<Sign>& labels) const;

 private:
  std::size_t rows_ = 0;
  std::size_t width_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

// CSV: one row per hypothesis, one column per point id, entries +1/-1. An
// optional header row of point ids is skipped.
HypothesisTable read_table_csv(std::istream& in);
void write_table_csv(std::ostream& out, const HypothesisTable& t);

struct BalancedPrefix {
  std::size_t i_star = 0;               // prefix length, 1-based
  std::size_t rep = 0;                  // representative row index
  std::vector<std::size_t> agreeing;    // rows agreeing with rep on the prefix
};

// Majority walk along `order` (a permutation of column ids).
BalancedPrefix find_balanced_prefix(const HypothesisTable& h, const std::vector<std::size_t>& order);

// Ascending lexicographic order of the points, ties by id.
std::vector<std::size_t> domain_order(const PointSet& s);

struct GeneralLearnReport {
  LearnResult result;
  std::vector<std::size_t> version_space_sizes;  // before each round, then the final size
};

// Requires L = S and that the target labeling is a row of `h`.
GeneralLearnReport general_query_learn(const PointSet& s, const HypothesisTable& h, Oracle& oracle);

struct TeachingInstance {
  HypothesisTable h;
  PointSet s;
  std::vector<RegionQuery> queries;
  std::map<std::size_t, Sign> f;  // partial labeling by point id
};

// Answer of query q for a hypothesis given as a labeling of S (L = S). A region
// missing S is answered 1.
bool teaching_answer(const RegionQuery& q, const PointSet& s, const std::vector<Sign>& labels);

// Minimum depth of a generalized teaching tree for f, or nullopt when the
// queries cannot separate H_f from its complement. |H|, |Q| <= 16.
std::optional<int> teaching_tree_depth(const TeachingInstance& inst);

}  // namespace regionq
