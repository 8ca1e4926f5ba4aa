#include "regionq/general_learner.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace regionq {

namespace {

struct RowHash {
  const HypothesisTable* t;
  std::size_t operator()(std::size_t r) const {
    std::size_t h = 1469598103934665603ULL;
    for (std::size_t w = 0; w < t->words_per_row(); ++w) h = (h ^ t->word(r, w)) * 1099511628211ULL;
    return h;
  }
};

struct RowEq {
  const HypothesisTable* t;
  bool operator()(std::size_t a, std::size_t b) const {
    for (std::size_t w = 0; w < t->words_per_row(); ++w)
      if (t->word(a, w) != t->word(b, w)) return false;
    return true;
  }
};

}  // namespace

HypothesisTable::HypothesisTable(const std::vector<std::vector<Sign>>& rows)
    : rows_(rows.size()), width_(rows.empty() ? 0 : rows.front().size()) {
  words_ = (width_ + 63) / 64;
  bits_.assign(rows_ * words_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (rows[r].size() != width_) throw std::invalid_argument("hypothesis rows must have equal length");
    for (std::size_t c = 0; c < width_; ++c)
      if (rows[r][c] == Sign::Positive) bits_[r * words_ + c / 64] |= std::uint64_t{1} << (c % 64);
  }
  std::unordered_set<std::size_t, RowHash, RowEq> seen(rows_, RowHash{this}, RowEq{this});
  for (std::size_t r = 0; r < rows_; ++r)
    if (!seen.insert(r).second) throw std::invalid_argument("hypothesis rows must be distinct");
}

std::vector<Sign> HypothesisTable::row(std::size_t r) const {
  std::vector<Sign> out(width_);
  for (std::size_t c = 0; c < width_; ++c) out[c] = at(r, c);
  return out;
}

HypothesisTable HypothesisTable::filter(const std::vector<std::size_t>& keep) const {
  HypothesisTable t;
  t.rows_ = keep.size();
  t.width_ = width_;
  t.words_ = words_;
  t.bits_.reserve(keep.size() * words_);
  for (auto r : keep)
    t.bits_.insert(t.bits_.end(), bits_.begin() + static_cast<std::ptrdiff_t>(r * words_),
                   bits_.begin() + static_cast<std::ptrdiff_t>((r + 1) * words_));
  return t;
}

HypothesisTable HypothesisTable::permute_columns(const std::vector<std::size_t>& order) const {
  if (order.size() != width_) throw std::invalid_argument("column order must cover every column");
  HypothesisTable t;
  t.rows_ = rows_;
  t.width_ = width_;
  t.words_ = words_;
  t.bits_.assign(bits_.size(), 0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < width_; ++c)
      if (at(r, order[c]) == Sign::Positive) t.bits_[r * words_ + c / 64] |= std::uint64_t{1} << (c % 64);
  return t;
}

std::optional<std::size_t> HypothesisTable::find_row(const std::vector<Sign>& labels) const {
  if (labels.size() != width_) return std::nullopt;
  for (std::size_t r = 0; r < rows_; ++r) {
    bool ok = true;
    for (std::size_t c = 0; c < width_ && ok; ++c) ok = at(r, c) == labels[c];
    if (ok) return r;
  }
  return std::nullopt;
}

HypothesisTable read_table_csv(std::istream& in) {
  std::vector<std::vector<Sign>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<int> vals;
    bool is_header = false;
    while (std::getline(ss, cell, ',')) {
      int v = std::stoi(cell);
      if (v != 1 && v != -1) is_header = true;
      vals.push_back(v);
    }
    // A header lists point ids and therefore contains id 0, never a label.
    if (first && is_header) {
      first = false;
      continue;
    }
    first = false;
    std::vector<Sign> row;
    for (int v : vals) row.push_back(parse_sign(v));
    rows.push_back(std::move(row));
  }
  return HypothesisTable(rows);
}

void write_table_csv(std::ostream& out, const HypothesisTable& t) {
  for (std::size_t c = 0; c < t.width(); ++c) out << (c ? "," : "") << c;
  out << '\n';
  for (std::size_t r = 0; r < t.size(); ++r) {
    for (std::size_t c = 0; c < t.width(); ++c) out << (c ? "," : "") << to_int(t.at(r, c));
    out << '\n';
  }
}

BalancedPrefix find_balanced_prefix(const HypothesisTable& h, const std::vector<std::size_t>& order) {
  if (h.size() <= 1) throw std::invalid_argument("find_balanced_prefix needs at least two hypotheses");
  if (order.size() != h.width()) throw std::invalid_argument("order must be a permutation of the columns");
  const std::size_t total = h.size();
  std::vector<std::size_t> rows(total);
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<std::uint64_t> chunk(total);

  // Columns are consumed 64 at a time: each surviving row's labels on the
  // chunk are gathered into one word, then the walk runs on those words.
  for (std::size_t base = 0; base < order.size(); base += 64) {
    std::size_t len = std::min<std::size_t>(64, order.size() - base);
    bool aligned = base % 64 == 0;
    for (std::size_t j = 0; j < len && aligned; ++j) aligned = order[base + j] == base + j;
    for (std::size_t m = 0; m < rows.size(); ++m) {
      if (aligned) {
        chunk[m] = h.word(rows[m], base / 64);
      } else {
        std::uint64_t w = 0;
        for (std::size_t j = 0; j < len; ++j)
          if (h.at(rows[m], order[base + j]) == Sign::Positive) w |= std::uint64_t{1} << j;
        chunk[m] = w;
      }
    }
    for (std::size_t j = 0; j < len; ++j) {
      std::size_t pos = 0;
      for (std::size_t m = 0; m < rows.size(); ++m) pos += (chunk[m] >> j) & 1U;
      // Ties go to +1: the positive side holds at least half of the rows.
      std::uint64_t want = 2 * pos >= rows.size() ? 1U : 0U;
      std::size_t kept = 0;
      for (std::size_t m = 0; m < rows.size(); ++m) {
        if (((chunk[m] >> j) & 1U) == want) {
          rows[kept] = rows[m];
          chunk[kept] = chunk[m];
          ++kept;
        }
      }
      rows.resize(kept);
      if (3 * rows.size() <= 2 * total) return BalancedPrefix{base + j + 1, rows.front(), rows};
    }
  }
  // Distinct rows leave a single survivor after the full walk, so this is
  // unreachable for valid tables.
  throw std::logic_error("majority walk did not shrink the version space");
}

std::vector<std::size_t> domain_order(const PointSet& s) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return lex_less(s[a], s[b]); });
  return order;
}

GeneralLearnReport general_query_learn(const PointSet& s, const HypothesisTable& h, Oracle& oracle) {
  if (h.width() != s.size()) throw std::invalid_argument("table width must equal |S|");
  if (h.size() == 0) throw std::invalid_argument("hypothesis table is empty");
  if (oracle.labeling_domain().size() != s.size())
    throw std::invalid_argument("general_query_learn requires the labeling domain to equal S");
  auto order = domain_order(s);
  for (std::size_t i = 1; i < order.size(); ++i)
    if (same_point(s[order[i]], s[order[i - 1]]))
      throw std::invalid_argument("general_query_learn requires distinct points");

  GeneralLearnReport report;
  report.result.transcript_begin = oracle.queries_answered();
  // Columns of `version` follow `order`, so the majority walk reads whole words.
  HypothesisTable version = h.permute_columns(order);
  std::vector<std::size_t> identity(order.size());
  std::iota(identity.begin(), identity.end(), 0);

  while (version.size() > 1) {
    report.version_space_sizes.push_back(version.size());
    auto bp = find_balanced_prefix(version, identity);
    std::vector<Sign> rep(s.size());
    for (std::size_t c = 0; c < order.size(); ++c) rep[order[c]] = version.at(bp.rep, c);
    Hypothesis g = make_point_labeling(s, rep);
    Interval prefix(s.point(order.front()), s.point(order[bp.i_star - 1]));

    bool agree = true;
    for (Sign z : {Sign::Positive, Sign::Negative}) {
      bool any = false;
      for (std::size_t c = 0; c < bp.i_star && !any; ++c) any = rep[order[c]] == z;
      // With L = S an empty part of the prefix is vacuously pure; asking would
      // only expose the empty-intersection policy.
      if (!any) continue;
      agree = oracle.answer(HypothesisPositiveSet{g, z, prefix}, z) && agree;
    }

    std::vector<std::size_t> keep;
    if (agree) {
      keep = bp.agreeing;
    } else {
      std::vector<char> drop(version.size(), 0);
      for (auto r : bp.agreeing) drop[r] = 1;
      for (std::size_t r = 0; r < version.size(); ++r)
        if (!drop[r]) keep.push_back(r);
    }
    if (keep.empty()) throw std::runtime_error("version space emptied: target labeling is not in the table");
    if (3 * keep.size() > 2 * version.size()) throw std::logic_error("round removed less than a third");
    version = version.filter(keep);
    ++report.result.rounds;
  }
  if (version.size() == 0) throw std::runtime_error("version space emptied");
  report.version_space_sizes.push_back(version.size());
  report.result.predictions.resize(s.size());
  for (std::size_t c = 0; c < order.size(); ++c) report.result.predictions[order[c]] = version.at(0, c);
  report.result.queries_used = oracle.queries_answered() - report.result.transcript_begin;
  return report;
}

bool teaching_answer(const RegionQuery& q, const PointSet& s, const std::vector<Sign>& labels) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (contains(q.region, s[i]) && labels[i] != q.label) return false;
  return true;
}

std::optional<int> teaching_tree_depth(const TeachingInstance& inst) {
  const std::size_t nh = inst.h.size();
  const std::size_t nq = inst.queries.size();
  if (nh > 16 || nq > 16) throw std::invalid_argument("teaching_tree_depth supports |H|, |Q| <= 16");
  if (inst.h.width() != inst.s.size()) throw std::invalid_argument("table width must equal |S|");
  for (const auto& [id, sign] : inst.f)
    if (id >= inst.s.size()) throw std::invalid_argument("f labels a point outside S");

  std::uint32_t in_f = 0;
  for (std::size_t r = 0; r < nh; ++r) {
    bool ok = true;
    for (const auto& [id, sign] : inst.f) ok = ok && inst.h.at(r, id) == sign;
    if (ok) in_f |= 1U << r;
  }
  // yes[q]: rows answering 1 to query q.
  std::vector<std::uint32_t> yes(nq, 0);
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t r = 0; r < nh; ++r)
      if (teaching_answer(inst.queries[q], inst.s, inst.h.row(r))) yes[q] |= 1U << r;

  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  std::unordered_map<std::uint32_t, int> memo;
  auto depth = [&](auto&& self, std::uint32_t set) -> int {
    if ((set & ~in_f) == 0 || (set & in_f) == 0) return 0;
    if (auto it = memo.find(set); it != memo.end()) return it->second;
    int best = kInf;
    for (std::size_t q = 0; q < nq; ++q) {
      std::uint32_t a = set & yes[q], b = set & ~yes[q];
      if (a == 0 || b == 0) continue;
      int d = 1 + std::max(self(self, a), self(self, b));
      best = std::min(best, d);
    }
    memo[set] = best;
    return best;
  };
  std::uint32_t all = nh == 32 ? ~0U : ((1U << nh) - 1U);
  int d = depth(depth, all);
  if (d >= kInf) return std::nullopt;
  return d;
}

}  // namespace regionq
