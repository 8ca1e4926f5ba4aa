#include "regionq/interval_learner.hpp"

#include <map>
#include <numeric>
#include <algorithm>

namespace regionq {

namespace {

// Prefix queries [x_1, x_i] for both labels, remembering which prefixes were
// found pure so the final sign rarely needs another query.
class PrefixProber {
 public:
  PrefixProber(const std::vector<double>& xs, Oracle& oracle) : xs_(xs), oracle_(oracle) {}

  // Returns the label under which prefix i (1-based) is pure, if any.
  std::optional<Sign> probe(std::size_t i) {
    Interval iv(xs_.front(), xs_[i - 1]);
    for (Sign y : {Sign::Positive, Sign::Negative}) {
      if (oracle_.answer(iv, y)) {
        pure_[i] = y;
        return y;
      }
    }
    return std::nullopt;
  }

  Sign sign_of_pure_prefix(std::size_t i) {
    if (auto it = pure_.find(i); it != pure_.end()) return it->second;
    // The prefix is pure, so a failed +1 query means every point is -1.
    return oracle_.answer(Interval(xs_.front(), xs_[i - 1]), Sign::Positive) ? Sign::Positive
                                                                               : Sign::Negative;
  }

 private:
  const std::vector<double>& xs_;
  Oracle& oracle_;
  std::map<std::size_t, Sign> pure_;
};

}  // namespace

FindLeftResult find_left(const std::vector<double>& sorted, Oracle& oracle) {
  if (sorted.empty()) throw std::invalid_argument("find_left needs a non-empty sample");
  const std::size_t m = sorted.size();
  PrefixProber prober(sorted, oracle);
  if (auto y = prober.probe(m)) return {m, *y};

  // Candidates are the positions lo..hi (1-based). The prefix ending at `lo`
  // is pure (a single point always is); the one past `hi` is not.
  std::size_t lo = 1, hi = m - 1;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo + 1) / 2;  // larger middle for even sizes
    if (prober.probe(mid)) lo = mid;
    else hi = mid - 1;
  }
  return {lo, prober.sign_of_pure_prefix(lo)};
}

IntervalLearnReport label_k_intervals(const PointSet& s, Oracle& oracle) {
  if (s.dim() != 1) throw DimensionMismatch(1, s.dim());
  IntervalLearnReport report;
  auto& res = report.result;
  res.transcript_begin = oracle.queries_answered();
  res.predictions.resize(s.size());

  std::vector<std::size_t> ids(s.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&](auto a, auto b) { return s.scalar(a) < s.scalar(b); });

  std::size_t start = 0;
  while (start < ids.size()) {
    std::vector<double> rest;
    rest.reserve(ids.size() - start);
    for (std::size_t i = start; i < ids.size(); ++i) rest.push_back(s.scalar(ids[i]));
    auto [len, y] = find_left(rest, oracle);
    for (std::size_t i = 0; i < len; ++i) res.predictions[ids[start + i]] = y;
    report.blocks.push_back({rest.front(), rest[len - 1], len, y});
    start += len;
    ++res.rounds;
  }
  res.queries_used = oracle.queries_answered() - res.transcript_begin;
  return report;
}

}  // namespace regionq
