#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "regionq/hypothesis.hpp"
#include "regionq/regions.hpp"
#include "regionq/types.hpp"

namespace regionq {

enum class EmptyPolicy { AlwaysOne, AlwaysZero, SeededRandom };

EmptyPolicy parse_empty_policy(const std::string& name);
std::string to_string(EmptyPolicy p);

struct RegionQuery {
  RegionDescriptor region;
  Sign label = Sign::Positive;
};

struct TranscriptEntry {
  RegionQuery query;
  bool answer = false;
  bool empty = false;  // true when no point of L was in the region
};

struct OracleOptions {
  EmptyPolicy empty_policy = EmptyPolicy::SeededRandom;
  std::uint64_t seed = 0;
  std::optional<std::size_t> budget;  // answering beyond this throws QueryBudgetExhausted
};

class QueryBudgetExhausted : public std::runtime_error {
 public:
  QueryBudgetExhausted() : std::runtime_error("query budget exhausted") {}
};

// Simulated labeler. Answers (T, z) with 1 iff every point of L inside T has
// label z under the hidden target.
class Oracle {
 public:
  // `sample` is the learner's pool S; it must be contained in `labeling_domain`.
  Oracle(Hypothesis target, const PointSet& sample, PointSet labeling_domain,
         OracleOptions options = {});
  // L = S.
  Oracle(Hypothesis target, const PointSet& sample, OracleOptions options = {});
  ~Oracle();
  Oracle(Oracle&&) noexcept;
  Oracle& operator=(Oracle&&) noexcept;

  bool answer(const RegionQuery& q);
  bool answer(const RegionDescriptor& region, Sign label) { return answer(RegionQuery{region, label}); }
  // One query on the singleton {x}; x must belong to L.
  Sign label_point(PointView x);

  std::size_t queries_answered() const { return transcript_.size(); }
  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }
  std::optional<std::size_t> remaining_budget() const;
  const PointSet& labeling_domain() const { return domain_; }
  bool in_domain(PointView x) const;

  // Evaluates the answer without recording it or consuming budget. Used by
  // transcript replay and by tests; learners must not call it.
  bool peek(const RegionQuery& q) const;

 private:
  struct Indexes;
  struct Evaluation {
    bool answer;
    bool empty;
  };
  Evaluation evaluate(const RegionQuery& q) const;
  Evaluation scan(const RegionQuery& q) const;

  Hypothesis target_;
  PointSet domain_;
  std::vector<Sign> labels_;
  OracleOptions options_;
  std::mt19937_64 rng_;
  std::vector<TranscriptEntry> transcript_;
  std::unique_ptr<Indexes> index_;
};

}  // namespace regionq
