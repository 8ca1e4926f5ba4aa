#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "regionq/oracle.hpp"

namespace regionq {

// Subsets of the ground set {0, ..., ground_size - 1}, each of size k, sorted.
struct SetFamily {
  std::size_t ground_size = 0;
  std::size_t k = 0;
  std::size_t gamma = 0;
  std::vector<std::vector<std::size_t>> sets;
};

class FamilyConstructionError : public std::runtime_error {
 public:
  FamilyConstructionError(const std::string& what, SetFamily partial)
      : std::runtime_error(what), partial(std::move(partial)) {}
  SetFamily partial;
};

std::size_t ground_size_for(std::size_t k);  // ceil(4 k^2 ln 4k)

// Random k-subsets kept only when they meet every kept set in at most gamma
// points. Verified exhaustively before returning.
SetFamily low_intersection_family(std::size_t k, std::size_t gamma, std::size_t n_target, std::uint64_t seed);
SetFamily low_intersection_family(std::size_t k, std::size_t gamma, std::size_t n_target, std::uint64_t seed,
                                  std::size_t ground_size);
std::size_t pairwise_intersection_max(const SetFamily& fam);

// h_empty (positive exactly on the base set) and its k single-point flips.
struct SpikedFamily {
  std::size_t ground_size = 0;
  std::vector<std::size_t> base;  // sorted
  std::size_t rows() const { return base.size() + 1; }
  // Row 0 is h_empty; row i > 0 flips base[i - 1] to negative.
  Hypothesis hypothesis(std::size_t row) const;
  std::vector<Sign> labels(std::size_t row) const;
};

PointSet ground_points(std::size_t ground_size);

// Ground-set points contained in the region, sorted.
std::vector<std::size_t> ground_members(const RegionDescriptor& region, std::size_t ground_size);

// First set C_i not witnessed by any region (no region T subset of C_i with |T| > gamma).
std::size_t select_uncovered_target(const SetFamily& fam, const std::vector<RegionDescriptor>& regions);

// The finite query family used by the experiments: every set but the last,
// chunks of gamma consecutive elements of every set, and all their singletons.
std::vector<RegionDescriptor> lower_bound_query_family(const SetFamily& fam);

using CoverageLearner =
    std::function<std::vector<Sign>(Oracle&, const SpikedFamily&, const std::vector<RegionDescriptor>&)>;

// Queries regions inside C* (largest first), then regions meeting C* in one
// point, and refines inside a region that reported a flip. Stops at the
// oracle budget and outputs h_empty plus any identified flip.
std::vector<Sign> exhaustive_coverage_learner(Oracle& oracle, const SpikedFamily& fam,
                                              const std::vector<RegionDescriptor>& q);

// x in C* is covered by T when x in T subset of C*, or T meets C* exactly in {x}.
std::vector<char> coverage(const std::vector<TranscriptEntry>& transcript, const SpikedFamily& fam);

// Replays every query under h_empty and under the flip at x; true when all answers agree.
bool replay_indistinguishable(const std::vector<TranscriptEntry>& transcript, const SpikedFamily& fam,
                              std::size_t x);

struct LowerBoundReport {
  std::size_t target = 0;
  std::size_t trials = 0;
  double error_frequency = 0.0;
  std::vector<std::size_t> covered_per_trial;
  std::map<std::size_t, std::size_t> coverage_histogram;  // covered count -> trials
  bool replay_ok = true;
  std::size_t replay_checks = 0;
};

LowerBoundReport run_lower_bound_experiment(const CoverageLearner& learner, const std::vector<RegionDescriptor>& q,
                                            const SetFamily& fam, std::size_t trials, std::size_t budget,
                                            std::uint64_t seed);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

}  // namespace regionq
