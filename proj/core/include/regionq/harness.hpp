#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "regionq/general_learner.hpp"
#include "regionq/hypothesis.hpp"
#include "regionq/oracle.hpp"
#include "regionq/types.hpp"

namespace regionq {

enum class InstanceKind { Intervals, Box, Halfspace, Finite };
enum class LearnerKind { Intervals, Box, Halfspace, HalfspaceSdl, General };

InstanceKind parse_instance_kind(const std::string& name);
LearnerKind parse_learner_kind(const std::string& name);
std::string to_string(InstanceKind k);
std::string to_string(LearnerKind k);

struct InstanceParams {
  InstanceKind kind = InstanceKind::Intervals;
  std::size_t n = 0;
  std::size_t k = 1;                  // number of intervals
  std::size_t d = 1;                  // ambient dimension for box / halfspace
  std::string distribution = "uniform";  // uniform | sphere | skewed | csv
  std::string csv_path;               // used when distribution == "csv"
  std::size_t extra = 0;              // |L| - |S|
  bool adversarial = false;           // place extra points next to the decision boundary
};

struct Instance {
  PointSet s;
  Hypothesis target;
  PointSet l;
  std::optional<HypothesisTable> table;  // finite kind only
};

Instance generate_instance(const InstanceParams& params, std::uint64_t seed);

// All n + 1 threshold labelings of 1-D points, in threshold order.
HypothesisTable threshold_table(const PointSet& s);

struct ExperimentConfig {
  std::string name = "experiment";
  LearnerKind learner = LearnerKind::Intervals;
  InstanceKind instance = InstanceKind::Intervals;
  std::vector<std::size_t> n_values{256};
  std::vector<std::size_t> k_values{1};
  std::vector<std::size_t> d_values{1};
  std::string distribution = "uniform";
  std::string csv_path;
  double extra_factor = 0.0;  // |L| = n + round(extra_factor * n)
  bool adversarial = false;
  EmptyPolicy empty_policy = EmptyPolicy::SeededRandom;
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  std::optional<double> alpha;            // halfspace failure probability; 1/(2n) when unset
  std::optional<std::size_t> budget;      // per-trial query cap
  std::string output_csv;
};

std::string config_to_string(const ExperimentConfig& c);
ExperimentConfig config_from_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& c, const std::string& path);

struct ResultRow {
  std::string learner;
  std::string instance;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t d = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t l_size = 0;
  std::size_t queries_used = 0;
  std::size_t rounds = 0;
  double correct_fraction = 0.0;
  double wall_time_ms = 0.0;
  std::string error;  // empty on success
};

// Runs one learner on an instance. Missing predictions count as wrong.
LearnResult run_learner(LearnerKind learner, const Instance& inst, Oracle& oracle, std::uint64_t seed,
                        std::optional<double> alpha = std::nullopt);
double correct_fraction(const LearnResult& r, const Instance& inst);

ResultRow run_trial(const ExperimentConfig& c, std::size_t n, std::size_t k, std::size_t d, std::size_t trial);

// Rows are ordered n, then k, then d, then trial, whatever the job count.
std::vector<ResultRow> run_benchmark(const ExperimentConfig& c, unsigned jobs = 1);

extern const char* const kResultCsvHeader;
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);

class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct SlopeFit {
  std::map<std::string, std::string> group;
  LineFit fit;
  std::size_t points = 0;
};

// Keys are any of learner, instance, k, d. Fits mean queries_used against log2 n.
std::vector<SlopeFit> fit_log_slope(const std::vector<ResultRow>& rows, const std::vector<std::string>& group_keys);

}  // namespace regionq
