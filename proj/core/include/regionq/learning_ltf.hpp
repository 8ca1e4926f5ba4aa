#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "regionq/forster.hpp"
#include "regionq/oracle.hpp"

namespace regionq {

// w - x (x . w); requires |x| = 1.
Eigen::VectorXd perceptron_update(const Eigen::VectorXd& w, const Eigen::VectorXd& x);

// Answers region queries posed in the transformed space. `anchor` indexes the
// transformed sample handed to active_perceptron.
class TransformedQueryChannel {
 public:
  virtual ~TransformedQueryChannel() = default;
  virtual bool ask(const HalfspacePolytope& zone, std::optional<std::size_t> anchor, Sign y) = 0;
};

// Pulls Z back to {x in V : f_A(x) in Z}, plus the original anchor point.
// `anchor_id` is an id of `original` and must be one of f.kept_ids.
RegionQuery simulate_transformed_query(const HalfspacePolytope& z, std::optional<std::size_t> anchor_id,
                                       const ForsterResult& f, const PointSet& original, Sign y);

// Channel backed by the original-space oracle; anchors index f.kept_ids.
class ForsterChannel : public TransformedQueryChannel {
 public:
  ForsterChannel(Oracle& oracle, const ForsterResult& f, const PointSet& original)
      : oracle_(oracle), f_(f), original_(original) {}
  bool ask(const HalfspacePolytope& zone, std::optional<std::size_t> anchor, Sign y) override;

 private:
  Oracle& oracle_;
  const ForsterResult& f_;
  const PointSet& original_;
};

struct PerceptronParams {
  double threshold = 0.0;   // cap threshold 1/(2 sqrt k)
  double strip_width = 0.0; // delta = k^-4
  std::size_t t_max = 0;    // ceil(64 k (ln k + 1))
  static PerceptronParams for_dim(std::size_t k);
};

struct UpdateRecord {
  Eigen::VectorXd w;       // before the update
  Eigen::VectorXd x;       // update point (unit)
  double projection = 0.0; // |x . w| / |w|
  bool anchor = false;     // true when x was the verified-wrong anchor
};

enum class PerceptronOutcome { Labeled, BadInitialization, BudgetExhausted };

struct PerceptronRun {
  PerceptronOutcome outcome = PerceptronOutcome::BadInitialization;
  std::vector<std::pair<std::size_t, Sign>> labeled;  // indices into S_t
  std::vector<UpdateRecord> updates;
  std::size_t queries = 0;
  PerceptronParams params;
};

PerceptronRun active_perceptron(const Eigen::VectorXd& w0, const std::vector<Eigen::VectorXd>& s_t,
                                TransformedQueryChannel& channel);

struct LtfRound {
  std::size_t k = 0;
  std::size_t kept = 0;
  std::size_t labeled = 0;
  std::size_t queries = 0;
  std::size_t redraws = 0;
  int forster_iters = 0;
  bool shortcut = false;                  // labeled by the single (V, +1) query
  std::shared_ptr<const LinearMap> map;
  std::vector<PerceptronRun> runs;
};

struct LtfLearnReport {
  LearnResult result;
  std::vector<LtfRound> rounds;
};

constexpr std::size_t kMaxInitRedraws = 200;

LtfLearnReport learning_ltf(const PointSet& s, double alpha, Oracle& oracle, std::uint64_t init_seed);

// Per-round diagnostics as JSON lines {k, kept, labeled, queries, redraws, forster_iters}.
std::string ltf_diagnostics_json(const LtfLearnReport& report);

}  // namespace regionq
