// regionq: command line front end for the region-query learners.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "regionq/box_learner.hpp"
#include "regionq/forster.hpp"
#include "regionq/general_learner.hpp"
#include "regionq/halfspace_sdl.hpp"
#include "regionq/harness.hpp"
#include "regionq/interval_learner.hpp"
#include "regionq/io.hpp"
#include "regionq/learning_ltf.hpp"
#include "regionq/lower_bound.hpp"

using namespace regionq;
using nlohmann::json;

namespace {

// Exit codes: 0 ok, 1 usage or input error, 2 invariant violation.
constexpr int kInvariantViolated = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to `path`, or stdout when the path is empty or "-".
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write(out);
}

struct LearnArgs {
  std::string kind;
  std::string input;
  std::string target;
  std::string table;
  std::size_t target_row = 0;
  bool has_target_row = false;
  std::string domain;
  std::string empty_policy = "seeded_random";
  std::uint64_t oracle_seed = 0;
  std::uint64_t perm_seed = 0;
  std::uint64_t init_seed = 0;
  std::size_t k = 0;
  double alpha = 0;
  std::size_t budget = 0;
  std::string out;
  std::string transcript;
  std::string diagnostics;
};

int run_learn(const LearnArgs& a) {
  const LearnerKind kind = parse_learner_kind(a.kind);
  Instance inst;
  inst.s = read_points_csv_file(a.input);

  if (kind == LearnerKind::General) {
    if (a.table.empty()) throw std::invalid_argument("learn general needs --table");
    std::ifstream in(a.table);
    if (!in) throw std::runtime_error("cannot open " + a.table);
    inst.table = read_table_csv(in);
    if (a.has_target_row) {
      if (a.target_row >= inst.table->size()) throw std::invalid_argument("--target-row out of range");
      inst.target = make_point_labeling(inst.s, inst.table->row(a.target_row));
    }
  }
  if (!a.target.empty()) {
    inst.target = hypothesis_from_json(slurp(a.target));
  } else if (!(kind == LearnerKind::General && a.has_target_row)) {
    throw std::invalid_argument("a hidden target is required: pass --target (or --target-row for general)");
  }
  if (kind == LearnerKind::Intervals && a.k > 0) {
    if (const auto* u = std::get_if<UnionOfIntervals>(&inst.target); u && u->intervals.size() > a.k)
      throw std::invalid_argument("target has more than --k intervals");
  }

  inst.l = inst.s;
  if (!a.domain.empty()) {
    PointSet extra = read_points_csv_file(a.domain);
    if (extra.dim() != inst.s.dim()) throw DimensionMismatch(inst.s.dim(), extra.dim());
    for (std::size_t i = 0; i < extra.size(); ++i) inst.l.push_back(extra[i]);
  }

  OracleOptions opts;
  opts.empty_policy = parse_empty_policy(a.empty_policy);
  opts.seed = a.oracle_seed;
  if (a.budget > 0) opts.budget = a.budget;
  Oracle oracle(inst.target, inst.s, inst.l, opts);

  LearnResult result;
  std::optional<LtfLearnReport> ltf;
  switch (kind) {
    case LearnerKind::HalfspaceSdl:
      result = randomized_svm_learn(inst.s, oracle, a.perm_seed).result;
      break;
    case LearnerKind::Halfspace: {
      const double alpha = a.alpha > 0 ? a.alpha : 1.0 / (2.0 * static_cast<double>(inst.s.size()));
      ltf = learning_ltf(inst.s, alpha, oracle, a.init_seed);
      result = ltf->result;
      break;
    }
    default:
      result = run_learner(kind, inst, oracle, a.oracle_seed);
  }

  emit(a.out, [&](std::ostream& o) { write_predictions_csv(o, result); });
  if (!a.transcript.empty())
    emit(a.transcript, [&](std::ostream& o) { write_transcript_jsonl(o, oracle.transcript(), result.transcript_begin); });
  if (ltf && !a.diagnostics.empty()) emit(a.diagnostics, [&](std::ostream& o) { o << ltf_diagnostics_json(*ltf); });

  const double frac = correct_fraction(result, inst);
  std::cerr << "queries=" << result.queries_used << " rounds=" << result.rounds << " correct_fraction=" << frac
            << "\n";
  if (!result.complete() || frac < 1.0) {
    std::cerr << "error: predictions disagree with the target\n";
    return kInvariantViolated;
  }
  return 0;
}

int run_bench(const std::string& config_path, std::optional<std::uint64_t> seed, unsigned jobs,
              std::string out, const std::vector<std::string>& fit_keys) {
  ExperimentConfig c = load_config(config_path);
  if (seed) c.seed = *seed;
  if (out.empty()) out = c.output_csv;
  const auto rows = run_benchmark(c, jobs);
  emit(out, [&](std::ostream& o) { write_results_csv(o, rows); });

  std::size_t failures = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++failures;
      std::cerr << "n=" << r.n << " k=" << r.k << " d=" << r.d << " trial=" << r.trial << ": " << r.error << "\n";
    } else if (r.correct_fraction < 1.0) {
      ++failures;
    }
  }
  if (!fit_keys.empty()) {
    for (const auto& f : fit_log_slope(rows, fit_keys)) {
      for (const auto& [k, v] : f.group) std::cerr << k << "=" << v << " ";
      std::cerr << "slope=" << f.fit.slope << " intercept=" << f.fit.intercept << " r2=" << f.fit.r2 << "\n";
    }
  }
  std::cerr << rows.size() << " rows, " << failures << " imperfect\n";
  return failures == 0 ? 0 : kInvariantViolated;
}

int run_lowerbound(std::size_t k, std::size_t gamma, std::size_t trials, std::size_t budget, std::uint64_t seed,
                   std::size_t n_target, const std::string& out) {
  SetFamily fam;
  try {
    fam = low_intersection_family(k, gamma, n_target == 0 ? k : n_target, derive_seed(seed, 0));
  } catch (const FamilyConstructionError& e) {
    std::cerr << "warning: " << e.what() << "\n";
    fam = e.partial;
  }
  if (fam.sets.size() < 2) throw std::runtime_error("family too small for the experiment");
  const bool gamma_ok = pairwise_intersection_max(fam) <= gamma;
  const auto q = lower_bound_query_family(fam);
  const auto rep = run_lower_bound_experiment(exhaustive_coverage_learner, q, fam, trials, budget, seed);

  json hist = json::object();
  for (const auto& [covered, count] : rep.coverage_histogram) hist[std::to_string(covered)] = count;
  json j{{"k", k},
         {"gamma", gamma},
         {"ground_size", fam.ground_size},
         {"achieved_N", fam.sets.size()},
         {"gamma_verified", gamma_ok},
         {"budget", budget},
         {"trials", trials},
         {"target_set", rep.target},
         {"error_frequency", rep.error_frequency},
         {"coverage_histogram", hist},
         {"replay_checks", rep.replay_checks},
         {"replay_indistinguishable", rep.replay_ok}};
  emit(out, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
  return gamma_ok && rep.replay_ok ? 0 : kInvariantViolated;
}

int run_vc(const std::string& family, const std::string& input, int max_k, const std::string& out) {
  const PointSet probes = read_points_csv_file(input);
  std::vector<RegionDescriptor> regions;
  if (family == "intervals") {
    regions = interval_family(probes);
  } else if (family == "axis-halfspace") {
    regions = axis_halfspace_family(probes);
  } else {
    throw std::invalid_argument("unknown family: " + family);
  }
  const auto masks = membership_masks(regions, probes);
  const int vc = empirical_vc_dimension_masks(masks, probes.size(), max_k);
  json j{{"family", family}, {"probes", probes.size()}, {"regions", regions.size()}, {"vc", vc}};
  if (auto w = find_shattered_subset(masks, probes.size(), vc)) j["shattered"] = w->subset;
  emit(out, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
  return 0;
}

// Instance file: {"table": [[+-1,...],...], "points": [...], "queries": [{"region": ..., "label": +-1}],
//                 "f": {"<id>": +-1}}
int run_teachtree(const std::string& input, const std::string& out) {
  const json j = json::parse(slurp(input));
  TeachingInstance inst;
  std::vector<std::vector<Sign>> rows;
  for (const auto& r : j.at("table")) {
    std::vector<Sign> row;
    for (const auto& v : r) row.push_back(parse_sign(v.get<int>()));
    rows.push_back(std::move(row));
  }
  inst.h = HypothesisTable(rows);
  std::vector<Point> pts;
  for (const auto& p : j.at("points")) pts.push_back(p.is_array() ? p.get<Point>() : Point{p.get<double>()});
  inst.s = PointSet::from_points(pts);
  for (const auto& q : j.at("queries"))
    inst.queries.push_back({region_from_json(q.at("region").dump()), parse_sign(q.at("label").get<int>())});
  if (j.contains("f"))
    for (const auto& [id, v] : j.at("f").items()) inst.f[std::stoul(id)] = parse_sign(v.get<int>());

  const auto depth = teaching_tree_depth(inst);
  json r{{"depth", depth ? json(*depth) : json(nullptr)}};
  emit(out, [&](std::ostream& o) { o << r.dump() << "\n"; });
  return 0;
}

int run_forster_check(const std::string& input, double eps, const std::string& out) {
  const PointSet s = read_points_csv_file(input);
  json j{{"n", s.size()}, {"d", s.dim()}};
  int code = 0;
  try {
    const auto f = forster_transform(s, eps > 0 ? eps : 1.0 / (2.0 * static_cast<double>(s.dim())));
    const double used = f.epsilon;
    const bool iso = isotropy_check(f.transformed_points, used);
    j["k"] = f.k();
    j["kept"] = f.kept_ids.size();
    j["iterations"] = f.iterations;
    j["epsilon"] = used;
    j["min_eigenvalue"] = f.min_eigenvalue;
    j["isotropic"] = iso;
    if (!iso) code = kInvariantViolated;
  } catch (const ForsterError& e) {
    j["error"] = e.what();
    code = kInvariantViolated;
  }
  emit(out, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active learning with region queries"};
  app.require_subcommand(1);
  int code = 0;

  // learn
  LearnArgs la;
  auto* learn = app.add_subcommand("learn", "Label a dataset through a simulated region-query oracle");
  learn->add_option("kind", la.kind, "intervals | box | halfspace | halfspace-sdl | general")
      ->required()
      ->check(CLI::IsMember({"intervals", "box", "halfspace", "halfspace-sdl", "general"}));
  learn->add_option("--input", la.input, "Dataset CSV (id,x1,...,xd)")->required()->check(CLI::ExistingFile);
  learn->add_option("--target", la.target, "Hidden target hypothesis (JSON)")->check(CLI::ExistingFile);
  learn->add_option("--table", la.table, "Hypothesis table CSV (general learner)")->check(CLI::ExistingFile);
  auto* row_opt = learn->add_option("--target-row", la.target_row, "Target row of --table");
  learn->add_option("--domain", la.domain, "Extra labeling-domain points CSV (L = S plus these)")
      ->check(CLI::ExistingFile);
  learn->add_option("--empty-policy", la.empty_policy, "always_one | always_zero | seeded_random");
  learn->add_option("--oracle-seed,--seed", la.oracle_seed, "Oracle seed");
  learn->add_option("--perm-seed", la.perm_seed, "Pass-order seed (halfspace-sdl)");
  learn->add_option("--init-seed", la.init_seed, "Initialization seed (halfspace)");
  learn->add_option("--k", la.k, "Maximum number of target intervals");
  learn->add_option("--alpha", la.alpha, "Failure probability (halfspace); default 1/(2n)");
  learn->add_option("--budget", la.budget, "Query cap (0 = none)");
  learn->add_option("--out", la.out, "Predictions CSV (default stdout)");
  learn->add_option("--transcript", la.transcript, "Transcript JSON-lines output");
  learn->add_option("--diagnostics", la.diagnostics, "Per-round JSON-lines output (halfspace)");
  learn->callback([&] {
    la.has_target_row = row_opt->count() > 0;
    code = run_learn(la);
  });

  // bench
  std::string config, bench_out;
  std::optional<std::uint64_t> bench_seed;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::string> fit_keys;
  auto* bench = app.add_subcommand("bench", "Run a benchmark sweep from a config file");
  bench->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  bench->add_option("--seed", bench_seed, "Override the master seed");
  bench->add_option("--jobs", jobs, "Concurrent trials");
  bench->add_option("--out", bench_out, "Results CSV (default: config output_csv, else stdout)");
  bench->add_option("--fit", fit_keys, "Group keys for log2(n) slope fits, e.g. --fit k");
  bench->callback([&] { code = run_bench(config, bench_seed, jobs, bench_out, fit_keys); });

  // lowerbound
  std::size_t lb_k = 64, lb_gamma = 4, lb_trials = 300, lb_budget = 8, lb_n = 0;
  std::uint64_t lb_seed = 1;
  std::string lb_out;
  auto* lb = app.add_subcommand("lowerbound", "Run the adversarial lower-bound experiment");
  lb->add_option("--k", lb_k, "Set size");
  lb->add_option("--gamma", lb_gamma, "Pairwise intersection bound");
  lb->add_option("--trials", lb_trials, "Number of trials");
  lb->add_option("--budget", lb_budget, "Queries per trial");
  lb->add_option("--seed", lb_seed, "Master seed");
  lb->add_option("--sets", lb_n, "Target family size (default k)");
  lb->add_option("--out", lb_out, "Results JSON (default stdout)");
  lb->callback([&] { code = run_lowerbound(lb_k, lb_gamma, lb_trials, lb_budget, lb_seed, lb_n, lb_out); });

  // vc
  std::string vc_family = "intervals", vc_input, vc_out;
  int vc_max = 8;
  auto* vc = app.add_subcommand("vc", "Empirical VC dimension of a region family on probe points");
  vc->add_option("--family", vc_family, "intervals | axis-halfspace");
  vc->add_option("--input", vc_input, "Probe points CSV")->required()->check(CLI::ExistingFile);
  vc->add_option("--max-k", vc_max, "Largest subset size to try");
  vc->add_option("--out", vc_out, "Output JSON (default stdout)");
  vc->callback([&] { code = run_vc(vc_family, vc_input, vc_max, vc_out); });

  // teachtree
  std::string tt_input, tt_out;
  auto* tt = app.add_subcommand("teachtree", "Minimum generalized teaching tree depth");
  tt->add_option("--input", tt_input, "Instance JSON")->required()->check(CLI::ExistingFile);
  tt->add_option("--out", tt_out, "Output JSON (default stdout)");
  tt->callback([&] { code = run_teachtree(tt_input, tt_out); });

  // forster-check
  std::string fc_input, fc_out;
  double fc_eps = 0;
  auto* fc = app.add_subcommand("forster-check", "Compute and verify a Forster transform");
  fc->add_option("--input", fc_input, "Points CSV")->required()->check(CLI::ExistingFile);
  fc->add_option("--eps", fc_eps, "Isotropy tolerance (default 1/(2d))");
  fc->add_option("--out", fc_out, "Output JSON (default stdout)");
  fc->callback([&] { code = run_forster_check(fc_input, fc_eps, fc_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every other usage error is an input error.
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return code;
}
