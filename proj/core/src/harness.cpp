#include "regionq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "regionq/box_learner.hpp"
#include "regionq/halfspace_sdl.hpp"
#include "regionq/interval_learner.hpp"
#include "regionq/io.hpp"
#include "regionq/learning_ltf.hpp"
#include "regionq/lower_bound.hpp"

namespace regionq {

namespace {

template <class E>
struct Names {
  E value;
  const char* name;
};

constexpr Names<InstanceKind> kInstanceNames[] = {{InstanceKind::Intervals, "intervals"},
                                                  {InstanceKind::Box, "box"},
                                                  {InstanceKind::Halfspace, "halfspace"},
                                                  {InstanceKind::Finite, "finite"}};
constexpr Names<LearnerKind> kLearnerNames[] = {{LearnerKind::Intervals, "intervals"},
                                                {LearnerKind::Box, "box"},
                                                {LearnerKind::Halfspace, "halfspace"},
                                                {LearnerKind::HalfspaceSdl, "halfspace-sdl"},
                                                {LearnerKind::General, "general"}};

template <class E, std::size_t N>
E parse_name(const Names<E> (&table)[N], const std::string& name, const char* what) {
  for (const auto& e : table)
    if (name == e.name) return e.value;
  throw std::invalid_argument(std::string("unknown ") + what + ": " + name);
}

template <class E, std::size_t N>
std::string name_of(const Names<E> (&table)[N], E v) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  return "?";
}

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Point gaussian(Rng& rng, std::size_t d) {
  std::normal_distribution<double> g;
  Point p(d);
  for (auto& v : p) v = g(rng);
  return p;
}

double norm(const Point& p) {
  double s = 0;
  for (double v : p) s += v * v;
  return std::sqrt(s);
}

class Sampler {
 public:
  Sampler(const InstanceParams& p, Rng& rng) : p_(p), rng_(rng) {
    if (p.distribution == "csv") {
      pool_ = read_points_csv_file(p.csv_path);
      if (pool_.empty()) throw std::invalid_argument("csv distribution: no points in " + p.csv_path);
      lo_.assign(pool_.dim(), INFINITY);
      hi_.assign(pool_.dim(), -INFINITY);
      for (std::size_t i = 0; i < pool_.size(); ++i)
        for (std::size_t j = 0; j < pool_.dim(); ++j) {
          lo_[j] = std::min(lo_[j], pool_[i][j]);
          hi_[j] = std::max(hi_[j], pool_[i][j]);
        }
    } else if (p.distribution != "uniform" && p.distribution != "sphere" && p.distribution != "skewed") {
      throw std::invalid_argument("unknown distribution: " + p.distribution);
    }
  }

  std::size_t dim() const { return pool_.empty() ? p_.d : pool_.dim(); }

  // Draws the pool. CSV input is taken in file order.
  PointSet sample_pool(std::size_t n) {
    if (!pool_.empty()) {
      if (n == 0 || n >= pool_.size()) return pool_;
      std::vector<std::size_t> ids(n);
      for (std::size_t i = 0; i < n; ++i) ids[i] = i;
      return pool_.subset(ids);
    }
    PointSet out(dim());
    for (std::size_t i = 0; i < n; ++i) out.push_back(draw());
    return out;
  }

  Point draw() {
    const std::size_t d = dim();
    if (!pool_.empty()) {
      Point p(d);
      for (std::size_t j = 0; j < d; ++j) p[j] = uniform(rng_, lo_[j], hi_[j]);
      return p;
    }
    if (p_.distribution == "uniform") {
      Point p(d);
      const double lo = p_.kind == InstanceKind::Halfspace ? -1.0 : 0.0;
      for (auto& v : p) v = uniform(rng_, lo, 1.0);
      return p;
    }
    Point p = gaussian(rng_, d);
    if (p_.distribution == "skewed") {
      double scale = 1.0;
      for (auto& v : p) {
        v *= scale;
        scale *= 0.25;
      }
      return p;
    }
    const double r = norm(p);
    for (auto& v : p) v /= r;
    return p;
  }

 private:
  const InstanceParams& p_;
  Rng& rng_;
  PointSet pool_;
  std::vector<double> lo_, hi_;
};

constexpr double kNudge = 1e-9;

Point near_boundary(const Instance& inst, Sampler& sampler, Rng& rng) {
  Point p = sampler.draw();
  const double side = uniform(rng) < 0.5 ? -kNudge : kNudge;
  if (const auto* u = std::get_if<UnionOfIntervals>(&inst.target)) {
    std::vector<double> ends;
    for (const auto& [a, b] : u->intervals) {
      if (std::isfinite(a)) ends.push_back(a);
      if (std::isfinite(b)) ends.push_back(b);
    }
    if (!ends.empty()) {
      p[0] = ends[std::uniform_int_distribution<std::size_t>(0, ends.size() - 1)(rng)] + side;
    }
  } else if (const auto* box = std::get_if<AxisBox>(&inst.target)) {
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, p.size() - 1)(rng);
    const auto& [a, b] = box->bounds[j];
    p[j] = (uniform(rng) < 0.5 ? a : b) + side;
  } else if (const auto* h = std::get_if<Halfspace>(&inst.target)) {
    double ww = 0, wx = 0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      ww += h->w[j] * h->w[j];
      wx += h->w[j] * p[j];
    }
    for (std::size_t j = 0; j < p.size(); ++j) p[j] += (side - wx) * h->w[j] / ww;
  }
  return p;
}

}  // namespace

InstanceKind parse_instance_kind(const std::string& name) { return parse_name(kInstanceNames, name, "instance kind"); }
LearnerKind parse_learner_kind(const std::string& name) { return parse_name(kLearnerNames, name, "learner"); }
std::string to_string(InstanceKind k) { return name_of(kInstanceNames, k); }
std::string to_string(LearnerKind k) { return name_of(kLearnerNames, k); }

HypothesisTable threshold_table(const PointSet& s) {
  if (s.dim() != 1) throw DimensionMismatch(1, s.dim());
  std::vector<std::size_t> order(s.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return s.scalar(a) < s.scalar(b); });
  std::vector<std::vector<Sign>> rows;
  for (std::size_t j = 0; j <= s.size(); ++j) {
    std::vector<Sign> row(s.size(), Sign::Negative);
    for (std::size_t r = j; r < order.size(); ++r) row[order[r]] = Sign::Positive;
    rows.push_back(std::move(row));
  }
  return HypothesisTable(rows);
}

Instance generate_instance(const InstanceParams& params, std::uint64_t seed) {
  if (params.k == 0 || params.d == 0) throw std::invalid_argument("k and d must be positive");
  if (params.n == 0 && params.distribution != "csv") throw std::invalid_argument("n must be positive");
  const bool one_dim = params.kind == InstanceKind::Intervals || params.kind == InstanceKind::Finite;
  if (one_dim && params.d != 1 && params.distribution != "csv")
    throw std::invalid_argument("interval and finite instances are one-dimensional");
  Rng rng(seed);
  Sampler sampler(params, rng);
  if (one_dim && sampler.dim() != 1) throw DimensionMismatch(1, sampler.dim());

  Instance inst;
  inst.s = sampler.sample_pool(params.n);
  const std::size_t d = sampler.dim();

  switch (params.kind) {
    case InstanceKind::Intervals: {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t i = 0; i < inst.s.size(); ++i) {
        lo = std::min(lo, inst.s.scalar(i));
        hi = std::max(hi, inst.s.scalar(i));
      }
      std::vector<double> cuts(2 * params.k);
      for (auto& c : cuts) c = uniform(rng, lo, hi);
      std::sort(cuts.begin(), cuts.end());
      UnionOfIntervals u;
      for (std::size_t i = 0; i < params.k; ++i) u.intervals.emplace_back(cuts[2 * i], cuts[2 * i + 1]);
      inst.target = u;
      break;
    }
    case InstanceKind::Box: {
      const double width = std::pow(0.5, 1.0 / static_cast<double>(d));
      AxisBox b;
      for (std::size_t j = 0; j < d; ++j) {
        const double a = uniform(rng, 0.0, 1.0 - width);
        b.bounds.emplace_back(a, a + width);
      }
      inst.target = b;
      break;
    }
    case InstanceKind::Halfspace: {
      Point w = gaussian(rng, d);
      const double r = norm(w);
      for (auto& v : w) v /= r;
      inst.target = Halfspace{w};
      break;
    }
    case InstanceKind::Finite: {
      inst.table = threshold_table(inst.s);
      const std::size_t j = std::uniform_int_distribution<std::size_t>(0, inst.s.size())(rng);
      std::vector<double> sorted;
      for (std::size_t i = 0; i < inst.s.size(); ++i) sorted.push_back(inst.s.scalar(i));
      std::sort(sorted.begin(), sorted.end());
      UnionOfIntervals u;
      if (j < sorted.size()) u.intervals.emplace_back(sorted[j], INFINITY);
      inst.target = u;
      break;
    }
  }

  inst.l = inst.s;
  for (std::size_t i = 0; i < params.extra; ++i)
    inst.l.push_back(params.adversarial ? near_boundary(inst, sampler, rng) : sampler.draw());
  return inst;
}

// ---------------------------------------------------------------------------
// Config file

namespace {

using nlohmann::json;

json config_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["learner"] = to_string(c.learner);
  j["instance"] = {{"kind", to_string(c.instance)},
                   {"n", c.n_values},
                   {"k", c.k_values},
                   {"d", c.d_values},
                   {"distribution", c.distribution},
                   {"csv_path", c.csv_path}};
  j["labeling_domain"] = {{"extra_factor", c.extra_factor}, {"adversarial", c.adversarial}};
  j["oracle"] = {{"empty_policy", to_string(c.empty_policy)}};
  j["oracle"]["budget"] = c.budget ? json(*c.budget) : json(nullptr);
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["alpha"] = c.alpha ? json(*c.alpha) : json(nullptr);
  j["output_csv"] = c.output_csv;
  return j;
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace

std::string config_to_string(const ExperimentConfig& c) { return config_json(c).dump(2) + "\n"; }

ExperimentConfig config_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig c;
  try {
    read_opt(j, "name", c.name);
    if (j.contains("learner")) c.learner = parse_learner_kind(j.at("learner").get<std::string>());
    if (j.contains("instance")) {
      const auto& in = j.at("instance");
      if (in.contains("kind")) c.instance = parse_instance_kind(in.at("kind").get<std::string>());
      read_opt(in, "n", c.n_values);
      read_opt(in, "k", c.k_values);
      read_opt(in, "d", c.d_values);
      read_opt(in, "distribution", c.distribution);
      read_opt(in, "csv_path", c.csv_path);
    }
    if (j.contains("labeling_domain")) {
      read_opt(j.at("labeling_domain"), "extra_factor", c.extra_factor);
      read_opt(j.at("labeling_domain"), "adversarial", c.adversarial);
    }
    if (j.contains("oracle")) {
      const auto& o = j.at("oracle");
      if (o.contains("empty_policy")) c.empty_policy = parse_empty_policy(o.at("empty_policy").get<std::string>());
      if (o.contains("budget") && !o.at("budget").is_null()) c.budget = o.at("budget").get<std::size_t>();
    }
    read_opt(j, "seed", c.seed);
    read_opt(j, "trials", c.trials);
    if (j.contains("alpha") && !j.at("alpha").is_null()) c.alpha = j.at("alpha").get<double>();
    read_opt(j, "output_csv", c.output_csv);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config field error: ") + e.what());
  }
  if (c.n_values.empty() || c.k_values.empty() || c.d_values.empty())
    throw std::invalid_argument("config needs at least one value for n, k and d");
  if (c.extra_factor < 0) throw std::invalid_argument("extra_factor must be >= 0");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_string(ss.str());
}

void save_config(const ExperimentConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config " + path);
  out << config_to_string(c);
}

// ---------------------------------------------------------------------------
// Trials

LearnResult run_learner(LearnerKind learner, const Instance& inst, Oracle& oracle, std::uint64_t seed,
                        std::optional<double> alpha) {
  switch (learner) {
    case LearnerKind::Intervals:
      return label_k_intervals(inst.s, oracle).result;
    case LearnerKind::Box:
      return label_box(inst.s, oracle).result;
    case LearnerKind::HalfspaceSdl:
      return randomized_svm_learn(inst.s, oracle, seed).result;
    case LearnerKind::Halfspace: {
      const double a = alpha.value_or(1.0 / (2.0 * static_cast<double>(std::max<std::size_t>(inst.s.size(), 1))));
      return learning_ltf(inst.s, a, oracle, seed).result;
    }
    case LearnerKind::General:
      if (!inst.table) throw std::invalid_argument("the general learner needs a finite instance");
      return general_query_learn(inst.s, *inst.table, oracle).result;
  }
  throw std::logic_error("unreachable learner kind");
}

double correct_fraction(const LearnResult& r, const Instance& inst) {
  if (inst.s.empty()) return 1.0;
  const auto truth = evaluate_all(inst.target, inst.s);
  std::size_t good = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (i < r.predictions.size() && r.predictions[i] == truth[i]) ++good;
  return static_cast<double>(good) / static_cast<double>(truth.size());
}

ResultRow run_trial(const ExperimentConfig& c, std::size_t n, std::size_t k, std::size_t d, std::size_t trial) {
  ResultRow row;
  row.learner = to_string(c.learner);
  row.instance = to_string(c.instance);
  row.n = n;
  row.k = k;
  row.d = d;
  row.trial = trial;
  row.seed = derive_seed(derive_seed(c.seed, n, k), d, trial);

  const auto start = std::chrono::steady_clock::now();
  try {
    InstanceParams p;
    p.kind = c.instance;
    p.n = n;
    p.k = k;
    p.d = d;
    p.distribution = c.distribution;
    p.csv_path = c.csv_path;
    p.extra = static_cast<std::size_t>(std::llround(c.extra_factor * static_cast<double>(n)));
    p.adversarial = c.adversarial;
    Instance inst = generate_instance(p, row.seed);
    row.l_size = inst.l.size();

    OracleOptions opts;
    opts.empty_policy = c.empty_policy;
    opts.seed = derive_seed(row.seed, 1);
    opts.budget = c.budget;
    Oracle oracle(inst.target, inst.s, inst.l, opts);
    try {
      LearnResult r = run_learner(c.learner, inst, oracle, derive_seed(row.seed, 2), c.alpha);
      row.queries_used = r.queries_used;
      row.rounds = r.rounds;
      row.correct_fraction = correct_fraction(r, inst);
    } catch (const QueryBudgetExhausted& e) {
      row.queries_used = oracle.queries_answered();
      row.error = e.what();
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<ResultRow> run_benchmark(const ExperimentConfig& c, unsigned jobs) {
  struct Task {
    std::size_t n, k, d, trial;
  };
  std::vector<Task> tasks;
  for (auto n : c.n_values)
    for (auto k : c.k_values)
      for (auto d : c.d_values)
        for (std::size_t t = 0; t < c.trials; ++t) tasks.push_back({n, k, d, t});

  std::vector<ResultRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();)
      rows[i] = run_trial(c, tasks[i].n, tasks[i].k, tasks[i].d, tasks[i].trial);
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(tasks.size(), 1))));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

const char* const kResultCsvHeader =
    "learner,instance,n,k,d,trial,seed,l_size,queries_used,rounds,correct_fraction,wall_time_ms,error";

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultCsvHeader << "\n";
  for (const auto& r : rows) {
    out << r.learner << ',' << r.instance << ',' << r.n << ',' << r.k << ',' << r.d << ',' << r.trial << ','
        << r.seed << ',' << r.l_size << ',' << r.queries_used << ',' << r.rounds << ',' << std::setprecision(6)
        << r.correct_fraction << ',' << std::fixed << std::setprecision(3) << r.wall_time_ms
        << std::defaultfloat << ',' << csv_field(r.error) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Scaling fits

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InsufficientData("need at least two points");
  const double m = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw InsufficientData("x values are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  // A flat series is fitted exactly by the zero-slope line.
  f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

std::vector<SlopeFit> fit_log_slope(const std::vector<ResultRow>& rows, const std::vector<std::string>& group_keys) {
  auto key_value = [](const ResultRow& r, const std::string& key) -> std::string {
    if (key == "learner") return r.learner;
    if (key == "instance") return r.instance;
    if (key == "k") return std::to_string(r.k);
    if (key == "d") return std::to_string(r.d);
    throw std::invalid_argument("unknown group key: " + key);
  };
  // group -> n -> (sum, count)
  std::map<std::map<std::string, std::string>, std::map<std::size_t, std::pair<double, std::size_t>>> groups;
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    std::map<std::string, std::string> g;
    for (const auto& k : group_keys) g[k] = key_value(r, k);
    auto& cell = groups[g][r.n];
    cell.first += static_cast<double>(r.queries_used);
    ++cell.second;
  }
  std::vector<SlopeFit> out;
  for (const auto& [g, by_n] : groups) {
    if (by_n.size() < 3) throw InsufficientData("a group has fewer than three distinct n");
    std::vector<double> x, y;
    for (const auto& [n, acc] : by_n) {
      x.push_back(std::log2(static_cast<double>(n)));
      y.push_back(acc.first / static_cast<double>(acc.second));
    }
    out.push_back({g, fit_line(x, y), by_n.size()});
  }
  return out;
}

}  // namespace regionq
