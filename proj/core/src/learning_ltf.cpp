#include "regionq/learning_ltf.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json_codec.hpp"

namespace regionq {

Eigen::VectorXd perceptron_update(const Eigen::VectorXd& w, const Eigen::VectorXd& x) {
  if (std::abs(x.norm() - 1.0) > 1e-9) throw std::invalid_argument("perceptron update point must be unit");
  return w - x * x.dot(w);
}

RegionQuery simulate_transformed_query(const HalfspacePolytope& z, std::optional<std::size_t> anchor_id,
                                       const ForsterResult& f, const PointSet& original, Sign y) {
  if (z.dim != f.k()) throw DimensionMismatch(f.k(), z.dim);
  TransformedPolytope t{f.map, z, std::nullopt};
  if (anchor_id) {
    if (!std::binary_search(f.kept_ids.begin(), f.kept_ids.end(), *anchor_id))
      throw std::invalid_argument("anchor is not one of the kept points");
    t.anchor = original.point(*anchor_id);
  }
  return RegionQuery{t, y};
}

bool ForsterChannel::ask(const HalfspacePolytope& zone, std::optional<std::size_t> anchor, Sign y) {
  std::optional<std::size_t> id;
  if (anchor) id = f_.kept_ids.at(*anchor);
  return oracle_.answer(simulate_transformed_query(zone, id, f_, original_, y));
}

PerceptronParams PerceptronParams::for_dim(std::size_t k) {
  const double kd = static_cast<double>(k);
  PerceptronParams p;
  p.threshold = 1.0 / (2.0 * std::sqrt(kd));
  p.strip_width = std::pow(kd, -4.0);
  p.t_max = static_cast<std::size_t>(std::ceil(64.0 * kd * (std::log(kd) + 1.0)));
  return p;
}

namespace {

PolytopeRow row(const Eigen::VectorXd& w, double offset, Sense sense) {
  return PolytopeRow{std::vector<double>(w.data(), w.data() + w.size()), offset, sense};
}

HalfspacePolytope on_sphere(std::size_t k, std::vector<PolytopeRow> rows) {
  HalfspacePolytope p;
  p.dim = k;
  p.rows = std::move(rows);
  p.restricted_to_unit_sphere = true;
  return p;
}

// Orthonormal basis whose first column is v0.
Eigen::MatrixXd basis_from(const Eigen::VectorXd& v0) {
  const Eigen::MatrixXd m = v0;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(v0.size(), v0.size());
  q.col(0) = v0;
  return q;
}

// Largest grid index i in [0, n] whose query answers 0, given that index 0
// answers 0 and answers are monotone in i.
template <class Ask>
std::size_t last_impure(std::size_t n, Ask&& ask_is_pure) {
  std::size_t lo = 0, hi = n;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo + 1) / 2;
    if (ask_is_pure(mid)) hi = mid - 1;
    else lo = mid;
  }
  return lo;
}

}  // namespace

PerceptronRun active_perceptron(const Eigen::VectorXd& w0, const std::vector<Eigen::VectorXd>& s_t,
                                TransformedQueryChannel& channel) {
  const auto k = static_cast<std::size_t>(w0.size());
  PerceptronRun run;
  run.params = PerceptronParams::for_dim(k);
  const auto& prm = run.params;
  auto ask = [&](const HalfspacePolytope& z, std::optional<std::size_t> anchor, Sign y) {
    ++run.queries;
    return channel.ask(z, anchor, y);
  };

  Eigen::VectorXd w = w0;
  for (std::size_t t = 0;; ++t) {
    const double wn = w.norm();
    if (!(wn > 1e-12)) {
      run.outcome = PerceptronOutcome::BadInitialization;
      return run;
    }
    const Eigen::VectorXd v0 = w / wn;

    std::optional<Sign> failed;
    std::optional<std::size_t> failed_member;
    std::vector<std::pair<std::size_t, Sign>> members;
    bool any_cap = false;
    for (Sign y : {Sign::Positive, Sign::Negative}) {
      std::vector<std::size_t> in_cap;
      for (std::size_t i = 0; i < s_t.size(); ++i)
        if (to_int(y) * v0.dot(s_t[i]) >= prm.threshold) in_cap.push_back(i);
      if (in_cap.empty()) continue;
      any_cap = true;
      bool ok = ask(on_sphere(k, {row(to_int(y) * v0, prm.threshold, Sense::GreaterEq)}), std::nullopt, y);
      for (auto i : in_cap) members.emplace_back(i, y);
      if (!ok && !failed) {
        failed = y;
        failed_member = in_cap.front();
      }
    }
    if (!any_cap) {
      run.outcome = PerceptronOutcome::BadInitialization;
      return run;
    }
    if (!failed) {
      run.outcome = PerceptronOutcome::Labeled;
      run.labeled = std::move(members);
      return run;
    }
    if (t >= prm.t_max) {
      run.outcome = PerceptronOutcome::BudgetExhausted;
      return run;
    }

    const Sign y = *failed;
    const double ys = to_int(y);
    const std::size_t anchor = *failed_member;
    UpdateRecord rec;
    rec.w = w;
    if (!ask(HalfspacePolytope::nothing(k), anchor, y)) {
      rec.x = s_t[anchor];
      rec.anchor = true;
    } else {
      // Some point of the cap is labeled -y. Narrow it down to a small box,
      // always keeping the anchor in the region so no query is empty.
      const Eigen::MatrixXd basis = basis_from(v0);
      std::vector<PolytopeRow> box;
      std::vector<double> center(k, 0.0);

      const double th0 = prm.threshold;
      const auto n0 = static_cast<std::size_t>(std::ceil((1.0 - th0) / prm.strip_width));
      auto radial = [&](std::size_t i) { return th0 + (1.0 - th0) * static_cast<double>(i) / static_cast<double>(n0); };
      const Eigen::VectorXd dir0 = ys * v0;
      std::size_t i0 = last_impure(n0, [&](std::size_t i) {
        return ask(on_sphere(k, {row(dir0, radial(i), Sense::GreaterEq)}), anchor, y);
      });
      if (i0 == n0) i0 = n0 - 1;
      box.push_back(row(dir0, radial(i0), Sense::GreaterEq));
      box.push_back(row(dir0, radial(i0 + 1), Sense::LessEq));
      center[0] = radial(i0 + 1);

      const auto n1 = static_cast<std::size_t>(std::ceil(2.0 / prm.strip_width));
      auto grid = [&](std::size_t i) { return -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n1); };
      for (std::size_t m = 1; m < k; ++m) {
        const Eigen::VectorXd dir = basis.col(static_cast<Eigen::Index>(m));
        std::size_t im = last_impure(n1, [&](std::size_t i) {
          auto rows = box;
          rows.push_back(row(dir, grid(i), Sense::GreaterEq));
          return ask(on_sphere(k, std::move(rows)), anchor, y);
        });
        if (im == n1) im = n1 - 1;
        box.push_back(row(dir, grid(im), Sense::GreaterEq));
        box.push_back(row(dir, grid(im + 1), Sense::LessEq));
        center[m] = 0.5 * (grid(im) + grid(im + 1));
      }

      // A unit point of the box; the radial coordinate is taken at the strip's
      // outer edge so the point stays inside the cap after normalizing.
      Eigen::VectorXd xt = ys * center[0] * v0;
      for (std::size_t m = 1; m < k; ++m) xt += center[m] * basis.col(static_cast<Eigen::Index>(m));
      xt.normalize();
      for (int bump = 0; bump < 64 && ys * v0.dot(xt) < th0; ++bump) {
        xt += prm.strip_width * dir0;
        xt.normalize();
      }
      rec.x = xt;
    }
    rec.projection = std::abs(rec.x.dot(w)) / wn;
    w = perceptron_update(w, rec.x);
    run.updates.push_back(std::move(rec));
  }
}

LtfLearnReport learning_ltf(const PointSet& s, double alpha, Oracle& oracle, std::uint64_t init_seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  LtfLearnReport report;
  auto& res = report.result;
  res.transcript_begin = oracle.queries_answered();
  const std::size_t n = s.size();
  res.predictions.resize(n);
  const double eps = 1.0 / (2.0 * static_cast<double>(s.dim()));
  std::mt19937_64 rng(init_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::size_t> remaining(n);
  for (std::size_t i = 0; i < n; ++i) remaining[i] = i;
  std::size_t labeled = 0;
  const double goal = (1.0 - alpha) * static_cast<double>(n);

  while (static_cast<double>(labeled) < goal && !remaining.empty()) {
    const std::size_t before = oracle.queries_answered();
    PointSet rest = s.subset(remaining);
    ForsterResult f = forster_transform(rest, eps);
    LtfRound round;
    round.k = f.k();
    round.kept = f.kept_ids.size();
    round.forster_iters = f.iterations;
    round.map = f.map;

    std::vector<std::pair<std::size_t, Sign>> found;  // indices into f.kept_ids
    ForsterChannel channel(oracle, f, rest);
    HalfspacePolytope whole = on_sphere(f.k(), {});
    if (channel.ask(whole, std::nullopt, Sign::Positive)) {
      round.shortcut = true;
      for (std::size_t i = 0; i < f.kept_ids.size(); ++i) found.emplace_back(i, Sign::Positive);
    } else {
      const double need = static_cast<double>(f.kept_ids.size()) / (4.0 * static_cast<double>(f.k()));
      for (;;) {
        if (round.redraws >= kMaxInitRedraws)
          throw std::runtime_error("active perceptron failed for every initialization");
        Eigen::VectorXd w0(static_cast<Eigen::Index>(f.k()));
        for (Eigen::Index i = 0; i < w0.size(); ++i) w0(i) = gauss(rng);
        w0.normalize();
        PerceptronRun run = active_perceptron(w0, f.transformed_points, channel);
        bool ok = static_cast<double>(run.labeled.size()) >= need && !run.labeled.empty();
        if (ok) found = run.labeled;
        round.runs.push_back(std::move(run));
        if (ok) break;
        ++round.redraws;
      }
    }

    std::vector<char> done(rest.size(), 0);
    for (auto [i, y] : found) {
      std::size_t local = f.kept_ids[i];
      done[local] = 1;
      res.predictions[remaining[local]] = y;
    }
    std::vector<std::size_t> next;
    for (std::size_t j = 0; j < remaining.size(); ++j)
      if (!done[j]) next.push_back(remaining[j]);
    round.labeled = remaining.size() - next.size();
    labeled += round.labeled;
    remaining = std::move(next);
    round.queries = oracle.queries_answered() - before;
    report.rounds.push_back(std::move(round));
    ++res.rounds;
  }
  res.queries_used = oracle.queries_answered() - res.transcript_begin;
  return report;
}

std::string ltf_diagnostics_json(const LtfLearnReport& report) {
  std::string out;
  for (const auto& r : report.rounds) {
    nlohmann::json j = {{"k", r.k},         {"kept", r.kept},       {"labeled", r.labeled},
                        {"queries", r.queries}, {"redraws", r.redraws}, {"forster_iters", r.forster_iters}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace regionq
