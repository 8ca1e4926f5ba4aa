#include "regionq/forster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace regionq {

namespace {

constexpr double kRankTol = 1e-9;

Eigen::MatrixXd second_moment(const std::vector<Eigen::VectorXd>& pts) {
  const auto k = pts.front().size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
  for (const auto& x : pts) m.noalias() += x * x.transpose();
  return m / static_cast<double>(pts.size());
}

void require_unit(const std::vector<Eigen::VectorXd>& pts) {
  if (pts.empty()) throw std::invalid_argument("isotropy needs at least one point");
  for (const auto& x : pts)
    if (std::abs(x.norm() - 1.0) > 1e-9) throw std::invalid_argument("points must have unit norm");
}

// Orthonormal basis (columns) of the span of the given columns.
Eigen::MatrixXd span_basis(const Eigen::MatrixXd& cols) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > kRankTol * sv(0)) ++r;
  return svd.matrixU().leftCols(r);
}

bool near_span(const Eigen::MatrixXd& basis, const Eigen::VectorXd& c) {
  Eigen::VectorXd resid = c - basis * (basis.transpose() * c);
  return resid.norm() <= kRankTol * std::max(c.norm(), 1e-300);
}

std::vector<Eigen::VectorXd> images(const Eigen::MatrixXd& b, const std::vector<Eigen::VectorXd>& coords) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(coords.size());
  for (const auto& c : coords) {
    Eigen::VectorXd y = b * c;
    out.push_back(y / y.norm());
  }
  return out;
}

struct Restriction {
  Eigen::MatrixXd basis;          // k x r, columns in the current coordinates
  std::vector<std::size_t> keep;  // positions into the current point list
};

// Looks for a subspace W holding at least dim(W)/k of the points. The
// iteration pushes points outside W towards the directions orthogonal to the
// image of W, so W shows up as the top eigenspace of the moment matrix.
std::optional<Restriction> find_heavy_subspace(const std::vector<Eigen::VectorXd>& coords,
                                               const std::vector<Eigen::VectorXd>& ys,
                                               const Eigen::MatrixXd& moment) {
  const auto k = moment.rows();
  const auto m = coords.size();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(moment);
  const auto& lam = es.eigenvalues();  // ascending
  std::vector<Eigen::Index> splits;
  for (Eigen::Index j = 1; j < k; ++j) splits.push_back(j);
  auto gap = [&](Eigen::Index j) { return lam(k - j) / std::max(lam(k - j - 1), 1e-300); };
  std::stable_sort(splits.begin(), splits.end(), [&](auto a, auto b) { return gap(a) > gap(b); });

  for (auto j : splits) {
    Eigen::MatrixXd top = es.eigenvectors().rightCols(j);
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < m; ++i)
      if ((top.transpose() * ys[i]).squaredNorm() >= 0.5) cand.push_back(i);
    if (cand.empty()) continue;
    Eigen::MatrixXd cols(k, static_cast<Eigen::Index>(cand.size()));
    for (std::size_t i = 0; i < cand.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = coords[cand[i]];
    Eigen::MatrixXd w = span_basis(cols);
    if (w.cols() == 0 || w.cols() >= k) continue;
    Restriction r{w, {}};
    for (std::size_t i = 0; i < m; ++i)
      if (near_span(w, coords[i])) r.keep.push_back(i);
    if (r.keep.size() * static_cast<std::size_t>(k) >= static_cast<std::size_t>(w.cols()) * m) return r;
  }
  return std::nullopt;
}

}  // namespace

double min_moment_eigenvalue(const std::vector<Eigen::VectorXd>& unit_points) {
  require_unit(unit_points);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(second_moment(unit_points), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool isotropy_check(const std::vector<Eigen::VectorXd>& unit_points, double eps) {
  double k = static_cast<double>(unit_points.empty() ? 1 : unit_points.front().size());
  return min_moment_eigenvalue(unit_points) >= 1.0 / k - eps;
}

double margin_fraction(const std::vector<Eigen::VectorXd>& unit_points, const Eigen::VectorXd& u, double gamma) {
  if (unit_points.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& x : unit_points)
    if (std::abs(u.dot(x)) >= gamma) ++hit;
  return static_cast<double>(hit) / static_cast<double>(unit_points.size());
}

ForsterResult forster_transform(const PointSet& s, double eps, const ForsterOptions& options) {
  const auto d = static_cast<Eigen::Index>(s.dim());
  const std::size_t n = s.size();
  if (n == 0) throw std::invalid_argument("forster_transform needs points");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");

  Eigen::MatrixXd x(d, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    x.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::VectorXd>(s[i].data(), d);
    if (x.col(static_cast<Eigen::Index>(i)).norm() == 0.0) throw std::invalid_argument("points must be non-zero");
  }

  // Basis of the current subspace in original coordinates.
  Eigen::MatrixXd u = span_basis(x);
  if (u.cols() == d) u = Eigen::MatrixXd::Identity(d, d);
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  int total_iters = 0;

  for (;;) {
    const auto k = u.cols();
    const double eps_k = eps * static_cast<double>(d) / static_cast<double>(k);
    std::vector<Eigen::VectorXd> coords;
    coords.reserve(ids.size());
    for (auto id : ids) coords.push_back(u.transpose() * x.col(static_cast<Eigen::Index>(id)));

    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(k, k);
    bool done = false;
    std::vector<Eigen::VectorXd> ys;
    Eigen::MatrixXd moment;
    for (int it = 0;; ++it) {
      ys = images(b, coords);
      moment = second_moment(ys);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(moment);
      if (es.eigenvalues()(0) >= 1.0 / static_cast<double>(k) - eps_k) {
        done = true;
        break;
      }
      if (it >= options.max_iters) break;
      ++total_iters;
      Eigen::VectorXd inv_sqrt =
          (static_cast<double>(k) * es.eigenvalues().array().max(1e-300)).rsqrt().matrix();
      b = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose() * b;
      b *= std::sqrt(static_cast<double>(k)) / b.norm();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
      const auto& sv = svd.singularValues();
      if (sv(0) > options.collapse_condition * sv(sv.size() - 1)) break;
    }

    if (done) {
      auto map = std::make_shared<LinearMap>();
      map->basis = u;
      map->transform = u * b * u.transpose() + (Eigen::MatrixXd::Identity(d, d) - u * u.transpose());
      ForsterResult res;
      res.map = map;
      res.iterations = total_iters;
      res.epsilon = eps_k;
      Eigen::VectorXd z;
      for (std::size_t i = 0; i < n; ++i) {
        if (!map->image(s[i], z)) continue;
        res.kept_ids.push_back(i);
        res.transformed_points.push_back(z);
      }
      if (res.kept_ids.empty() || !isotropy_check(res.transformed_points, eps_k))
        throw ForsterError("transformed points failed the isotropy check", static_cast<std::size_t>(k),
                           res.kept_ids.size());
      if (res.kept_ids.size() * static_cast<std::size_t>(d) < static_cast<std::size_t>(k) * n)
        throw ForsterError("subspace keeps too few points", static_cast<std::size_t>(k), res.kept_ids.size());
      res.min_eigenvalue = min_moment_eigenvalue(res.transformed_points);
      return res;
    }

    auto r = find_heavy_subspace(coords, ys, moment);
    if (!r) throw ForsterError("iteration did not converge and no heavy subspace was found",
                               static_cast<std::size_t>(k), ids.size());
    std::vector<std::size_t> next;
    for (auto p : r->keep) next.push_back(ids[p]);
    ids = std::move(next);
    u = u * r->basis;
  }
}

Eigen::VectorXd transformed_target(const LinearMap& map, const Eigen::VectorXd& w_star) {
  Eigen::VectorXd v = map.basis.transpose() * map.transform.transpose().fullPivLu().solve(w_star);
  double n = v.norm();
  return n > 0.0 ? Eigen::VectorXd(v / n) : v;
}

}  // namespace regionq
