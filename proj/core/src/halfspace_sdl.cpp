#include "regionq/halfspace_sdl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace regionq {

namespace {

constexpr double kAffineEps = 1e-14;

// Minimum-norm point of the convex hull of the columns of z, by Wolfe's
// active-set method. Returns the point.
Eigen::VectorXd min_norm_point(const Eigen::MatrixXd& z) {
  const Eigen::Index m = z.cols();
  Eigen::VectorXd norms2 = z.colwise().squaredNorm().transpose();
  const double scale = std::max(norms2.maxCoeff(), 1e-300);
  const double tol = 1e-12 * scale;

  Eigen::Index first = 0;
  norms2.minCoeff(&first);
  std::vector<Eigen::Index> active{first};
  std::vector<double> lambda{1.0};
  Eigen::VectorXd x = z.col(first);

  const int max_major = static_cast<int>(50 * m + 1000);
  for (int major = 0; major < max_major; ++major) {
    Eigen::VectorXd dots = z.transpose() * x;
    Eigen::Index j = 0;
    double best = dots.minCoeff(&j);
    if (x.squaredNorm() - best <= tol) return x;
    if (std::find(active.begin(), active.end(), j) != active.end()) return x;
    active.push_back(j);
    lambda.push_back(0.0);

    for (;;) {
      const auto k = static_cast<Eigen::Index>(active.size());
      Eigen::MatrixXd zs(z.rows(), k);
      for (Eigen::Index i = 0; i < k; ++i) zs.col(i) = z.col(active[static_cast<std::size_t>(i)]);
      // Affine minimizer: min |zs mu|^2 subject to sum(mu) = 1.
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
      kkt.topLeftCorner(k, k) = zs.transpose() * zs;
      kkt.block(0, k, k, 1).setOnes();
      kkt.block(k, 0, 1, k).setOnes();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
      rhs(k) = 1.0;
      Eigen::VectorXd mu = kkt.fullPivLu().solve(rhs).head(k);

      if ((mu.array() > kAffineEps).all()) {
        for (Eigen::Index i = 0; i < k; ++i) lambda[static_cast<std::size_t>(i)] = mu(i);
        x = zs * mu;
        break;
      }
      double theta = 1.0;
      for (Eigen::Index i = 0; i < k; ++i) {
        double li = lambda[static_cast<std::size_t>(i)];
        if (mu(i) <= kAffineEps && li - mu(i) > 0.0) theta = std::min(theta, li / (li - mu(i)));
      }
      std::vector<Eigen::Index> next_active;
      std::vector<double> next_lambda;
      for (Eigen::Index i = 0; i < k; ++i) {
        double li = theta * mu(i) + (1.0 - theta) * lambda[static_cast<std::size_t>(i)];
        if (li > kAffineEps) {
          next_active.push_back(active[static_cast<std::size_t>(i)]);
          next_lambda.push_back(li);
        }
      }
      if (next_active.empty()) {
        next_active.push_back(active.back());
        next_lambda.push_back(1.0);
      }
      double sum = std::accumulate(next_lambda.begin(), next_lambda.end(), 0.0);
      for (auto& l : next_lambda) l /= sum;
      active = std::move(next_active);
      lambda = std::move(next_lambda);
      x.setZero();
      for (std::size_t i = 0; i < active.size(); ++i) x += lambda[i] * z.col(active[i]);
      if (active.size() == 1) break;
    }
  }
  return x;
}

Eigen::VectorXd unit(const Eigen::VectorXd& v) {
  double n = v.norm();
  if (!(n > 0.0)) throw std::invalid_argument("points must be non-zero");
  return v / n;
}

}  // namespace

MaxMarginModel max_margin_fit(const std::vector<LabeledPoint>& labeled, std::size_t dim) {
  MaxMarginModel model;
  const auto d = static_cast<Eigen::Index>(dim);
  if (labeled.empty()) {
    model.weights = Eigen::VectorXd::Unit(d, 0);
    model.margin = std::numeric_limits<double>::infinity();
    return model;
  }
  Eigen::MatrixXd z(d, static_cast<Eigen::Index>(labeled.size()));
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    if (labeled[i].x.size() != d) throw DimensionMismatch(dim, static_cast<std::size_t>(labeled[i].x.size()));
    z.col(static_cast<Eigen::Index>(i)) = to_int(labeled[i].y) * labeled[i].x;
  }
  Eigen::VectorXd p = min_norm_point(z);
  double scale = std::sqrt(z.colwise().squaredNorm().maxCoeff());
  if (p.norm() <= 1e-12 * scale) throw NonSeparable("labeled set is not separable by a homogeneous halfspace");
  model.weights = p / p.norm();
  Eigen::VectorXd margins = z.transpose() * model.weights;
  model.margin = margins.minCoeff();
  if (model.margin <= 0.0) throw NonSeparable("labeled set has no positive-margin homogeneous separator");
  for (Eigen::Index i = 0; i < margins.size(); ++i)
    if (margins(i) <= model.margin + 1e-9) model.support_ids.push_back(static_cast<std::size_t>(i));
  return model;
}

IncrementalMaxMargin::IncrementalMaxMargin(std::size_t dim) : dim_(dim), model_(max_margin_fit({}, dim)) {}

Sign IncrementalMaxMargin::predict(const Eigen::VectorXd& x) const { return sign_of(model_.weights.dot(x)); }

void IncrementalMaxMargin::add(const Eigen::VectorXd& x, Sign y) {
  data_.push_back({x, y});
  // The current solution stays optimal when the new point does not cut into
  // the margin (Wolfe optimality condition for the min-norm point).
  if (data_.size() > 1 && to_int(y) * model_.weights.dot(x) >= model_.margin) return;
  model_ = max_margin_fit(data_, dim_);
  ++refits_;
}

std::size_t self_directed_pass(const PointSet& s, const std::vector<std::size_t>& order,
                               const std::function<Sign(std::size_t)>& feedback) {
  IncrementalMaxMargin learner(s.dim());
  std::size_t mistakes = 0;
  for (auto id : order) {
    Eigen::VectorXd x = unit(Eigen::Map<const Eigen::VectorXd>(s[id].data(), static_cast<Eigen::Index>(s.dim())));
    Sign guess = learner.predict(x);
    Sign truth = feedback(id);
    if (guess != truth) ++mistakes;
    learner.add(x, truth);
  }
  return mistakes;
}

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

SdlLearnReport randomized_svm_learn(const PointSet& s, Oracle& oracle, std::uint64_t perm_seed) {
  SdlLearnReport report;
  auto& res = report.result;
  res.transcript_begin = oracle.queries_answered();
  const std::size_t n = s.size();
  const auto d = static_cast<Eigen::Index>(s.dim());
  std::vector<Eigen::VectorXd> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = unit(Eigen::Map<const Eigen::VectorXd>(s[i].data(), d));

  const auto order = random_permutation(n, perm_seed);
  std::vector<Sign> label(n, Sign::Positive);  // by pass position
  std::size_t known = 0;                       // positions [0, known) are verified

  // Pure iff both label classes of positions [from, to] pass; empty classes
  // are skipped so the empty-intersection policy never matters.
  auto prefix_pure = [&](std::size_t from, std::size_t to) {
    for (Sign z : {Sign::Positive, Sign::Negative}) {
      std::vector<Point> pts;
      for (std::size_t p = from; p <= to; ++p)
        if (label[p] == z) pts.push_back(s.point(order[p]));
      if (pts.empty()) continue;
      if (!oracle.answer(FiniteSet(pts), z)) return false;
    }
    return true;
  };

  while (known < n) {
    IncrementalMaxMargin learner(s.dim());
    for (std::size_t p = 0; p < n; ++p) {
      const auto& x = u[order[p]];
      if (p >= known) label[p] = learner.predict(x);
      learner.add(x, label[p]);
    }
    ++res.rounds;
    if (prefix_pure(known, n - 1)) {
      known = n;
      break;
    }
    // First wrong prediction in pass order.
    std::size_t lo = known, hi = n - 1;
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      if (prefix_pure(known, mid)) lo = mid + 1;
      else hi = mid;
    }
    label[lo] = flip(label[lo]);
    known = lo + 1;
    ++report.mistakes_fixed;
  }

  res.predictions.resize(n);
  for (std::size_t p = 0; p < n; ++p) res.predictions[order[p]] = label[p];
  res.queries_used = oracle.queries_answered() - res.transcript_begin;
  return report;
}

}  // namespace regionq
