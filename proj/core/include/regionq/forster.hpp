#pragma once

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "regionq/regions.hpp"
#include "regionq/types.hpp"

namespace regionq {

struct ForsterOptions {
  int max_iters = 10000;
  // Condition number of the running map beyond which the iteration is taken
  // to be collapsing onto a heavy subspace.
  double collapse_condition = 1e8;
};

struct ForsterResult {
  std::shared_ptr<const LinearMap> map;              // A (d x d) and basis of V (d x k)
  std::vector<Eigen::VectorXd> transformed_points;   // f_A(x) in V coordinates, one per kept id
  std::vector<std::size_t> kept_ids;
  int iterations = 0;
  double min_eigenvalue = 0.0;  // of the final second-moment matrix
  double epsilon = 0.0;         // isotropy tolerance met in dimension k

  std::size_t k() const { return map->sub_dim(); }
  const Eigen::MatrixXd& transform() const { return map->transform; }
  const Eigen::MatrixXd& basis() const { return map->basis; }
};

class ForsterError : public std::runtime_error {
 public:
  ForsterError(const std::string& what, std::size_t dim, std::size_t kept)
      : std::runtime_error(what), dim(dim), kept(kept) {}
  std::size_t dim;
  std::size_t kept;
};

double min_moment_eigenvalue(const std::vector<Eigen::VectorXd>& unit_points);
// lambda_min((1/n) sum x x^T) >= 1/k - eps, where k is the points' dimension.
bool isotropy_check(const std::vector<Eigen::VectorXd>& unit_points, double eps);
double margin_fraction(const std::vector<Eigen::VectorXd>& unit_points, const Eigen::VectorXd& u, double gamma);

// Places S in approximate radially isotropic position, restricting to a
// subspace V when a heavy subspace prevents it. `eps` applies in dimension d;
// on restriction to dimension k the tolerance becomes eps * d / k.
ForsterResult forster_transform(const PointSet& s, double eps, const ForsterOptions& options = {});

// Direction v* in V coordinates with sign(v* . f_A(x)) = sign(w* . x) for x in V.
Eigen::VectorXd transformed_target(const LinearMap& map, const Eigen::VectorXd& w_star);

}  // namespace regionq
