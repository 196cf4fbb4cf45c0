#include "gw/diagnostics.hpp"

#include <cmath>

#include "gw/projections.hpp"

namespace gw {

double marginal_infeasibility(const Matrix& pi, const ProbabilityVector& mu,
                              const ProbabilityVector& nu) {
  if (pi.rows() != mu.size() || pi.cols() != nu.size()) {
    throw DimensionMismatchError("marginal_infeasibility: shape mismatch");
  }
  const double col_err =
      (pi.colwise().sum().transpose() - nu.weights()).norm() /
      static_cast<double>(pi.cols());
  const double row_err = (pi.rowwise().sum() - mu.weights()).norm() /
                         static_cast<double>(pi.rows());
  return col_err + row_err;
}

double split_gap(const Matrix& pi, const Matrix& w) {
  if (pi.rows() != w.rows() || pi.cols() != w.cols()) {
    throw DimensionMismatchError("split_gap: shape mismatch");
  }
  return (pi - w).norm();
}

double split_gap(const SplitIterate& iterate) {
  return split_gap(iterate.pi().entries(), iterate.w().entries());
}

double luo_tseng_residual(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                          const Matrix& pi, const ProbabilityVector& mu,
                          const ProbabilityVector& nu, double dykstra_tol) {
  if (pi.rows() != d_x.size() || pi.cols() != d_y.size()) {
    throw DimensionMismatchError("luo_tseng_residual: shape mismatch");
  }
  const Matrix shifted = pi + (d_x.entries() * pi) * d_y.entries();
  const Matrix projected = dykstra_project(shifted, mu, nu, dykstra_tol);
  return (pi - projected).norm();
}

double coupling_entropy(const Matrix& pi) {
  double h = 0.0;
  for (Eigen::Index j = 0; j < pi.cols(); ++j) {
    for (Eigen::Index i = 0; i < pi.rows(); ++i) {
      const double p = pi(i, j);
      if (p > 0.0) h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace gw
