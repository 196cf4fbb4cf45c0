#pragma once

#include "gw/types.hpp"

namespace gw {

struct DiagnosticsSummary {
  double objective = 0.0;
  double marginal_infeasibility = 0.0;
  double split_gap = 0.0;
  double residual = 0.0;
  double entropy = 0.0;  // coupling entropy, nats
};

// The reported infeasibility metric ||pi^T 1 - nu||/m + ||pi 1 - mu||/n,
// Euclidean norms.
double marginal_infeasibility(const Matrix& pi, const ProbabilityVector& mu,
                              const ProbabilityVector& nu);

// Frobenius distance ||pi - w||_F between the two halves.
double split_gap(const Matrix& pi, const Matrix& w);
double split_gap(const SplitIterate& iterate);

// ||pi - Proj_{C1 ∩ C2}(pi + D_X pi D_Y)||_F, with the Euclidean projection
// computed by Dykstra's algorithm. The exponent uses +D_X pi D_Y without a
// factor 2; the scaling changes only the error-bound constant.
double luo_tseng_residual(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                          const Matrix& pi, const ProbabilityVector& mu,
                          const ProbabilityVector& nu, double dykstra_tol = 1e-8);

// Shannon entropy -sum pi log pi over positive entries, in nats. 0 log 0 := 0.
double coupling_entropy(const Matrix& pi);

}  // namespace gw
