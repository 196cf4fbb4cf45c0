#pragma once

#include <functional>
#include <optional>

#include "gw/types.hpp"

namespace gw {

// GW objective -Tr(D_X pi D_Y pi^T), evaluated as (D_X pi) D_Y then traced
// against pi: O(n^2 m + n m^2).
double gw_objective(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                    const Matrix& pi);

// Gradient of the objective, -2 D_X pi D_Y (both D symmetric).
Matrix gw_gradient(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                   const Matrix& pi);

// Bilinear form -Tr(D_X pi D_Y w^T); equals gw_objective when w == pi.
double bilinear_value(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                      const Matrix& pi, const Matrix& w);

// Penalized potential F_rho(pi, w) = f(pi, w) + rho D_h(pi, w). The entropy
// geometry requires strictly positive entries and uses the KL divergence
// sum pi log(pi/w) - pi + w; the quadratic geometry uses 0.5 ||pi - w||_F^2.
double penalty_value(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                     const Matrix& pi, const Matrix& w, double rho,
                     Geometry geometry);
double penalty_value(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                     const SplitIterate& iterate, double rho,
                     Geometry geometry);

// sigma_max(D_X) * sigma_max(D_Y), spectral norms by power iteration on D^2
// (tol 1e-10, cap 10000 iterations).
double lipschitz_bound(const DistanceMatrix& d_x, const DistanceMatrix& d_y);

// Per-solve knobs that are not part of the experiment-facing configuration.
struct SolveOptions {
  // Starting coupling; defaults to the product coupling mu nu^T. Must be
  // strictly positive for the entropy-geometry solvers.
  std::optional<Matrix> initial;
  // Called after every outer iteration with the current iterate; `w` is
  // non-null only for BAPG.
  std::function<void(int iter, const Matrix& pi, const Matrix* w)> observer;
};

SolveReport bapg_solve(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                       const ProbabilityVector& mu, const ProbabilityVector& nu,
                       const SolverConfig& config, const SolveOptions& opts = {});

SolveReport bpg_solve(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                      const ProbabilityVector& mu, const ProbabilityVector& nu,
                      const SolverConfig& config, const SolveOptions& opts = {});

SolveReport ebpg_solve(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                       const ProbabilityVector& mu, const ProbabilityVector& nu,
                       const SolverConfig& config, const SolveOptions& opts = {});

SolveReport hbpg_solve(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                       const ProbabilityVector& mu, const ProbabilityVector& nu,
                       const SolverConfig& config, const SolveOptions& opts = {});

SolveReport fw_solve(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                     const ProbabilityVector& mu, const ProbabilityVector& nu,
                     const SolverConfig& config, const SolveOptions& opts = {});

// Dispatch on config.algorithm.
SolveReport solve(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                  const ProbabilityVector& mu, const ProbabilityVector& nu,
                  const SolverConfig& config, const SolveOptions& opts = {});

}  // namespace gw
