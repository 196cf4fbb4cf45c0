#pragma once

#include "gw/types.hpp"

namespace gw {

struct SinkhornResult {
  Matrix coupling;
  int iterations = 0;
  double marginal_error = 0.0;  // max row/col constraint violation, inf-norm
  bool converged = false;
};

// Exact KL (negative-entropy Bregman) projection onto the row polytope C1
// (axis = Rows) or the column polytope C2 (axis = Cols): each line is rescaled
// so that its sum equals the target. Throws ZeroSumLineError when a line has
// nonpositive sum.
Matrix kl_scale(const Matrix& pi, const ProbabilityVector& target, Axis axis);

// Euclidean projection of v onto {x >= 0 : sum x = s}, sort-threshold method.
Vector simplex_project(const Vector& v, double s);

// Row/column-wise Euclidean projection onto the scaled simplices with masses
// given by the target marginal.
Matrix euclid_project(const Matrix& pi, const ProbabilityVector& target,
                      Axis axis);

// KL projection of a strictly positive kernel onto the transport polytope
// Pi(mu, nu) by alternating row/column scalings (rows first, error measured
// after a full sweep). The caller must clamp kernel entries below by 1e-300.
// Non-convergence returns the last iterate with converged = false; NaN or
// overflow aborts with NumericalInstabilityError.
SinkhornResult sinkhorn_project(const Matrix& kernel,
                                const ProbabilityVector& mu,
                                const ProbabilityVector& nu, double tol,
                                int max_iters);

// Same projection computed in the log domain from exponent = log(kernel):
// the output equals sinkhorn_project(exp(exponent), ...) but is stable for
// exponents with a large dynamic range.
SinkhornResult sinkhorn_project_log(const Matrix& exponent,
                                    const ProbabilityVector& mu,
                                    const ProbabilityVector& nu, double tol,
                                    int max_iters);

// Euclidean projection onto C1 ∩ C2 = Pi(mu, nu) by Dykstra's alternating
// projections with correction terms. The returned point satisfies both
// marginals within tol in the inf-norm.
Matrix dykstra_project(const Matrix& pi, const ProbabilityVector& mu,
                       const ProbabilityVector& nu, double tol = 1e-8,
                       int max_iters = 10000);

// Exact optimal vertex of min <cost, pi> over Pi(mu, nu), computed with the
// transportation simplex (northwest-corner start, Bland's anti-cycling rule).
Matrix exact_ot(const Matrix& cost, const ProbabilityVector& mu,
                const ProbabilityVector& nu);

}  // namespace gw
