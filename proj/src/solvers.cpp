#include "gw/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <utility>

#include "gw/diagnostics.hpp"
#include "gw/projections.hpp"

namespace gw {

namespace {

Matrix structure_product(const DistanceMatrix& d_x, const Matrix& pi,
                         const DistanceMatrix& d_y) {
  return (d_x.entries() * pi) * d_y.entries();
}

void check_shape(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                 const Matrix& pi, const char* who) {
  if (pi.rows() != d_x.size() || pi.cols() != d_y.size()) {
    throw DimensionMismatchError(std::string(who) + ": coupling shape mismatch");
  }
}

class TraceClock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

Matrix initial_coupling(const ProbabilityVector& mu, const ProbabilityVector& nu,
                        const SolveOptions& opts) {
  if (opts.initial) {
    if (opts.initial->rows() != mu.size() || opts.initial->cols() != nu.size()) {
      throw DimensionMismatchError("initial coupling shape mismatch");
    }
    return *opts.initial;
  }
  return mu.weights() * nu.weights().transpose();
}

void require_algorithm(const SolverConfig& config, Algorithm expected,
                       const char* who) {
  if (config.algorithm != expected) {
    throw ConfigError(std::string(who) + " called with algorithm '" +
                      to_string(config.algorithm) + "'");
  }
}

constexpr double kExpOverflowLimit = 700.0;

}  // namespace

double gw_objective(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                    const Matrix& pi) {
  check_shape(d_x, d_y, pi, "gw_objective");
  const Matrix m = structure_product(d_x, pi, d_y);
  return -(m.array() * pi.array()).sum();
}

Matrix gw_gradient(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                   const Matrix& pi) {
  check_shape(d_x, d_y, pi, "gw_gradient");
  return -2.0 * structure_product(d_x, pi, d_y);
}

double bilinear_value(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                      const Matrix& pi, const Matrix& w) {
  check_shape(d_x, d_y, pi, "bilinear_value");
  if (w.rows() != pi.rows() || w.cols() != pi.cols()) {
    throw DimensionMismatchError("bilinear_value: pi/w shape mismatch");
  }
  const Matrix m = structure_product(d_x, pi, d_y);
  return -(m.array() * w.array()).sum();
}

double penalty_value(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                     const Matrix& pi, const Matrix& w, double rho,
                     Geometry geometry) {
  const double f = bilinear_value(d_x, d_y, pi, w);
  if (geometry == Geometry::Quadratic) {
    return f + rho * 0.5 * (pi - w).squaredNorm();
  }
  if (!(pi.array() > 0.0).all() || !(w.array() > 0.0).all()) {
    throw std::domain_error(
        "penalty_value: entropy geometry requires strictly positive entries");
  }
  const double kl =
      (pi.array() * (pi.array() / w.array()).log()).sum() - pi.sum() + w.sum();
  return f + rho * kl;
}

double penalty_value(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                     const SplitIterate& iterate, double rho, Geometry geometry) {
  return penalty_value(d_x, d_y, iterate.pi().entries(), iterate.w().entries(),
                       rho, geometry);
}

namespace {

// Largest eigenvalue of D^2 (PSD for symmetric D) by power iteration; the
// spectral norm of D is its square root.
double spectral_norm(const Matrix& d, double tol, int cap) {
  if (d.norm() == 0.0) return 0.0;
  Vector x = Vector::Ones(d.rows()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < cap; ++it) {
    const Vector y = d * (d * x);
    const double estimate = y.norm();
    if (estimate == 0.0) return 0.0;
    x = y / estimate;
    if (std::abs(estimate - lambda) <= tol * std::max(1.0, estimate)) {
      lambda = estimate;
      break;
    }
    lambda = estimate;
  }
  return std::sqrt(lambda);
}

}  // namespace

double lipschitz_bound(const DistanceMatrix& d_x, const DistanceMatrix& d_y) {
  return spectral_norm(d_x.entries(), 1e-10, 10000) *
         spectral_norm(d_y.entries(), 1e-10, 10000);
}

SolveReport bapg_solve(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                       const ProbabilityVector& mu, const ProbabilityVector& nu,
                       const SolverConfig& config, const SolveOptions& opts) {
  require_algorithm(config, Algorithm::Bapg, "bapg_solve");
  validate(config);
  validate_inputs(d_x, d_y, mu, nu);
  const bool entropy = config.geometry == Geometry::Entropy;

  Matrix pi = initial_coupling(mu, nu, opts);
  if (entropy && !(pi.array() > 0.0).all()) {
    throw ConfigError(
        "bapg entropy geometry requires a strictly positive initialization "
        "(the product coupling qualifies)");
  }
  Matrix w = entropy ? kl_scale(pi, nu, Axis::Cols)
                     : euclid_project(pi, nu, Axis::Cols);

  TraceClock clock;
  std::vector<IterationRecord> trace;
  bool converged = false;
  int iter = 0;
  while (iter < config.max_iters) {
    ++iter;
    Matrix w_next;
    try {
      if (entropy) {
        Matrix exponent = structure_product(d_x, w, d_y) / config.rho;
        if (exponent.maxCoeff() > kExpOverflowLimit) {
          throw NumericalInstabilityError("bapg", iter,
                                          "exp overflow; increase rho");
        }
        pi = kl_scale((w.array() * exponent.array().exp()).matrix(), mu,
                      Axis::Rows);
        exponent = structure_product(d_x, pi, d_y) / config.rho;
        if (exponent.maxCoeff() > kExpOverflowLimit) {
          throw NumericalInstabilityError("bapg", iter,
                                          "exp overflow; increase rho");
        }
        w_next = kl_scale((pi.array() * exponent.array().exp()).matrix(), nu,
                          Axis::Cols);
      } else {
        pi = euclid_project(w + structure_product(d_x, w, d_y) / config.rho, mu,
                            Axis::Rows);
        w_next = euclid_project(
            pi + structure_product(d_x, pi, d_y) / config.rho, nu, Axis::Cols);
      }
    } catch (const ZeroSumLineError& e) {
      throw NumericalInstabilityError("bapg", iter, e.what());
    }
    if (!pi.allFinite() || !w_next.allFinite()) {
      throw NumericalInstabilityError("bapg", iter, "non-finite iterate");
    }

    const double rel_change = (w_next - w).norm() / w.norm();
    w = std::move(w_next);
    const Matrix averaged = 0.5 * (pi + w);

    IterationRecord rec;
    rec.iter = iter;
    rec.objective = gw_objective(d_x, d_y, averaged);
    rec.marginal_infeasibility = marginal_infeasibility(averaged, mu, nu);
    rec.split_gap = split_gap(pi, w);
    rec.rel_change = rel_change;
    rec.elapsed_seconds = clock.seconds();
    if (config.record_residual) {
      rec.residual = luo_tseng_residual(d_x, d_y, averaged, mu, nu);
    }
    trace.push_back(rec);
    if (opts.observer) opts.observer(iter, pi, &w);

    if (rel_change <= config.rel_tol) {
      converged = true;
      break;
    }
  }

  SolveReport report{Coupling(0.5 * (pi + w)), Coupling(pi), Coupling(w),
                     std::move(trace), converged, iter};
  return report;
}

SolveReport bpg_solve(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                      const ProbabilityVector& mu, const ProbabilityVector& nu,
                      const SolverConfig& config, const SolveOptions& opts) {
  require_algorithm(config, Algorithm::Bpg, "bpg_solve");
  validate(config);
  validate_inputs(d_x, d_y, mu, nu);

  const double lipschitz = lipschitz_bound(d_x, d_y);
  // Theory wants t <= sigma/L_f with sigma = 1 for the entropy kernel; larger
  // steps are allowed but flagged.
  if (lipschitz > 0.0 && config.step > 1.0 / lipschitz) {
    std::fprintf(stderr,
                 "bpg: step %g exceeds sigma/L_f = %g; descent is not "
                 "guaranteed at this step size\n",
                 config.step, 1.0 / lipschitz);
  }

  Matrix pi = initial_coupling(mu, nu, opts);
  const double uniform_mass =
      1.0 / static_cast<double>(pi.rows() * pi.cols());

  TraceClock clock;
  std::vector<IterationRecord> trace;
  bool converged = false;
  int iter = 0;
  while (iter < config.max_iters) {
    ++iter;
    const Matrix exponent =
        2.0 * config.step * structure_product(d_x, pi, d_y);
    if (exponent.maxCoeff() > kExpOverflowLimit) {
      throw NumericalInstabilityError("bpg", iter, "exp overflow; reduce step");
    }
    const Matrix kernel =
        (pi.array() * exponent.array().exp()).cwiseMax(1e-300).matrix();
    SinkhornResult inner;
    try {
      inner = sinkhorn_project(kernel, mu, nu, config.inner_tol,
                               config.inner_iters);
    } catch (const ZeroSumLineError& e) {
      throw NumericalInstabilityError("bpg", iter, e.what());
    } catch (const NumericalInstabilityError& e) {
      throw NumericalInstabilityError("bpg", iter, e.what());
    }
    Matrix pi_next = std::move(inner.coupling);
    if (config.perturbation > 0.0) {
      pi_next = (1.0 - config.perturbation) * pi_next +
                Matrix::Constant(pi.rows(), pi.cols(),
                                 config.perturbation * uniform_mass);
    }

    const double rel_change = (pi_next - pi).norm() / pi.norm();
    pi = std::move(pi_next);

    IterationRecord rec;
    rec.iter = iter;
    rec.objective = gw_objective(d_x, d_y, pi);
    rec.marginal_infeasibility = marginal_infeasibility(pi, mu, nu);
    rec.rel_change = rel_change;
    rec.elapsed_seconds = clock.seconds();
    if (config.record_residual) {
      rec.residual = luo_tseng_residual(d_x, d_y, pi, mu, nu);
    }
    trace.push_back(rec);
    if (opts.observer) opts.observer(iter, pi, nullptr);

    if (rel_change <= config.rel_tol) {
      converged = true;
      break;
    }
  }

  SolveReport report{Coupling(pi), std::nullopt, std::nullopt, std::move(trace),
                     converged, iter};
  return report;
}

SolveReport ebpg_solve(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                       const ProbabilityVector& mu, const ProbabilityVector& nu,
                       const SolverConfig& config, const SolveOptions& opts) {
  require_algorithm(config, Algorithm::Ebpg, "ebpg_solve");
  validate(config);
  validate_inputs(d_x, d_y, mu, nu);

  Matrix pi = initial_coupling(mu, nu, opts);

  TraceClock clock;
  std::vector<IterationRecord> trace;
  bool converged = false;
  int iter = 0;
  while (iter < config.max_iters) {
    ++iter;
    // Kernel exp(-grad f / eps); a global shift of the exponent rescales the
    // kernel by a constant and leaves the Sinkhorn projection unchanged.
    Matrix exponent =
        (2.0 / config.epsilon_reg) * structure_product(d_x, pi, d_y);
    exponent.array() -= exponent.maxCoeff();

    SinkhornResult inner;
    try {
      if (config.log_domain) {
        inner = sinkhorn_project_log(exponent, mu, nu, config.inner_tol,
                                     config.inner_iters);
      } else {
        const Matrix kernel = exponent.array().exp().matrix();
        const bool row_dead = kernel.rowwise().maxCoeff().minCoeff() <= 0.0;
        const bool col_dead = kernel.colwise().maxCoeff().minCoeff() <= 0.0;
        if (row_dead || col_dead) {
          throw NumericalInstabilityError(
              "ebpg", iter,
              "kernel line underflowed to zero; increase eps or enable the "
              "log-domain solver");
        }
        inner = sinkhorn_project(kernel.cwiseMax(1e-300), mu, nu,
                                 config.inner_tol, config.inner_iters);
      }
    } catch (const ZeroSumLineError& e) {
      throw NumericalInstabilityError("ebpg", iter, e.what());
    }
    Matrix pi_next = std::move(inner.coupling);

    const double rel_change = (pi_next - pi).norm() / pi.norm();
    pi = std::move(pi_next);

    IterationRecord rec;
    rec.iter = iter;
    rec.objective = gw_objective(d_x, d_y, pi);
    rec.marginal_infeasibility = marginal_infeasibility(pi, mu, nu);
    rec.rel_change = rel_change;
    rec.elapsed_seconds = clock.seconds();
    if (config.record_residual) {
      rec.residual = luo_tseng_residual(d_x, d_y, pi, mu, nu);
    }
    trace.push_back(rec);
    if (opts.observer) opts.observer(iter, pi, nullptr);

    if (rel_change <= config.rel_tol) {
      converged = true;
      break;
    }
  }

  SolveReport report{Coupling(pi), std::nullopt, std::nullopt, std::move(trace),
                     converged, iter};
  return report;
}

SolveReport hbpg_solve(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                       const ProbabilityVector& mu, const ProbabilityVector& nu,
                       const SolverConfig& config, const SolveOptions& opts) {
  require_algorithm(config, Algorithm::Hbpg, "hbpg_solve");
  validate(config);
  validate_inputs(d_x, d_y, mu, nu);

  const Matrix start = initial_coupling(mu, nu, opts);
  std::vector<IterationRecord> trace;

  // Phase 1: eBPG warm start, bounded by switch_iters.
  std::optional<SolveReport> warm;
  const int phase1_budget = std::min(config.switch_iters, config.max_iters);
  if (phase1_budget >= 1) {
    SolverConfig warm_config = config;
    warm_config.algorithm = Algorithm::Ebpg;
    warm_config.max_iters = phase1_budget;
    SolveOptions warm_opts;
    warm_opts.initial = start;
    warm_opts.observer = opts.observer;
    warm = ebpg_solve(d_x, d_y, mu, nu, warm_config, warm_opts);
    for (IterationRecord rec : warm->trace) {
      rec.phase = 1;
      trace.push_back(rec);
    }
  }

  const int used1 = warm ? warm->iterations_used : 0;
  const double elapsed1 = trace.empty() ? 0.0 : trace.back().elapsed_seconds;
  const int phase2_budget = config.max_iters - used1;

  if (phase2_budget < 1) {
    SolveReport report{warm->final_coupling, std::nullopt, std::nullopt,
                       std::move(trace), warm->converged, used1};
    return report;
  }

  // Phase 2: BPG refinement from the warm-start point.
  SolverConfig refine_config = config;
  refine_config.algorithm = Algorithm::Bpg;
  refine_config.max_iters = phase2_budget;
  SolveOptions refine_opts;
  refine_opts.initial = warm ? warm->final_coupling.entries() : start;
  if (opts.observer) {
    refine_opts.observer = [&opts, used1](int iter, const Matrix& pi,
                                          const Matrix* w) {
      opts.observer(used1 + iter, pi, w);
    };
  }
  SolveReport refined = bpg_solve(d_x, d_y, mu, nu, refine_config, refine_opts);
  for (IterationRecord rec : refined.trace) {
    rec.phase = 2;
    rec.iter += used1;
    rec.elapsed_seconds += elapsed1;
    trace.push_back(rec);
  }

  SolveReport report{refined.final_coupling, std::nullopt, std::nullopt,
                     std::move(trace), refined.converged,
                     used1 + refined.iterations_used};
  return report;
}

SolveReport fw_solve(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                     const ProbabilityVector& mu, const ProbabilityVector& nu,
                     const SolverConfig& config, const SolveOptions& opts) {
  require_algorithm(config, Algorithm::Fw, "fw_solve");
  validate(config);
  validate_inputs(d_x, d_y, mu, nu);

  Matrix pi = initial_coupling(mu, nu, opts);
  // Frank-Wolfe iterates stay feasible only from a feasible start; project a
  // custom initialization onto the polytope first.
  {
    const double row_err = (pi.rowwise().sum() - mu.weights()).cwiseAbs().maxCoeff();
    const double col_err =
        (pi.colwise().sum().transpose() - nu.weights()).cwiseAbs().maxCoeff();
    if (std::max(row_err, col_err) > 1e-12) {
      pi = sinkhorn_project(pi.cwiseMax(1e-300), mu, nu, 1e-13, 100000).coupling;
    }
  }

  TraceClock clock;
  std::vector<IterationRecord> trace;
  bool converged = false;
  int iter = 0;
  while (iter < config.max_iters) {
    ++iter;
    const Matrix grad = gw_gradient(d_x, d_y, pi);
    const Matrix vertex = exact_ot(grad, mu, nu);
    const Matrix direction = vertex - pi;

    // Exact line search on the quadratic phi(gamma) = f + gamma b + gamma^2 a
    // with a = -Tr(D_X d D_Y d^T), b = <grad, d>.
    const double a =
        -(structure_product(d_x, direction, d_y).array() * direction.array())
             .sum();
    const double b = (grad.array() * direction.array()).sum();
    double gamma;
    if (a > 0.0) {
      gamma = std::clamp(-b / (2.0 * a), 0.0, 1.0);
    } else if (a == 0.0) {
      gamma = b < 0.0 ? 1.0 : 0.0;  // minimize the linear term
    } else {
      gamma = a + b <= 0.0 ? 1.0 : 0.0;  // concave: best endpoint
    }

    const Matrix pi_next = pi + gamma * direction;
    const double rel_change = (pi_next - pi).norm() / pi.norm();
    pi = pi_next;

    IterationRecord rec;
    rec.iter = iter;
    rec.objective = gw_objective(d_x, d_y, pi);
    rec.marginal_infeasibility = marginal_infeasibility(pi, mu, nu);
    rec.rel_change = rel_change;
    rec.elapsed_seconds = clock.seconds();
    if (config.record_residual) {
      rec.residual = luo_tseng_residual(d_x, d_y, pi, mu, nu);
    }
    trace.push_back(rec);
    if (opts.observer) opts.observer(iter, pi, nullptr);

    if (rel_change <= config.rel_tol) {
      converged = true;
      break;
    }
  }

  SolveReport report{Coupling(pi), std::nullopt, std::nullopt, std::move(trace),
                     converged, iter};
  return report;
}

SolveReport solve(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                  const ProbabilityVector& mu, const ProbabilityVector& nu,
                  const SolverConfig& config, const SolveOptions& opts) {
  switch (config.algorithm) {
    case Algorithm::Bapg:
      return bapg_solve(d_x, d_y, mu, nu, config, opts);
    case Algorithm::Bpg:
      return bpg_solve(d_x, d_y, mu, nu, config, opts);
    case Algorithm::Ebpg:
      return ebpg_solve(d_x, d_y, mu, nu, config, opts);
    case Algorithm::Hbpg:
      return hbpg_solve(d_x, d_y, mu, nu, config, opts);
    case Algorithm::Fw:
      return fw_solve(d_x, d_y, mu, nu, config, opts);
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace gw
