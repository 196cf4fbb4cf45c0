#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Axis { Rows, Cols };

enum class Algorithm { Bapg, Bpg, Ebpg, Hbpg, Fw };
enum class Geometry { Entropy, Quadratic };

std::string to_string(Algorithm a);
std::string to_string(Geometry g);
Algorithm parse_algorithm(const std::string& name);  // throws ConfigError
Geometry parse_geometry(const std::string& name);

// Raised for invalid user-supplied configuration or mismatched problem sizes.
class ConfigError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatchError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A row or column that sums to zero where a positive sum is required.
class ZeroSumLineError : public std::runtime_error {
 public:
  ZeroSumLineError(Axis axis, Eigen::Index index);
  Axis axis() const { return axis_; }
  Eigen::Index index() const { return index_; }

 private:
  Axis axis_;
  Eigen::Index index_;
};

// Overflow/underflow/NaN detected inside a solver; message names the solver
// and the iteration at which the problem appeared.
class NumericalInstabilityError : public std::runtime_error {
 public:
  NumericalInstabilityError(std::string solver, int iteration,
                            const std::string& detail);
  const std::string& solver() const { return solver_; }
  int iteration() const { return iteration_; }

 private:
  std::string solver_;
  int iteration_;
};

// Symmetric nonnegative dense matrix describing intra-space structure.
// Construction symmetrizes the input as (A + A^T)/2 and rejects negative or
// non-finite entries.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(Matrix entries);

  Eigen::Index size() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }

 private:
  Matrix entries_;
};

// Strictly positive weights summing to one (within 1e-12). Zero-mass support
// points must be dropped before construction.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(Vector weights);
  static ProbabilityVector uniform(Eigen::Index n);

  Eigen::Index size() const { return weights_.size(); }
  const Vector& weights() const { return weights_; }

 private:
  Vector weights_;
};

// Nonnegative n x m matrix of total mass one (within 1e-9). Marginal
// feasibility is deliberately not an invariant: infeasible iterates are
// measured by the diagnostics module, not rejected here.
class Coupling {
 public:
  explicit Coupling(Matrix entries);

  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }
  const Matrix& entries() const { return entries_; }

 private:
  Matrix entries_;
};

// The BAPG pair: pi lives in the row polytope C1, w in the column polytope C2.
class SplitIterate {
 public:
  SplitIterate(Coupling pi, Coupling w, const ProbabilityVector& mu,
               const ProbabilityVector& nu);

  const Coupling& pi() const { return pi_; }
  const Coupling& w() const { return w_; }

 private:
  Coupling pi_;
  Coupling w_;
};

// Simple undirected graph: no self-loops, edges stored deduplicated in
// (min, max) canonical order.
class Graph {
 public:
  Graph(Eigen::Index num_nodes, std::vector<std::pair<int, int>> edges);

  Eigen::Index num_nodes() const { return num_nodes_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

 private:
  Eigen::Index num_nodes_;
  std::vector<std::pair<int, int>> edges_;
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::Bapg;
  Geometry geometry = Geometry::Entropy;  // BAPG only
  double rho = 0.1;          // BAPG step size
  double step = 5.0;         // BPG step size t
  double epsilon_reg = 0.1;  // eBPG regularization
  int inner_iters = 1000;    // inner Sinkhorn cap; 1 selects BPG-S
  double inner_tol = 1e-9;
  double rel_tol = 1e-6;
  int max_iters = 2000;
  double perturbation = 0.0;  // uniform-mass mixing weight, 0 disables
  int switch_iters = 200;     // hBPG phase-1 budget
  std::int64_t seed = 0;
  bool log_domain = false;       // log-domain inner solver for eBPG
  bool record_residual = false;  // fill IterationRecord::residual per iteration
};

// Throws ConfigError when a field is outside its admissible range.
void validate(const SolverConfig& config);

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  double marginal_infeasibility = 0.0;
  double split_gap = 0.0;  // ||pi - w||_F, BAPG only, else 0
  std::optional<double> residual;
  double rel_change = 0.0;
  double elapsed_seconds = 0.0;
  int phase = 0;  // hBPG: 1 = warm-start phase, 2 = refinement phase
};

struct SolveReport {
  Coupling final_coupling;          // BAPG: the averaged iterate (pi + w)/2
  std::optional<Coupling> pi_half;  // BAPG only
  std::optional<Coupling> w_half;   // BAPG only
  std::vector<IterationRecord> trace;
  bool converged = false;
  int iterations_used = 0;
};

// Succeeds iff D_X matches mu and D_Y matches nu in size.
void validate_inputs(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                     const ProbabilityVector& mu, const ProbabilityVector& nu);

// The outer product mu nu^T: feasible for both marginals, maximal entropy.
Coupling product_coupling(const ProbabilityVector& mu,
                          const ProbabilityVector& nu);

}  // namespace gw
