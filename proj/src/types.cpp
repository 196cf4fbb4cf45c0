#include "gw/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gw {

namespace {

std::string axis_name(Axis axis) {
  return axis == Axis::Rows ? "row" : "column";
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Bapg:
      return "bapg";
    case Algorithm::Bpg:
      return "bpg";
    case Algorithm::Ebpg:
      return "ebpg";
    case Algorithm::Hbpg:
      return "hbpg";
    case Algorithm::Fw:
      return "fw";
  }
  return "?";
}

std::string to_string(Geometry g) {
  return g == Geometry::Entropy ? "entropy" : "quadratic";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "bapg") return Algorithm::Bapg;
  if (name == "bpg") return Algorithm::Bpg;
  if (name == "ebpg") return Algorithm::Ebpg;
  if (name == "hbpg") return Algorithm::Hbpg;
  if (name == "fw") return Algorithm::Fw;
  throw ConfigError("unknown solver '" + name +
                    "' (expected bapg|bpg|ebpg|hbpg|fw)");
}

Geometry parse_geometry(const std::string& name) {
  if (name == "entropy") return Geometry::Entropy;
  if (name == "quadratic") return Geometry::Quadratic;
  throw ConfigError("unknown geometry '" + name +
                    "' (expected entropy|quadratic)");
}

ZeroSumLineError::ZeroSumLineError(Axis axis, Eigen::Index index)
    : std::runtime_error(axis_name(axis) + " " + std::to_string(index) +
                         " has nonpositive sum; cannot rescale"),
      axis_(axis),
      index_(index) {}

NumericalInstabilityError::NumericalInstabilityError(std::string solver,
                                                     int iteration,
                                                     const std::string& detail)
    : std::runtime_error("numerical instability in " + solver + " at iteration " +
                         std::to_string(iteration) + ": " + detail),
      solver_(std::move(solver)),
      iteration_(iteration) {}

DistanceMatrix::DistanceMatrix(Matrix entries) {
  if (entries.rows() != entries.cols()) {
    throw DimensionMismatchError("distance matrix must be square, got " +
                                 std::to_string(entries.rows()) + "x" +
                                 std::to_string(entries.cols()));
  }
  if (entries.rows() == 0) {
    throw DimensionMismatchError("distance matrix must be nonempty");
  }
  entries_ = 0.5 * (entries + entries.transpose());
  if (!entries_.allFinite()) {
    throw std::invalid_argument("distance matrix has non-finite entries");
  }
  if ((entries_.array() < 0.0).any()) {
    throw std::invalid_argument("distance matrix has negative entries");
  }
}

ProbabilityVector::ProbabilityVector(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) {
    throw std::invalid_argument("probability vector must be nonempty");
  }
  if (!weights_.allFinite()) {
    throw std::invalid_argument("probability vector has non-finite entries");
  }
  if ((weights_.array() <= 0.0).any()) {
    throw std::invalid_argument(
        "probability vector entries must be strictly positive; remove "
        "zero-mass points before construction");
  }
  const double mass = weights_.sum();
  if (std::abs(mass - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "probability vector sums to " << mass << ", expected 1 within 1e-12";
    throw std::invalid_argument(msg.str());
  }
}

ProbabilityVector ProbabilityVector::uniform(Eigen::Index n) {
  return ProbabilityVector(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

Coupling::Coupling(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.cols() == 0) {
    throw DimensionMismatchError("coupling must be nonempty");
  }
  if (!entries_.allFinite()) {
    throw std::invalid_argument("coupling has non-finite entries");
  }
  if ((entries_.array() < 0.0).any()) {
    throw std::invalid_argument("coupling has negative entries");
  }
  const double mass = entries_.sum();
  if (std::abs(mass - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "coupling total mass is " << mass << ", expected 1 within 1e-9";
    throw std::invalid_argument(msg.str());
  }
}

SplitIterate::SplitIterate(Coupling pi, Coupling w, const ProbabilityVector& mu,
                           const ProbabilityVector& nu)
    : pi_(std::move(pi)), w_(std::move(w)) {
  if (pi_.rows() != w_.rows() || pi_.cols() != w_.cols()) {
    throw DimensionMismatchError("split iterate halves must share a shape");
  }
  if (pi_.rows() != mu.size() || pi_.cols() != nu.size()) {
    throw DimensionMismatchError("split iterate shape must match marginals");
  }
  const double row_err =
      (pi_.entries().rowwise().sum() - mu.weights()).cwiseAbs().maxCoeff();
  if (row_err > 1e-10) {
    std::ostringstream msg;
    msg << "pi half violates the row constraint by " << row_err;
    throw std::invalid_argument(msg.str());
  }
  const double col_err =
      (w_.entries().colwise().sum().transpose() - nu.weights())
          .cwiseAbs()
          .maxCoeff();
  if (col_err > 1e-10) {
    std::ostringstream msg;
    msg << "w half violates the column constraint by " << col_err;
    throw std::invalid_argument(msg.str());
  }
}

Graph::Graph(Eigen::Index num_nodes, std::vector<std::pair<int, int>> edges)
    : num_nodes_(num_nodes) {
  if (num_nodes_ <= 0) {
    throw std::invalid_argument("graph must have at least one node");
  }
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a == b) {
      throw std::invalid_argument("self-loop at node " + std::to_string(a));
    }
    if (a < 0 || b < 0 || a >= num_nodes_ || b >= num_nodes_) {
      throw std::invalid_argument("edge (" + std::to_string(a) + "," +
                                  std::to_string(b) + ") out of range for " +
                                  std::to_string(num_nodes_) + " nodes");
    }
    edges_.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

void validate(const SolverConfig& config) {
  if (config.rho <= 0.0) throw ConfigError("rho must be positive");
  if (config.step <= 0.0) throw ConfigError("step must be positive");
  if (config.epsilon_reg <= 0.0) throw ConfigError("eps must be positive");
  if (config.inner_iters < 1) throw ConfigError("inner-iters must be >= 1");
  if (config.inner_tol <= 0.0) throw ConfigError("inner-tol must be positive");
  if (config.rel_tol <= 0.0) throw ConfigError("rel-tol must be positive");
  if (config.max_iters < 1) throw ConfigError("max-iters must be >= 1");
  if (config.perturbation < 0.0 || config.perturbation >= 1.0) {
    throw ConfigError("perturbation must lie in [0, 1)");
  }
  if (config.switch_iters < 0) throw ConfigError("switch-iters must be >= 0");
}

void validate_inputs(const DistanceMatrix& d_x, const DistanceMatrix& d_y,
                     const ProbabilityVector& mu, const ProbabilityVector& nu) {
  if (d_x.size() != mu.size()) {
    throw DimensionMismatchError(
        "D_X is " + std::to_string(d_x.size()) + "x" + std::to_string(d_x.size()) +
        " but mu has length " + std::to_string(mu.size()));
  }
  if (d_y.size() != nu.size()) {
    throw DimensionMismatchError(
        "D_Y is " + std::to_string(d_y.size()) + "x" + std::to_string(d_y.size()) +
        " but nu has length " + std::to_string(nu.size()));
  }
}

Coupling product_coupling(const ProbabilityVector& mu,
                          const ProbabilityVector& nu) {
  return Coupling(mu.weights() * nu.weights().transpose());
}

}  // namespace gw
