#include "gw/projections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace gw {

Matrix kl_scale(const Matrix& pi, const ProbabilityVector& target, Axis axis) {
  Matrix out = pi;
  if (axis == Axis::Rows) {
    if (pi.rows() != target.size()) {
      throw DimensionMismatchError("kl_scale: row count does not match target");
    }
    for (Eigen::Index i = 0; i < pi.rows(); ++i) {
      const double s = pi.row(i).sum();
      if (!(s > 0.0) || !std::isfinite(s)) throw ZeroSumLineError(Axis::Rows, i);
      out.row(i) *= target.weights()(i) / s;
    }
  } else {
    if (pi.cols() != target.size()) {
      throw DimensionMismatchError("kl_scale: column count does not match target");
    }
    for (Eigen::Index j = 0; j < pi.cols(); ++j) {
      const double s = pi.col(j).sum();
      if (!(s > 0.0) || !std::isfinite(s)) throw ZeroSumLineError(Axis::Cols, j);
      out.col(j) *= target.weights()(j) / s;
    }
  }
  return out;
}

Vector simplex_project(const Vector& v, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("simplex_project: s must be > 0");
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = (u[0] - s);  // overwritten below; k = 1 always admissible
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumsum += u[j];
    const double cand = (cumsum - s) / static_cast<double>(j + 1);
    if (u[j] - cand > 0.0) {
      k = j;
      theta = cand;
    }
  }
  (void)k;
  return (v.array() - theta).cwiseMax(0.0);
}

Matrix euclid_project(const Matrix& pi, const ProbabilityVector& target,
                      Axis axis) {
  Matrix out(pi.rows(), pi.cols());
  if (axis == Axis::Rows) {
    if (pi.rows() != target.size()) {
      throw DimensionMismatchError("euclid_project: row count does not match target");
    }
    for (Eigen::Index i = 0; i < pi.rows(); ++i) {
      out.row(i) = simplex_project(pi.row(i).transpose(), target.weights()(i))
                       .transpose();
    }
  } else {
    if (pi.cols() != target.size()) {
      throw DimensionMismatchError(
          "euclid_project: column count does not match target");
    }
    for (Eigen::Index j = 0; j < pi.cols(); ++j) {
      out.col(j) = simplex_project(pi.col(j), target.weights()(j));
    }
  }
  return out;
}

namespace {

double marginal_error_inf(const Matrix& pi, const ProbabilityVector& mu,
                          const ProbabilityVector& nu) {
  const double row_err =
      (pi.rowwise().sum() - mu.weights()).cwiseAbs().maxCoeff();
  const double col_err =
      (pi.colwise().sum().transpose() - nu.weights()).cwiseAbs().maxCoeff();
  return std::max(row_err, col_err);
}

}  // namespace

SinkhornResult sinkhorn_project(const Matrix& kernel,
                                const ProbabilityVector& mu,
                                const ProbabilityVector& nu, double tol,
                                int max_iters) {
  if (kernel.rows() != mu.size() || kernel.cols() != nu.size()) {
    throw DimensionMismatchError("sinkhorn_project: kernel/marginal shape mismatch");
  }
  SinkhornResult result;
  result.coupling = kernel;
  for (int sweep = 1; sweep <= max_iters; ++sweep) {
    result.coupling = kl_scale(result.coupling, mu, Axis::Rows);
    result.coupling = kl_scale(result.coupling, nu, Axis::Cols);
    if (!result.coupling.allFinite()) {
      throw NumericalInstabilityError("sinkhorn", sweep,
                                      "non-finite entries after scaling sweep");
    }
    result.iterations = sweep;
    result.marginal_error = marginal_error_inf(result.coupling, mu, nu);
    if (result.marginal_error <= tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

namespace {

// log(sum_k exp(x_k)) over one matrix line, max-shifted.
double log_sum_exp(const Eigen::Ref<const Vector>& x) {
  const double c = x.maxCoeff();
  if (!std::isfinite(c)) return c;  // all -inf stays -inf
  return c + std::log((x.array() - c).exp().sum());
}

}  // namespace

SinkhornResult sinkhorn_project_log(const Matrix& exponent,
                                    const ProbabilityVector& mu,
                                    const ProbabilityVector& nu, double tol,
                                    int max_iters) {
  if (exponent.rows() != mu.size() || exponent.cols() != nu.size()) {
    throw DimensionMismatchError(
        "sinkhorn_project_log: exponent/marginal shape mismatch");
  }
  const Eigen::Index n = exponent.rows(), m = exponent.cols();
  const Vector log_mu = mu.weights().array().log();
  const Vector log_nu = nu.weights().array().log();
  Vector f = Vector::Zero(n), g = Vector::Zero(m);
  SinkhornResult result;
  for (int sweep = 1; sweep <= max_iters; ++sweep) {
    for (Eigen::Index i = 0; i < n; ++i) {
      f(i) = log_mu(i) - log_sum_exp(exponent.row(i).transpose() + g);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      g(j) = log_nu(j) - log_sum_exp(exponent.col(j) + f);
    }
    result.coupling =
        ((exponent.colwise() + f).rowwise() + g.transpose()).array().exp();
    if (!result.coupling.allFinite()) {
      throw NumericalInstabilityError("sinkhorn-log", sweep,
                                      "non-finite entries after scaling sweep");
    }
    result.iterations = sweep;
    result.marginal_error = marginal_error_inf(result.coupling, mu, nu);
    if (result.marginal_error <= tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

Matrix dykstra_project(const Matrix& pi, const ProbabilityVector& mu,
                       const ProbabilityVector& nu, double tol, int max_iters) {
  if (pi.rows() != mu.size() || pi.cols() != nu.size()) {
    throw DimensionMismatchError("dykstra_project: shape mismatch");
  }
  Matrix x = pi;
  Matrix p = Matrix::Zero(pi.rows(), pi.cols());
  Matrix q = Matrix::Zero(pi.rows(), pi.cols());
  double err = 0.0;
  for (int sweep = 1; sweep <= max_iters; ++sweep) {
    const Matrix y = euclid_project(x + p, mu, Axis::Rows);
    p = x + p - y;
    const Matrix z = euclid_project(y + q, nu, Axis::Cols);
    q = y + q - z;
    x = z;
    err = marginal_error_inf(x, mu, nu);
    if (err <= tol) return x;
  }
  std::ostringstream msg;
  msg << "dykstra_project did not converge in " << max_iters
      << " sweeps; final constraint violation " << err;
  throw std::runtime_error(msg.str());
}

namespace {

// Transportation simplex state. The basis always holds exactly n + m - 1
// cells forming a spanning tree of the bipartite row/column graph.
struct TransportBasis {
  struct Cell {
    int i;
    int j;
    double flow;
  };
  std::vector<Cell> cells;
  std::vector<std::vector<int>> row_cells;  // cell indices per row
  std::vector<std::vector<int>> col_cells;  // cell indices per column
  std::vector<int> basic_at;                // flat (i*m+j) -> cell index or -1
  int n = 0, m = 0;

  TransportBasis(int n_, int m_) : n(n_), m(m_) {
    row_cells.resize(n);
    col_cells.resize(m);
    basic_at.assign(static_cast<std::size_t>(n) * m, -1);
  }

  void add(int i, int j, double flow) {
    const int idx = static_cast<int>(cells.size());
    cells.push_back({i, j, flow});
    row_cells[i].push_back(idx);
    col_cells[j].push_back(idx);
    basic_at[static_cast<std::size_t>(i) * m + j] = idx;
  }

  void remove(int idx) {
    const Cell cell = cells[idx];
    basic_at[static_cast<std::size_t>(cell.i) * m + cell.j] = -1;
    erase_value(row_cells[cell.i], idx);
    erase_value(col_cells[cell.j], idx);
    const int last = static_cast<int>(cells.size()) - 1;
    if (idx != last) {
      cells[idx] = cells[last];
      basic_at[static_cast<std::size_t>(cells[idx].i) * m + cells[idx].j] = idx;
      replace_index(row_cells[cells[idx].i], last, idx);
      replace_index(col_cells[cells[idx].j], last, idx);
    }
    cells.pop_back();
  }

  static void replace_index(std::vector<int>& v, int from, int to) {
    for (int& e : v) {
      if (e == from) {
        e = to;
        return;
      }
    }
  }

  static void erase_value(std::vector<int>& v, int value) {
    v.erase(std::find(v.begin(), v.end(), value));
  }
};

// Northwest-corner initial basic feasible solution with exactly n + m - 1
// cells (zero-flow cells are kept when a row and a column empty together).
void northwest_corner(const Vector& supply, const Vector& demand,
                      TransportBasis& basis) {
  const int n = static_cast<int>(supply.size());
  const int m = static_cast<int>(demand.size());
  Vector a = supply, b = demand;
  int i = 0, j = 0;
  while (true) {
    const double alloc = std::min(a(i), b(j));
    basis.add(i, j, alloc);
    if (i == n - 1 && j == m - 1) break;
    bool advance_row;
    if (i == n - 1) {
      advance_row = false;
    } else if (j == m - 1) {
      advance_row = true;
    } else {
      advance_row = a(i) <= b(j);
    }
    if (advance_row) {
      b(j) -= alloc;
      a(i) = 0.0;
      ++i;
    } else {
      a(i) -= alloc;
      b(j) = 0.0;
      ++j;
    }
  }
}

// Solve u_i + v_j = c_ij over the basis tree, rooted at row 0 with u_0 = 0.
void compute_duals(const Matrix& cost, const TransportBasis& basis, Vector& u,
                   Vector& v) {
  const int n = basis.n, m = basis.m;
  std::vector<char> row_done(n, 0), col_done(m, 0);
  std::vector<int> stack;  // nodes: rows are [0, n), columns are [n, n + m)
  u(0) = 0.0;
  row_done[0] = 1;
  stack.push_back(0);
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    if (node < n) {
      for (int idx : basis.row_cells[node]) {
        const auto& cell = basis.cells[idx];
        if (!col_done[cell.j]) {
          v(cell.j) = cost(cell.i, cell.j) - u(cell.i);
          col_done[cell.j] = 1;
          stack.push_back(n + cell.j);
        }
      }
    } else {
      const int j = node - n;
      for (int idx : basis.col_cells[j]) {
        const auto& cell = basis.cells[idx];
        if (!row_done[cell.i]) {
          u(cell.i) = cost(cell.i, cell.j) - v(cell.j);
          row_done[cell.i] = 1;
          stack.push_back(cell.i);
        }
      }
    }
  }
}

// Tree path from row node `i0` to column node `j0`, returned as the list of
// basis cell indices along the path.
std::vector<int> tree_path(const TransportBasis& basis, int i0, int j0) {
  const int n = basis.n, m = basis.m;
  std::vector<int> parent_cell(n + m, -1);
  std::vector<int> parent_node(n + m, -1);
  std::vector<char> seen(n + m, 0);
  std::vector<int> queue{i0};
  seen[i0] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int node = queue[head];
    if (node == n + j0) break;
    const auto& incident =
        node < n ? basis.row_cells[node] : basis.col_cells[node - n];
    for (int idx : incident) {
      const auto& cell = basis.cells[idx];
      const int next = node < n ? n + cell.j : cell.i;
      if (!seen[next]) {
        seen[next] = 1;
        parent_cell[next] = idx;
        parent_node[next] = node;
        queue.push_back(next);
      }
    }
  }
  std::vector<int> path;
  for (int node = n + j0; node != i0; node = parent_node[node]) {
    path.push_back(parent_cell[node]);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

constexpr double kReducedCostTol = 1e-12;

}  // namespace

Matrix exact_ot(const Matrix& cost, const ProbabilityVector& mu,
                const ProbabilityVector& nu) {
  if (cost.rows() != mu.size() || cost.cols() != nu.size()) {
    throw DimensionMismatchError("exact_ot: cost/marginal shape mismatch");
  }
  if (!cost.allFinite()) {
    throw std::invalid_argument("exact_ot: cost has non-finite entries");
  }
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());

  TransportBasis basis(n, m);
  northwest_corner(mu.weights(), nu.weights(), basis);

  Vector u(n), v(m);
  const long max_pivots = 1000L + 200L * static_cast<long>(n + m) * (n + m);
  for (long pivot = 0; pivot <= max_pivots; ++pivot) {
    compute_duals(cost, basis, u, v);

    // Bland's rule: entering cell = smallest flat index with negative
    // reduced cost.
    int enter_i = -1, enter_j = -1;
    for (int i = 0; i < n && enter_i < 0; ++i) {
      for (int j = 0; j < m; ++j) {
        if (basis.basic_at[static_cast<std::size_t>(i) * m + j] >= 0) continue;
        if (cost(i, j) - u(i) - v(j) < -kReducedCostTol) {
          enter_i = i;
          enter_j = j;
          break;
        }
      }
    }
    if (enter_i < 0) break;  // optimal

    if (pivot == max_pivots) {
      throw std::runtime_error("exact_ot: pivot limit exceeded");
    }

    // The unique cycle is the tree path i0 -> j0 plus the entering cell.
    // Signs alternate -,+,-,... along the path; the entering cell is +.
    const std::vector<int> path = tree_path(basis, enter_i, enter_j);
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < path.size(); t += 2) {
      theta = std::min(theta, basis.cells[path[t]].flow);
    }
    // Leaving cell: smallest flat index among minus cells attaining theta.
    int leave = -1;
    long leave_flat = -1;
    for (std::size_t t = 0; t < path.size(); t += 2) {
      const auto& cell = basis.cells[path[t]];
      if (cell.flow <= theta + 1e-15) {
        const long flat = static_cast<long>(cell.i) * m + cell.j;
        if (leave < 0 || flat < leave_flat) {
          leave = path[t];
          leave_flat = flat;
        }
      }
    }
    for (std::size_t t = 0; t < path.size(); ++t) {
      basis.cells[path[t]].flow += (t % 2 == 0) ? -theta : theta;
    }
    basis.cells[leave].flow = 0.0;
    basis.remove(leave);
    basis.add(enter_i, enter_j, theta);
  }

  Matrix plan = Matrix::Zero(n, m);
  for (const auto& cell : basis.cells) {
    plan(cell.i, cell.j) = std::max(cell.flow, 0.0);
  }
  return plan;
}

}  // namespace gw
