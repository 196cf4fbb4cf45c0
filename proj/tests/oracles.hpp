#pragma once

// Independent reference implementations used to derive expected values.
// Everything here is deliberately written by the most direct route available
// (loops, enumeration, exhaustive search) and stays independent of the
// library code paths it checks.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "gw/rng.hpp"
#include "gw/types.hpp"

namespace oracles {

using gw::Matrix;
using gw::Vector;

// --- random instances -------------------------------------------------------

inline Matrix random_symmetric(Eigen::Index n, gw::Rng& rng, double scale = 1.0) {
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      a(i, j) = a(j, i) = scale * rng.uniform01();
    }
  }
  return a;
}

inline Vector random_prob(Eigen::Index n, gw::Rng& rng) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 0.2 + rng.uniform01();
  v /= v.sum();
  return v;
}

inline Matrix random_positive_matrix(Eigen::Index n, Eigen::Index m,
                                     gw::Rng& rng) {
  Matrix a(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = 0.1 + rng.uniform01();
  }
  return a;
}

// --- GW objective and gradient ----------------------------------------------

// Sum over all index quadruples of D_X[i,i'] D_Y[j,j'] pi[i,j] pi'[i',j'].
inline double quadruple_loop_bilinear(const Matrix& d_x, const Matrix& d_y,
                                      const Matrix& pi, const Matrix& w) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < pi.rows(); ++i) {
    for (Eigen::Index ip = 0; ip < pi.rows(); ++ip) {
      for (Eigen::Index j = 0; j < pi.cols(); ++j) {
        for (Eigen::Index jp = 0; jp < pi.cols(); ++jp) {
          total += d_x(i, ip) * d_y(j, jp) * pi(i, j) * w(ip, jp);
        }
      }
    }
  }
  return -total;
}

inline double quadruple_loop_objective(const Matrix& d_x, const Matrix& d_y,
                                       const Matrix& pi) {
  return quadruple_loop_bilinear(d_x, d_y, pi, pi);
}

// Central finite differences of a scalar function of the coupling.
template <typename F>
Matrix finite_difference_gradient(const F& f, const Matrix& pi,
                                  double h = 1e-6) {
  Matrix grad(pi.rows(), pi.cols());
  Matrix probe = pi;
  for (Eigen::Index j = 0; j < pi.cols(); ++j) {
    for (Eigen::Index i = 0; i < pi.rows(); ++i) {
      probe(i, j) = pi(i, j) + h;
      const double up = f(probe);
      probe(i, j) = pi(i, j) - h;
      const double down = f(probe);
      probe(i, j) = pi(i, j);
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

// --- exact OT over uniform square marginals ---------------------------------

// Minimum of <cost, P/n> over all permutation matrices P (Birkhoff vertices).
inline double permutation_ot_value(const Matrix& cost) {
  const Eigen::Index n = cost.rows();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double value = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) value += cost(i, perm[i]);
    best = std::min(best, value / static_cast<double>(n));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// --- Euclidean projection onto the transport polytope -----------------------

// Exhaustive active-set search: for every subset of entries pinned to zero,
// solve the equality-constrained least-squares projection and keep the best
// feasible candidate. Exponential; intended for nm <= ~12.
inline Matrix brute_force_polytope_projection(const Matrix& pi, const Vector& mu,
                                              const Vector& nu) {
  const Eigen::Index n = pi.rows(), m = pi.cols(), nm = n * m;
  Matrix best;
  double best_dist = std::numeric_limits<double>::infinity();

  for (unsigned mask = 0; mask < (1u << nm); ++mask) {
    std::vector<Eigen::Index> free_cells;
    for (Eigen::Index c = 0; c < nm; ++c) {
      if (!(mask & (1u << c))) free_cells.push_back(c);
    }
    const Eigen::Index f = static_cast<Eigen::Index>(free_cells.size());
    if (f == 0) continue;

    // Equality constraints on the free cells: row sums and column sums.
    Matrix a = Matrix::Zero(n + m, f);
    Vector b(n + m);
    b.head(n) = mu;
    b.tail(m) = nu;
    Vector target(f);
    for (Eigen::Index c = 0; c < f; ++c) {
      const Eigen::Index i = free_cells[c] / m;
      const Eigen::Index j = free_cells[c] % m;
      a(i, c) = 1.0;
      a(n + j, c) = 1.0;
      target(c) = pi(i, j);
    }

    // Projection onto {x : a x = b}: x = target + a^T lambda with
    // (a a^T) lambda = b - a target, solved in the least-squares sense.
    const Vector rhs = b - a * target;
    const Vector lambda =
        (a * a.transpose()).completeOrthogonalDecomposition().solve(rhs);
    const Vector x = target + a.transpose() * lambda;

    if ((a * x - b).cwiseAbs().maxCoeff() > 1e-9) continue;  // inconsistent
    if ((x.array() < -1e-9).any()) continue;                 // infeasible

    Matrix candidate = Matrix::Zero(n, m);
    double dist = 0.0;
    for (Eigen::Index c = 0; c < f; ++c) {
      candidate(free_cells[c] / m, free_cells[c] % m) = std::max(x(c), 0.0);
    }
    dist = (candidate - pi).squaredNorm();
    // Pinned cells contribute (0 - pi)^2, already included via candidate = 0.
    if (dist < best_dist) {
      best_dist = dist;
      best = candidate;
    }
  }
  return best;
}

// Grid search over the 1-simplex scaled by s (two-dimensional case only).
inline Vector grid_simplex_projection(const Vector& v, double s,
                                      int steps = 2000001) {
  Vector best(2);
  double best_dist = std::numeric_limits<double>::infinity();
  for (int t = 0; t < steps; ++t) {
    const double x = s * static_cast<double>(t) / (steps - 1);
    const double dx = v(0) - x, dy = v(1) - (s - x);
    const double dist = dx * dx + dy * dy;
    if (dist < best_dist) {
      best_dist = dist;
      best << x, s - x;
    }
  }
  return best;
}

// --- spectral norm -----------------------------------------------------------

// Cyclic Jacobi eigensolver for symmetric matrices; returns max |eigenvalue|.
inline double jacobi_spectral_norm(Matrix a) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (std::sqrt(off) < 1e-14) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double phi = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
        Matrix g = Matrix::Identity(n, n);
        g(p, p) = g(q, q) = std::cos(phi);
        g(p, q) = std::sin(phi);
        g(q, p) = -std::sin(phi);
        a = (g.transpose() * a * g).eval();
      }
    }
  }
  return a.diagonal().cwiseAbs().maxCoeff();
}

// --- Sinkhorn fixed point ----------------------------------------------------

// Plain alternating scaling, run for a fixed (large) number of sweeps.
inline Matrix over_iterated_sinkhorn(Matrix k, const Vector& mu,
                                     const Vector& nu, long sweeps) {
  for (long s = 0; s < sweeps; ++s) {
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      k.row(i) *= mu(i) / k.row(i).sum();
    }
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      k.col(j) *= nu(j) / k.col(j).sum();
    }
  }
  return k;
}

// --- adjusted mutual information ---------------------------------------------

struct LabelCounts {
  std::vector<long> a_sizes;
  std::vector<long> b_sizes;
  std::vector<std::vector<long>> joint;
  long n = 0;
};

inline LabelCounts count_labels(const std::vector<int>& a,
                                const std::vector<int>& b) {
  std::map<int, int> amap, bmap;
  for (int v : a) amap.emplace(v, 0);
  for (int v : b) bmap.emplace(v, 0);
  int idx = 0;
  for (auto& kv : amap) kv.second = idx++;
  idx = 0;
  for (auto& kv : bmap) kv.second = idx++;
  LabelCounts c;
  c.n = static_cast<long>(a.size());
  c.a_sizes.assign(amap.size(), 0);
  c.b_sizes.assign(bmap.size(), 0);
  c.joint.assign(amap.size(), std::vector<long>(bmap.size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++c.a_sizes[amap[a[i]]];
    ++c.b_sizes[bmap[b[i]]];
    ++c.joint[amap[a[i]]][bmap[b[i]]];
  }
  return c;
}

inline long double mutual_information_counts(const LabelCounts& c) {
  long double mi = 0.0L;
  for (std::size_t i = 0; i < c.a_sizes.size(); ++i) {
    for (std::size_t j = 0; j < c.b_sizes.size(); ++j) {
      const long nij = c.joint[i][j];
      if (nij > 0) {
        const long double p = static_cast<long double>(nij) / c.n;
        mi += p * std::log(static_cast<long double>(c.n) * nij /
                           (static_cast<long double>(c.a_sizes[i]) *
                            static_cast<long double>(c.b_sizes[j])));
      }
    }
  }
  return mi;
}

// Expected MI under the fixed-marginals permutation model, evaluated with an
// exact factorial table (n <= 20 keeps every factorial product finite in
// long double).
inline long double brute_force_expected_mi(const std::vector<long>& a_sizes,
                                           const std::vector<long>& b_sizes,
                                           long n) {
  std::vector<long double> fact(static_cast<std::size_t>(n) + 1, 1.0L);
  for (long i = 1; i <= n; ++i) {
    fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i - 1)] * i;
  }
  long double emi = 0.0L;
  for (long ai : a_sizes) {
    for (long bj : b_sizes) {
      const long lo = std::max(1L, ai + bj - n);
      const long hi = std::min(ai, bj);
      for (long nij = lo; nij <= hi; ++nij) {
        const long double prob =
            (fact[ai] * fact[bj] * fact[n - ai] * fact[n - bj]) /
            (fact[n] * fact[nij] * fact[ai - nij] * fact[bj - nij] *
             fact[n - ai - bj + nij]);
        const long double info =
            (static_cast<long double>(nij) / n) *
            std::log(static_cast<long double>(n) * nij /
                     (static_cast<long double>(ai) * static_cast<long double>(bj)));
        emi += info * prob;
      }
    }
  }
  return emi;
}

inline double brute_force_ami(const std::vector<int>& a,
                              const std::vector<int>& b) {
  const LabelCounts c = count_labels(a, b);
  const long double mi = mutual_information_counts(c);
  long double h_a = 0.0L, h_b = 0.0L;
  for (long s : c.a_sizes) {
    if (s > 0) {
      const long double p = static_cast<long double>(s) / c.n;
      h_a -= p * std::log(p);
    }
  }
  for (long s : c.b_sizes) {
    if (s > 0) {
      const long double p = static_cast<long double>(s) / c.n;
      h_b -= p * std::log(p);
    }
  }
  const long double emi = brute_force_expected_mi(c.a_sizes, c.b_sizes, c.n);
  const long double denom = 0.5L * (h_a + h_b) - emi;
  if (denom <= 1e-15L) return 0.0;
  return static_cast<double>((mi - emi) / denom);
}

// E[MI] by literally averaging MI over every permutation of one labeling;
// only usable for tiny n, and used to validate the hypergeometric sum itself.
inline long double permutation_enumeration_expected_mi(
    const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> order(a.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> permuted(b.size());
  long double total = 0.0L;
  long count = 0;
  std::vector<int> sorted = order;
  do {
    for (std::size_t i = 0; i < b.size(); ++i) permuted[i] = b[sorted[i]];
    total += mutual_information_counts(count_labels(a, permuted));
    ++count;
  } while (std::next_permutation(sorted.begin(), sorted.end()));
  return total / count;
}

}  // namespace oracles
