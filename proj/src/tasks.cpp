#include "gw/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>

#include "gw/rng.hpp"

namespace gw {

Shape2D parse_shape(const std::string& name) {
  if (name == "cross") return Shape2D::Cross;
  if (name == "ring") return Shape2D::Ring;
  if (name == "blob") return Shape2D::Blob;
  throw ConfigError("unknown shape '" + name + "' (expected cross|ring|blob)");
}

Graph gen_barabasi_albert(int n, int m_attach, std::uint64_t seed) {
  if (m_attach < 1 || m_attach >= n) {
    throw ConfigError("gen_barabasi_albert requires 1 <= m_attach < n");
  }
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  std::vector<double> degree(n, 0.0);

  // Seed clique on the first m_attach + 1 nodes.
  for (int a = 0; a <= m_attach; ++a) {
    for (int b = a + 1; b <= m_attach; ++b) {
      edges.emplace_back(a, b);
      degree[a] += 1.0;
      degree[b] += 1.0;
    }
  }

  std::vector<double> weight(n, 0.0);
  for (int v = m_attach + 1; v < n; ++v) {
    std::copy(degree.begin(), degree.begin() + v, weight.begin());
    double total = std::accumulate(weight.begin(), weight.begin() + v, 0.0);
    for (int pick = 0; pick < m_attach; ++pick) {
      double r = rng.uniform01() * total;
      int chosen = 0;
      for (int u = 0; u < v; ++u) {
        r -= weight[u];
        if (r < 0.0) {
          chosen = u;
          break;
        }
        chosen = u;  // numerical slack: fall through to the last candidate
      }
      edges.emplace_back(chosen, v);
      total -= weight[chosen];
      weight[chosen] = 0.0;  // without replacement
    }
    for (int pick = static_cast<int>(edges.size()) - m_attach;
         pick < static_cast<int>(edges.size()); ++pick) {
      degree[edges[pick].first] += 1.0;
      degree[edges[pick].second] += 1.0;
    }
  }
  return Graph(n, std::move(edges));
}

PartitionInstance gen_gaussian_partition(int n, int k, double p_in, double p_out,
                                         std::uint64_t seed) {
  if (n < 1 || k < 1 || k > n) {
    throw ConfigError("gen_gaussian_partition requires 1 <= k <= n");
  }
  if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0)) {
    throw ConfigError("gen_gaussian_partition requires 0 <= p_out < p_in <= 1");
  }
  Rng rng(seed);

  // Cluster sizes around n/k with std n/(4k), clipped to >= 1, then adjusted
  // deterministically until they sum to n.
  const double mean = static_cast<double>(n) / k;
  const double stddev = mean / 4.0;
  std::vector<long> sizes(k);
  for (int c = 0; c < k; ++c) {
    sizes[c] = std::max<long>(1, std::llround(mean + stddev * rng.normal()));
  }
  long total = std::accumulate(sizes.begin(), sizes.end(), 0L);
  while (total > n) {
    auto it = std::max_element(sizes.begin(), sizes.end());
    if (*it <= 1) break;
    --*it;
    --total;
  }
  while (total < n) {
    auto it = std::min_element(sizes.begin(), sizes.end());
    ++*it;
    ++total;
  }

  std::vector<int> labels(n);
  int next = 0;
  for (int c = 0; c < k; ++c) {
    for (long s = 0; s < sizes[c]; ++s) labels[next++] = c;
  }

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = labels[i] == labels[j] ? p_in : p_out;
      if (rng.uniform01() < p) edges.emplace_back(i, j);
    }
  }
  return PartitionInstance{Graph(n, std::move(edges)), k, std::move(labels)};
}

Graph add_noise(const Graph& g, double q_percent, std::uint64_t seed) {
  if (q_percent < 0.0) throw ConfigError("noise percentage must be >= 0");
  Rng rng(seed);
  const int old_nodes = static_cast<int>(g.num_nodes());
  const int extra_nodes =
      static_cast<int>(std::floor(q_percent / 100.0 * old_nodes));
  const int extra_edges = static_cast<int>(
      std::floor(q_percent / 100.0 * static_cast<double>(g.edges().size())));
  const int nodes = old_nodes + extra_nodes;

  std::set<std::pair<int, int>> present(g.edges().begin(), g.edges().end());
  std::vector<std::pair<int, int>> absent;
  for (int i = 0; i < nodes; ++i) {
    for (int j = i + 1; j < nodes; ++j) {
      if (!present.count({i, j})) absent.emplace_back(i, j);
    }
  }
  std::vector<std::pair<int, int>> edges(g.edges());
  const int to_add = std::min<int>(extra_edges, static_cast<int>(absent.size()));
  for (int t = 0; t < to_add; ++t) {
    const std::size_t pick = t + rng.below(absent.size() - t);
    std::swap(absent[t], absent[pick]);
    edges.push_back(absent[t]);
  }
  return Graph(nodes, std::move(edges));
}

std::pair<Graph, std::vector<int>> permute_graph(const Graph& g,
                                                 std::uint64_t seed) {
  Rng rng(seed);
  const int n = static_cast<int>(g.num_nodes());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(g.edges().size());
  for (auto [a, b] : g.edges()) edges.emplace_back(perm[a], perm[b]);
  return {Graph(n, std::move(edges)), std::move(perm)};
}

AlignmentInstance make_alignment_instance(const Graph& source, double q_percent,
                                          std::uint64_t seed) {
  const Graph noisy = add_noise(source, q_percent, seed * 2654435761u + 1);
  auto [target, perm] = permute_graph(noisy, seed * 2654435761u + 2);
  std::vector<int> ground_truth(source.num_nodes());
  for (Eigen::Index i = 0; i < source.num_nodes(); ++i) {
    ground_truth[i] = perm[i];
  }
  return AlignmentInstance{source, std::move(target), std::move(ground_truth)};
}

DistanceMatrix adjacency_distance(const Graph& g) {
  Matrix adj = Matrix::Zero(g.num_nodes(), g.num_nodes());
  for (auto [a, b] : g.edges()) {
    adj(a, b) = 1.0;
    adj(b, a) = 1.0;
  }
  return DistanceMatrix(std::move(adj));
}

DistanceMatrix euclidean_distance_matrix(const PointCloud2D& p) {
  const int n = static_cast<int>(p.points.size());
  Matrix d(n, n);
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double dx = p.points[i][0] - p.points[j][0];
      const double dy = p.points[i][1] - p.points[j][1];
      d(i, j) = d(j, i) = std::sqrt(dx * dx + dy * dy);
    }
  }
  return DistanceMatrix(std::move(d));
}

std::vector<int> hard_assignment(const Matrix& pi) {
  std::vector<int> assignment(pi.rows());
  for (Eigen::Index i = 0; i < pi.rows(); ++i) {
    int best = 0;
    for (Eigen::Index j = 1; j < pi.cols(); ++j) {
      if (pi(i, j) > pi(i, best)) best = static_cast<int>(j);
    }
    assignment[i] = best;
  }
  return assignment;
}

double alignment_accuracy(const std::vector<int>& pred,
                          const std::vector<int>& gt) {
  if (pred.size() < gt.size()) {
    throw DimensionMismatchError(
        "alignment_accuracy: prediction does not cover all ground-truth nodes");
  }
  if (gt.empty()) throw std::invalid_argument("empty ground truth");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (pred[i] == gt[i]) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(gt.size());
}

std::pair<DistanceMatrix, ProbabilityVector> partition_target(int k) {
  if (k < 1) throw ConfigError("partition_target requires k >= 1");
  return {DistanceMatrix(Matrix::Identity(k, k)), ProbabilityVector::uniform(k)};
}

std::vector<int> partition_assign(const Matrix& pi) { return hard_assignment(pi); }

namespace {

// Contingency counts with labels compacted to dense ranges.
struct Contingency {
  std::vector<std::vector<long>> counts;
  std::vector<long> row_sums;
  std::vector<long> col_sums;
  long total = 0;
};

Contingency contingency_table(const std::vector<int>& a,
                              const std::vector<int>& b) {
  std::map<int, int> amap, bmap;
  for (int v : a) amap.emplace(v, 0);
  for (int v : b) bmap.emplace(v, 0);
  int next = 0;
  for (auto& [_, idx] : amap) idx = next++;
  next = 0;
  for (auto& [_, idx] : bmap) idx = next++;

  Contingency t;
  t.counts.assign(amap.size(), std::vector<long>(bmap.size(), 0));
  t.row_sums.assign(amap.size(), 0);
  t.col_sums.assign(bmap.size(), 0);
  t.total = static_cast<long>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int r = amap[a[i]];
    const int c = bmap[b[i]];
    ++t.counts[r][c];
    ++t.row_sums[r];
    ++t.col_sums[c];
  }
  return t;
}

double entropy_of(const std::vector<long>& sums, long n) {
  double h = 0.0;
  for (long s : sums) {
    if (s > 0) {
      const double p = static_cast<double>(s) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

// Expected mutual information under the permutation model (fixed marginals,
// hypergeometric cell distribution), natural logs.
double expected_mutual_information(const Contingency& t) {
  const long n = t.total;
  const double log_n = std::log(static_cast<double>(n));
  double emi = 0.0;
  for (std::size_t i = 0; i < t.row_sums.size(); ++i) {
    const long ai = t.row_sums[i];
    for (std::size_t j = 0; j < t.col_sums.size(); ++j) {
      const long bj = t.col_sums[j];
      const long lo = std::max<long>(1, ai + bj - n);
      const long hi = std::min(ai, bj);
      for (long nij = lo; nij <= hi; ++nij) {
        const double log_term =
            std::lgamma(ai + 1.0) + std::lgamma(bj + 1.0) +
            std::lgamma(n - ai + 1.0) + std::lgamma(n - bj + 1.0) -
            std::lgamma(n + 1.0) - std::lgamma(nij + 1.0) -
            std::lgamma(ai - nij + 1.0) - std::lgamma(bj - nij + 1.0) -
            std::lgamma(n - ai - bj + nij + 1.0);
        const double mi_part =
            (static_cast<double>(nij) / n) *
            (log_n + std::log(static_cast<double>(nij)) -
             std::log(static_cast<double>(ai)) -
             std::log(static_cast<double>(bj)));
        emi += mi_part * std::exp(log_term);
      }
    }
  }
  return emi;
}

}  // namespace

double ami_score(const std::vector<int>& labels_a,
                 const std::vector<int>& labels_b) {
  if (labels_a.size() != labels_b.size()) {
    throw DimensionMismatchError("ami_score: label vectors differ in length");
  }
  if (labels_a.empty()) throw std::invalid_argument("ami_score: empty labels");

  const Contingency t = contingency_table(labels_a, labels_b);
  const long n = t.total;

  double mi = 0.0;
  for (std::size_t i = 0; i < t.row_sums.size(); ++i) {
    for (std::size_t j = 0; j < t.col_sums.size(); ++j) {
      const long nij = t.counts[i][j];
      if (nij > 0) {
        const double pij = static_cast<double>(nij) / n;
        mi += pij * std::log(static_cast<double>(n) * nij /
                             (static_cast<double>(t.row_sums[i]) *
                              static_cast<double>(t.col_sums[j])));
      }
    }
  }

  const double h_a = entropy_of(t.row_sums, n);
  const double h_b = entropy_of(t.col_sums, n);
  const double emi = expected_mutual_information(t);
  const double denom = 0.5 * (h_a + h_b) - emi;
  if (denom <= 1e-15) return 0.0;
  return (mi - emi) / denom;
}

PointCloud2D sample_2d_shape(int n, Shape2D shape, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample_2d_shape requires n >= 1");
  Rng rng(seed);
  PointCloud2D cloud;
  cloud.points.reserve(n);
  switch (shape) {
    case Shape2D::Cross: {
      // Two bars of unequal reach in every direction, so the union has no
      // rotational or mirror symmetry.
      const double h_x0 = -1.0, h_x1 = 1.6, h_y0 = -0.12, h_y1 = 0.12;
      const double v_x0 = 0.13, v_x1 = 0.37, v_y0 = -0.55, v_y1 = 1.25;
      const double area_h = (h_x1 - h_x0) * (h_y1 - h_y0);
      const double area_v = (v_x1 - v_x0) * (v_y1 - v_y0);
      for (int i = 0; i < n; ++i) {
        if (rng.uniform01() * (area_h + area_v) < area_h) {
          cloud.points.push_back(
              {rng.uniform(h_x0, h_x1), rng.uniform(h_y0, h_y1)});
        } else {
          cloud.points.push_back(
              {rng.uniform(v_x0, v_x1), rng.uniform(v_y0, v_y1)});
        }
      }
      break;
    }
    case Shape2D::Ring: {
      for (int i = 0; i < n; ++i) {
        const double r = std::sqrt(rng.uniform(0.64, 1.0));
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        cloud.points.push_back({r * std::cos(phi), r * std::sin(phi)});
      }
      break;
    }
    case Shape2D::Blob: {
      for (int i = 0; i < n; ++i) {
        cloud.points.push_back({rng.normal(), rng.normal()});
      }
      break;
    }
  }
  return cloud;
}

PointCloud2D rotate_2d(const PointCloud2D& p, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  PointCloud2D out;
  out.points.reserve(p.points.size());
  for (const auto& pt : p.points) {
    out.points.push_back({c * pt[0] - s * pt[1], s * pt[0] + c * pt[1]});
  }
  return out;
}

}  // namespace gw
