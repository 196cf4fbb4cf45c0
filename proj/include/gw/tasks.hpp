#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "gw/types.hpp"

namespace gw {

struct AlignmentInstance {
  Graph source;
  Graph target;
  std::vector<int> ground_truth;  // source node i -> target node index
};

struct PartitionInstance {
  Graph graph;
  int k = 0;
  std::vector<int> ground_truth_labels;  // values in [0, k)
};

struct PointCloud2D {
  std::vector<std::array<double, 2>> points;
};

enum class Shape2D { Cross, Ring, Blob };
Shape2D parse_shape(const std::string& name);  // throws ConfigError

// Preferential-attachment graph: clique on m_attach + 1 seed nodes, then each
// new node attaches to m_attach existing nodes sampled proportionally to
// degree without replacement. Deterministic given seed.
Graph gen_barabasi_albert(int n, int m_attach, std::uint64_t seed);

// Planted-partition graph with Gaussian cluster sizes around n/k
// (std n/(4k), clipped >= 1, adjusted to sum to n); intra-cluster edge
// probability p_in, inter-cluster p_out.
PartitionInstance gen_gaussian_partition(int n, int k, double p_in, double p_out,
                                         std::uint64_t seed);

// Adds floor(q% |V|) fresh nodes, then floor(q% |E|) edges sampled uniformly
// among absent pairs over the enlarged node set. Original indices (and hence
// the identity ground truth) are preserved.
Graph add_noise(const Graph& g, double q_percent, std::uint64_t seed);

// Uniformly random node relabeling; second element maps old index -> new.
std::pair<Graph, std::vector<int>> permute_graph(const Graph& g,
                                                 std::uint64_t seed);

// Source graph vs its noised-then-permuted copy, ground truth attached.
AlignmentInstance make_alignment_instance(const Graph& source, double q_percent,
                                          std::uint64_t seed);

// 0/1 adjacency matrix with zero diagonal, used as the structure matrix.
DistanceMatrix adjacency_distance(const Graph& g);

DistanceMatrix euclidean_distance_matrix(const PointCloud2D& p);

// Per-row argmax; ties broken toward the lowest column index.
std::vector<int> hard_assignment(const Matrix& pi);

// |S_gt ∩ S_pred| / |S_gt| * 100.
double alignment_accuracy(const std::vector<int>& pred,
                          const std::vector<int>& gt);

// Target structure for partitioning into k clusters: k isolated self-connected
// super nodes (the k x k identity) with uniform mass.
std::pair<DistanceMatrix, ProbabilityVector> partition_target(int k);

std::vector<int> partition_assign(const Matrix& pi);

// Adjusted mutual information under the permutation (hypergeometric) model,
// natural logs, arithmetic-mean normalization; 0 when the denominator
// degenerates.
double ami_score(const std::vector<int>& labels_a,
                 const std::vector<int>& labels_b);

PointCloud2D sample_2d_shape(int n, Shape2D shape, std::uint64_t seed);
PointCloud2D rotate_2d(const PointCloud2D& p, double theta);

}  // namespace gw
