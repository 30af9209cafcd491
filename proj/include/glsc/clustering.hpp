#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "glsc/embedding_store.hpp"

namespace glsc {

inline constexpr int kNoise = -1;

/// Cluster id per segment, aligned with the segment order of the store it
/// was computed from (ascending segment_id). kNoise marks noise points.
struct ClusterAssignment {
  std::vector<std::string> segment_ids;
  std::vector<int> labels;

  int cluster_count() const;
  std::size_t noise_count() const;
  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

/// Sorts by segment_id and renumbers clusters 0..K-1 by first member.
ClusterAssignment canonicalize(ClusterAssignment assignment);

/// `segment_id<TAB>cluster_id` lines sorted by segment_id; noise as NOISE.
std::string render_assignment(const ClusterAssignment& assignment);

enum class Metric { kCosineDistance, kEuclidean };

double point_distance(const EmbeddingStore& store, std::size_t a, std::size_t b, Metric metric);

/// Distance from each point to its k-th nearest other point (self excluded).
/// k = 0 yields all zeros. Throws kTooFewPoints when k >= point count.
std::vector<double> core_distances(const EmbeddingStore& store, std::size_t k, Metric metric,
                                   unsigned threads = 1);

/// max(core[a], core[b], d(a, b)).
double mutual_reachability(const EmbeddingStore& store, std::size_t a, std::size_t b,
                           std::span<const double> core, Metric metric);

struct WeightedEdge {
  std::size_t a = 0;  // a < b
  std::size_t b = 0;
  double weight = 0.0;
};

/// Minimum spanning tree of the complete mutual-reachability graph (Prim, O(n^2)
/// memory-free). Edges are totally ordered by (weight, a, b), which makes the
/// tree unique. Returned sorted by that order.
std::vector<WeightedEdge> mutual_reachability_mst(const EmbeddingStore& store,
                                                  std::span<const double> core, Metric metric);

struct HdbscanParams {
  std::size_t min_cluster_size = 5;
  // Neighbourhood size counting the point itself, so the core distance is the
  // distance to the (min_samples - 1)-th other point.
  std::size_t min_samples = 5;
  Metric metric = Metric::kCosineDistance;
};

struct CondensedEntry {
  std::size_t parent = 0;    // cluster id (root = 0)
  std::size_t child = 0;     // point index, or cluster id when child_is_cluster
  double lambda = 0.0;
  std::size_t child_size = 0;
  bool child_is_cluster = false;
};

struct HdbscanResult {
  ClusterAssignment assignment;
  std::vector<CondensedEntry> condensed_tree;
  std::vector<double> stability;  // per condensed-tree cluster
  std::vector<bool> selected;     // per condensed-tree cluster
};

/// HDBSCAN*: mutual-reachability MST, single-linkage hierarchy, condensed tree
/// pruned at min_cluster_size, excess-of-mass selection. Unselected points are
/// noise. A set whose points are all at zero mutual-reachability distance is
/// one cluster.
HdbscanResult hdbscan_detailed(const EmbeddingStore& store, const HdbscanParams& params,
                               unsigned threads = 1);
ClusterAssignment hdbscan(const EmbeddingStore& store, const HdbscanParams& params,
                          unsigned threads = 1);

struct KmeansParams {
  std::size_t k = 8;
  std::size_t max_iters = 300;
  std::uint64_t seed = 0;
  double tol = 1e-6;
};

struct KmeansResult {
  ClusterAssignment assignment;
  std::vector<std::vector<double>> centroids;  // indexed by pre-canonical cluster slot
  std::vector<int> slot_of_point;              // pre-canonical cluster slot per point
  std::vector<double> inertia_trace;           // after each Lloyd iteration
  std::size_t iterations = 0;
  bool converged = false;
};

/// k-means++ seeding then Lloyd iterations in Euclidean space. Stops when no
/// assignment changes, the largest centroid shift drops below tol, or after
/// max_iters. Empty clusters take the point farthest from its centroid.
/// Throws kKTooLarge when k exceeds the point count (or k == 0).
KmeansResult kmeans_detailed(const EmbeddingStore& store, const KmeansParams& params,
                             unsigned threads = 1);
ClusterAssignment kmeans(const EmbeddingStore& store, const KmeansParams& params,
                         unsigned threads = 1);

struct MergeResult {
  ClusterAssignment assignment;
  std::size_t merges = 0;
};

/// Greedy best-pair-first merge: while some pair of clusters has centroid
/// cosine similarity strictly above threshold, merge the most similar pair
/// (ties by smaller id pair) and recompute its centroid. Noise is untouched.
MergeResult merge_clusters(const ClusterAssignment& assignment, const EmbeddingStore& store,
                           double threshold);

/// Adjusted Rand index between two labelings of the same points. kNoise is
/// treated as an ordinary label.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace glsc
