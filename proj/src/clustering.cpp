#include "glsc/clustering.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <tuple>
#include <unordered_map>

#include "glsc/error.hpp"
#include "glsc/random.hpp"
#include "glsc/parallel.hpp"
#include "glsc/simd/kernels.hpp"

namespace glsc {

namespace {

double inverse_norm(const EmbeddingStore& store, std::size_t i) {
  return 1.0 / std::sqrt(simd::dot(store.row(i), store.row(i), store.dim()));
}

// Symmetric in (a, b) bit for bit, and exactly zero for identical rows.
double cosine_distance(const EmbeddingStore& store, std::size_t a, std::size_t b, double inv_a, double inv_b) {
  const float* ra = store.row(a);
  const float* rb = store.row(b);
  if (a == b || std::equal(ra, ra + store.dim(), rb)) return 0.0;
  const double c = simd::dot(ra, rb, store.dim()) * (inv_a * inv_b);
  return 1.0 - std::clamp(c, -1.0, 1.0);
}

// Distance evaluator with per-point inverse norms cached for the cosine metric.
class DistanceFn {
 public:
  DistanceFn(const EmbeddingStore& store, Metric metric) : store_(store), metric_(metric) {
    if (metric_ == Metric::kCosineDistance) {
      inv_norm_.resize(store.size());
      for (std::size_t i = 0; i < store.size(); ++i) inv_norm_[i] = inverse_norm(store, i);
    }
  }

  double operator()(std::size_t a, std::size_t b) const {
    if (metric_ == Metric::kEuclidean) {
      return std::sqrt(simd::squared_l2(store_.row(a), store_.row(b), store_.dim()));
    }
    return cosine_distance(store_, a, b, inv_norm_[a], inv_norm_[b]);
  }

 private:
  const EmbeddingStore& store_;
  Metric metric_;
  std::vector<double> inv_norm_;
};

using EdgeKey = std::tuple<double, std::size_t, std::size_t>;

EdgeKey edge_key(double w, std::size_t u, std::size_t v) {
  return {w, std::min(u, v), std::max(u, v)};
}

struct LinkageRow {
  std::size_t left = 0;
  std::size_t right = 0;
  double distance = 0.0;
  std::size_t size = 0;
};

// Single-linkage merge sequence from MST edges sorted by (weight, a, b).
std::vector<LinkageRow> single_linkage(std::size_t n, const std::vector<WeightedEdge>& mst) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::vector<std::size_t> node_of_root(n);
  std::iota(node_of_root.begin(), node_of_root.end(), std::size_t{0});
  std::vector<std::size_t> size(n, 1);
  auto find = [&parent](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<LinkageRow> rows;
  rows.reserve(mst.size());
  for (const auto& e : mst) {
    const std::size_t ra = find(e.a);
    const std::size_t rb = find(e.b);
    LinkageRow row{node_of_root[ra], node_of_root[rb], e.weight, size[ra] + size[rb]};
    parent[rb] = ra;
    size[ra] = row.size;
    node_of_root[ra] = n + rows.size();
    rows.push_back(row);
  }
  return rows;
}

using rng::uniform01;
using rng::uniform_index;

}  // namespace

int ClusterAssignment::cluster_count() const {
  int max_label = -1;
  for (int l : labels) max_label = std::max(max_label, l);
  return max_label + 1;
}

std::size_t ClusterAssignment::noise_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
}

ClusterAssignment canonicalize(ClusterAssignment assignment) {
  std::vector<std::size_t> order(assignment.segment_ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return assignment.segment_ids[a] < assignment.segment_ids[b];
  });
  ClusterAssignment out;
  out.segment_ids.reserve(order.size());
  out.labels.reserve(order.size());
  std::unordered_map<int, int> relabel;
  for (std::size_t i : order) {
    out.segment_ids.push_back(std::move(assignment.segment_ids[i]));
    const int old = assignment.labels[i];
    if (old == kNoise) {
      out.labels.push_back(kNoise);
      continue;
    }
    auto [it, inserted] = relabel.try_emplace(old, static_cast<int>(relabel.size()));
    out.labels.push_back(it->second);
  }
  return out;
}

std::string render_assignment(const ClusterAssignment& assignment) {
  const auto canonical = canonicalize(assignment);
  std::string out;
  for (std::size_t i = 0; i < canonical.segment_ids.size(); ++i) {
    out += canonical.segment_ids[i];
    out += '\t';
    out += canonical.labels[i] == kNoise ? std::string("NOISE") : std::to_string(canonical.labels[i]);
    out += '\n';
  }
  return out;
}

double point_distance(const EmbeddingStore& store, std::size_t a, std::size_t b, Metric metric) {
  if (metric == Metric::kEuclidean) {
    return std::sqrt(simd::squared_l2(store.row(a), store.row(b), store.dim()));
  }
  return cosine_distance(store, a, b, inverse_norm(store, a), inverse_norm(store, b));
}

std::vector<double> core_distances(const EmbeddingStore& store, std::size_t k, Metric metric,
                                   unsigned threads) {
  const std::size_t n = store.size();
  std::vector<double> core(n, 0.0);
  if (k == 0) return core;
  if (k >= n) {
    throw Error(ErrorCode::kTooFewPoints,
                fmt::format("core distance needs k < point count (k={}, n={})", k, n));
  }
  const DistanceFn dist(store, metric);
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<double> row;
    row.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row.push_back(dist(i, j));
    }
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k - 1), row.end());
    core[i] = row[k - 1];
  });
  return core;
}

double mutual_reachability(const EmbeddingStore& store, std::size_t a, std::size_t b,
                           std::span<const double> core, Metric metric) {
  return std::max({core[a], core[b], point_distance(store, a, b, metric)});
}

std::vector<WeightedEdge> mutual_reachability_mst(const EmbeddingStore& store,
                                                  std::span<const double> core, Metric metric) {
  const std::size_t n = store.size();
  std::vector<WeightedEdge> edges;
  if (n < 2) return edges;
  const DistanceFn dist(store, metric);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<bool> in_tree(n, false);
  std::vector<EdgeKey> best(n, EdgeKey{kInf, 0, 0});

  std::size_t current = 0;
  in_tree[0] = true;
  edges.reserve(n - 1);
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const double w = std::max({core[current], core[v], dist(current, v)});
      const EdgeKey key = edge_key(w, current, v);
      if (key < best[v]) best[v] = key;
      if (next == n || best[v] < best[next]) next = v;
    }
    const auto& [w, a, b] = best[next];
    edges.push_back({a, b, w});
    in_tree[next] = true;
    current = next;
  }
  std::sort(edges.begin(), edges.end(), [](const WeightedEdge& x, const WeightedEdge& y) {
    return std::tie(x.weight, x.a, x.b) < std::tie(y.weight, y.a, y.b);
  });
  return edges;
}

HdbscanResult hdbscan_detailed(const EmbeddingStore& store, const HdbscanParams& params,
                               unsigned threads) {
  if (params.min_cluster_size < 2 || params.min_samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_cluster_size must be >= 2 and min_samples >= 1");
  }
  const std::size_t n = store.size();
  if (n < params.min_cluster_size || n < params.min_samples) {
    throw Error(ErrorCode::kTooFewPoints,
                fmt::format("hdbscan needs at least {} points, got {}",
                            std::max(params.min_cluster_size, params.min_samples), n));
  }

  HdbscanResult result;
  result.assignment.segment_ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) result.assignment.segment_ids.push_back(store.segment_id(i));

  const auto core = core_distances(store, params.min_samples - 1, params.metric, threads);
  const auto mst = mutual_reachability_mst(store, core, params.metric);

  double min_positive = std::numeric_limits<double>::infinity();
  for (const auto& e : mst) {
    if (e.weight > 0.0) min_positive = std::min(min_positive, e.weight);
  }
  if (!std::isfinite(min_positive)) {
    // Every point coincides: one cluster, nothing to condense.
    result.assignment.labels.assign(n, 0);
    result.stability = {0.0};
    result.selected = {true};
    return result;
  }
  // Zero-distance merges sit above every finite density level.
  const double lambda_inf = 2.0 / min_positive;
  auto lambda_of = [lambda_inf](double d) { return d > 0.0 ? 1.0 / d : lambda_inf; };

  const auto linkage = single_linkage(n, mst);
  auto node_size = [&](std::size_t node) { return node < n ? std::size_t{1} : linkage[node - n].size; };
  auto emit_points = [&](std::size_t node, std::size_t cluster, double lambda) {
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      if (x < n) {
        result.condensed_tree.push_back({cluster, x, lambda, 1, false});
      } else {
        stack.push_back(linkage[x - n].right);
        stack.push_back(linkage[x - n].left);
      }
    }
  };

  // Condense top-down. Cluster 0 is the root.
  const std::size_t mcs = params.min_cluster_size;
  std::vector<double> birth{0.0};
  std::vector<std::size_t> cluster_parent{0};
  std::vector<std::size_t> cluster_of_node(2 * n - 1, 0);
  std::vector<std::size_t> queue{2 * n - 2};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const std::size_t node = queue[qi];
    if (node < n) continue;
    const auto& row = linkage[node - n];
    const double lambda = lambda_of(row.distance);
    const std::size_t cluster = cluster_of_node[node];
    const bool left_big = node_size(row.left) >= mcs;
    const bool right_big = node_size(row.right) >= mcs;
    if (left_big && right_big) {
      for (std::size_t child : {row.left, row.right}) {
        const std::size_t id = birth.size();
        birth.push_back(lambda);
        cluster_parent.push_back(cluster);
        result.condensed_tree.push_back({cluster, id, lambda, node_size(child), true});
        cluster_of_node[child] = id;
        queue.push_back(child);
      }
    } else if (!left_big && !right_big) {
      emit_points(row.left, cluster, lambda);
      emit_points(row.right, cluster, lambda);
    } else {
      const std::size_t big = left_big ? row.left : row.right;
      const std::size_t small = left_big ? row.right : row.left;
      emit_points(small, cluster, lambda);
      cluster_of_node[big] = cluster;
      queue.push_back(big);
    }
  }

  const std::size_t clusters = birth.size();
  result.stability.assign(clusters, 0.0);
  std::vector<std::vector<std::size_t>> children(clusters);
  for (const auto& e : result.condensed_tree) {
    result.stability[e.parent] += (e.lambda - birth[e.parent]) * static_cast<double>(e.child_size);
    if (e.child_is_cluster) children[e.parent].push_back(e.child);
  }

  // Excess of mass; children always have larger ids than their parent.
  result.selected.assign(clusters, false);
  std::vector<double> subtree = result.stability;
  for (std::size_t c = clusters; c-- > 1;) {
    double child_sum = 0.0;
    for (std::size_t ch : children[c]) child_sum += subtree[ch];
    if (child_sum > subtree[c]) {
      subtree[c] = child_sum;
    } else {
      result.selected[c] = true;
      std::vector<std::size_t> stack(children[c]);
      while (!stack.empty()) {
        const std::size_t d = stack.back();
        stack.pop_back();
        result.selected[d] = false;
        stack.insert(stack.end(), children[d].begin(), children[d].end());
      }
    }
  }

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> selected_ancestor(clusters, kNone);
  for (std::size_t c = 1; c < clusters; ++c) {
    selected_ancestor[c] = result.selected[c] ? c : selected_ancestor[cluster_parent[c]];
  }
  result.assignment.labels.assign(n, kNoise);
  for (const auto& e : result.condensed_tree) {
    if (e.child_is_cluster) continue;
    const std::size_t owner = selected_ancestor[e.parent];
    if (owner != kNone) result.assignment.labels[e.child] = static_cast<int>(owner);
  }
  result.assignment = canonicalize(std::move(result.assignment));
  return result;
}

ClusterAssignment hdbscan(const EmbeddingStore& store, const HdbscanParams& params,
                          unsigned threads) {
  return hdbscan_detailed(store, params, threads).assignment;
}

KmeansResult kmeans_detailed(const EmbeddingStore& store, const KmeansParams& params,
                             unsigned threads) {
  const std::size_t n = store.size();
  const std::size_t k = params.k;
  const std::size_t d = store.dim();
  if (k == 0 || k > n) {
    throw Error(ErrorCode::kKTooLarge, fmt::format("k={} invalid for {} points", k, n));
  }
  auto point_to = [&](std::size_t i, const std::vector<double>& c) {
    return simd::squared_l2_mixed(store.row(i), c.data(), d);
  };
  auto as_centroid = [&](std::size_t i) {
    const auto v = store.vector(i);
    return std::vector<double>(v.begin(), v.end());
  };

  // k-means++ seeding.
  std::mt19937_64 rng(params.seed);
  KmeansResult result;
  std::vector<bool> chosen(n, false);
  std::vector<std::size_t> seeds{uniform_index(rng, n)};
  chosen[seeds[0]] = true;
  std::vector<double> nearest_sq(n, std::numeric_limits<double>::infinity());
  while (seeds.size() < k) {
    const std::size_t last = seeds.back();
    for (std::size_t i = 0; i < n; ++i) {
      nearest_sq[i] = std::min(nearest_sq[i], simd::squared_l2(store.row(i), store.row(last), d));
    }
    double total = 0.0;
    for (double x : nearest_sq) total += x;
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double cumulative = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (nearest_sq[i] <= 0.0) continue;
        cumulative += nearest_sq[i];
        pick = i;
        if (cumulative > target) break;
      }
    } else {
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
    }
    chosen[pick] = true;
    seeds.push_back(pick);
  }
  for (std::size_t s : seeds) result.centroids.push_back(as_centroid(s));

  std::vector<int>& slot = result.slot_of_point;
  slot.assign(n, -1);
  auto assign_step = [&]() {
    std::vector<char> changed(n, 0);
    parallel_for(n, threads, [&](std::size_t i) {
      int best = 0;
      double best_sq = point_to(i, result.centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double sq = point_to(i, result.centroids[c]);
        if (sq < best_sq) {
          best_sq = sq;
          best = static_cast<int>(c);
        }
      }
      if (slot[i] != best) {
        slot[i] = best;
        changed[i] = 1;
      }
    });
    return std::count(changed.begin(), changed.end(), 1);
  };
  auto recompute_mean = [&](std::size_t c) {
    std::vector<double> sum(d, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (slot[i] != static_cast<int>(c)) continue;
      ++count;
      const float* row = store.row(i);
      for (std::size_t j = 0; j < d; ++j) sum[j] += row[j];
    }
    if (count > 0) {
      for (double& x : sum) x /= static_cast<double>(count);
      result.centroids[c] = std::move(sum);
    }
    return count;
  };

  for (std::size_t iter = 0; iter < params.max_iters; ++iter) {
    const auto changes = assign_step();
    if (iter > 0 && changes == 0) {
      result.converged = true;
      break;
    }
    const auto previous = result.centroids;
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t c = 0; c < k; ++c) sizes[c] = recompute_mean(c);
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      // Repair: steal the point farthest from its own centroid.
      std::size_t far = n;
      double far_sq = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto owner = static_cast<std::size_t>(slot[i]);
        if (sizes[owner] < 2) continue;
        const double sq = point_to(i, result.centroids[owner]);
        if (sq > far_sq) {
          far_sq = sq;
          far = i;
        }
      }
      const auto donor = static_cast<std::size_t>(slot[far]);
      slot[far] = static_cast<int>(c);
      result.centroids[c] = as_centroid(far);
      sizes[c] = 1;
      sizes[donor] = recompute_mean(donor);
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      double sq = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double delta = result.centroids[c][j] - previous[c][j];
        sq += delta * delta;
      }
      shift = std::max(shift, std::sqrt(sq));
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) inertia += point_to(i, result.centroids[static_cast<std::size_t>(slot[i])]);
    result.inertia_trace.push_back(inertia);
    result.iterations = iter + 1;
    if (shift < params.tol) {
      assign_step();
      result.converged = true;
      break;
    }
  }

  result.assignment.segment_ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) result.assignment.segment_ids.push_back(store.segment_id(i));
  result.assignment.labels = slot;
  result.assignment = canonicalize(std::move(result.assignment));
  return result;
}

ClusterAssignment kmeans(const EmbeddingStore& store, const KmeansParams& params, unsigned threads) {
  return kmeans_detailed(store, params, threads).assignment;
}

MergeResult merge_clusters(const ClusterAssignment& assignment, const EmbeddingStore& store,
                           double threshold) {
  MergeResult result;
  result.assignment = canonicalize(assignment);
  auto& labels = result.assignment.labels;
  const auto k = static_cast<std::size_t>(result.assignment.cluster_count());
  if (k < 2) return result;

  // Sum of unit vectors per cluster; its direction is the centroid.
  const std::size_t d = store.dim();
  std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kNoise) continue;
    const auto idx = store.find(result.assignment.segment_ids[i]);
    if (!idx) {
      throw Error(ErrorCode::kMissingEmbedding,
                  "no embedding for segment '" + result.assignment.segment_ids[i] + "'");
    }
    const auto v = store.vector(*idx);
    const double norm = std::sqrt(simd::dot(v.data(), v.data(), d));
    auto& sum = sums[static_cast<std::size_t>(labels[i])];
    for (std::size_t j = 0; j < d; ++j) sum[j] += static_cast<double>(v[j]) / norm;
  }

  std::vector<double> sim(k * k, 0.0);
  auto refresh = [&](std::size_t a, std::size_t b) {
    sim[a * k + b] = sim[b * k + a] = cosine_similarity(std::span<const double>(sums[a]),
                                                        std::span<const double>(sums[b]));
  };
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) refresh(a, b);
  }
  std::vector<bool> alive(k, true);
  std::vector<int> merged_into(k);
  std::iota(merged_into.begin(), merged_into.end(), 0);
  while (true) {
    std::size_t best_a = k;
    std::size_t best_b = k;
    double best = threshold;
    for (std::size_t a = 0; a < k; ++a) {
      if (!alive[a]) continue;
      for (std::size_t b = a + 1; b < k; ++b) {
        if (alive[b] && sim[a * k + b] > best) {
          best = sim[a * k + b];
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_a == k) break;
    for (std::size_t j = 0; j < d; ++j) sums[best_a][j] += sums[best_b][j];
    alive[best_b] = false;
    for (auto& m : merged_into) {
      if (m == static_cast<int>(best_b)) m = static_cast<int>(best_a);
    }
    ++result.merges;
    for (std::size_t c = 0; c < k; ++c) {
      if (alive[c] && c != best_a) refresh(std::min(c, best_a), std::max(c, best_a));
    }
  }
  for (int& l : labels) {
    if (l != kNoise) l = merged_into[static_cast<std::size_t>(l)];
  }
  result.assignment = canonicalize(std::move(result.assignment));
  return result;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kInvalidArgument, "labelings differ in length");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::map<std::pair<int, int>, std::int64_t> joint;
  std::map<int, std::int64_t> count_a;
  std::map<int, std::int64_t> count_b;
  for (std::size_t i = 0; i < n; ++i) {
    ++joint[{a[i], b[i]}];
    ++count_a[a[i]];
    ++count_b[b[i]];
  }
  auto pairs = [](std::int64_t m) { return static_cast<double>(m) * static_cast<double>(m - 1) / 2.0; };
  double index = 0.0;
  for (const auto& [key, m] : joint) index += pairs(m);
  double sum_a = 0.0;
  for (const auto& [key, m] : count_a) sum_a += pairs(m);
  double sum_b = 0.0;
  for (const auto& [key, m] : count_b) sum_b += pairs(m);
  const double expected = sum_a * sum_b / pairs(static_cast<std::int64_t>(n));
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return index == expected ? 1.0 : 0.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace glsc
