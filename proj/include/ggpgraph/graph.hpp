// Copyright 2026 The ggpgraph Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Graph value types: directed multigraph of counts, simple undirected graph
// with self-loops, bipartite graph, and the atomic measure that generated them.

#ifndef GGPGRAPH_GRAPH_HPP
#define GGPGRAPH_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ggpgraph/error.hpp"

namespace ggpgraph {

using NodeId = std::uint32_t;

struct DirectedEdge {
  NodeId from;
  NodeId to;
  std::uint64_t count;

  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

/// Counts n_ij >= 1 over ordered pairs; frozen, sorted by (from, to).
class DirectedMultigraph {
 public:
  DirectedMultigraph() = default;

  /// Aggregates (i, j) pairs with repetition. Node ids must be contiguous:
  /// every id below n_nodes has to appear in some pair.
  DirectedMultigraph(std::size_t n_nodes, std::span<const std::pair<NodeId, NodeId>> pairs)
      : n_nodes_(n_nodes) {
    std::unordered_map<std::uint64_t, std::uint64_t> acc;
    acc.reserve(pairs.size());
    for (const auto& [i, j] : pairs) ++acc[key(i, j)];
    freeze(acc);
  }

  DirectedMultigraph(std::size_t n_nodes, std::vector<DirectedEdge> edges) : n_nodes_(n_nodes) {
    std::unordered_map<std::uint64_t, std::uint64_t> acc;
    for (const auto& e : edges) {
      if (e.count == 0) continue;
      acc[key(e.from, e.to)] += e.count;
    }
    freeze(acc);
  }

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::uint64_t total_edges() const noexcept { return total_; }
  const std::vector<DirectedEdge>& edges() const noexcept { return edges_; }

  std::uint64_t count(NodeId i, NodeId j) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair{i, j},
                               [](const DirectedEdge& e, const std::pair<NodeId, NodeId>& k) {
                                 return std::pair{e.from, e.to} < k;
                               });
    if (it != edges_.end() && it->from == i && it->to == j) return it->count;
    return 0;
  }

 private:
  static std::uint64_t key(NodeId i, NodeId j) { return (std::uint64_t{i} << 32) | j; }

  void freeze(const std::unordered_map<std::uint64_t, std::uint64_t>& acc) {
    edges_.reserve(acc.size());
    std::vector<bool> seen(n_nodes_, false);
    for (const auto& [k, c] : acc) {
      const auto i = static_cast<NodeId>(k >> 32);
      const auto j = static_cast<NodeId>(k & 0xffffffffu);
      if (i >= n_nodes_ || j >= n_nodes_) throw domain_error("directed multigraph: node id out of range");
      seen[i] = seen[j] = true;
      edges_.push_back({i, j, c});
      total_ += c;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw domain_error("directed multigraph: node ids are not contiguous");
    }
    std::sort(edges_.begin(), edges_.end(), [](const DirectedEdge& a, const DirectedEdge& b) {
      return std::pair{a.from, a.to} < std::pair{b.from, b.to};
    });
  }

  std::size_t n_nodes_ = 0;
  std::uint64_t total_ = 0;
  std::vector<DirectedEdge> edges_;
};

/// Unordered pair stored as (min, max).
using UndirectedEdge = std::pair<NodeId, NodeId>;

/// Simple undirected graph with self-loops, over ids 0..n_nodes-1.
///
/// A self-loop adds 1 to the degree of its node.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;

  /// Edges may be given in any order and orientation; duplicates collapse.
  UndirectedGraph(std::size_t n_nodes, std::vector<UndirectedEdge> edges) : n_nodes_(n_nodes) {
    for (auto& e : edges) {
      if (e.first > e.second) std::swap(e.first, e.second);
      if (e.second >= n_nodes) throw domain_error("undirected graph: node id out of range");
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
    degree_.assign(n_nodes_, 0);
    for (const auto& [i, j] : edges_) {
      ++degree_[i];
      if (i != j) ++degree_[j];
    }
  }

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t n_edges() const noexcept { return edges_.size(); }
  const std::vector<UndirectedEdge>& edges() const noexcept { return edges_; }
  const std::vector<std::uint64_t>& degree() const noexcept { return degree_; }

  std::size_t n_self_loops() const {
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(), [](const UndirectedEdge& e) { return e.first == e.second; }));
  }

  bool has_edge(NodeId i, NodeId j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges_.begin(), edges_.end(), UndirectedEdge{i, j});
  }

  bool has_isolated_nodes() const {
    return std::find(degree_.begin(), degree_.end(), 0u) != degree_.end();
  }

  friend bool operator==(const UndirectedGraph& a, const UndirectedGraph& b) {
    return a.n_nodes_ == b.n_nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_nodes_ = 0;
  std::vector<UndirectedEdge> edges_;
  std::vector<std::uint64_t> degree_;
};

struct BipartiteEdge {
  NodeId left;
  NodeId right;
  std::uint64_t count;  // 1 for binary graphs

  friend bool operator==(const BipartiteEdge&, const BipartiteEdge&) = default;
};

/// Edges only between a left and a right node set.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  /// Duplicate (left, right) pairs are merged and their counts added.
  BipartiteGraph(std::size_t n_left, std::size_t n_right, std::vector<BipartiteEdge> edges)
      : n_left_(n_left), n_right_(n_right) {
    for (const auto& e : edges) {
      if (e.left >= n_left || e.right >= n_right) throw domain_error("bipartite graph: node id out of range");
    }
    std::sort(edges.begin(), edges.end(), [](const BipartiteEdge& a, const BipartiteEdge& b) {
      return std::pair{a.left, a.right} < std::pair{b.left, b.right};
    });
    for (const auto& e : edges) {
      if (e.count == 0) continue;
      if (!edges_.empty() && edges_.back().left == e.left && edges_.back().right == e.right) {
        edges_.back().count += e.count;
      } else {
        edges_.push_back(e);
      }
    }
    degree_left_.assign(n_left_, 0);
    degree_right_.assign(n_right_, 0);
    for (const auto& e : edges_) {
      ++degree_left_[e.left];
      ++degree_right_[e.right];
    }
  }

  std::size_t n_left() const noexcept { return n_left_; }
  std::size_t n_right() const noexcept { return n_right_; }
  std::size_t n_edges() const noexcept { return edges_.size(); }
  const std::vector<BipartiteEdge>& edges() const noexcept { return edges_; }
  const std::vector<std::uint64_t>& degree_left() const noexcept { return degree_left_; }
  const std::vector<std::uint64_t>& degree_right() const noexcept { return degree_right_; }

  /// Same edge set with every count set to 1.
  BipartiteGraph binarized() const {
    auto e = edges_;
    for (auto& x : e) x.count = 1;
    return BipartiteGraph(n_left_, n_right_, std::move(e));
  }

 private:
  std::size_t n_left_ = 0;
  std::size_t n_right_ = 0;
  std::vector<BipartiteEdge> edges_;
  std::vector<std::uint64_t> degree_left_;
  std::vector<std::uint64_t> degree_right_;
};

/// Finite part of an atomic random measure: atoms (w_i, theta_i) plus the
/// mass w* of everything not represented.
struct CrmSample {
  std::vector<double> weights;
  std::optional<std::vector<double>> locations;
  double remainder_mass = 0.0;

  double represented_mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
  double total_mass() const { return represented_mass() + remainder_mass; }
};

// ---------------------------------------------------------------------------
// Transforms and statistics
// ---------------------------------------------------------------------------

/// z_ij = min(n_ij + n_ji, 1).
inline UndirectedGraph to_undirected(const DirectedMultigraph& d) {
  std::vector<UndirectedEdge> edges;
  edges.reserve(d.edges().size());
  for (const auto& e : d.edges()) edges.emplace_back(e.from, e.to);
  return UndirectedGraph(d.n_nodes(), std::move(edges));
}

/// Removes nodes of degree zero and relabels the rest in increasing id order.
/// `kept`, if given, receives the old id of every new node.
inline UndirectedGraph drop_isolated(const UndirectedGraph& g, std::vector<NodeId>* kept = nullptr) {
  std::vector<NodeId> remap(g.n_nodes(), 0);
  std::vector<NodeId> old_ids;
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    if (g.degree()[i] > 0) {
      remap[i] = static_cast<NodeId>(old_ids.size());
      old_ids.push_back(static_cast<NodeId>(i));
    }
  }
  std::vector<UndirectedEdge> edges;
  edges.reserve(g.n_edges());
  for (const auto& [i, j] : g.edges()) edges.emplace_back(remap[i], remap[j]);
  UndirectedGraph out(old_ids.size(), std::move(edges));
  if (kept) *kept = std::move(old_ids);
  return out;
}

/// Applies the relabeling i -> perm[i].
inline UndirectedGraph permute(const UndirectedGraph& g, std::span<const NodeId> perm) {
  if (perm.size() != g.n_nodes()) throw domain_error("permute: permutation size mismatch");
  std::vector<UndirectedEdge> edges;
  edges.reserve(g.n_edges());
  for (const auto& [i, j] : g.edges()) edges.emplace_back(perm[i], perm[j]);
  return UndirectedGraph(g.n_nodes(), std::move(edges));
}

namespace detail {

// Replaces colour values by their dense ranks, so colours never depend on
// node labels.
template <class Sig>
std::size_t rank_colours(const std::vector<Sig>& sig, std::vector<std::uint64_t>& colour) {
  auto uniq = sig;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  for (std::size_t i = 0; i < sig.size(); ++i) {
    colour[i] = static_cast<std::uint64_t>(std::lower_bound(uniq.begin(), uniq.end(), sig[i]) - uniq.begin());
  }
  return uniq.size();
}

// Colour refinement to the coarsest equitable partition finer than `colour`.
inline std::size_t refine_colours(const std::vector<std::vector<NodeId>>& adj, std::vector<std::uint64_t>& colour) {
  const std::size_t n = adj.size();
  std::size_t n_colours = rank_colours(colour, colour);
  for (;;) {
    std::vector<std::vector<std::uint64_t>> sig(n);
    for (std::size_t i = 0; i < n; ++i) {
      sig[i].reserve(adj[i].size() + 1);
      for (NodeId j : adj[i]) sig[i].push_back(colour[j]);
      std::sort(sig[i].begin(), sig[i].end());
      sig[i].insert(sig[i].begin(), colour[i]);
    }
    const std::size_t next = rank_colours(sig, colour);
    if (next == n_colours) return next;
    n_colours = next;
  }
}

}  // namespace detail

/// Label-independent node order by colour refinement with individualization.
/// Returns perm with perm[old] = new.
///
/// Nodes are coloured by (degree, self-loop) and refined by neighbour
/// colours; while a colour class has several members, its member with the
/// smallest input id is split off and refinement resumes. The result is
/// canonical whenever every such split picks among automorphic nodes, which
/// holds for all but rare highly regular graphs. Quadratic in the worst case.
inline std::vector<NodeId> canonical_order(const UndirectedGraph& g) {
  const std::size_t n = g.n_nodes();
  std::vector<std::vector<NodeId>> adj(n);
  std::vector<std::uint64_t> colour(n);
  for (std::size_t i = 0; i < n; ++i) colour[i] = 2 * g.degree()[i];
  for (const auto& [i, j] : g.edges()) {
    if (i == j) {
      colour[i] |= 1;
      continue;
    }
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::size_t n_colours = detail::refine_colours(adj, colour);
  while (n_colours < n) {
    std::vector<std::size_t> size(n_colours, 0);
    for (auto c : colour) ++size[c];
    std::uint64_t target = 0;
    while (size[target] == 1) ++target;
    std::size_t chosen = 0;
    while (colour[chosen] != target) ++chosen;
    for (auto& c : colour) c = 2 * c + 1;
    colour[chosen] -= 1;
    n_colours = detail::refine_colours(adj, colour);
  }
  std::vector<NodeId> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<NodeId>(colour[i]);
  return perm;
}

/// degree -> number of nodes with that degree.
inline std::map<std::uint64_t, std::uint64_t> degree_histogram(const UndirectedGraph& g) {
  std::map<std::uint64_t, std::uint64_t> h;
  for (auto d : g.degree()) ++h[d];
  return h;
}

/// Per-node incident directed-edge counts; a self-edge counts twice.
inline std::vector<std::uint64_t> multigraph_degrees(const DirectedMultigraph& d) {
  std::vector<std::uint64_t> deg(d.n_nodes(), 0);
  for (const auto& e : d.edges()) {
    deg[e.from] += e.count;
    deg[e.to] += e.count;
  }
  return deg;
}

/// Element j-1 is the fraction of nodes with multigraph degree j, j = 1..j_max.
inline std::vector<double> multigraph_degree_fractions(const DirectedMultigraph& d, std::size_t j_max) {
  if (j_max < 1) throw domain_error("multigraph_degree_fractions: j_max must be >= 1");
  std::vector<double> frac(j_max, 0.0);
  if (d.n_nodes() == 0) return frac;
  for (auto k : multigraph_degrees(d)) {
    if (k >= 1 && k <= j_max) frac[k - 1] += 1.0;
  }
  for (auto& f : frac) f /= static_cast<double>(d.n_nodes());
  return frac;
}

/// Probability of at least one edge between disjoint node groups A and B.
inline double group_link_probability(const CrmSample& s, std::span<const NodeId> a, std::span<const NodeId> b) {
  std::unordered_set<NodeId> in_a(a.begin(), a.end());
  double wa = 0.0;
  for (NodeId i : in_a) {
    if (i >= s.weights.size()) throw domain_error("group_link_probability: node id out of range");
    wa += s.weights[i];
  }
  double wb = 0.0;
  std::unordered_set<NodeId> in_b;
  for (NodeId j : b) {
    if (j >= s.weights.size()) throw domain_error("group_link_probability: node id out of range");
    if (in_a.count(j)) throw overlap_error("group_link_probability: groups overlap at node " + std::to_string(j));
    if (in_b.insert(j).second) wb += s.weights[j];
  }
  return -std::expm1(-2.0 * wa * wb);
}

}  // namespace ggpgraph

#endif  // GGPGRAPH_GRAPH_HPP
