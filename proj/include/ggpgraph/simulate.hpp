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

// Generative paths for GGP graphs.
//
//   truncated   atoms above eps by the inverse Levy method, then the
//               conditional Poisson construction D | W ~ PP(W x W)
//   urn         exact Chinese-restaurant construction, gamma process only
//   kallenberg  pairwise thinning of the marks, z_ij ~ Bernoulli(M(i, j))
//   compound    finite-activity (sigma < 0) and Dirac special cases

#ifndef GGPGRAPH_SIMULATE_HPP
#define GGPGRAPH_SIMULATE_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ggpgraph/crm.hpp"
#include "ggpgraph/error.hpp"
#include "ggpgraph/graph.hpp"
#include "ggpgraph/rng.hpp"

namespace ggpgraph {

enum class SimPath { truncated, urn, kallenberg, compound_poisson };

inline std::string to_string(SimPath p) {
  switch (p) {
    case SimPath::truncated: return "truncated";
    case SimPath::urn: return "urn";
    case SimPath::kallenberg: return "kallenberg";
    case SimPath::compound_poisson: return "compound-poisson";
  }
  return "?";
}

inline SimPath parse_sim_path(const std::string& s) {
  if (s == "truncated") return SimPath::truncated;
  if (s == "urn") return SimPath::urn;
  if (s == "kallenberg") return SimPath::kallenberg;
  if (s == "compound-poisson") return SimPath::compound_poisson;
  throw domain_error("unknown simulation path '" + s + "'");
}

struct SimConfig {
  GgpParams params{300.0, 0.5, 1.0};
  double truncation_eps = 1e-6;
  std::uint64_t seed = 0;
  SimPath path = SimPath::truncated;
  bool include_self_loops = true;
};

/// Probability 1 - exp(-2 w_i w_j) of an edge between distinct nodes, or
/// 1 - exp(-w_i^2) of a self-loop.
inline double link_probability(double wi, double wj, bool self_loop = false) {
  return -std::expm1(-(self_loop ? 1.0 : 2.0) * wi * wj);
}

/// Atoms of the GGP restricted to [0, alpha] with weight above eps, in
/// decreasing order.
///
/// The marks of a unit-rate Poisson process on [0, alpha rho_bar(eps)] are
/// mapped through rho_bar^{-1}(. / alpha). When 0 < sigma and tau > 0 the
/// same law is obtained faster by mapping marks through the closed-form
/// stable inverse and keeping each atom with probability exp(-tau w). The
/// expected mass below eps is stored as remainder_mass; it is not used to
/// generate edges.
inline CrmSample sample_crm_truncated(const GgpParams& p, double eps, RngStream& rng) {
  if (!(eps > 0.0)) throw domain_error("truncation eps must be positive");
  CrmSample s;
  s.remainder_mass = mass_below(p, eps);
  const double sigma = p.sigma();
  const double tau = p.tau();
  std::vector<double> w;
  if (sigma > 0.0 && tau > 0.0) {
    const GgpParams stable(p.alpha(), sigma, 0.0);
    const double c = sigma * std::tgamma(1.0 - sigma) / p.alpha();
    const double horizon = p.alpha() * tail_intensity(stable, eps);
    w.reserve(static_cast<std::size_t>(horizon + 6.0 * std::sqrt(horizon) + 16.0));
    for (double g = rng.exponential(); g < horizon; g += rng.exponential()) {
      const double x = std::pow(c * g, -1.0 / sigma);
      if (rng.uniform() < std::exp(-tau * x) && x > eps) w.push_back(x);
    }
  } else {
    const double horizon = p.alpha() * tail_intensity(p, eps);
    w.reserve(static_cast<std::size_t>(horizon + 6.0 * std::sqrt(horizon) + 16.0));
    double prev = 0.0;
    for (double g = rng.exponential(); g < horizon; g += rng.exponential()) {
      prev = inv_tail_intensity(p, g / p.alpha(), prev);
      // rounding in the inverse can land a hair below eps at the horizon
      if (prev > eps) w.push_back(prev);
    }
  }
  std::vector<double> loc(w.size());
  for (auto& x : loc) x = p.alpha() * rng.uniform();
  s.weights = std::move(w);
  s.locations = std::move(loc);
  return s;
}

/// All atoms of a finite-activity GGP (sigma < 0): Poisson(alpha tau^sigma / -sigma)
/// atoms with i.i.d. Gamma(-sigma, tau) weights.
inline CrmSample sample_crm_finite(const GgpParams& p, RngStream& rng) {
  if (!p.finite_activity()) throw domain_error("sample_crm_finite: needs sigma < 0");
  CrmSample s;
  const std::uint64_t k = rng.poisson(p.alpha() * levy_total_mass(p));
  s.weights.resize(k);
  for (auto& w : s.weights) w = rng.gamma(-p.sigma(), p.tau());
  std::vector<double> loc(k);
  for (auto& x : loc) x = p.alpha() * rng.uniform();
  s.locations = std::move(loc);
  return s;
}

/// Exact atoms when sigma < 0, truncated atoms otherwise.
inline CrmSample sample_crm(const GgpParams& p, double eps, RngStream& rng) {
  return p.finite_activity() ? sample_crm_finite(p, rng) : sample_crm_truncated(p, eps, rng);
}

/// D | W ~ PP(W x W) restricted to the represented atoms.
///
/// Node ids follow the order of first appearance among the 2 D* endpoints;
/// `node_atom`, if given, receives the atom index of every node.
inline DirectedMultigraph sample_directed_conditional(const CrmSample& s, RngStream& rng,
                                                      std::vector<std::size_t>* node_atom = nullptr) {
  const double mass = s.represented_mass();
  if (!(mass > 0.0)) throw degenerate_mass("conditional Poisson graph: total mass is zero");
  const std::uint64_t n_edges = rng.poisson(mass * mass);
  std::discrete_distribution<std::size_t> pick(s.weights.begin(), s.weights.end());
  constexpr NodeId unseen = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> id(s.weights.size(), unseen);
  std::vector<std::size_t> atoms;
  std::vector<std::pair<NodeId, NodeId>> pairs(n_edges);
  auto label = [&](std::size_t a) {
    if (id[a] == unseen) {
      id[a] = static_cast<NodeId>(atoms.size());
      atoms.push_back(a);
    }
    return id[a];
  };
  for (auto& e : pairs) {
    e.first = label(pick(rng));
    e.second = label(pick(rng));
  }
  DirectedMultigraph d(atoms.size(), pairs);
  if (node_atom) *node_atom = std::move(atoms);
  return d;
}

struct GgpGraphDraw {
  UndirectedGraph graph;
  DirectedMultigraph multigraph;
  CrmSample sample;
  std::vector<std::size_t> node_atom;  // node id -> index into sample.weights
};

inline UndirectedGraph without_self_loops(const UndirectedGraph& g, std::vector<NodeId>* kept = nullptr) {
  std::vector<UndirectedEdge> edges;
  edges.reserve(g.n_edges());
  for (const auto& e : g.edges()) {
    if (e.first != e.second) edges.push_back(e);
  }
  return drop_isolated(UndirectedGraph(g.n_nodes(), std::move(edges)), kept);
}

/// CRM atoms -> directed multigraph -> undirected graph.
inline GgpGraphDraw sample_undirected_ggp(const SimConfig& cfg, RngStream& rng) {
  GgpGraphDraw out;
  out.sample = sample_crm(cfg.params, cfg.truncation_eps, rng);
  if (out.sample.weights.empty()) return out;
  out.multigraph = sample_directed_conditional(out.sample, rng, &out.node_atom);
  out.graph = to_undirected(out.multigraph);
  if (!cfg.include_self_loops) {
    std::vector<NodeId> kept;
    out.graph = without_self_loops(out.graph, &kept);
    std::vector<std::size_t> atoms(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) atoms[i] = out.node_atom[kept[i]];
    out.node_atom = std::move(atoms);
  }
  return out;
}

/// Exact gamma-process multigraph by the urn: W* ~ Gamma(alpha, tau),
/// D* ~ Poisson(W*^2), endpoints from a Chinese restaurant process with
/// concentration alpha.
inline DirectedMultigraph sample_gamma_urn(double alpha, double tau, RngStream& rng) {
  if (!(alpha > 0.0)) throw non_positive_alpha("urn: alpha must be positive");
  if (!(tau > 0.0)) throw domain_error("urn: tau must be positive");
  const double w = rng.gamma(alpha, tau);
  const std::uint64_t n_edges = rng.poisson(w * w);
  std::vector<NodeId> endpoints;
  endpoints.reserve(2 * n_edges);
  NodeId n_nodes = 0;
  for (std::uint64_t k = 0; k < 2 * n_edges; ++k) {
    const double n = static_cast<double>(k);
    if (rng.uniform() * (alpha + n) < alpha) {
      endpoints.push_back(n_nodes++);
    } else {
      // picking a previous endpoint uniformly selects node j w.p. m_j / n
      const auto idx = static_cast<std::size_t>(rng.uniform() * n);
      endpoints.push_back(endpoints[std::min<std::size_t>(idx, k - 1)]);
    }
  }
  std::vector<std::pair<NodeId, NodeId>> pairs(n_edges);
  for (std::uint64_t e = 0; e < n_edges; ++e) pairs[e] = {endpoints[2 * e], endpoints[2 * e + 1]};
  return DirectedMultigraph(n_nodes, pairs);
}

inline DirectedMultigraph sample_gamma_urn(const GgpParams& p, RngStream& rng) {
  if (p.sigma() != 0.0) throw domain_error("urn: exact urn is implemented for sigma = 0 only");
  return sample_gamma_urn(p.alpha(), p.tau(), rng);
}

/// Pairwise thinning: z_ij = 1 w.p. 1 - exp(-2 w_i w_j), z_ii = 1 w.p.
/// 1 - exp(-w_i^2), with w_i = rho_bar^{-1}(theta_i / alpha) for unit-rate
/// marks theta_i <= alpha rho_bar(eps). Isolated marks are dropped. Cost is
/// quadratic in the number of marks.
inline UndirectedGraph sample_kallenberg(const GgpParams& p, double eps, RngStream& rng,
                                         bool include_self_loops = true,
                                         std::vector<double>* node_weights = nullptr) {
  if (p.finite_activity()) throw domain_error("kallenberg: use the compound Poisson path for sigma < 0");
  const CrmSample s = sample_crm_truncated(p, eps, rng);
  const auto& w = s.weights;
  const std::size_t k = w.size();
  std::vector<UndirectedEdge> edges;
  for (std::size_t i = 0; i < k; ++i) {
    if (include_self_loops && rng.uniform() < link_probability(w[i], w[i], true)) {
      edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(i));
    }
    for (std::size_t j = i + 1; j < k; ++j) {
      if (rng.uniform() < link_probability(w[i], w[j])) {
        edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
      }
    }
  }
  std::vector<NodeId> kept;
  UndirectedGraph g = drop_isolated(UndirectedGraph(k, std::move(edges)), &kept);
  if (node_weights) {
    node_weights->resize(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) (*node_weights)[i] = w[kept[i]];
  }
  return g;
}

/// n ~ Poisson(alpha) points with i.i.d. weights H^{-1}(U_i); edges
/// Bernoulli(1 - exp(-2 w_i w_j)), self-loops Bernoulli(1 - exp(-w_i^2)).
/// `n_points`, if given, receives n before isolated points are dropped.
inline UndirectedGraph sample_compound_poisson_graph(double alpha, const std::function<double(double)>& weight_quantile,
                                                     RngStream& rng, bool include_self_loops = true,
                                                     std::size_t* n_points = nullptr) {
  if (!(alpha > 0.0)) throw non_positive_alpha("compound Poisson graph: alpha must be positive");
  const std::uint64_t n = rng.poisson(alpha);
  std::vector<double> w(n);
  for (auto& x : w) x = weight_quantile(rng.uniform());
  std::vector<UndirectedEdge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    if (include_self_loops && rng.uniform() < link_probability(w[i], w[i], true)) {
      edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(i));
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < link_probability(w[i], w[j])) {
        edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
      }
    }
  }
  if (n_points) *n_points = n;
  return drop_isolated(UndirectedGraph(n, std::move(edges)));
}

/// Dirac Levy measure at w0: an Erdos-Renyi graph on Poisson(alpha) points
/// with edge probability 1 - exp(-2 w0^2).
inline UndirectedGraph sample_er_equivalent(double alpha, double w0, RngStream& rng, bool include_self_loops = true,
                                            std::size_t* n_points = nullptr) {
  if (!(w0 > 0.0)) throw domain_error("er: w0 must be positive");
  return sample_compound_poisson_graph(alpha, [w0](double) { return w0; }, rng, include_self_loops, n_points);
}

/// Classical G(n, p) without self-loops; isolated nodes are dropped.
inline UndirectedGraph sample_gnp(std::size_t n, double p, RngStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw domain_error("gnp: p must lie in [0, 1]");
  std::vector<UndirectedEdge> edges;
  if (p > 0.0) {
    // geometric skipping over the n(n-1)/2 pairs in lexicographic order
    const double log_q = std::log1p(-p);
    std::int64_t v = 1, w = -1;
    const auto nn = static_cast<std::int64_t>(n);
    while (v < nn) {
      w += 1 + (p < 1.0 ? static_cast<std::int64_t>(std::floor(std::log(rng.uniform()) / log_q)) : 0);
      while (w >= v && v < nn) {
        w -= v;
        ++v;
      }
      if (v < nn) edges.emplace_back(static_cast<NodeId>(w), static_cast<NodeId>(v));
    }
  }
  return drop_isolated(UndirectedGraph(n, std::move(edges)));
}

struct BipartiteDraw {
  BipartiteGraph graph;       // binary
  BipartiteGraph multigraph;  // counts n_ij
  CrmSample left;
  CrmSample right;
  std::vector<std::size_t> left_atom;
  std::vector<std::size_t> right_atom;
};

/// D | W, W' ~ PP(W x W') given the atoms of both sides.
inline BipartiteDraw sample_bipartite_conditional(CrmSample left, CrmSample right, RngStream& rng) {
  BipartiteDraw out;
  out.left = std::move(left);
  out.right = std::move(right);
  const double wl = out.left.represented_mass();
  const double wr = out.right.represented_mass();
  if (!(wl > 0.0) || !(wr > 0.0)) return out;
  const std::uint64_t n_edges = rng.poisson(wl * wr);
  std::discrete_distribution<std::size_t> pick_l(out.left.weights.begin(), out.left.weights.end());
  std::discrete_distribution<std::size_t> pick_r(out.right.weights.begin(), out.right.weights.end());
  constexpr NodeId unseen = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> id_l(out.left.weights.size(), unseen), id_r(out.right.weights.size(), unseen);
  auto label = [](std::vector<NodeId>& id, std::vector<std::size_t>& atoms, std::size_t a) {
    if (id[a] == unseen) {
      id[a] = static_cast<NodeId>(atoms.size());
      atoms.push_back(a);
    }
    return id[a];
  };
  std::vector<BipartiteEdge> edges(n_edges);
  for (auto& e : edges) {
    e.left = label(id_l, out.left_atom, pick_l(rng));
    e.right = label(id_r, out.right_atom, pick_r(rng));
    e.count = 1;
  }
  out.multigraph = BipartiteGraph(out.left_atom.size(), out.right_atom.size(), std::move(edges));
  out.graph = out.multigraph.binarized();
  return out;
}

/// Independent CRMs on the two sides, then the conditional Poisson draw.
inline BipartiteDraw sample_bipartite(const GgpParams& p, const GgpParams& p_prime, double eps, RngStream& rng) {
  CrmSample left = sample_crm(p, eps, rng);
  CrmSample right = sample_crm(p_prime, eps, rng);
  return sample_bipartite_conditional(std::move(left), std::move(right), rng);
}

/// Undirected graph from any path selected in the config.
inline UndirectedGraph sample_graph(const SimConfig& cfg, RngStream& rng) {
  const GgpParams& p = cfg.params;
  switch (cfg.path) {
    case SimPath::truncated:
      return sample_undirected_ggp(cfg, rng).graph;
    case SimPath::urn: {
      UndirectedGraph g = to_undirected(sample_gamma_urn(p, rng));
      return cfg.include_self_loops ? g : without_self_loops(g);
    }
    case SimPath::kallenberg:
      return sample_kallenberg(p, cfg.truncation_eps, rng, cfg.include_self_loops);
    case SimPath::compound_poisson: {
      if (!p.finite_activity()) throw domain_error("compound Poisson path needs sigma < 0");
      const double shape = -p.sigma();
      const double rate = p.tau();
      auto quantile = [shape, rate](double u) { return boost::math::gamma_p_inv(shape, u) / rate; };
      return sample_compound_poisson_graph(p.alpha() * levy_total_mass(p), quantile, rng, cfg.include_self_loops);
    }
  }
  throw domain_error("unknown simulation path");
}

}  // namespace ggpgraph

#endif  // GGPGRAPH_SIMULATE_HPP
